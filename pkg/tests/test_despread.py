import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchmux.despread import freq_despread, reinterleave, spectrum_zones, time_despread
from switchmux.dsp import SampleStream


def random_stream(n, seed, rate=40e6):
    g = np.random.Generator(np.random.Philox(key=seed))
    return SampleStream(g.standard_normal(n) + 1j * g.standard_normal(n), rate)


class TestTimeDespread:
    def test_interleaved_constants(self):
        vals = np.array([1.0, 2.0, 3.0, 4.0])
        y = SampleStream(np.tile(vals, 8), 40e6)
        chains = time_despread(y, 4)
        for k in range(4):
            assert np.max(np.abs(chains.chains[k].samples - vals[k])) < 1e-9

    def test_k1_identity(self):
        y = random_stream(64, 1)
        chains = time_despread(y, 1)
        assert chains.num_chains == 1
        assert np.array_equal(chains.chains[0].samples, y.samples)

    def test_rate_contract(self):
        chains = time_despread(random_stream(64, 2, rate=40e6), 4)
        assert all(c.rate_hz == 10e6 for c in chains.chains)

    def test_tone_chains_align(self):
        n, K, f0 = 256, 4, 9
        tone = SampleStream(np.exp(2j * np.pi * f0 * np.arange(n) / n), 40e6)
        chains = time_despread(tone, K)
        ref = chains.chains[0].samples
        for k in range(1, K):
            dphi = np.angle(chains.chains[k].samples / ref)
            assert np.max(np.abs(dphi)) < 1e-9

    def test_round_trip_uncompensated(self):
        y = random_stream(96, 3)
        back = reinterleave(time_despread(y, 4, compensate=False))
        assert np.max(np.abs(back.samples - y.samples)) < 1e-12
        assert back.rate_hz == y.rate_hz

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            time_despread(random_stream(65, 4), 4)

    def test_slot_labels(self):
        chains = time_despread(random_stream(64, 5), 4)
        assert chains.slot_of_chain == [0, 1, 2, 3]


class TestSpectrumZones:
    def test_zone_partition_covers_all_bins(self):
        y = random_stream(64, 6)
        zones = spectrum_zones(y, 4)
        Y = np.fft.fft(y.samples)
        assert zones.shape == (4, 16)
        got = np.sort_complex(zones.reshape(-1))
        assert np.allclose(got, np.sort_complex(Y))

    def test_zone_zero_is_central_band(self):
        y = random_stream(64, 7)
        zones = spectrum_zones(y, 4)
        Y = np.fft.fft(y.samples)
        g = np.fft.fftfreq(16, 1 / 16).astype(int)
        assert np.allclose(zones[0], Y[g % 64])


class TestFreqDespread:
    def test_zero_input_zero_chains(self):
        y = SampleStream(np.zeros(64, dtype=complex), 40e6)
        chains = freq_despread(y, 4)
        for c in chains.chains:
            assert np.max(np.abs(c.samples)) < 1e-12

    def test_two_band_limited_signals_recovered(self):
        # K=2: slot signals band-limited to B/2 are recovered exactly
        n = 128
        g = np.random.Generator(np.random.Philox(key=8))
        specs = np.zeros((2, n), dtype=complex)
        occupied = np.r_[0:20, n - 20 : n]  # inside the central zone
        specs[0, occupied] = g.standard_normal(40) + 1j * g.standard_normal(40)
        specs[1, occupied] = g.standard_normal(40) + 1j * g.standard_normal(40)
        s = np.fft.ifft(specs, axis=1)  # at rate 2B, band-limited
        code = np.tile([1, 0], n // 2)
        y = SampleStream(s[0] * code + s[1] * np.roll(code, 1), 20e6)
        chains = freq_despread(y, 2)
        # chain k equals slot signal k decimated at phase 0
        assert np.max(np.abs(chains.chains[0].samples - s[0][0::2])) < 1e-9
        assert np.max(np.abs(chains.chains[1].samples - s[1][0::2])) < 1e-9

    @pytest.mark.parametrize("K", [1, 2, 4, 8])
    def test_matches_time_despread(self, K):
        for seed in range(10):
            y = random_stream(32 * K, (K, seed))
            a = time_despread(y, K)
            b = freq_despread(y, K)
            for k in range(K):
                err = np.max(np.abs(a.chains[k].samples - b.chains[k].samples))
                assert err < 1e-9

    @given(
        st.sampled_from([1, 2, 4, 8]),
        st.integers(2, 40),
        st.integers(0, 2**32),
    )
    @settings(max_examples=60, deadline=None)
    def test_path_equivalence_property(self, K, n_per_chain, seed):
        y = random_stream(K * n_per_chain, seed)
        a = time_despread(y, K)
        b = freq_despread(y, K)
        for k in range(K):
            assert np.max(np.abs(a.chains[k].samples - b.chains[k].samples)) < 1e-9
