import numpy as np
import pytest

from switchmux.despread import time_despread
from switchmux.dsp import Rng, SampleStream, upsample
from switchmux.frontend import (
    FrontendConfig,
    SwitchMatrix,
    capture_hybrid,
    capture_physical,
    capture_switched,
    hybrid_weights,
    noise_power_for,
    quantize,
)

NOISELESS = FrontendConfig(insertion_loss_db=0.0)


def random_streams(m, n, seed, rate=10e6):
    g = np.random.Generator(np.random.Philox(key=seed))
    return [
        SampleStream(g.standard_normal(n) + 1j * g.standard_normal(n), rate)
        for _ in range(m)
    ]


class TestSwitchMatrix:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            SwitchMatrix(np.array([[2, 0], [0, 1]]))

    def test_rejects_silent_column(self):
        with pytest.raises(ValueError):
            SwitchMatrix(np.array([[1, 0], [1, 0]]))

    def test_identity(self):
        s = SwitchMatrix.identity(4)
        assert np.array_equal(s.entries, np.eye(4, dtype=int))

    def test_row_hex_lsb_is_slot_zero(self):
        s = SwitchMatrix(np.array([[1, 0, 1, 0], [0, 1, 1, 1]]))
        assert s.row_hex(0) == "5"
        assert s.row_hex(1) == "E"
        assert s.to_control_word() == "5E"

    def test_wide_rows_use_two_digits(self):
        rows = np.array(
            [[1, 0, 0, 0, 0, 0, 0, 1], [0, 1, 1, 1, 1, 1, 1, 0]], dtype=int
        )
        s = SwitchMatrix(rows)
        assert s.row_hex(0) == "81"
        assert s.to_control_word() == "817E"

    def test_control_word_round_trip(self):
        g = np.random.Generator(np.random.Philox(key=1))
        for K in (1, 2, 4, 8, 12):
            entries = g.integers(0, 2, (6, K))
            entries[0] = 1  # keep all columns populated
            s = SwitchMatrix(entries)
            back = SwitchMatrix.from_control_word(s.to_control_word(), 6, K)
            assert np.array_equal(back.entries, s.entries)

    def test_from_control_word_rejects_extra_bits(self):
        with pytest.raises(ValueError):
            SwitchMatrix.from_control_word("F", 1, 2)


class TestCaptureSwitched:
    def test_single_antenna_single_slot_identity(self):
        (x,) = random_streams(1, 64, 2)
        y = capture_switched([x], SwitchMatrix(np.array([[1]])), NOISELESS, Rng(1))
        assert y.rate_hz == x.rate_hz
        assert np.max(np.abs(y.samples - x.samples)) < 1e-12

    def test_identity_matrix_interleaves_interpolated_antennas(self):
        streams = random_streams(4, 32, 3)
        y = capture_switched(streams, SwitchMatrix.identity(4), NOISELESS, Rng(1))
        assert y.rate_hz == streams[0].rate_hz * 4
        for k in range(4):
            up = upsample(streams[k], 4).samples
            assert np.max(np.abs(y.samples[k::4] - up[k::4])) < 1e-12

    def test_shared_slot_sums_antennas(self):
        streams = random_streams(2, 32, 4)
        S = SwitchMatrix(np.array([[1, 0], [1, 1]]))
        y = capture_switched(streams, S, NOISELESS, Rng(1))
        a = upsample(streams[0], 2).samples
        b = upsample(streams[1], 2).samples
        assert np.max(np.abs(y.samples[0::2] - (a + b)[0::2])) < 1e-12
        assert np.max(np.abs(y.samples[1::2] - b[1::2])) < 1e-12

    def test_insertion_loss_scales_amplitude(self):
        streams = random_streams(1, 32, 5)
        cfg = FrontendConfig(insertion_loss_db=6.0)
        y = capture_switched(streams, SwitchMatrix(np.array([[1]])), cfg, Rng(1))
        assert np.max(np.abs(y.samples - streams[0].samples * 10 ** (-0.3))) < 1e-12

    def test_partition_completeness(self):
        # columns partition the antennas: every output sample is the sum
        # of exactly the antennas of its slot
        streams = random_streams(4, 32, 6)
        S = SwitchMatrix(np.array([[1, 0], [1, 0], [0, 1], [0, 1]]))
        y = capture_switched(streams, S, NOISELESS, Rng(1))
        ups = [upsample(s, 2).samples for s in streams]
        assert np.max(np.abs(y.samples[0::2] - (ups[0] + ups[1])[0::2])) < 1e-12
        assert np.max(np.abs(y.samples[1::2] - (ups[2] + ups[3])[1::2])) < 1e-12

    def test_linearity_in_antenna_streams(self):
        s1 = random_streams(2, 32, 7)
        s2 = random_streams(2, 32, 8)
        S = SwitchMatrix(np.array([[1, 0], [0, 1]]))
        mixed = [SampleStream(a.samples + b.samples, a.rate_hz) for a, b in zip(s1, s2)]
        got = capture_switched(mixed, S, NOISELESS, Rng(1)).samples
        want = (
            capture_switched(s1, S, NOISELESS, Rng(1)).samples
            + capture_switched(s2, S, NOISELESS, Rng(1)).samples
        )
        assert np.max(np.abs(got - want)) < 1e-12

    def test_despread_recovers_physical_chains(self):
        # identity S, no loss, no noise: switched + despread equals the
        # dedicated-chain capture
        streams = random_streams(4, 64, 9)
        y = capture_switched(streams, SwitchMatrix.identity(4), NOISELESS, Rng(1))
        chains = time_despread(y, 4)
        phys = capture_physical(streams, 4, NOISELESS, Rng(1))
        for k in range(4):
            err = np.max(np.abs(chains.chains[k].samples - phys[k].samples))
            assert err < 1e-6

    def test_noise_calibration_after_despread(self):
        # a despreaded chain must see the configured per-user SNR
        n, K, snr_db = 30000, 4, 10.0
        streams = random_streams(K, n, 10)
        cfg = FrontendConfig(insertion_loss_db=0.0, snr_db=snr_db, num_users=1)
        y = capture_switched(streams, SwitchMatrix.identity(K), cfg, Rng(2, 5))
        chains = time_despread(y, K)
        p_sig = np.mean([np.mean(np.abs(s.samples) ** 2) for s in streams])
        noise = np.concatenate(
            [chains.chains[k].samples - streams[k].samples for k in range(K)]
        )
        snr_hat = 10 * np.log10(p_sig / np.mean(np.abs(noise) ** 2))
        assert abs(snr_hat - snr_db) < 0.3

    def test_quantizer_applied(self):
        streams = random_streams(1, 64, 11)
        cfg = FrontendConfig(insertion_loss_db=0.0, quantizer_bits=4)
        y = capture_switched(streams, SwitchMatrix(np.array([[1]])), cfg, Rng(1))
        assert len(set(np.round(y.samples.real, 12))) <= 16

    def test_rejects_mismatched_dimensions(self):
        with pytest.raises(ValueError):
            capture_switched(random_streams(3, 32, 12), SwitchMatrix.identity(4), NOISELESS, Rng(1))

    def test_rejects_oversample_mismatch(self):
        cfg = FrontendConfig(oversample_factor=2)
        with pytest.raises(ValueError):
            capture_switched(random_streams(4, 32, 13), SwitchMatrix.identity(4), cfg, Rng(1))


class TestCapturePhysical:
    def test_noiseless_chains_equal_antennas(self):
        streams = random_streams(3, 32, 14)
        out = capture_physical(streams, 3, NOISELESS, Rng(1))
        for k in range(3):
            assert np.array_equal(out[k].samples, streams[k].samples)

    def test_chain_count(self):
        streams = random_streams(8, 16, 15)
        assert len(capture_physical(streams, 8, NOISELESS, Rng(1))) == 8

    def test_noise_independent_across_chains(self):
        streams = [SampleStream(np.zeros(10**5, complex), 1e6) for _ in range(2)]
        cfg = FrontendConfig(snr_db=0.0, signal_power=1.0)
        a, b = capture_physical(streams, 2, cfg, Rng(3, 1))
        rho = np.corrcoef(np.abs(a.samples), np.abs(b.samples))[0, 1]
        assert abs(rho) < 0.01

    def test_rejects_too_many_chains(self):
        with pytest.raises(ValueError):
            capture_physical(random_streams(2, 16, 16), 3, NOISELESS, Rng(1))


class TestCaptureHybrid:
    def test_one_hot_columns_match_physical(self):
        streams = random_streams(4, 32, 17)
        w = np.zeros((4, 2), dtype=complex)
        w[0, 0] = 1.0
        w[1, 1] = 1.0
        got = capture_hybrid(streams, w, "fully", NOISELESS, Rng(1))
        want = capture_physical(streams, 2, NOISELESS, Rng(1))
        for k in range(2):
            assert np.max(np.abs(got[k].samples - want[k].samples)) < 1e-12

    def test_conjugate_combining_gain(self):
        # M-antenna coherent combining buys 10*log10(M) of SNR
        M, n, snr_db = 8, 60000, 5.0
        g = np.random.Generator(np.random.Philox(key=18))
        h = np.exp(2j * np.pi * g.uniform(0, 1, M))
        x = (g.standard_normal(n) + 1j * g.standard_normal(n)) / np.sqrt(2)
        streams = [SampleStream(h[m] * x, 1e6) for m in range(M)]
        w = np.exp(-1j * np.angle(h))[:, None]
        cfg = FrontendConfig(snr_db=snr_db, signal_power=1.0)
        (chain,) = capture_hybrid(streams, w, "fully", cfg, Rng(4, 2))
        clean = M * x
        noise = chain.samples - clean
        snr_out = 10 * np.log10(np.mean(np.abs(clean) ** 2) / np.mean(np.abs(noise) ** 2))
        assert abs(snr_out - (snr_db + 10 * np.log10(M))) < 0.3

    def test_partially_connected_touches_blocks_only(self):
        M, K = 64, 8
        streams = random_streams(M, 16, 19)
        w = np.ones((M, K), dtype=complex)
        out = capture_hybrid(streams, w, "partially", NOISELESS, Rng(1))
        for k in range(K):
            want = np.sum([s.samples for s in streams[k * 8 : (k + 1) * 8]], axis=0)
            assert np.max(np.abs(out[k].samples - want)) < 1e-12

    def test_rejects_non_unit_modulus(self):
        streams = random_streams(2, 16, 20)
        with pytest.raises(ValueError):
            capture_hybrid(streams, np.full((2, 1), 0.5 + 0j), "fully", NOISELESS, Rng(1))

    def test_steering_weights_shapes_and_modes(self):
        g = np.random.Generator(np.random.Philox(key=21))
        H = g.standard_normal((4, 16)) + 1j * g.standard_normal((4, 16))
        w_full = hybrid_weights(H, 4, "fully")
        assert w_full.shape == (16, 4)
        assert np.allclose(np.abs(w_full), 1.0)
        w_part = hybrid_weights(H, 4, "partially")
        for k in range(4):
            nz = np.nonzero(w_part[:, k])[0]
            assert np.array_equal(nz, np.arange(k * 4, (k + 1) * 4))


class TestNoiseAndQuantizer:
    def test_noise_power_uses_explicit_reference(self):
        cfg = FrontendConfig(snr_db=10.0, signal_power=2.0)
        assert noise_power_for(cfg, []) == pytest.approx(0.2)

    def test_noise_power_measured_fallback(self):
        streams = [SampleStream(2 * np.ones(100, complex), 1e6)]
        cfg = FrontendConfig(snr_db=0.0, num_users=2)
        assert noise_power_for(cfg, streams) == pytest.approx(2.0)

    def test_quantizer_error_bounded(self):
        g = np.random.Generator(np.random.Philox(key=22))
        x = g.standard_normal(1000) + 1j * g.standard_normal(1000)
        q = quantize(x, 8)
        scale = max(np.max(np.abs(x.real)), np.max(np.abs(x.imag)))
        step = 2 * scale / 256
        assert np.max(np.abs(q.real - x.real)) <= step / 2 + 1e-12
        assert np.max(np.abs(q.imag - x.imag)) <= step / 2 + 1e-12
