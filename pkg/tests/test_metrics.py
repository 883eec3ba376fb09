"""Metric arithmetic and power model tests."""

import numpy as np
import pytest

from switchmux.equalize import CombinerMatrix, EffectiveChannel
from switchmux.metrics import (
    DEFAULT_ADC_FOM,
    PowerReport,
    adc_power,
    bits_per_joule,
    capacity,
    evm,
    goodput_and_ber,
    power,
    sinr,
)
from switchmux.waveform import USED_BINS


def flat_effective(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    heff = np.repeat(matrix[:, :, None], USED_BINS.size, axis=2)
    return EffectiveChannel(heff=heff, bins=USED_BINS.copy())


def identity_combiner(n):
    w = np.repeat(np.eye(n, dtype=complex)[:, :, None], USED_BINS.size, axis=2)
    return CombinerMatrix(weights=w, method="zf", erased=np.zeros(USED_BINS.size, bool))


class TestSinr:
    def test_ten_to_one_leakage_reads_20db(self):
        truth = flat_effective([[1.0, 0.1], [0.1, 1.0]])
        got = sinr(identity_combiner(2), truth, noise_power=0.0)
        assert np.allclose(got, 20.0, atol=1e-9)

    def test_perfect_separation_caps_at_80db(self):
        truth = flat_effective(np.eye(3))
        got = sinr(identity_combiner(3), truth)
        assert np.allclose(got, 80.0)

    def test_noise_term_uses_combiner_norm(self):
        truth = flat_effective(np.eye(1))
        w = np.full((1, 1, USED_BINS.size), 2.0, dtype=complex)
        comb = CombinerMatrix(weights=w, method="zf", erased=np.zeros(USED_BINS.size, bool))
        # signal |2|^2, noise |2|^2 * 0.1 -> SINR = 1/0.1
        got = sinr(comb, truth, noise_power=0.1)
        assert np.allclose(got, 10.0, atol=1e-9)

    def test_more_noise_never_raises_sinr(self):
        rng = np.random.Generator(np.random.Philox(key=5))
        truth = flat_effective(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        comb = identity_combiner(3)
        levels = [sinr(comb, truth, noise_power=p) for p in (0.0, 0.01, 0.1, 1.0)]
        for weaker, stronger in zip(levels[1:], levels[:-1]):
            assert np.all(weaker <= stronger + 1e-12)

    def test_rejects_negative_noise(self):
        with pytest.raises(ValueError):
            sinr(identity_combiner(2), flat_effective(np.eye(2)), noise_power=-1.0)

    def test_white_covariance_matches_scalar_path(self):
        rng = np.random.Generator(np.random.Philox(key=6))
        truth = flat_effective(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        comb = identity_combiner(2)
        scalar = sinr(comb, truth, noise_power=0.2)
        cov = sinr(comb, truth, noise_cov=0.2 * np.eye(2))
        assert np.allclose(scalar, cov)

    def test_correlated_noise_follows_quadratic_form(self):
        truth = flat_effective([[1.0], [1.0]])
        w = np.ones((1, 2, USED_BINS.size), dtype=complex)
        comb = CombinerMatrix(weights=w, method="zf", erased=np.zeros(USED_BINS.size, bool))
        # fully correlated chains: noise |1+1|^2 * 0.1, signal |2|^2
        got = sinr(comb, truth, noise_cov=0.1 * np.ones((2, 2)))
        assert np.allclose(got, 10.0 * np.log10(4.0 / 0.4))


class TestEvm:
    def test_known_error_ratio(self):
        ref = np.ones((2, 3, 4), dtype=complex)
        noisy = ref + 0.1
        assert abs(evm(noisy, ref) - 10.0) < 1e-9

    def test_silent_reference_rejected(self):
        with pytest.raises(ValueError):
            evm(np.ones(4), np.zeros(4))


class TestCapacity:
    def test_four_users_at_15db_reads_about_200mbps(self):
        got = capacity(np.full(4, 15.0), 10e6)
        assert 195e6 <= got <= 205e6
        assert abs(got - 201.1e6) < 0.2e6

    def test_vanishing_sinr_vanishes(self):
        assert capacity(np.array([-200.0]), 10e6) < 1.0

    def test_doubling_bandwidth_doubles_capacity(self):
        one = capacity(np.array([12.0, 9.0]), 10e6)
        two = capacity(np.array([12.0, 9.0]), 20e6)
        assert abs(two - 2 * one) < 1e-6

    def test_rejects_bad_bandwidth(self):
        with pytest.raises(ValueError):
            capacity(np.array([10.0]), 0.0)


class TestPowerModel:
    def test_switched_receiver_total(self):
        report = power("switched", num_antennas=8, num_chains=4, per_chain_bw_hz=10e6)
        assert (report.rfe_mw, report.switch_mw, report.adc_mw) == (354.0, 8.0, 400.0)
        assert report.total_mw == 762.0

    def test_four_chain_digital_total(self):
        report = power("dbf", num_antennas=4, num_chains=4, per_chain_bw_hz=10e6)
        assert report.total_mw == 2032.0

    def test_eight_chain_digital_total(self):
        report = power("dbf", num_antennas=8, num_chains=8, per_chain_bw_hz=10e6)
        assert report.total_mw == 4064.0

    def test_single_chain_wideband_total(self):
        report = power("fdma", num_antennas=1, num_chains=1, per_chain_bw_hz=40e6)
        assert report.total_mw == 754.0

    def test_hybrid_pays_per_chain_front_end_but_no_switches(self):
        report = power("hbf", num_antennas=64, num_chains=8, per_chain_bw_hz=10e6)
        assert report.rfe_mw == 408.0 * 8
        assert report.switch_mw == 0.0

    def test_unknown_arch_rejected(self):
        with pytest.raises(ValueError):
            power("mimo", 4, 4, 10e6)

    def test_adc_linearity_and_resolution(self):
        base = adc_power(DEFAULT_ADC_FOM, 12, 10e6)
        assert abs(base - 0.1) < 1e-12
        assert abs(adc_power(DEFAULT_ADC_FOM, 12, 40e6) - 4 * base) < 1e-12
        assert abs(adc_power(DEFAULT_ADC_FOM, 13, 10e6) - 2 * base) < 1e-12

    def test_negative_terms_rejected(self):
        with pytest.raises(ValueError):
            PowerReport(rfe_mw=-1.0, switch_mw=0.0, adc_mw=0.0)


class TestGoodput:
    def airtime_and_payloads(self, symbols=50, users=4):
        bits_per_user = 96 * symbols - 6
        airtime = symbols * 8e-6
        rng = np.random.Generator(np.random.Philox(key=9))
        sent = [rng.integers(0, 2, bits_per_user) for _ in range(users)]
        return airtime, sent

    def test_error_free_four_users_near_48mbps(self):
        airtime, sent = self.airtime_and_payloads()
        goodput, ber = goodput_and_ber([s.copy() for s in sent], sent, airtime)
        assert ber == 0.0
        assert abs(goodput - 48e6) < 0.2e6

    def test_one_corrupted_user_drops_to_three_quarters(self):
        airtime, sent = self.airtime_and_payloads()
        got = [s.copy() for s in sent]
        got[2][17] ^= 1
        goodput, ber = goodput_and_ber(got, sent, airtime)
        assert abs(goodput - 36e6) < 0.2e6
        assert 0 < ber < 1e-4

    def test_random_guessing_gives_half_ber(self):
        airtime, sent = self.airtime_and_payloads(symbols=100, users=1)
        rng = np.random.Generator(np.random.Philox(key=10))
        got = [rng.integers(0, 2, sent[0].size)]
        goodput, ber = goodput_and_ber(got, sent, airtime)
        assert goodput == 0.0
        assert abs(ber - 0.5) < 0.02

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            goodput_and_ber([np.zeros(3, int)], [np.zeros(4, int)], 1e-3)


class TestEnergyEfficiency:
    def test_fixed_goodput_decreasing_in_power(self):
        values = [bits_per_joule(48e6, mw) for mw in (754.0, 762.0, 2032.0, 4064.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_unit_conversion(self):
        assert abs(bits_per_joule(48e6, 1000.0) - 48e6) < 1e-6
