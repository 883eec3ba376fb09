"""Link quality metrics and the receiver power model.

SINR is computed against the ground-truth effective channel, the way
hardware testbeds measure it from known preambles.  The power model prices
the analog front end, the switch network and the ADCs; its constants
reproduce published receiver totals and stay configurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equalize import CombinerMatrix, EffectiveChannel
from .waveform import DATA_BINS, USED_BINS

SINR_CAP_DB = 80.0

# ADC figure of merit calibrated so a 12-bit converter burns 100 mW per
# 10 MHz of sampled spectrum.
DEFAULT_ADC_BITS = 12
DEFAULT_ADC_FOM = 0.1 / (2**DEFAULT_ADC_BITS * 1e7)

RFE_SINGLE_CHAIN_MW = 354.0
RFE_PER_CHAIN_MW = 408.0
SWITCH_PER_ANTENNA_MW = 1.0

POWER_ARCHS = ("switched", "dbf", "hbf", "fdma")


@dataclass(frozen=True)
class TrialMetrics:
    """Everything measured from one Monte-Carlo trial."""

    sinr_db: np.ndarray
    mean_sinr_db: float
    evm_pct: float
    ber: float
    goodput_bps: float
    capacity_bps: float
    se_bps_per_hz: float


@dataclass(frozen=True)
class PowerReport:
    """Receiver power split; bits_per_joule is filled once goodput is known."""

    rfe_mw: float
    switch_mw: float
    adc_mw: float
    bits_per_joule: float = 0.0

    def __post_init__(self) -> None:
        if min(self.rfe_mw, self.switch_mw, self.adc_mw) < 0:
            raise ValueError("power terms must be non-negative")

    @property
    def total_mw(self) -> float:
        return self.rfe_mw + self.switch_mw + self.adc_mw


def _cap_linear(lin: np.ndarray) -> np.ndarray:
    return np.minimum(lin, 10.0 ** (SINR_CAP_DB / 10.0))


def sinr(
    comb: CombinerMatrix,
    truth: EffectiveChannel,
    noise_power: float = 0.0,
    noise_cov: np.ndarray | None = None,
) -> np.ndarray:
    """Per-user post-combining SINR in dB against the true channel.

    P[u, j, f] = sum_c V[u, c, f] * Heff[c, j, f]; per bin the wanted power
    is |P_uu|^2, interference is the other columns, and the noise term is
    the combined per-chain noise ||V_u||^2 * noise_power.  Front ends whose
    chain noise is correlated (phase-shifter combining) pass the chains x
    chains covariance instead; the scalar form equals noise_power * I.
    Bins average in the linear domain over data subcarriers; values cap at
    +80 dB.
    """
    if noise_power < 0:
        raise ValueError("noise_power must be non-negative")
    data_cols = np.searchsorted(USED_BINS, DATA_BINS)
    v = comb.weights[:, :, data_cols]
    h = truth.heff[:, :, data_cols]
    p = np.einsum("ucf,cjf->ujf", v, h)
    power = np.abs(p) ** 2
    num_users = power.shape[0]
    idx = np.arange(num_users)
    wanted = power[idx, idx]
    interference = power.sum(axis=1) - wanted
    if noise_cov is None:
        noise = np.sum(np.abs(v) ** 2, axis=1) * noise_power
    else:
        noise_cov = np.asarray(noise_cov, dtype=np.complex128)
        if noise_cov.shape != (v.shape[1], v.shape[1]):
            raise ValueError("noise_cov must be chains x chains")
        noise = np.real(np.einsum("ucf,cd,udf->uf", v, noise_cov, v.conj()))
        noise = np.maximum(noise, 0.0)
    denom = interference + noise
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = np.where(denom > 0, wanted / np.maximum(denom, 1e-300), np.inf)
    lin = _cap_linear(np.where(wanted == 0, 0.0, lin))
    per_user = _cap_linear(lin.mean(axis=1))
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(per_user)


def evm(equalized: np.ndarray, reference: np.ndarray) -> float:
    """RMS error vector magnitude as a percentage of the reference RMS."""
    equalized = np.asarray(equalized)
    reference = np.asarray(reference)
    if equalized.shape != reference.shape:
        raise ValueError("grids must share a shape")
    ref_power = np.mean(np.abs(reference) ** 2)
    if ref_power == 0:
        raise ValueError("reference grid is silent")
    err_power = np.mean(np.abs(equalized - reference) ** 2)
    return float(100.0 * np.sqrt(err_power / ref_power))


def capacity(sinr_db: np.ndarray, bandwidth_hz) -> float:
    """Shannon sum rate: sum_u B_u * log2(1 + SINR_u)."""
    sinr_db = np.atleast_1d(np.asarray(sinr_db, dtype=float))
    bandwidth = np.broadcast_to(np.asarray(bandwidth_hz, dtype=float), sinr_db.shape)
    if np.any(bandwidth <= 0):
        raise ValueError("bandwidth must be positive")
    lin = 10.0 ** (sinr_db / 10.0)
    return float(np.sum(bandwidth * np.log2(1.0 + lin)))


def adc_power(fom: float, bits: int, sample_rate_hz: float) -> float:
    """Converter power in watts: FoM * 2^bits * F_s (linear in rate)."""
    if fom <= 0 or bits <= 0 or sample_rate_hz <= 0:
        raise ValueError("fom, bits and sample_rate_hz must be positive")
    return fom * (2.0**bits) * sample_rate_hz


def power(
    arch: str,
    num_antennas: int,
    num_chains: int,
    per_chain_bw_hz: float,
    adc_bits: int = DEFAULT_ADC_BITS,
    fom: float = DEFAULT_ADC_FOM,
) -> PowerReport:
    """Receiver power for one architecture.

    Single-RF-chain receivers (switched, fdma) pay one front end; per-chain
    receivers (dbf, hbf) pay one per chain.  Only the switched design pays
    the 1 mW-per-antenna switch network.  ADC power scales linearly with
    the total sampled bandwidth num_chains * per_chain_bw_hz regardless of
    whether that spectrum lives in one fast converter or many slow ones.
    """
    if arch not in POWER_ARCHS:
        raise ValueError(f"unknown architecture {arch!r}")
    if num_antennas < 1 or num_chains < 1 or per_chain_bw_hz <= 0:
        raise ValueError("antennas, chains and bandwidth must be positive")
    if arch in ("switched", "fdma"):
        rfe = RFE_SINGLE_CHAIN_MW
    else:
        rfe = RFE_PER_CHAIN_MW * num_chains
    switch = SWITCH_PER_ANTENNA_MW * num_antennas if arch == "switched" else 0.0
    adc = 1000.0 * adc_power(fom, adc_bits, num_chains * per_chain_bw_hz)
    return PowerReport(rfe_mw=rfe, switch_mw=switch, adc_mw=adc)


def goodput_and_ber(recovered: list, sent: list, airtime_s: float) -> tuple:
    """Packet-level goodput (bps) and raw post-decode BER.

    A user's payload counts toward goodput only when every recovered bit is
    correct; airtime covers the payload symbols of the shared frame.
    """
    if len(recovered) != len(sent):
        raise ValueError("one recovered vector per sent vector")
    if airtime_s <= 0:
        raise ValueError("airtime must be positive")
    delivered = 0
    wrong = 0
    total = 0
    for got, want in zip(recovered, sent):
        got = np.asarray(got, dtype=np.int64)
        want = np.asarray(want, dtype=np.int64)
        if got.shape != want.shape:
            raise ValueError("payload length mismatch")
        mismatches = int(np.sum(got != want))
        wrong += mismatches
        total += want.size
        if mismatches == 0:
            delivered += want.size
    if total == 0:
        raise ValueError("empty payloads")
    return delivered / airtime_s, wrong / total


def bits_per_joule(goodput_bps: float, total_mw: float) -> float:
    """Energy efficiency: delivered bits per joule of receiver energy."""
    if total_mw <= 0:
        raise ValueError("total power must be positive")
    return goodput_bps / (total_mw / 1000.0)
