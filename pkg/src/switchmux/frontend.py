"""Analog front ends: switched single-chain capture and baselines.

capture_switched models the system under study: M antennas gated at K times
the per-user bandwidth by one-hot slot codes, passively combined, and
sampled by a single chain at K*B. capture_physical (one chain per antenna)
and capture_hybrid (per-antenna phase shifters into fewer chains) are the
comparison front ends.

Noise convention: snr_db is the per-user SNR a B-rate chain sees. The
switched path injects noise once, after combining, at K*B; despreading one
slot then sees exactly that per-sample variance, so a virtual chain and a
physical chain are noise-equivalent by construction. The hybrid front end
instead injects noise per antenna (each antenna has its own LNA ahead of
the phase-shifter network), which is what gives coherent combining its
10*log10(M) SNR gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dsp import Rng, SampleStream, upsample


@dataclass(frozen=True)
class SwitchMatrix:
    """M x K binary antenna-to-slot assignment; rows are antennas."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2:
            raise ValueError("entries must be an M x K matrix")
        if not np.isin(entries, (0, 1)).all():
            raise ValueError("entries must be binary")
        if np.any(entries.sum(axis=0) == 0):
            raise ValueError("every slot column needs at least one antenna")

    @property
    def num_antennas(self) -> int:
        return self.entries.shape[0]

    @property
    def num_slots(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, K: int) -> "SwitchMatrix":
        return cls(np.eye(K, dtype=np.int64))

    def row_hex(self, antenna: int) -> str:
        """Row as a control nibble string, slot 0 at the LSB."""
        digits = max(1, math.ceil(self.num_slots / 4))
        value = int(np.sum(self.entries[antenna] << np.arange(self.num_slots)))
        return format(value, f"0{digits}X")

    def to_control_word(self) -> str:
        """Concatenated per-antenna hex rows, antenna 0 first."""
        return "".join(self.row_hex(m) for m in range(self.num_antennas))

    @classmethod
    def from_control_word(cls, word: str, num_antennas: int, num_slots: int) -> "SwitchMatrix":
        digits = max(1, math.ceil(num_slots / 4))
        if len(word) != num_antennas * digits:
            raise ValueError("control word length does not match M and K")
        entries = np.zeros((num_antennas, num_slots), dtype=np.int64)
        for m in range(num_antennas):
            value = int(word[m * digits : (m + 1) * digits], 16)
            if value >> num_slots:
                raise ValueError("control word sets bits beyond K slots")
            entries[m] = (value >> np.arange(num_slots)) & 1
        return cls(entries)


@dataclass(frozen=True)
class FrontendConfig:
    """Capture settings shared by all front ends.

    snr_db = None means noiseless. signal_power, when given, is the mean
    per-user per-antenna received power used to calibrate the noise
    variance; otherwise it is measured from the captured streams and
    num_users. quantizer_bits enables the uniform ADC quantizer (off by
    default; bit width otherwise only feeds the power model).
    """

    insertion_loss_db: float = 0.5
    snr_db: float | None = None
    quantizer_bits: int | None = None
    oversample_factor: int | None = None
    num_users: int = 1
    signal_power: float | None = None

    def __post_init__(self) -> None:
        if self.insertion_loss_db < 0:
            raise ValueError("insertion_loss_db must be >= 0")
        if self.oversample_factor is not None and self.oversample_factor < 1:
            raise ValueError("oversample_factor must be >= 1")
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        if self.quantizer_bits is not None and self.quantizer_bits < 1:
            raise ValueError("quantizer_bits must be >= 1")


def _check_streams(antenna_streams) -> tuple:
    if not antenna_streams:
        raise ValueError("need at least one antenna stream")
    rates = {s.rate_hz for s in antenna_streams}
    lengths = {len(s) for s in antenna_streams}
    if len(rates) != 1 or len(lengths) != 1:
        raise ValueError("antenna streams must share rate and length")
    return rates.pop(), lengths.pop()


def noise_power_for(cfg: FrontendConfig, antenna_streams) -> float:
    """Per-sample noise variance for a B-rate chain at cfg.snr_db."""
    if cfg.snr_db is None:
        return 0.0
    if cfg.signal_power is not None:
        p_ref = cfg.signal_power
    else:
        p_ref = float(
            np.mean([np.mean(np.abs(s.samples) ** 2) for s in antenna_streams])
        ) / cfg.num_users
    return p_ref / 10 ** (cfg.snr_db / 10)


def quantize(samples: np.ndarray, bits: int) -> np.ndarray:
    """Uniform midrise quantizer on I and Q, full scale at the peak."""
    scale = max(np.max(np.abs(samples.real)), np.max(np.abs(samples.imag)), 1e-30)
    levels = 2**bits
    step = 2 * scale / levels
    half = levels // 2

    def q(v):
        return (np.clip(np.floor(v / step), -half, half - 1) + 0.5) * step

    return q(samples.real) + 1j * q(samples.imag)


def capture_switched(
    antenna_streams: list, S: SwitchMatrix, cfg: FrontendConfig, rng: Rng
) -> SampleStream:
    """Gate, combine and sample M B-rate antenna streams on one K*B chain.

    Each stream is band-limited interpolated to K*B, multiplied
    sample-by-sample with its antenna's slot sequence, attenuated by the
    switch insertion loss, and summed. AWGN (and optionally a uniform
    quantizer) is applied to the combined stream.
    """
    rate, length = _check_streams(antenna_streams)
    if len(antenna_streams) != S.num_antennas:
        raise ValueError("one stream per switch-matrix row required")
    K = S.num_slots
    if cfg.oversample_factor is not None and cfg.oversample_factor != K:
        raise ValueError("oversample_factor disagrees with switch matrix slots")
    sigma2 = noise_power_for(cfg, antenna_streams)
    loss_amp = 10 ** (-cfg.insertion_loss_db / 20)
    total = np.zeros(length * K, dtype=np.complex128)
    reps = length  # one period of K slot samples per input sample
    for m, stream in enumerate(antenna_streams):
        gate = np.tile(S.entries[m], reps)
        total += upsample(stream, K).samples * gate
    total *= loss_amp
    if sigma2 > 0:
        # a slot that joins n antennas pays an n-way passive split before
        # the shared LNA, so referred to the unit combiner gain used above
        # its samples carry n times the single-branch noise power
        occupancy = np.tile(S.entries.sum(axis=0), reps).astype(np.float64)
        total = total + rng.normal_complex(total.size) * np.sqrt(sigma2 * occupancy)
    if cfg.quantizer_bits is not None:
        total = quantize(total, cfg.quantizer_bits)
    return SampleStream(total, rate * K)


def capture_physical(
    antenna_streams: list, num_chains: int, cfg: FrontendConfig, rng: Rng
) -> list:
    """One dedicated B-rate chain per antenna (first num_chains antennas),
    independent AWGN per chain, no switches and no insertion loss."""
    _check_streams(antenna_streams)
    if num_chains < 1 or num_chains > len(antenna_streams):
        raise ValueError("num_chains must be in [1, M]")
    sigma2 = noise_power_for(cfg, antenna_streams)
    out = []
    for k in range(num_chains):
        s = antenna_streams[k]
        if sigma2 > 0:
            noisy = s.samples + rng.normal_complex(len(s)) * np.sqrt(sigma2)
            s = SampleStream(noisy, s.rate_hz)
        out.append(s)
    return out


def hybrid_weights(H_ref: np.ndarray, num_chains: int, mode: str) -> np.ndarray:
    """Unit-modulus phase-shifter weights steering chain k at user k.

    H_ref is [users][antennas]; mode "partially" keeps only a contiguous
    block of M/num_chains antennas per chain.
    """
    K, M = H_ref.shape
    if num_chains != K:
        raise ValueError("one chain per user required for steering weights")
    w = np.exp(-1j * np.angle(H_ref)).T.copy()  # [antennas][chains]
    if mode == "partially":
        w *= _block_mask(M, num_chains)
    elif mode != "fully":
        raise ValueError("mode must be 'fully' or 'partially'")
    return w


def _block_mask(M: int, K: int) -> np.ndarray:
    if M % K != 0:
        raise ValueError("partially-connected mode needs K to divide M")
    mask = np.zeros((M, K))
    size = M // K
    for k in range(K):
        mask[k * size : (k + 1) * size, k] = 1.0
    return mask


def capture_hybrid(
    antenna_streams: list,
    weights: np.ndarray,
    mode: str,
    cfg: FrontendConfig,
    rng: Rng,
) -> list:
    """Phase-shifter front end: chain k = sum_m weights[m][k] * antenna_m.

    Noise enters per antenna (ahead of the combining network) and is
    therefore correlated across chains through the weights. Nonzero
    weights must be unit modulus; partially-connected mode zeroes weights
    outside contiguous M/K antenna blocks.
    """
    rate, length = _check_streams(antenna_streams)
    M = len(antenna_streams)
    weights = np.asarray(weights, dtype=np.complex128)
    if weights.ndim != 2 or weights.shape[0] != M:
        raise ValueError("weights must be M x K")
    if mode == "partially":
        weights = weights * _block_mask(M, weights.shape[1])
    elif mode != "fully":
        raise ValueError("mode must be 'fully' or 'partially'")
    nz = np.abs(weights[weights != 0])
    if nz.size and np.max(np.abs(nz - 1.0)) > 1e-9:
        raise ValueError("nonzero weights must be unit modulus")
    sigma2 = noise_power_for(cfg, antenna_streams)
    stack = np.stack([s.samples for s in antenna_streams])
    if sigma2 > 0:
        stack = stack + rng.normal_complex(stack.shape) * np.sqrt(sigma2)
    chains = weights.T @ stack
    return [SampleStream(chains[k], rate) for k in range(weights.shape[1])]
