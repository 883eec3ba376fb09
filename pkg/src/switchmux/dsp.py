"""Deterministic signal utilities shared by every other module.

DFT conventions, exact fractional delay, band-limited resampling, complex
AWGN and a counter-based seeded RNG. Everything here is pure: same inputs,
same outputs, on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # splitmix64 finalizer; integer-only so it is platform independent.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass
class Rng:
    """Counter-based random stream keyed by (master_seed, stream_id).

    Two Rng values built with the same pair produce identical draw
    sequences. Derived child streams (``derive``) are statistically
    independent of the parent and of each other; trials and purposes get
    their own stream_id, so concurrent use never shares mutable state.
    """

    master_seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0 <= self.stream_id <= _MASK64:
            raise ValueError("stream_id must fit in 64 bits")

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = self.master_seed | (self.stream_id << 64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def derive(self, purpose: int) -> "Rng":
        """Child stream for a sub-task; deterministic in (stream_id, purpose)."""
        mixed = _splitmix64(self.stream_id ^ _splitmix64(purpose & _MASK64))
        return Rng(self.master_seed, mixed)

    def normal_complex(self, shape) -> np.ndarray:
        """Circularly-symmetric complex normal, unit variance per element."""
        g = self.generator
        re = g.standard_normal(shape)
        im = g.standard_normal(shape)
        return (re + 1j * im) / np.sqrt(2.0)

    def standard_normal(self, shape) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def uniform(self, low: float, high: float, shape=None) -> np.ndarray:
        return self.generator.uniform(low, high, shape)

    def integers(self, low: int, high: int, shape=None) -> np.ndarray:
        return self.generator.integers(low, high, shape)

    def bits(self, n: int) -> np.ndarray:
        """n random payload bits as an int array of 0/1."""
        return self.generator.integers(0, 2, n).astype(np.int64)


@dataclass(frozen=True)
class SampleStream:
    """Complex baseband samples at a fixed sample rate."""

    samples: np.ndarray
    rate_hz: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a non-empty 1-D vector")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be positive")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")

    def __len__(self) -> int:
        return self.samples.size


def dft(x: np.ndarray) -> np.ndarray:
    """Forward DFT, no normalization. Bin k is frequency k*rate/N with the
    upper half read as negative frequencies (numpy fft layout)."""
    x = np.asarray(x)
    if x.size < 1:
        raise ValueError("dft of empty vector")
    return np.fft.fft(x)


def idft(x: np.ndarray) -> np.ndarray:
    """Inverse DFT with 1/N normalization (inverse of dft)."""
    x = np.asarray(x)
    if x.size < 1:
        raise ValueError("idft of empty vector")
    return np.fft.ifft(x)


def signed_bins(n: int) -> np.ndarray:
    """Signed bin indices in fft order: [0, 1, .., n/2-1, -n/2, .., -1].

    For even n the single bin n/2 is read as -n/2 (no Nyquist split); the
    fractional-delay and resampling operators below share this convention,
    which is what keeps them exact inverses of one another.
    """
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


def fractional_delay(x: SampleStream, delay_samples: float) -> SampleStream:
    """Delay a stream by a (possibly fractional) number of samples.

    Circular: multiplies DFT bin f by e^{-j2*pi*f*delay/N} with signed f, so
    the output content is x[n - delay] under periodic extension.
    """
    if not np.isfinite(delay_samples):
        raise ValueError("delay must be finite")
    n = len(x)
    if not abs(delay_samples) < n / 2:
        raise ValueError("|delay_samples| must be < length/2")
    if delay_samples == 0:
        return x
    f = signed_bins(n)
    shifted = np.fft.ifft(np.fft.fft(x.samples) * np.exp(-2j * np.pi * f * delay_samples / n))
    return SampleStream(shifted, x.rate_hz)


def upsample(x: SampleStream, factor: int) -> SampleStream:
    """Exact band-limited upsampling by an integer factor.

    Frequency-domain zero insertion: the N input bins land on the central
    zone of the N*factor grid (bin N/2 goes to -N/2), everything else is
    zero. Output sample factor*n equals input sample n exactly.
    """
    if factor < 1 or int(factor) != factor:
        raise ValueError("factor must be a positive integer")
    if factor == 1:
        return x
    n = len(x)
    spec = np.fft.fft(x.samples)
    out = np.zeros(n * factor, dtype=np.complex128)
    out[signed_bins(n)] = spec
    return SampleStream(np.fft.ifft(out) * factor, x.rate_hz * factor)


def add_awgn(x: SampleStream, noise_power: float, rng: Rng) -> SampleStream:
    """Add circularly-symmetric complex Gaussian noise of per-sample
    variance noise_power; noise_power = 0 returns the input unchanged."""
    if noise_power < 0:
        raise ValueError("noise_power must be >= 0")
    if noise_power == 0:
        return x
    noise = rng.normal_complex(len(x)) * np.sqrt(noise_power)
    return SampleStream(x.samples + noise, x.rate_hz)
