"""Discrete analytic-spectrum machinery shared by the VMD and JVMD solvers.

Conventions
-----------
* A frame of even length ``L`` is half-mirrored at both ends to length
  ``T = 2L`` before any transform.
* Frequencies are normalized, in cycles/sample of the mirrored frame:
  bin ``i`` sits at ``i / T``. Conversion to Hz happens only when reporting.
* The forward transform is unnormalized, the inverse carries ``1/T``.
* The analytic (positive-frequency) signal is realized by zeroing every bin
  with ``omega >= 1/2``; the DC bin is kept unchanged and the positive bins
  are *not* doubled.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidFrameError

__all__ = [
    "RealFrame",
    "AnalyticSpectrum",
    "as_frame",
    "mirror_extend",
    "analytic_spectrum",
    "synthesize_time",
    "frequency_grid",
    "positive_grid",
    "positive_spectrum",
    "synthesize_positive",
]


@dataclass(frozen=True, eq=False)
class RealFrame:
    """A finite, real, uniformly sampled signal of even length ``L >= 4``."""

    samples: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64)
        if x.ndim != 1:
            raise InvalidFrameError(f"frame must be one-dimensional, got shape {x.shape}")
        if len(x) < 4 or len(x) % 2:
            raise InvalidFrameError(f"frame length must be even and >= 4, got {len(x)}")
        if not np.all(np.isfinite(x)):
            raise InvalidFrameError("frame contains NaN or Inf samples")
        fs = float(self.sample_rate_hz)
        if not (np.isfinite(fs) and fs > 0):
            raise InvalidFrameError(f"sample rate must be positive, got {self.sample_rate_hz}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate_hz", fs)

    def __len__(self):
        return len(self.samples)

    def __eq__(self, other):
        if not isinstance(other, RealFrame):
            return NotImplemented
        return self.sample_rate_hz == other.sample_rate_hz and np.array_equal(
            self.samples, other.samples
        )


def as_frame(x, sample_rate_hz=1.0):
    """Return ``x`` unchanged if it is a :class:`RealFrame`, else wrap it."""
    if isinstance(x, RealFrame):
        return x
    return RealFrame(x, sample_rate_hz)


def frequency_grid(T):
    """Normalized frequencies ``i / T`` for ``i = 0 .. T-1``."""
    return np.arange(T) / T


def positive_grid(n):
    """Grid of the ``n`` retained bins of a length-``2n`` transform."""
    return np.arange(n) / (2 * n)


@dataclass(frozen=True, eq=False)
class AnalyticSpectrum:
    """``T`` complex coefficients with every bin at ``omega >= 1/2`` zeroed."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or len(c) < 2 or len(c) % 2:
            raise DimensionMismatchError(
                f"spectrum length must be even, got shape {c.shape}"
            )
        if np.any(c[len(c) // 2:] != 0):
            raise InvalidFrameError("analytic spectrum has energy at omega >= 1/2")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return len(self.coefficients)

    @property
    def grid(self):
        return frequency_grid(len(self.coefficients))

    @property
    def positive(self):
        """View of the retained bins ``0 .. T/2 - 1``."""
        return self.coefficients[: len(self.coefficients) // 2]

    @classmethod
    def from_positive(cls, half):
        half = np.asarray(half, dtype=np.complex128)
        return cls(np.concatenate([half, np.zeros_like(half)]))


def _mirror(x):
    h = x.shape[-1] // 2
    return np.concatenate([x[..., :h][..., ::-1], x, x[..., h:][..., ::-1]], axis=-1)


def mirror_extend(frame):
    """Half-reflect both ends so the result has length ``2L``.

    >>> mirror_extend(RealFrame([1, 2, 3, 4])).samples
    array([2., 1., 1., 2., 3., 4., 4., 3.])
    """
    frame = as_frame(frame)
    return RealFrame(_mirror(frame.samples), frame.sample_rate_hz)


def analytic_spectrum(frame):
    """One-sided DFT of an (already mirror-extended) frame."""
    frame = as_frame(frame)
    T = len(frame)
    half = np.fft.rfft(frame.samples)[: T // 2]
    return AnalyticSpectrum.from_positive(half)


def synthesize_time(spectrum, original_length):
    """Inverse of ``analytic_spectrum(mirror_extend(.))``; returns the centre ``L`` samples."""
    if not isinstance(spectrum, AnalyticSpectrum):
        spectrum = AnalyticSpectrum(spectrum)
    L = int(original_length)
    if len(spectrum) != 2 * L:
        raise DimensionMismatchError(
            f"spectrum of length {len(spectrum)} cannot come from a frame of length {L}"
        )
    return RealFrame(synthesize_positive(spectrum.positive, L))


def positive_spectrum(samples):
    """Retained bins of the mirrored transform, batched over leading axes.

    ``samples`` has shape ``(..., L)``; the result has shape ``(..., L)``
    (``T/2 = L`` bins).
    """
    x = _mirror(np.asarray(samples, dtype=np.float64))
    T = x.shape[-1]
    return np.ascontiguousarray(np.fft.rfft(x, axis=-1)[..., : T // 2])


def synthesize_positive(half, L):
    """Time-domain centre samples from retained bins, batched over leading axes."""
    half = np.asarray(half, dtype=np.complex128)
    if half.shape[-1] != L:
        raise DimensionMismatchError(f"expected {L} retained bins, got {half.shape[-1]}")
    T = 2 * L
    # the Nyquist bin is zero by construction
    padded = np.concatenate([half, np.zeros(half.shape[:-1] + (1,), complex)], axis=-1)
    x = np.fft.irfft(padded, n=T, axis=-1)
    return x[..., L // 2: L // 2 + L]
