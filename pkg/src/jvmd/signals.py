"""Test signals, noise injection, the centre-frequency error metric and a
synthetic multi-emitter generator.

The emitter generator stands in for a recorded SEI dataset. Each emitter
distorts a shared base message with a fixed set of impairments:

1. memoryless nonlinearity ``x + sum_h c_h T_{h+2}(x)`` (Chebyshev terms, so a
   unit cosine gets an exact harmonic of relative amplitude ``c_h``),
2. IQ gain/phase imbalance applied to the analytic signal,
3. carrier frequency offset and a random-walk phase noise,

after which the real part is observed and calibrated white Gaussian noise
is added per frame.
"""
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev

from .errors import InvalidConfigError, InvalidInputError
from .joint import FrameBatch
from .spectral import RealFrame, as_frame

__all__ = [
    "TONE_FREQUENCIES_HZ",
    "tone_mixture",
    "add_awgn",
    "center_freq_error",
    "EmitterProfile",
    "synth_emitter_frames",
    "emitter_profiles",
    "preamble_message",
]

TONE_FREQUENCIES_HZ = (2.0, 24.0, 600.0)
_TONE_AMPLITUDES = (1.0, 0.25, 0.0625)


def tone_mixture(L=1500, sample_rate_hz=1500.0):
    """Noiseless ``cos(4 pi t) + cos(48 pi t) / 4 + cos(1200 pi t) / 16``."""
    if not sample_rate_hz > 2 * TONE_FREQUENCIES_HZ[-1]:
        raise InvalidConfigError(
            f"sample rate {sample_rate_hz} Hz does not resolve the {TONE_FREQUENCIES_HZ[-1]} Hz tone"
        )
    t = np.arange(L) / sample_rate_hz
    y = sum(a * np.cos(2 * np.pi * f * t) for a, f in zip(_TONE_AMPLITUDES, TONE_FREQUENCIES_HZ))
    return RealFrame(y, sample_rate_hz)


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _noise_std(x, snr_db):
    power = float(np.mean(np.square(x)))
    if power == 0.0:
        raise InvalidInputError("cannot set an SNR relative to a zero-power signal")
    return math.sqrt(power / 10.0 ** (snr_db / 10.0))


def _calibrated_noise(rng, x, snr_db):
    # Gaussian draw rescaled so its sample power hits the target exactly.
    std = _noise_std(x, snr_db)
    w = rng.standard_normal(x.shape[-1])
    return w * (std / math.sqrt(np.mean(np.square(w))))


def add_awgn(frame, snr_db, seed=None):
    """Add white Gaussian noise at ``snr_db`` relative to the frame's mean power.

    The noise is calibrated: a standard normal draw is rescaled so that its
    sample power equals ``power / 10**(snr_db / 10)``, making the realized
    SNR exact. ``snr_db = math.inf`` returns the input unchanged.
    Deterministic for a given ``seed`` (an int, ``SeedSequence`` or
    ``Generator``).
    """
    frame = as_frame(frame)
    if math.isinf(snr_db) and snr_db > 0:
        return frame
    rng = np.random.default_rng(seed)
    return RealFrame(frame.samples + _calibrated_noise(rng, frame.samples, snr_db), frame.sample_rate_hz)


def center_freq_error(estimated, actual):
    """Squared relative error ``sum_k ((f_k - f_ck) / f_ck)^2``.

    Both vectors are sorted ascending before pairing.
    """
    est = np.sort(np.asarray(estimated, dtype=np.float64).ravel())
    ref = np.sort(np.asarray(actual, dtype=np.float64).ravel())
    if est.shape != ref.shape:
        raise InvalidInputError(f"got {len(est)} estimates for {len(ref)} true frequencies")
    if np.any(ref == 0):
        raise InvalidInputError("true centre frequencies must be nonzero")
    return float(np.sum(((est - ref) / ref) ** 2))


@dataclass(frozen=True)
class EmitterProfile:
    """Fixed impairments of one transmitter.

    ``freq_offset`` is in cycles/sample, ``phase_noise_std`` in radians per
    sample of the phase random walk.
    """

    emitter_id: str
    iq_gain_imbalance: float = 0.0
    iq_phase_skew: float = 0.0
    harmonic_coeffs: tuple = ()
    freq_offset: float = 0.0
    phase_noise_std: float = 0.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.harmonic_coeffs)
        if any(abs(c) >= 1 for c in coeffs):
            raise InvalidConfigError("harmonic coefficients must have magnitude < 1")
        if not self.phase_noise_std >= 0:
            raise InvalidConfigError("phase_noise_std must be nonnegative")
        object.__setattr__(self, "harmonic_coeffs", coeffs)

    @property
    def is_identity(self):
        return (
            self.iq_gain_imbalance == 0
            and self.iq_phase_skew == 0
            and not any(self.harmonic_coeffs)
            and self.freq_offset == 0
            and self.phase_noise_std == 0
        )


def _analytic(x):
    n = x.shape[-1]
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1: n // 2] = 2.0
    else:
        h[1: (n + 1) // 2] = 2.0
    return np.fft.ifft(np.fft.fft(x, axis=-1) * h, axis=-1)


def _distort(x, profile, phase_walk):
    if profile.harmonic_coeffs:
        x = chebyshev.chebval(x, (0.0, 1.0) + profile.harmonic_coeffs)
    z = _analytic(x)
    g = 10.0 ** (profile.iq_gain_imbalance / 20.0)
    psi = profile.iq_phase_skew
    mu = 0.5 * (1.0 + g * np.exp(-1j * psi))
    nu = 0.5 * (1.0 - g * np.exp(1j * psi))
    z = mu * z + nu * np.conj(z)
    n = np.arange(x.shape[-1])
    z = z * np.exp(1j * (2.0 * np.pi * profile.freq_offset * n + phase_walk))
    return z.real


def synth_emitter_frames(profile, base_message, num_frames, snr_db, seed=None):
    """``num_frames`` noisy observations of ``base_message`` sent by ``profile``.

    The impairment parameters are identical for every frame; the phase-noise
    walk and the additive noise are drawn independently per frame.
    """
    base = as_frame(base_message)
    if profile.is_identity and math.isinf(snr_db) and snr_db > 0:
        return FrameBatch(tuple(base for _ in range(num_frames)))
    phase_seed, noise_seed = _seed_sequence(seed).spawn(2)
    phase_rng = np.random.default_rng(phase_seed)
    noise_rng = np.random.default_rng(noise_seed)
    L = len(base)
    frames = []
    for _ in range(num_frames):
        if profile.phase_noise_std > 0:
            walk = np.cumsum(phase_rng.normal(0.0, profile.phase_noise_std, L))
        else:
            walk = np.zeros(L)
        clean = _distort(base.samples, profile, walk)
        if not (math.isinf(snr_db) and snr_db > 0):
            clean = clean + _calibrated_noise(noise_rng, clean, snr_db)
        frames.append(RealFrame(clean, base.sample_rate_hz))
    return FrameBatch(tuple(frames))


def preamble_message(L=256, sample_rate_hz=1.0):
    """Fixed multi-tone burst shared by all synthetic emitters, peak-normalized to 1."""
    n = np.arange(L)
    x = (
        np.cos(2 * np.pi * 0.046875 * n)
        + 0.6 * np.cos(2 * np.pi * 0.1171875 * n + 0.7)
        + 0.4 * np.cos(2 * np.pi * 0.2109375 * n + 1.9)
    )
    return RealFrame(x / np.max(np.abs(x)), sample_rate_hz)


def emitter_profiles(num_emitters=10, separation=1.0, seed=0):
    """Deterministic set of distinct emitter profiles.

    ``separation`` scales every impairment; larger values make emitters
    easier to tell apart.
    """
    rng = np.random.default_rng(seed)
    profiles = []
    for i in range(num_emitters):
        h2, h3 = rng.uniform(0.01, 0.12, 2) * separation
        profiles.append(
            EmitterProfile(
                emitter_id=f"E{i:02d}",
                iq_gain_imbalance=float(rng.uniform(-1.0, 1.0) * separation),
                iq_phase_skew=float(rng.uniform(-0.1, 0.1) * separation),
                harmonic_coeffs=(min(h2, 0.9), min(h3, 0.9)),
                freq_offset=float(rng.uniform(-0.004, 0.004) * separation),
                phase_noise_std=1e-3,
            )
        )
    return profiles
