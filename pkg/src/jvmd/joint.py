"""Joint variational mode decomposition of ``M`` frames.

All frames share the ``K`` modes and their centre frequencies; each frame
``j`` carries its own noise estimate ``b_j`` and multiplier ``lambda_j``.
One iteration is the full mode loop (mode update then centroid update for
``k = 1..K``), then the full frame loop (noise update then multiplier update
for ``j = 1..M``), then the stopping measure. All variables start at zero.

The multiplier rule defaults to the principal complex cube root
``lambda_j <- cbrt(4 (Y_j - sum S - b_j + lambda_j / 2))``; plain dual ascent
is available for ablation and for the ``M = 1`` reduction to VMD.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError, InvalidConfigError, InvalidFrameError, InvalidInputError
from .spectral import (
    AnalyticSpectrum,
    RealFrame,
    as_frame,
    positive_grid,
    positive_spectrum,
    synthesize_positive,
)
from .vmd import _check_common, _full, _sorted_order, initial_omegas

__all__ = [
    "LAMBDA_RULES",
    "FrameBatch",
    "JvmdConfig",
    "JvmdResult",
    "JvmdSolver",
    "jvmd_decompose",
    "mode_update_jvmd",
    "noise_update",
    "lambda_update_jvmd",
    "principal_cbrt",
    "convergence_kappa",
]

LAMBDA_RULES = ("cube-root", "dual-ascent")
_RULE_CODES = {"cube-root": kernels.CUBE_ROOT, "dual-ascent": kernels.DUAL_ASCENT}


@dataclass(frozen=True, eq=False)
class FrameBatch:
    """``M >= 1`` time-aligned frames of equal length and sample rate."""

    frames: tuple

    def __post_init__(self):
        frames = tuple(as_frame(f) for f in self.frames)
        if not frames:
            raise InvalidInputError("a frame batch needs at least one frame")
        L, fs = len(frames[0]), frames[0].sample_rate_hz
        for f in frames[1:]:
            if len(f) != L or f.sample_rate_hz != fs:
                raise InvalidFrameError("frames in a batch must share length and sample rate")
        object.__setattr__(self, "frames", frames)

    @classmethod
    def from_array(cls, samples, sample_rate_hz=1.0):
        samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
        return cls(tuple(RealFrame(row, sample_rate_hz) for row in samples))

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, j):
        return self.frames[j]

    @property
    def frame_length(self):
        return len(self.frames[0])

    @property
    def sample_rate_hz(self):
        return self.frames[0].sample_rate_hz

    def as_array(self):
        return np.stack([f.samples for f in self.frames])


@dataclass(frozen=True)
class JvmdConfig:
    """Parameters of :func:`jvmd_decompose`.

    ``epsilon`` weights the per-frame noise energy; when omitted it defaults
    to ``1 / alpha`` so that ``alpha * epsilon = 1`` and the noise update
    takes half of the residual. ``tau`` is only used by the dual-ascent rule.
    """

    num_modes: int = 3
    alpha: float = 2000.0
    epsilon: float | None = None
    max_iters: int = 500
    tol: float = 1e-7
    omega_init: str = "zero"
    lambda_rule: str = "cube-root"
    tau: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        _check_common(self.num_modes, self.alpha, self.max_iters, self.tol, self.omega_init)
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 1.0 / self.alpha)
        if not self.epsilon > 0:
            raise InvalidConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.lambda_rule not in LAMBDA_RULES:
            raise InvalidConfigError(
                f"unknown lambda_rule {self.lambda_rule!r}; expected one of {LAMBDA_RULES}"
            )
        if not self.tau >= 0:
            raise InvalidConfigError(f"tau must be nonnegative, got {self.tau}")


@dataclass
class JvmdResult:
    """Shared modes (sorted by centre frequency) plus per-frame noise and multipliers.

    Spectra are stacked full-length analytic spectra: ``mode_spectra`` is
    ``(K, 2L)``, ``noise_estimates`` and ``multipliers`` are ``(M, 2L)``.
    """

    mode_spectra: np.ndarray
    modes: np.ndarray
    omegas: np.ndarray
    noise_estimates: np.ndarray
    multipliers: np.ndarray
    iterations: int
    kappa_history: list = field(default_factory=list)
    sample_rate_hz: float = 1.0
    converged: bool = True

    @property
    def num_modes(self):
        return len(self.omegas)

    @property
    def num_frames(self):
        return len(self.noise_estimates)

    @property
    def frequencies_hz(self):
        return self.omegas * self.sample_rate_hz

    def spectrum(self, k):
        return AnalyticSpectrum(self.mode_spectra[k])


class JvmdSolver:
    """Stepwise JVMD solver; :func:`jvmd_decompose` drives it to convergence."""

    def __init__(self, batch, config=None):
        if not isinstance(batch, FrameBatch):
            batch = FrameBatch.from_array(batch) if isinstance(batch, np.ndarray) else FrameBatch(tuple(batch))
        self.batch = batch
        self.config = config or JvmdConfig()
        cfg = self.config
        self.M = len(batch)
        self.L = batch.frame_length
        self.Y = positive_spectrum(batch.as_array())
        self.grid = positive_grid(self.L)
        self.S = np.zeros((cfg.num_modes, self.L), dtype=np.complex128)
        self.total = np.zeros(self.L, dtype=np.complex128)
        self.omegas = initial_omegas(cfg.num_modes, cfg.omega_init, cfg.seed)
        self.noise = np.zeros_like(self.Y)
        self.multipliers = np.zeros_like(self.Y)
        # sum_j (Y_j - b_j + lambda_j / 2) with b = lambda = 0
        self.usum = self.Y.sum(axis=0)
        self.noise_gain = 1.0 / (1.0 + cfg.alpha * cfg.epsilon)
        self.rule = _RULE_CODES[cfg.lambda_rule]
        self.n = 1
        self.kappa = np.inf
        self.kappa_history = []

    @property
    def done(self):
        return self.n >= self.config.max_iters or self.kappa <= self.config.tol

    def step(self):
        cfg = self.config
        prev = self.S.copy()
        kernels.mode_sweep(self.usum, float(self.M), self.S, self.total, self.omegas, self.grid, cfg.alpha)
        self.usum = kernels.frame_sweep(
            self.Y, self.total, self.noise, self.multipliers, self.noise_gain, self.rule, cfg.tau
        )
        self.n += 1
        k = kernels.kappa(self.S, prev)
        if not (np.isfinite(k) and np.all(np.isfinite(self.omegas)) and np.isfinite(self.total.sum())):
            raise DivergenceError(self.n)
        if not np.isfinite(self.usum.sum()):
            raise DivergenceError(self.n, "non-finite noise or multiplier estimate")
        self.kappa = k
        self.kappa_history.append(k)
        return k

    def run(self):
        while not self.done:
            self.step()
        return self.result()

    def result(self):
        order = _sorted_order(self.omegas)
        S = self.S[order]
        return JvmdResult(
            mode_spectra=_full(S),
            modes=synthesize_positive(S, self.L),
            omegas=self.omegas[order].copy(),
            noise_estimates=_full(self.noise),
            multipliers=_full(self.multipliers),
            iterations=self.n,
            kappa_history=list(self.kappa_history),
            sample_rate_hz=self.batch.sample_rate_hz,
            converged=self.kappa <= self.config.tol,
        )


def jvmd_decompose(batch, config=None, **params):
    """Jointly decompose a batch of frames into ``K`` shared modes.

    Parameters
    ----------
    batch : FrameBatch, sequence of frames, or 2-D array ``(M, L)``
    config : JvmdConfig, optional
        Keyword arguments build a config when omitted.

    Returns
    -------
    JvmdResult
    """
    if config is None:
        config = JvmdConfig(**params)
    elif params:
        raise TypeError("pass either a config or keyword parameters, not both")
    return JvmdSolver(batch, config).run()


def principal_cbrt(z):
    """Principal cube root ``|z|^(1/3) exp(i arg(z) / 3)``, ``arg`` in ``(-pi, pi]``."""
    return kernels.principal_cbrt(z)


def mode_update_jvmd(Y, modes, noise, multipliers, k, alpha, omega_k, grid=None):
    """Shared-mode update from all frames (reference form).

    ``Y``, ``noise`` and ``multipliers`` are ``(M, n)`` retained-bin arrays,
    ``modes`` is ``(K, n)``.
    """
    Y = np.atleast_2d(Y)
    modes = np.asarray(modes)
    M = Y.shape[0]
    if grid is None:
        grid = positive_grid(Y.shape[-1])
    U = Y - np.atleast_2d(noise) + 0.5 * np.atleast_2d(multipliers)
    others = modes.sum(axis=0) - modes[k]
    return (U - others).sum(axis=0) / (M + 2.0 * alpha * (grid - omega_k) ** 2)


def noise_update(Y_j, mode_sum, multiplier_j, alpha, epsilon):
    """Per-frame noise estimate: shrunken residual."""
    return (np.asarray(Y_j) - mode_sum + 0.5 * np.asarray(multiplier_j)) / (1.0 + alpha * epsilon)


def lambda_update_jvmd(Y_j, mode_sum, noise_j, multiplier_j, rule="cube-root", tau=0.0):
    """Per-frame multiplier update under ``rule`` (``cube-root`` or ``dual-ascent``)."""
    r = np.asarray(Y_j) - mode_sum - noise_j
    if rule == "cube-root":
        return principal_cbrt(4.0 * (r + 0.5 * np.asarray(multiplier_j)))
    if rule == "dual-ascent":
        return np.asarray(multiplier_j) + tau * r
    raise InvalidConfigError(f"unknown lambda_rule {rule!r}")


def convergence_kappa(current, previous):
    """``sum_k ||S_k - S_k_prev||^2 / ||S_k||^2``.

    A mode with zero current energy contributes 0 if it was zero before and
    1 otherwise. If every current mode is zero the measure is 0.
    """
    current = np.atleast_2d(current)
    previous = np.atleast_2d(previous)
    if not np.any(current):
        return 0.0
    out = 0.0
    for c, p in zip(current, previous):
        num = float(np.sum(np.abs(c - p) ** 2))
        den = float(np.sum(np.abs(c) ** 2))
        if den > 0:
            out += num / den
        elif num > 0:
            out += 1.0
    return out
