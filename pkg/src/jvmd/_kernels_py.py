"""Pure numpy fallback for the ADMM inner loops.

Same signatures and semantics as the compiled ``_kernels`` extension.
Arrays flagged "in/out" are overwritten in place.
"""
import numpy as np

CUBE_ROOT = 0
DUAL_ASCENT = 1


def mode_sweep(base, nframes, S, total, omegas, grid, alpha):
    """One Gauss-Seidel pass over the K shared modes.

    ``S[k] = (base - nframes * sum_{i != k} S[i]) / (nframes + 2 alpha (grid - omegas[k])**2)``
    followed by the power-centroid update of ``omegas[k]``. ``S``, ``total``
    (running sum of modes) and ``omegas`` are in/out.
    """
    total[:] = S.sum(axis=0)
    for k in range(S.shape[0]):
        total -= S[k]
        d = grid - omegas[k]
        S[k] = (base - nframes * total) / (nframes + 2.0 * alpha * d * d)
        total += S[k]
        p = S[k].real ** 2 + S[k].imag ** 2
        energy = p.sum()
        if energy > 0.0:
            omegas[k] = np.dot(grid, p) / energy


def principal_cbrt(z):
    """Principal complex cube root, arg taken in (-pi, pi]."""
    z = np.asarray(z, dtype=np.complex128)
    theta = np.arctan2(z.imag, z.real)
    theta = np.where(theta == -np.pi, np.pi, theta)
    return np.cbrt(np.abs(z)) * np.exp(1j * theta / 3.0)


def frame_sweep(Y, total, b, lam, noise_gain, rule, tau):
    """Noise and multiplier updates for every frame, in order.

    ``b`` and ``lam`` are in/out. Returns ``sum_j (Y_j - b_j + lam_j / 2)``,
    the frame aggregate consumed by the next :func:`mode_sweep`.
    """
    usum = np.zeros(Y.shape[1], dtype=np.complex128)
    for j in range(Y.shape[0]):
        r = Y[j] - total
        b[j] = (r + 0.5 * lam[j]) * noise_gain
        if rule == CUBE_ROOT:
            lam[j] = principal_cbrt(4.0 * (r - b[j] + 0.5 * lam[j]))
        else:
            lam[j] = lam[j] + tau * (r - b[j])
        usum += Y[j] - b[j] + 0.5 * lam[j]
    return usum


def kappa(S, S_prev):
    """Summed relative squared change of each mode between two iterates.

    A mode that is zero now contributes 1 if it was nonzero before, else 0.
    When every current mode is zero the measure is 0.
    """
    num = np.sum(np.abs(S - S_prev) ** 2, axis=1)
    den = np.sum(np.abs(S) ** 2, axis=1)
    if not np.any(den > 0.0):
        return 0.0
    out = 0.0
    for n, d in zip(num, den):
        if d > 0.0:
            out += n / d
        elif n > 0.0:
            out += 1.0
    return float(out)
