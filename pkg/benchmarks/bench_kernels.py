"""Compare the compiled and pure-numpy kernel backends.

Times one mode sweep, one frame sweep per lambda rule, and the convergence
measure on a noisy three-tone problem with both backends.
Run with ``python3 benchmarks/bench_kernels.py [--k 8 --l 1500 --m 10]``.
"""
import argparse
import timeit

import numpy as np

from jvmd import kernels
from jvmd.signals import add_awgn, tone_mixture
from jvmd.spectral import positive_grid, positive_spectrum


def _best(fn, number, repeat=7):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench(mod, K, L, M, seed=0):
    base = tone_mixture(L, 1500.0)
    Y = positive_spectrum(np.stack([add_awgn(base, 10.0, seed + j).samples for j in range(M)]))
    grid = positive_grid(L)
    rng = np.random.default_rng(seed)
    S = rng.normal(size=(K, L)) + 1j * rng.normal(size=(K, L))
    total = S.sum(axis=0)
    omegas = np.linspace(0.01, 0.45, K)
    b = np.zeros_like(Y)
    lam = np.zeros_like(Y)
    Ysum = Y.sum(axis=0)
    S0 = S.copy()

    out = {}
    out["mode_sweep"] = _best(
        lambda: mod.mode_sweep(Ysum, float(M), S, total, omegas, grid, 2000.0), 20
    )
    for name, rule in (("frame_sweep/cube-root", mod.CUBE_ROOT), ("frame_sweep/dual-ascent", mod.DUAL_ASCENT)):
        out[name] = _best(lambda: mod.frame_sweep(Y, total, b, lam, 0.5, rule, 0.01), 20)
    out["kappa"] = _best(lambda: mod.kappa(S, S0), 50)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--k", type=int, default=8)
    parser.add_argument("--l", type=int, default=1500)
    parser.add_argument("--m", type=int, default=10)
    args = parser.parse_args()

    available = kernels.backends()
    results = {name: bench(mod, args.k, args.l, args.m) for name, mod in available.items()}
    print(f"K={args.k} L={args.l} M={args.m}; best-of-7 mean time per call")
    names = list(results["python"])
    header = f"{'kernel':26s}" + "".join(f"{b:>14s}" for b in results)
    if "compiled" in results:
        header += f"{'speedup':>10s}"
    print(header)
    for n in names:
        line = f"{n:26s}" + "".join(f"{results[b][n] * 1e6:12.1f}us" for b in results)
        if "compiled" in results:
            line += f"{results['python'][n] / results['compiled'][n]:9.1f}x"
        print(line)
    if "compiled" not in results:
        print("compiled extension not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
