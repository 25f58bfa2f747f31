"""End-to-end exit criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line shown under "acceptance criteria" in
the terminal summary. Run only these with ``pytest -m acceptance``.
"""
import cmath
import math
import time
from pathlib import Path

import numpy as np
import pytest

from jvmd.bench import complexity_bench, sei_bench, tone_bench, tone_trial
from jvmd.cli import main
from jvmd.frameio import LabeledFrameSet, read_frames, write_frames
from jvmd.joint import (
    JvmdConfig,
    jvmd_decompose,
    lambda_update_jvmd,
    mode_update_jvmd,
    noise_update,
)
from jvmd.spectral import (
    analytic_spectrum,
    mirror_extend,
    positive_grid,
    positive_spectrum,
    synthesize_positive,
    synthesize_time,
)
from jvmd.vmd import VmdConfig, lambda_update_vmd, mode_update_vmd, omega_update, vmd_decompose

pytestmark = pytest.mark.acceptance

GOLDEN = Path(__file__).parent / "golden" / "tones_l64_seed7.jvmd"


def _fmt(values):
    return ", ".join(f"{v:.3g}" for v in values)


# -- tone separation ---------------------------------------------------------


def test_tone_separation_at_high_snr(acceptance_report):
    t0 = time.perf_counter()
    rows = tone_bench(snr_grid=(30,), trials=100, M=8)
    elapsed = time.perf_counter() - t0
    eta = {r["algo"]: r["mean_eta"] for r in rows}
    ok = eta["vmd"] <= 1e-3 and eta["jvmd"] <= 1e-3 and elapsed <= 60
    acceptance_report(
        "tone separation at 30 dB",
        ok,
        f"mean eta VMD {eta['vmd']:.3g}, JVMD(M=8) {eta['jvmd']:.3g} (bound 1e-3); {elapsed:.1f} s (bound 60 s)",
    )
    assert ok


def test_noise_robustness_over_snr(acceptance_report):
    rows = tone_bench(snr_grid=(0, 5, 10, 15, 20, 25, 30), trials=200, M=8)
    v = {r["snr_db"]: r["mean_eta"] for r in rows if r["algo"] == "vmd"}
    j = {r["snr_db"]: r["mean_eta"] for r in rows if r["algo"] == "jvmd"}
    ratios = {s: v[s] / j[s] for s in v}
    ok = all(j[s] <= v[s] / 3 for s in v if s <= 15)
    detail = "VMD/JVMD eta ratio " + ", ".join(f"{s:g} dB: {ratios[s]:.3g}" for s in sorted(ratios))
    acceptance_report("noise robustness, JVMD eta <= VMD eta / 3 up to 15 dB", ok, detail)
    assert ok


def test_noise_weight_sensitivity(acceptance_report):
    """Mean eta for a sweep of alpha * epsilon; reported, not bounded."""
    trials = 20
    vcfg = VmdConfig(num_modes=3, alpha=2000.0)
    parts, finite = [], True
    for snr in (0.0, 10.0):
        seeds = np.random.SeedSequence(11).spawn(trials)
        base = np.mean([tone_trial(snr, 8, s, vmd_config=vcfg)["vmd"] for s in seeds])
        for ae in (0.1, 1.0, 10.0):
            cfg = JvmdConfig(num_modes=3, alpha=2000.0, epsilon=ae / 2000.0)
            seeds = np.random.SeedSequence(11).spawn(trials)
            eta = np.mean([tone_trial(snr, 8, s, jvmd_config=cfg)["jvmd"] for s in seeds])
            finite &= bool(np.isfinite(eta))
            parts.append(f"{snr:g} dB a*eps={ae:g}: ratio {base / eta:.3g}")
    acceptance_report("noise-weight sensitivity sweep (report only)", finite, "; ".join(parts))
    assert finite


# -- single-frame reduction --------------------------------------------------


def test_single_frame_reduction(acceptance_report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=256)
        for init in ("zero", "uniform"):
            v = vmd_decompose(x, VmdConfig(num_modes=3, alpha=500.0, tau=0.0, omega_init=init))
            j = jvmd_decompose(
                x[None, :],
                JvmdConfig(num_modes=3, alpha=500.0, epsilon=1e12, lambda_rule="dual-ascent", tau=0.0,
                           omega_init=init),
            )
            worst = max(worst, float(np.max(np.abs(v.mode_spectra - j.mode_spectra))))
    ok = worst <= 1e-9
    acceptance_report("single-frame JVMD equals VMD", ok, f"max bin difference {worst:.3g} over 20 frames (bound 1e-9)")
    assert ok


# -- update-rule oracles -----------------------------------------------------


def _example_tables():
    """Worked examples of every update rule; returns a list of failures."""
    fails = []

    def check(name, got, want, tol=1e-14):
        if not np.allclose(got, want, rtol=tol, atol=tol):
            fails.append(f"{name}: {got} != {want}")

    n = 16
    grid = positive_grid(n)
    # Wiener mode update
    check("mode identity", mode_update_vmd(np.ones(n), np.ones((1, n)), 0, 0.0, 0.1, np.zeros(n)), np.ones(n))
    Y = np.arange(1, n + 1, dtype=complex)
    S = mode_update_vmd(Y, np.zeros((1, n)), 0, 1e4, grid[5], np.zeros(n), grid)
    check("mode at centre", S[5], Y[5])
    alpha = 0.5 / (grid[3] - grid[1]) ** 2
    check("mode half", mode_update_vmd(np.ones(n), np.zeros((1, n)), 0, alpha, grid[1], np.zeros(n), grid)[3], 0.5)
    # centroid
    g = np.array([0.1, 0.2, 0.25, 0.3])
    check("centroid point", omega_update(np.array([0, 0, 3.0, 0]), g), 0.25)
    check("centroid pair", omega_update(np.array([0, 1.0, 0, 1.0]), g), 0.25)
    check("centroid weights", omega_update(np.sqrt([1.0, 2.0, 0, 3.0]), g), 1.4 / 6)
    # dual ascent
    lam, r = np.array([1 + 1j, -2.0]), np.array([0.5, 3j])
    check("ascent zero step", lambda_update_vmd(lam, r, 0, 0.0), lam)
    check("ascent unit step", lambda_update_vmd(0, r, 0, 1.0), r)
    check("ascent fixed point", lambda_update_vmd(lam, r, r, 0.7), lam)
    # shared-mode update
    Yj = np.arange(1, n + 1, dtype=complex)[None, :]
    z = np.zeros((1, n))
    check("joint reduces", mode_update_jvmd(Yj, np.zeros((1, n)), z, z, 0, 300.0, 0.2, grid),
          Yj[0] / (1 + 600.0 * (grid - 0.2) ** 2))
    for M in (1, 3, 8):
        U = np.tile(Yj, (M, 1))
        zM = np.zeros((M, n))
        check(f"joint centre M={M}", mode_update_jvmd(U, np.zeros((1, n)), zM, zM, 0, 1e4, grid[7], grid)[7], Yj[0, 7])
    alpha = 1.0 / (grid[4] - grid[2]) ** 2
    check("joint arithmetic", mode_update_jvmd(np.ones((2, n)), np.zeros((1, n)), np.zeros((2, n)),
                                               np.zeros((2, n)), 0, alpha, grid[2], grid)[4], 0.5)
    # noise update
    check("noise arithmetic", noise_update(1.0, 0.0, 0.0, 500.0, 0.002), 0.5)
    if np.max(np.abs(noise_update(np.exp(1j * grid), 0.0, 0.0, 500.0, 1e12))) > 1e-9:
        fails.append("noise large-weight limit")
    check("noise exact", noise_update(Y, Y, np.zeros(n), 500.0, 0.002), np.zeros(n))
    # cube-root multiplier
    check("cbrt real", lambda_update_jvmd(2.0, 0.0, 0.0, 0.0), 2.0)
    check("cbrt zero", lambda_update_jvmd(0.0, 0.0, 0.0, 0.0), 0.0)
    check("cbrt imaginary", lambda_update_jvmd(2j, 0.0, 0.0, 0.0), 2 * cmath.exp(1j * math.pi / 6))
    return fails


def _fd_checks(rng):
    """Central-difference stationarity of every update on 10 bins x 10 states.

    Each entry is the largest ``|gradient| / (curvature * scale)`` seen.
    """
    h = 1e-4
    worst = dict.fromkeys(["mode", "centroid", "ascent", "joint mode", "noise", "cube root"], 0.0)

    def cplx(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    def fd(f, z):
        return [(f(z + h * e) - f(z - h * e)) / (2 * h) for e in (1.0, 1j)]

    n, K, M = 64, 3, 4
    grid = positive_grid(n)
    for _ in range(10):
        alpha, wk = rng.uniform(10, 3000), rng.uniform(0, 0.5)
        bins = rng.choice(n, 10, replace=False)

        # Wiener mode update minimizes 4 a d^2 |S|^2 + 2 |Y - others - S + lam/2|^2
        Y, lam, modes = cplx(n), cplx(n), cplx(K, n)
        S = mode_update_vmd(Y, modes, 1, alpha, wk, lam, grid)
        others = modes.sum(axis=0) - modes[1]
        for i in bins:
            d2 = (grid[i] - wk) ** 2
            f = lambda s: 4 * alpha * d2 * abs(s) ** 2 + 2 * abs(Y[i] - others[i] - s + lam[i] / 2) ** 2  # noqa: E731
            curv = 4 * (1 + 2 * alpha * d2)
            worst["mode"] = max(worst["mode"], *(abs(g) / (curv * max(1, abs(S[i]))) for g in fd(f, S[i])))

        # centroid minimizes sum_i (w_i - w)^2 |S_i|^2; check with 10 random bins as support
        p = np.zeros(n)
        p[bins] = rng.uniform(0.1, 2.0, 10)
        w = omega_update(np.sqrt(p), grid)
        f = lambda x: float(np.sum((grid - x) ** 2 * p))  # noqa: E731
        g = (f(w + h) - f(w - h)) / (2 * h)
        worst["centroid"] = max(worst["centroid"], abs(g) / (2 * p.sum()))

        # dual ascent steps along the gradient of Re <lam, r> in lam
        tau, lam0, r = rng.uniform(0.01, 1.0), cplx(n), cplx(n)
        new = lambda_update_vmd(lam0, r, 0, tau)
        for i in bins:
            f = lambda l: (np.conj(l) * r[i]).real  # noqa: E731
            gr, gi = fd(f, lam0[i])
            step = (new[i] - lam0[i]) / tau
            worst["ascent"] = max(worst["ascent"], abs(complex(gr, gi) - step) / max(1, abs(step)))

        # shared-mode update minimizes 4 a d^2 |S|^2 + 2 sum_j |U_j - others - S|^2
        Yj, b, lj = cplx(M, n), cplx(M, n), cplx(M, n)
        S = mode_update_jvmd(Yj, modes, b, lj, 2, alpha, wk, grid)
        U = Yj - b + lj / 2
        others = modes.sum(axis=0) - modes[2]
        for i in bins:
            d2 = (grid[i] - wk) ** 2
            f = lambda s: 4 * alpha * d2 * abs(s) ** 2 + 2 * np.sum(np.abs(U[:, i] - others[i] - s) ** 2)  # noqa: E731
            curv = 4 * (M + 2 * alpha * d2)
            worst["joint mode"] = max(worst["joint mode"], *(abs(g) / (curv * max(1, abs(S[i]))) for g in fd(f, S[i])))

        # noise update minimizes 2 a e |b|^2 + 2 |Y - S - b + lam/2|^2
        eps = rng.uniform(1e-5, 1e-2)
        Y1, Ssum, l1 = cplx(n), cplx(n), cplx(n)
        bn = noise_update(Y1, Ssum, l1, alpha, eps)
        for i in bins:
            f = lambda v: 2 * alpha * eps * abs(v) ** 2 + 2 * abs(Y1[i] - Ssum[i] - v + l1[i] / 2) ** 2  # noqa: E731
            curv = 4 * (1 + alpha * eps)
            worst["noise"] = max(worst["noise"], *(abs(g) / (curv * max(1, abs(bn[i]))) for g in fd(f, bn[i])))

        # cube root is a stationary point of the holomorphic phi(l) = l^4 / 4 - 4 q l
        q = cplx(n)
        root = lambda_update_jvmd(q, 0.0, 0.0, 0.0)
        for i in bins:
            phi = lambda l: l**4 / 4 - 4 * q[i] * l  # noqa: E731
            # central-difference error on a quartic is h^2 * l, so scale the step with |l|
            hr = 1e-5 * abs(root[i])
            g = (phi(root[i] + hr) - phi(root[i] - hr)) / (2 * hr)
            curv = 3 * abs(root[i]) ** 2
            worst["cube root"] = max(worst["cube root"], abs(g) / (curv * max(1, abs(root[i]))))
    return worst


def test_update_rule_oracles(acceptance_report):
    fails = _example_tables()
    worst = _fd_checks(np.random.default_rng(20240607))
    ok = not fails and all(v <= 1e-8 for v in worst.values())
    detail = "example tables " + ("ok" if not fails else "; ".join(fails))
    detail += "; worst relative FD gradient " + ", ".join(f"{k} {v:.2g}" for k, v in worst.items()) + " (bound 1e-8)"
    acceptance_report("update-rule example tables and stationarity", ok, detail)
    assert ok


# -- complexity --------------------------------------------------------------


def test_per_iteration_complexity(acceptance_report):
    rows, slopes = complexity_bench(k_list=(8,), m_list=(1, 2, 5, 10), L=1500, iters=20, repeats=20)
    ratio = {r["m"]: r["ratio"] for r in rows}
    s = slopes[0]
    ok = (
        all(ratio[m] <= 1.0 for m in (2, 5, 10))
        and abs(s["vmd_repeated_slope"] - 1.0) <= 0.2
        and s["jvmd_slope"] < s["vmd_repeated_slope"]
    )
    detail = "JVMD/(M x VMD) " + ", ".join(f"M={m}: {ratio[m]:.3g}" for m in sorted(ratio))
    detail += f"; slopes JVMD {s['jvmd_slope']:.3g}, repeated VMD {s['vmd_repeated_slope']:.3g} (1.0 +- 0.2)"
    acceptance_report("per-iteration cost of JVMD vs repeated VMD", ok, detail)
    assert ok


# -- emitter identification --------------------------------------------------


@pytest.fixture(scope="module")
def sei_runs():
    t0 = time.perf_counter()
    rows = []
    for seed in range(5):
        out, _ = sei_bench(seed=seed)
        rows += [dict(r, seed=seed) for r in out]
    return rows, time.perf_counter() - t0


def _acc(rows, algo, m, snr):
    return np.array([r["accuracy"] for r in sorted(rows, key=lambda r: r["seed"])
                     if r["algo"] == algo and r["m"] == m and r["snr_db"] == snr])


def test_emitter_identification(sei_runs, acceptance_report):
    rows, elapsed = sei_runs
    snrs, ms = (0.0, 5.0, 10.0, 15.0), (2, 5, 10)

    # JVMD at every M beats VMD on every seed and SNR
    beats = all(np.all(_acc(rows, "jvmd", m, s) >= _acc(rows, "vmd", 1, s)) for m in ms for s in snrs)
    means = "; ".join(
        f"{s:g} dB VMD {_acc(rows, 'vmd', 1, s).mean():.3f} JVMD "
        + "/".join(f"{_acc(rows, 'jvmd', m, s).mean():.3f}" for m in ms)
        for s in snrs
    )

    # accuracy non-decreasing in M at 0 dB within one standard error of the paired difference
    mono = []
    for a, b in zip(ms, ms[1:]):
        d = _acc(rows, "jvmd", b, 0.0) - _acc(rows, "jvmd", a, 0.0)
        mono.append(d.mean() >= -d.std(ddof=1) / math.sqrt(len(d)))

    top = _acc(rows, "jvmd", 10, 0.0)
    ok = beats and all(mono) and top.mean() >= 0.8 and elapsed <= 15 * 60
    detail = (
        f"JVMD >= VMD everywhere: {beats}; monotone in M at 0 dB: {all(mono)}; "
        f"JVMD M=10 at 0 dB {top.mean():.3f} (seeds {_fmt(top)}, bound 0.8); {elapsed:.0f} s; "
        f"mean accuracy VMD, JVMD M=2/5/10: {means}"
    )
    acceptance_report("emitter identification on the synthetic set", ok, detail)
    assert ok


# -- round trips and formats -------------------------------------------------


def test_round_trips_and_golden_file(tmp_path, acceptance_report):
    rng = np.random.default_rng(5)
    spec_err = 0.0
    for L in (4, 64, 1500):
        x = rng.normal(size=L)
        spec_err = max(spec_err, float(np.max(np.abs(synthesize_time(analytic_spectrum(mirror_extend(x)), L).samples - x))))
        X = rng.normal(size=(3, L))
        spec_err = max(spec_err, float(np.max(np.abs(synthesize_positive(positive_spectrum(X), L) - X))))

    data = rng.normal(size=(100, 64)) * 10.0 ** rng.uniform(-3, 3, size=(100, 1))
    s = LabeledFrameSet.from_arrays([f"e{i % 9}" for i in range(100)], data, 2.0e6)
    write_frames(s, tmp_path / "r.jvmd")
    back = read_frames(tmp_path / "r.jvmd")
    io_exact = back.labels == s.labels and np.array_equal(back.as_array(), data.astype(np.float32))

    for d in ("a", "b"):
        main(["-q", "make-tones", str(tmp_path / f"{d}.jvmd"), "--n", "4", "--l", "64", "--fs", "1500",
              "--snr", "20", "--seed", "7"])
    golden = GOLDEN.read_bytes()
    stable = (tmp_path / "a.jvmd").read_bytes() == golden == (tmp_path / "b.jvmd").read_bytes()

    ok = spec_err <= 1e-10 and io_exact and stable
    acceptance_report(
        "round trips and golden file",
        ok,
        f"spectral round trip {spec_err:.2g} (bound 1e-10); frame file exact to float32: {io_exact}; "
        f"golden bytes stable: {stable}",
    )
    assert ok
