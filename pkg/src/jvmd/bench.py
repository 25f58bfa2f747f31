"""Experiment harnesses: tone separation under noise, desk-scale SEI on the
synthetic emitter set, and per-iteration cost scaling.

Each harness returns plain rows (lists of dicts) so the CLI can write them
as CSV and tests can assert on them directly. Randomness flows from a single
``SeedSequence`` per call, spawned deterministically per grid point.
"""
import math
import time

import numpy as np

from .errors import DatasetError, InvalidConfigError
from .frameio import batch_by_label
from .joint import FrameBatch, JvmdConfig, JvmdSolver, jvmd_decompose
from .sei import DEFAULT_BANDS, DEFAULT_SPARSITY, build_dictionary, evaluate, extract_features
from .signals import (
    TONE_FREQUENCIES_HZ,
    add_awgn,
    center_freq_error,
    emitter_profiles,
    preamble_message,
    synth_emitter_frames,
    tone_mixture,
)
from .vmd import VmdConfig, VmdSolver, vmd_decompose

__all__ = [
    "ALGORITHMS",
    "tone_bench",
    "tone_trial",
    "sei_bench",
    "sei_features",
    "complexity_bench",
    "loglog_slope",
]

ALGORITHMS = ("vmd", "jvmd")


def _check_algos(algos):
    algos = tuple(algos)
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise InvalidConfigError(f"unknown algorithm(s) {bad}; expected a subset of {ALGORITHMS}")
    return algos


def tone_trial(snr_db, M, seed, L=1500, sample_rate_hz=1500.0, vmd_config=None, jvmd_config=None):
    """One paired trial on the three-tone mixture.

    ``M`` noisy copies are drawn; VMD sees the first, JVMD all of them.
    Returns ``{"vmd": eta, "jvmd": eta}`` for the configs that are given.
    """
    base = tone_mixture(L, sample_rate_hz)
    streams = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    frames = [add_awgn(base, snr_db, s) for s in streams.spawn(M)]
    out = {}
    if vmd_config is not None:
        r = vmd_decompose(frames[0], vmd_config)
        out["vmd"] = center_freq_error(r.frequencies_hz, TONE_FREQUENCIES_HZ)
    if jvmd_config is not None:
        r = jvmd_decompose(FrameBatch(tuple(frames)), jvmd_config)
        out["jvmd"] = center_freq_error(r.frequencies_hz, TONE_FREQUENCIES_HZ)
    return out


def tone_bench(
    snr_grid=(0, 5, 10, 15, 20, 25, 30),
    trials=100,
    M=8,
    algos=ALGORITHMS,
    seed=0,
    L=1500,
    sample_rate_hz=1500.0,
    alpha=2000.0,
    tol=1e-7,
    max_iters=500,
):
    """Mean and standard deviation of the centre-frequency error per (algo, SNR).

    Both algorithms see the same noise realizations in a given trial. Rows
    are ordered by algorithm, then SNR.
    """
    algos = _check_algos(algos)
    if trials < 1:
        raise InvalidConfigError("trials must be at least 1")
    if M < 1:
        raise InvalidConfigError("M must be at least 1")
    vcfg = VmdConfig(num_modes=3, alpha=alpha, tol=tol, max_iters=max_iters) if "vmd" in algos else None
    jcfg = JvmdConfig(num_modes=3, alpha=alpha, tol=tol, max_iters=max_iters) if "jvmd" in algos else None
    etas = {a: {} for a in algos}
    for snr, ss in zip(snr_grid, np.random.SeedSequence(seed).spawn(len(snr_grid))):
        per_trial = [
            tone_trial(snr, M, s, L, sample_rate_hz, vcfg, jcfg) for s in ss.spawn(trials)
        ]
        for a in algos:
            etas[a][snr] = np.array([t[a] for t in per_trial])
    rows = []
    for a in algos:
        for snr in snr_grid:
            e = etas[a][snr]
            rows.append(
                {
                    "algo": a,
                    "snr_db": float(snr),
                    "mean_eta": float(e.mean()),
                    "std_eta": float(e.std(ddof=1)) if len(e) > 1 else 0.0,
                    "trials": int(len(e)),
                }
            )
    return rows


def _decompose(algo, batch, K, alpha, tol, max_iters):
    if algo == "vmd":
        return vmd_decompose(batch[0], VmdConfig(num_modes=K, alpha=alpha, tol=tol, max_iters=max_iters))
    return jvmd_decompose(batch, JvmdConfig(num_modes=K, alpha=alpha, tol=tol, max_iters=max_iters))


def sei_features(algo, batches, K=3, alpha=500.0, D=DEFAULT_BANDS, tol=1e-6, max_iters=500):
    """Feature vectors of a list of frame batches (VMD uses each batch's first frame)."""
    return [extract_features(_decompose(algo, b, K, alpha, tol, max_iters), D) for b in batches]


def _synthetic_split(profiles, base, M, snr, n_train, n_test, ss):
    train, test = [], []
    for p, cs in zip(profiles, ss.spawn(len(profiles))):
        for i, s in enumerate(cs.spawn(n_train + n_test)):
            batch = synth_emitter_frames(p, base, M, snr, s)
            (train if i < n_train else test).append((p.emitter_id, batch))
    return train, test


def _file_split(dataset, M, snr, n_train, seed):
    batches, _ = batch_by_label(dataset, M)
    by_label = {}
    for label, b in batches:
        by_label.setdefault(label, []).append(b)
    train, test = [], []
    streams = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    for label in sorted(by_label):
        group = by_label[label]
        if len(group) <= n_train:
            raise DatasetError(
                f"class {label!r} has {len(group)} batches of {M} frames; need more than {n_train}"
            )
        if math.isfinite(snr):
            group = [
                FrameBatch(tuple(add_awgn(f, snr, s) for f, s in zip(b, streams.spawn(len(b)))))
                for b in group
            ]
        train += [(label, b) for b in group[:n_train]]
        test += [(label, b) for b in group[n_train:]]
    return train, test


def sei_bench(
    m_list=(2, 5, 10),
    snr_grid=(0, 5, 10, 15),
    algos=ALGORITHMS,
    classes=10,
    train_per_class=100,
    test_per_class=20,
    sparsity=DEFAULT_SPARSITY,
    seed=0,
    dataset=None,
    L=256,
    num_modes=3,
    alpha=500.0,
    bands=DEFAULT_BANDS,
    tol=1e-6,
    max_iters=500,
    separation=1.0,
    profile_seed=0,
):
    """Decompose, featurize, build a dictionary and classify, per (algo, M, SNR).

    With ``dataset=None`` the synthetic emitter set is used: ``classes``
    profiles (fixed by ``profile_seed``, independent of ``seed``) send the
    shared preamble, and every training or test sample is
    one batch of ``M`` frames (VMD decomposes the first frame only). A
    :class:`~jvmd.frameio.LabeledFrameSet` may be passed instead; its frames
    are grouped per label with :func:`~jvmd.frameio.batch_by_label`, the
    first ``train_per_class`` batches of each label train the dictionary and
    the rest are tested. ``test_per_class`` and ``classes`` then do not apply.

    Returns
    -------
    rows : list of dict
        ``algo, m, snr_db, accuracy, train_atoms, test_count``
    reports : list of dict
        Confusion matrices keyed like the rows.
    """
    algos = _check_algos(algos)
    if sparsity < 1:
        raise InvalidConfigError("sparsity must be positive")
    if train_per_class < 1:
        raise InvalidConfigError("train_per_class must be positive")
    if dataset is None:
        profiles = emitter_profiles(classes, separation, profile_seed)
        base = preamble_message(L)
    runs = [("vmd", 1)] if "vmd" in algos else []
    runs += [("jvmd", int(m)) for m in m_list] if "jvmd" in algos else []
    rows, reports = [], []
    snr_streams = np.random.SeedSequence(seed).spawn(len(snr_grid))
    for snr, ss in zip(snr_grid, snr_streams):
        snr = float(snr)
        for algo, M in runs:
            # Fresh child per run from the same parent: VMD and every M share
            # the first frame of each sample.
            ss_run = np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key)
            if dataset is None:
                train, test = _synthetic_split(profiles, base, M, snr, train_per_class, test_per_class, ss_run)
            else:
                train, test = _file_split(dataset, M, snr, train_per_class, ss_run)
            fit = lambda part: sei_features(algo, [b for _, b in part], num_modes, alpha, bands, tol, max_iters)  # noqa: E731
            dictionary = build_dictionary(fit(train), [lab for lab, _ in train])
            report = evaluate(dictionary, fit(test), [lab for lab, _ in test], min(sparsity, len(dictionary)))
            key = {"algo": algo, "m": M, "snr_db": snr}
            rows.append(dict(key, accuracy=report.accuracy, train_atoms=len(dictionary), test_count=report.total))
            reports.append(dict(key, **report.as_dict()))
    return rows, reports


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def _time_steps(solvers, iters):
    t0 = time.perf_counter()
    for s in solvers:
        for _ in range(iters):
            s.step()
    return (time.perf_counter() - t0) / iters


def complexity_bench(k_list=(8,), m_list=(1, 2, 5, 10), L=1500, iters=20, repeats=20, snr_db=10.0, seed=0):
    """Median per-iteration wall time of JVMD on ``M`` frames and of ``M``
    independent VMD runs, for every ``(K, M)``.

    Solvers are stepped a fixed number of times regardless of convergence,
    so the work per iteration is identical across repeats.

    Returns
    -------
    rows : list of dict
        ``k, m, l, jvmd_s, vmd_repeated_s, ratio``
    slopes : list of dict
        Per ``K``, log-log slope of time against ``M`` for both methods.
    """
    if iters < 1 or repeats < 1:
        raise InvalidConfigError("iters and repeats must be positive")
    base = tone_mixture(L, 1500.0)
    rows, slopes = [], []
    for K in k_list:
        for M in m_list:
            ss = np.random.SeedSequence([seed, K, M])
            frames = tuple(add_awgn(base, snr_db, s) for s in ss.spawn(M))
            batch = FrameBatch(frames)
            vcfg = VmdConfig(num_modes=K, max_iters=iters + 2)
            jcfg = JvmdConfig(num_modes=K, max_iters=iters + 2)
            tj, tv = [], []
            for _ in range(repeats):
                tj.append(_time_steps([JvmdSolver(batch, jcfg)], iters))
                tv.append(_time_steps([VmdSolver(f, vcfg) for f in frames], iters))
            j, v = float(np.median(tj)), float(np.median(tv))
            rows.append({"k": K, "m": M, "l": L, "jvmd_s": j, "vmd_repeated_s": v, "ratio": j / v})
        sub = [r for r in rows if r["k"] == K]
        if len(sub) >= 2:
            ms = [r["m"] for r in sub]
            slopes.append(
                {
                    "k": K,
                    "jvmd_slope": loglog_slope(ms, [r["jvmd_s"] for r in sub]),
                    "vmd_repeated_slope": loglog_slope(ms, [r["vmd_repeated_s"] for r in sub]),
                }
            )
    return rows, slopes
