"""Command-line front end.

Every subcommand writes plot-ready CSV/JSON into an output directory
together with ``manifest.json`` recording the subcommand, every parameter,
the seed, a version token and a timestamp.

Exit codes: 0 success, 1 runtime/data error, 2 ran but did not converge
(outputs are still written), 64 usage error.
"""
import argparse
import csv
import datetime
import hashlib
import json
import logging
import math
import os
import subprocess
import sys

import numpy as np

from . import __version__
from .bench import complexity_bench, sei_bench, tone_bench
from .errors import InvalidConfigError, JvmdError
from .frameio import LabeledFrameSet, read_csv_frames, read_frames, write_frames
from .joint import LAMBDA_RULES, FrameBatch, JvmdConfig, jvmd_decompose
from .kernels import BACKEND
from .signals import (
    add_awgn,
    emitter_profiles,
    preamble_message,
    synth_emitter_frames,
    tone_mixture,
)
from .vmd import OMEGA_INITS, VmdConfig, vmd_decompose

log = logging.getLogger("jvmd")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64

CSV_SCHEMA_VERSION = 1
CSV_HEADERS = {
    "modes.csv": "sample,time_s,mode_<k>...",
    "psd.csv": "bin,freq_hz,mode_<k>_db...",
    "kappa.csv": "iteration,kappa",
    "tone_bench.csv": "algo,snr_db,mean_eta,std_eta,trials",
    "sei_accuracy.csv": "algo,m,snr_db,accuracy,train_atoms,test_count",
    "complexity.csv": "k,m,l,jvmd_s,vmd_repeated_s,ratio",
    "complexity_slopes.csv": "k,jvmd_slope,vmd_repeated_slope",
}
# Power floor for the dB spectra so empty bins stay finite.
PSD_FLOOR = 1e-30
DEFAULT_OUT = "jvmd-out"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    v = _float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None


def _list_of(conv):
    def parse(text):
        items = [s for s in text.split(",") if s.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(s.strip()) for s in items]

    return parse


def _algo_list(text):
    items = _list_of(str)(text)
    bad = [a for a in items if a not in ("vmd", "jvmd")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}")
    return items


def version_token():
    """``git describe`` of the source tree when available, else ``v<version>``."""
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=here,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"v{__version__}-g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, args, outputs, warnings=()):
    params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k != "func"}
    inputs = {}
    if getattr(args, "input", None):
        inputs[args.input] = _sha256(args.input)
    manifest = {
        "inputs_sha256": inputs,
        "subcommand": args.command,
        "params": params,
        "seed": getattr(args, "seed", None),
        "version": version_token(),
        "backend": BACKEND,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "outputs": sorted(outputs),
        "csv_headers": {k: CSV_HEADERS[k] for k in sorted(outputs) if k in CSV_HEADERS},
        "warnings": list(warnings),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(args):
    out = args.out or os.environ.get("JVMD_OUTPUT_DIR") or DEFAULT_OUT
    os.makedirs(out, exist_ok=True)
    return out


def _load_frames(path, sample_rate_hz):
    if path.lower().endswith(".csv"):
        return read_csv_frames(path, sample_rate_hz)
    return read_frames(path)


# -- subcommands -------------------------------------------------------------


def cmd_decompose(args):
    try:
        if args.algo == "vmd":
            config = VmdConfig(
                num_modes=args.k, alpha=args.alpha, tau=args.tau, max_iters=args.max_iters,
                tol=args.tol, omega_init=args.init or "uniform", seed=args.seed,
            )
        else:
            config = JvmdConfig(
                num_modes=args.k, alpha=args.alpha, epsilon=args.epsilon, max_iters=args.max_iters,
                tol=args.tol, omega_init=args.init or "zero", lambda_rule=args.lambda_rule,
                tau=args.tau, seed=args.seed,
            )
    except InvalidConfigError as exc:
        raise UsageError(str(exc)) from exc
    data = _load_frames(args.input, args.fs)
    start = args.frame
    m = 1 if args.algo == "vmd" else (args.m or len(data) - start)
    if start + m > len(data):
        raise JvmdError(f"{args.input} holds {len(data)} frames; need {m} starting at index {start}")
    frames = [data[i][1] for i in range(start, start + m)]
    if args.algo == "vmd":
        result = vmd_decompose(frames[0], config)
    else:
        result = jvmd_decompose(FrameBatch(tuple(frames)), config)

    out = _out_dir(args)
    K, L = result.modes.shape
    fs = result.sample_rate_hz
    write_csv(
        os.path.join(out, "modes.csv"),
        ["sample", "time_s"] + [f"mode_{k}" for k in range(K)],
        ([n, n / fs] + list(result.modes[:, n]) for n in range(L)),
    )
    power = np.abs(result.mode_spectra[:, :L]) ** 2
    db = 10.0 * np.log10(np.maximum(power, PSD_FLOOR))
    write_csv(
        os.path.join(out, "psd.csv"),
        ["bin", "freq_hz"] + [f"mode_{k}_db" for k in range(K)],
        ([i, i * fs / (2 * L)] + list(db[:, i]) for i in range(L)),
    )
    write_json(
        os.path.join(out, "omegas.json"),
        {
            "omegas_cycles_per_sample": [float(w) for w in result.omegas],
            "frequencies_hz": [float(f) for f in result.frequencies_hz],
            "iterations": int(result.iterations),
            "converged": bool(result.converged),
        },
    )
    write_csv(
        os.path.join(out, "kappa.csv"),
        ["iteration", "kappa"],
        ([i, k] for i, k in enumerate(result.kappa_history, 1)),
    )
    warnings = []
    if not result.converged:
        warnings.append(
            f"not converged after {result.iterations} iterations "
            f"(kappa {result.kappa_history[-1]:.3g} > tol {args.tol:g})"
        )
        log.warning(warnings[-1])
    write_manifest(out, args, ["modes.csv", "psd.csv", "omegas.json", "kappa.csv"], warnings)
    log.info("centre frequencies (Hz): %s", ", ".join(f"{f:.6g}" for f in result.frequencies_hz))
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_tone_bench(args):
    rows = tone_bench(
        snr_grid=args.snr_grid, trials=args.trials, M=args.m, algos=args.algo_list, seed=args.seed,
        L=args.l, sample_rate_hz=args.fs, alpha=args.alpha, tol=args.tol, max_iters=args.max_iters,
    )
    out = _out_dir(args)
    cols = ["algo", "snr_db", "mean_eta", "std_eta", "trials"]
    write_csv(os.path.join(out, "tone_bench.csv"), cols, ([r[c] for c in cols] for r in rows))
    write_manifest(out, args, ["tone_bench.csv"])
    for r in rows:
        log.info("%-4s %5.1f dB  mean eta %.4g", r["algo"], r["snr_db"], r["mean_eta"])
    return EXIT_OK


def cmd_sei_bench(args):
    dataset = None
    if args.dataset == "file":
        if not args.input:
            raise UsageError("--dataset file requires --input")
        dataset = _load_frames(args.input, args.fs)
    rows, reports = sei_bench(
        m_list=args.m_list, snr_grid=args.snr_grid, algos=args.algo_list, classes=args.classes,
        train_per_class=args.train_per_class, test_per_class=args.test_per_class,
        sparsity=args.sparsity, seed=args.seed, dataset=dataset, L=args.l, num_modes=args.k,
        alpha=args.alpha, bands=args.bands, tol=args.tol, max_iters=args.max_iters,
        separation=args.separation,
    )
    out = _out_dir(args)
    cols = ["algo", "m", "snr_db", "accuracy", "train_atoms", "test_count"]
    write_csv(os.path.join(out, "sei_accuracy.csv"), cols, ([r[c] for c in cols] for r in rows))
    write_json(os.path.join(out, "sei_confusion.json"), [
        {k: _jsonable(v) for k, v in r.items()} for r in reports
    ])
    write_manifest(out, args, ["sei_accuracy.csv", "sei_confusion.json"])
    for r in rows:
        log.info("%-4s M=%-3d %5.1f dB  accuracy %.3f", r["algo"], r["m"], r["snr_db"], r["accuracy"])
    return EXIT_OK


def cmd_complexity_bench(args):
    rows, slopes = complexity_bench(
        k_list=args.k_list, m_list=args.m_list, L=args.l, iters=args.iters,
        repeats=args.repeats, seed=args.seed,
    )
    out = _out_dir(args)
    cols = ["k", "m", "l", "jvmd_s", "vmd_repeated_s", "ratio"]
    write_csv(os.path.join(out, "complexity.csv"), cols, ([r[c] for c in cols] for r in rows))
    scols = ["k", "jvmd_slope", "vmd_repeated_slope"]
    write_csv(os.path.join(out, "complexity_slopes.csv"), scols, ([s[c] for c in scols] for s in slopes))
    write_manifest(out, args, ["complexity.csv", "complexity_slopes.csv"])
    for r in rows:
        log.info("K=%d M=%-3d jvmd %.3g s  %dxvmd %.3g s", r["k"], r["m"], r["jvmd_s"], r["m"], r["vmd_repeated_s"])
    return EXIT_OK


def cmd_make_tones(args):
    base = tone_mixture(args.l, args.fs)
    ss = np.random.SeedSequence(args.seed)
    frames = [add_awgn(base, args.snr, s) for s in ss.spawn(args.n)]
    write_frames(LabeledFrameSet(tuple(("tones", f) for f in frames)), args.output)
    return EXIT_OK


def cmd_make_emitters(args):
    profiles = emitter_profiles(args.classes, args.separation)
    base = preamble_message(args.l)
    entries = []
    for p, s in zip(profiles, np.random.SeedSequence(args.seed).spawn(len(profiles))):
        batch = synth_emitter_frames(p, base, args.per_class, args.snr, s)
        entries += [(p.emitter_id, f) for f in batch]
    write_frames(LabeledFrameSet(tuple(entries)), args.output)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="jvmd", description="Variational and joint variational mode decomposition.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="only print warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=0):
        p.add_argument("--seed", type=int, default=seed, help="master random seed (default %(default)s)")
        p.add_argument("--out", help="output directory (default $JVMD_OUTPUT_DIR or ./jvmd-out)")

    p = sub.add_parser("decompose", help="decompose frames from a frame file or CSV")
    p.add_argument("input", help="frame file (binary, or .csv with the label in column 1)")
    p.add_argument("--algo", choices=("vmd", "jvmd"), default="jvmd")
    p.add_argument("--k", type=_positive_int, default=3, help="number of modes")
    p.add_argument("--alpha", type=_positive_float, default=2000.0)
    p.add_argument("--epsilon", type=_positive_float, default=None, help="JVMD noise weight (default 1/alpha)")
    p.add_argument("--tau", type=_float, default=0.0, help="dual-ascent step")
    p.add_argument("--max-iters", type=_positive_int, default=500)
    p.add_argument("--tol", type=_positive_float, default=1e-7)
    p.add_argument("--m", type=_positive_int, default=None, help="JVMD frames (default: all from --frame on)")
    p.add_argument("--frame", type=int, default=0, help="index of the first frame used")
    p.add_argument("--init", choices=OMEGA_INITS, default=None,
                   help="centre-frequency init (default uniform for vmd, zero for jvmd)")
    p.add_argument("--lambda-rule", choices=LAMBDA_RULES, default="cube-root")
    p.add_argument("--fs", type=_positive_float, default=1.0, help="sample rate for CSV input")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tone-bench", help="centre-frequency error of the three-tone mixture vs SNR")
    p.add_argument("--snr-grid", type=_list_of(_float), default=[0, 5, 10, 15, 20, 25, 30])
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--m", type=_positive_int, default=8)
    p.add_argument("--algo-list", type=_algo_list, default=["vmd", "jvmd"])
    p.add_argument("--alpha", type=_positive_float, default=2000.0)
    p.add_argument("--l", type=_positive_int, default=1500, help="frame length")
    p.add_argument("--fs", type=_positive_float, default=1500.0)
    p.add_argument("--tol", type=_positive_float, default=1e-7)
    p.add_argument("--max-iters", type=_positive_int, default=500)
    common(p)
    p.set_defaults(func=cmd_tone_bench)

    p = sub.add_parser("sei-bench", help="emitter identification accuracy per algorithm, M and SNR")
    p.add_argument("--dataset", choices=("synthetic", "file"), default="synthetic")
    p.add_argument("--input", help="frame file for --dataset file")
    p.add_argument("--classes", type=_positive_int, default=10)
    p.add_argument("--train-per-class", type=_positive_int, default=100)
    p.add_argument("--test-per-class", type=_positive_int, default=20)
    p.add_argument("--m-list", type=_list_of(_positive_int), default=[2, 5, 10])
    p.add_argument("--snr-grid", type=_list_of(_float), default=[0, 5, 10, 15])
    p.add_argument("--algo-list", type=_algo_list, default=["vmd", "jvmd"])
    p.add_argument("--sparsity", type=_positive_int, default=10)
    p.add_argument("--k", type=_positive_int, default=3)
    p.add_argument("--alpha", type=_positive_float, default=500.0)
    p.add_argument("--bands", type=_positive_int, default=32, help="spectral bands per mode")
    p.add_argument("--l", type=_positive_int, default=256, help="synthetic frame length")
    p.add_argument("--fs", type=_positive_float, default=1.0, help="sample rate for CSV input")
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--max-iters", type=_positive_int, default=500)
    p.add_argument("--separation", type=_positive_float, default=1.0, help="synthetic impairment scale")
    common(p)
    p.set_defaults(func=cmd_sei_bench)

    p = sub.add_parser("complexity-bench", help="per-iteration time of JVMD vs M independent VMD runs")
    p.add_argument("--k-list", type=_list_of(_positive_int), default=[8])
    p.add_argument("--m-list", type=_list_of(_positive_int), default=[1, 2, 5, 10])
    p.add_argument("--l", type=_positive_int, default=1500)
    p.add_argument("--iters", type=_positive_int, default=20)
    p.add_argument("--repeats", type=_positive_int, default=20)
    common(p)
    p.set_defaults(func=cmd_complexity_bench)

    p = sub.add_parser("make-tones", help="write noisy three-tone frames to a frame file")
    p.add_argument("output")
    p.add_argument("--n", type=_positive_int, default=8, help="number of frames")
    p.add_argument("--snr", type=_float, default=30.0, help="dB; inf for noiseless")
    p.add_argument("--l", type=_positive_int, default=1500)
    p.add_argument("--fs", type=_positive_float, default=1500.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_tones)

    p = sub.add_parser("make-emitters", help="write a synthetic labeled emitter set to a frame file")
    p.add_argument("output")
    p.add_argument("--classes", type=_positive_int, default=10)
    p.add_argument("--per-class", type=_positive_int, default=200)
    p.add_argument("--snr", type=_float, default=10.0)
    p.add_argument("--l", type=_positive_int, default=256)
    p.add_argument("--separation", type=_positive_float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_emitters)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s: %(message)s"
    )
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"jvmd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (JvmdError, OSError) as exc:
        print(f"jvmd: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
