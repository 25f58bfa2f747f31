import csv
import hashlib
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from jvmd.cli import EXIT_ERROR, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE, main
from jvmd.frameio import read_frames

GOLDEN = Path(__file__).parent / "golden" / "tones_l64_seed7.jvmd"
GOLDEN_SHA256 = "b16702fa793d528162a907285d76f8c7db9484c6c3da635b1096ad8e81ee0522"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def tones(tmp_path_factory):
    path = tmp_path_factory.mktemp("in") / "tones.jvmd"
    assert main(["-q", "make-tones", str(path), "--n", "8", "--snr", "30", "--seed", "1"]) == EXIT_OK
    return path


def test_decompose_tone_example(tones, tmp_path):
    out = tmp_path / "out"
    code = main(["-q", "decompose", str(tones), "--algo", "jvmd", "--k", "3", "--out", str(out)])
    assert code == EXIT_OK
    meta = json.loads((out / "omegas.json").read_text())
    np.testing.assert_allclose(meta["frequencies_hz"], [2.0, 24.0, 600.0], rtol=0.01)
    assert meta["converged"] is True
    modes = read_csv(out / "modes.csv")
    assert modes[0] == ["sample", "time_s", "mode_0", "mode_1", "mode_2"]
    assert len(modes) == 1 + 1500
    psd = read_csv(out / "psd.csv")
    assert psd[0][:2] == ["bin", "freq_hz"] and len(psd) == 1 + 1500
    kappa = read_csv(out / "kappa.csv")
    assert kappa[0] == ["iteration", "kappa"]
    assert float(kappa[-1][1]) <= 1e-7


def test_decompose_vmd(tones, tmp_path):
    code = main(["-q", "decompose", str(tones), "--algo", "vmd", "--frame", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    meta = json.loads((tmp_path / "omegas.json").read_text())
    np.testing.assert_allclose(meta["frequencies_hz"], [2.0, 24.0, 600.0], rtol=0.01)


def test_outputs_byte_identical(tones, tmp_path):
    for d in ("a", "b"):
        assert main(["-q", "decompose", str(tones), "--m", "4", "--out", str(tmp_path / d)]) == EXIT_OK
    for name in ("modes.csv", "psd.csv", "omegas.json", "kappa.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_manifest(tones, tmp_path):
    main(["-q", "decompose", str(tones), "--m", "2", "--out", str(tmp_path)])
    man = json.loads((tmp_path / "manifest.json").read_text())
    for key in ("inputs_sha256", "subcommand", "params", "seed", "version", "backend",
                "timestamp", "csv_schema_version", "outputs", "csv_headers", "warnings"):
        assert key in man
    digest = hashlib.sha256(tones.read_bytes()).hexdigest()
    assert man["inputs_sha256"] == {str(tones): digest}
    assert man["subcommand"] == "decompose"
    assert man["params"]["m"] == 2
    assert man["version"].startswith("v0.1.0")
    assert man["csv_headers"]["kappa.csv"] == "iteration,kappa"


def test_not_converged_exit_code(tones, tmp_path, caplog):
    code = main(["decompose", str(tones), "--max-iters", "3", "--out", str(tmp_path)])
    assert code == EXIT_NOT_CONVERGED
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["warnings"] and "not converged" in man["warnings"][0]
    assert (tmp_path / "modes.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["decompose", "X", "--k", "0"],
        ["decompose", "X", "--alpha", "-1"],
        ["decompose", "X", "--algo", "emd"],
        ["tone-bench", "--snr-grid", "a,b"],
        ["sei-bench", "--m-list", ""],
        ["nonexistent"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == EXIT_USAGE


def test_missing_input_is_error(tmp_path):
    assert main(["-q", "decompose", str(tmp_path / "nope.jvmd"), "--out", str(tmp_path)]) == EXIT_ERROR


def test_corrupt_input_is_error(tmp_path, capsys):
    bad = tmp_path / "bad.jvmd"
    bad.write_bytes(b"NOPE" + bytes(40))
    assert main(["-q", "decompose", str(bad), "--out", str(tmp_path)]) == EXIT_ERROR
    assert "offset 0" in capsys.readouterr().err


def test_too_few_frames(tones, tmp_path):
    assert main(["-q", "decompose", str(tones), "--m", "9", "--out", str(tmp_path)]) == EXIT_ERROR


def test_csv_input(tmp_path):
    t = np.arange(64) / 64
    rows = [np.cos(2 * np.pi * 4 * t) + 0.5 * np.cos(2 * np.pi * 20 * t) for _ in range(2)]
    text = "\n".join("s," + ",".join(repr(float(v)) for v in r) for r in rows) + "\n"
    (tmp_path / "f.csv").write_text(text)
    code = main(["-q", "decompose", str(tmp_path / "f.csv"), "--k", "2", "--fs", "64", "--alpha", "100",
                 "--out", str(tmp_path / "o")])
    assert code in (EXIT_OK, EXIT_NOT_CONVERGED)
    meta = json.loads((tmp_path / "o" / "omegas.json").read_text())
    np.testing.assert_allclose(meta["frequencies_hz"], [4.0, 20.0], atol=0.5)


def test_output_dir_from_environment(tones, tmp_path, monkeypatch):
    monkeypatch.setenv("JVMD_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["-q", "decompose", str(tones), "--m", "2"]) == EXIT_OK
    assert (tmp_path / "env" / "modes.csv").exists()


def test_tone_bench(tmp_path):
    code = main(["-q", "tone-bench", "--snr-grid", "10", "--trials", "2", "--m", "2", "--l", "300",
                 "--fs", "1500", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "tone_bench.csv")
    assert rows[0] == ["algo", "snr_db", "mean_eta", "std_eta", "trials"]
    assert [r[0] for r in rows[1:]] == ["vmd", "jvmd"]
    assert all(float(r[2]) >= 0 for r in rows[1:])


def test_sei_bench_synthetic(tmp_path):
    code = main(["-q", "sei-bench", "--classes", "3", "--train-per-class", "4", "--test-per-class", "2",
                 "--m-list", "2", "--snr-grid", "15", "--l", "64", "--bands", "8", "--sparsity", "3",
                 "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "sei_accuracy.csv")
    assert [r[0] for r in rows[1:]] == ["vmd", "jvmd"]
    assert all(0.0 <= float(r[rows[0].index("accuracy")]) <= 1.0 for r in rows[1:])
    conf = json.loads((tmp_path / "sei_confusion.json").read_text())
    assert len(conf) == 2


def test_sei_bench_file(tmp_path):
    data = tmp_path / "em.jvmd"
    assert main(["-q", "make-emitters", str(data), "--classes", "3", "--per-class", "12", "--l", "64",
                 "--snr", "20"]) == EXIT_OK
    assert len(read_frames(data)) == 36
    code = main(["-q", "sei-bench", "--dataset", "file", "--input", str(data), "--train-per-class", "2",
                 "--m-list", "2", "--snr-grid", "inf", "--bands", "8", "--sparsity", "3",
                 "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert str(data) in man["inputs_sha256"]


def test_sei_bench_file_too_small(tmp_path):
    data = tmp_path / "em.jvmd"
    main(["-q", "make-emitters", str(data), "--classes", "2", "--per-class", "4", "--l", "64"])
    code = main(["-q", "sei-bench", "--dataset", "file", "--input", str(data), "--train-per-class", "5",
                 "--m-list", "2", "--snr-grid", "inf", "--out", str(tmp_path / "o")])
    assert code == EXIT_ERROR


def test_complexity_bench(tmp_path):
    code = main(["-q", "complexity-bench", "--k-list", "2", "--m-list", "1,2", "--l", "64",
                 "--iters", "2", "--repeats", "2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "complexity.csv")
    assert len(rows) == 3
    slopes = read_csv(tmp_path / "complexity_slopes.csv")
    assert len(slopes) == 2


def test_make_tones_matches_golden(tmp_path):
    out = tmp_path / "g.jvmd"
    assert main(["-q", "make-tones", str(out), "--n", "4", "--l", "64", "--fs", "1500",
                 "--snr", "20", "--seed", "7"]) == EXIT_OK
    assert out.read_bytes() == GOLDEN.read_bytes()
    assert hashlib.sha256(GOLDEN.read_bytes()).hexdigest() == GOLDEN_SHA256


def test_module_entry_point(tmp_path):
    env = dict(os.environ, JVMD_OUTPUT_DIR=str(tmp_path))
    proc = subprocess.run([sys.executable, "-m", "jvmd", "decompose", str(GOLDEN), "--k", "0"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == EXIT_USAGE
    proc = subprocess.run([sys.executable, "-m", "jvmd", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
