import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimspec import pointfile
from dimspec.cli import main
from dimspec.geometry import FiniteApprox


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def f1_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pts") / "f1.pts"
    assert main(["generate", "--family", "power", "--lambda", "1", "--delta", "1e-6",
                 "--compact", "-o", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def interval_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pts") / "interval.pts"
    assert main(["generate", "--family", "interval", "--delta", "1e-3", "-o", str(path)]) == 0
    return path


def test_generate_power_sequence(tmp_path, capsys):
    out = tmp_path / "f.pts"
    code, text, _ = run(["generate", "--family", "power", "--lambda", "1", "--delta", "1e-3",
                         "-o", out], capsys)
    assert code == 0 and "points=1001" in text
    F = pointfile.read_points(out)
    assert len(F) == 1001 and F.resolution == 1e-3


def test_generate_moran_counts(tmp_path, capsys):
    out = tmp_path / "m.pts"
    code, text, _ = run(["generate", "--family", "moran", "--L", "0.05", "--alpha", "2",
                         "--beta", "1.5", "--depth", "2", "-o", out], capsys)
    assert code == 0
    assert len(pointfile.read_points(out)) == 2 * 4 * 20


def test_generate_derived_families(tmp_path, capsys):
    interval_file = tmp_path / "i.pts"
    assert run(["generate", "--family", "interval", "--delta", "0.01", "-o", interval_file],
               capsys)[0] == 0
    prod = tmp_path / "p.pts"
    assert run(["generate", "--family", "product", "--input", interval_file,
                "--input2", interval_file, "-o", prod], capsys)[0] == 0
    assert len(pointfile.read_points(prod)) == 101 ** 2
    shifted = tmp_path / "s.pts"
    assert run(["generate", "--family", "shift", "--input", interval_file, "--offset", "3",
                "-o", shifted], capsys)[0] == 0
    assert pointfile.read_points(shifted).points[0, 0] == 3.0
    union = tmp_path / "u.pts"
    assert run(["generate", "--family", "union", "--input", interval_file,
                "--input2", shifted, "-o", union], capsys)[0] == 0
    assert len(pointfile.read_points(union)) == 202
    img = tmp_path / "h.pts"
    assert run(["generate", "--family", "holder", "--input", interval_file,
                "--exponent", "2", "-o", img], capsys)[0] == 0


def test_generate_usage_errors(tmp_path, capsys):
    code, _, err = run(["generate", "--family", "power", "--delta", "1e-3"], capsys)
    assert code == 2 and "--lam" in err
    code, _, err = run(["generate", "--family", "power", "--lambda", "1", "--delta", "2",
                        "-o", tmp_path / "x.pts"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["generate", "--family", "cantor"])
    assert info.value.code == 2


def test_estimate_json_and_csv(f1_file, capsys):
    code, text, _ = run(["estimate", f1_file, "--what", "assouad_spectrum", "--theta", "0.25"],
                        capsys)
    assert code == 0
    rec = json.loads(text)
    assert rec["value"] == pytest.approx(2 / 3, abs=0.1)
    assert rec["admissible_rungs"] == len(rec["trace"])
    code, text, _ = run(["estimate", f1_file, "--what", "upper_box", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0 and rows[0] == ["what", "theta", "value"] and rows[1][0] == "upper_box"


def test_estimate_errors(f1_file, tmp_path, capsys):
    code, _, err = run(["estimate", f1_file, "--what", "assouad_spectrum", "--theta", "0.05"],
                       capsys)
    assert code == 3 and "smallest usable theta" in err
    code, _, _ = run(["estimate", f1_file, "--what", "lower_spectrum"], capsys)
    assert code == 2
    code, _, _ = run(["estimate", tmp_path / "missing.pts", "--what", "upper_box"], capsys)
    assert code == 2


def test_sweep_output_and_determinism(f1_file, capsys):
    code, a, _ = run(["sweep", f1_file], capsys)
    assert code == 0
    _, b, _ = run(["sweep", f1_file], capsys)
    assert a == b
    rows = list(csv.reader(io.StringIO(a)))
    assert rows[0] == ["theta", "kind", "value", "slope_fit", "admissible_rungs", "witness_R"]
    thetas = [float(r[0]) for r in rows[1:]]
    assert thetas == sorted(thetas)
    assert [r[1] for r in rows[1:3]] == ["assouad", "lower"]


def test_sweep_with_no_admissible_theta(f1_file, capsys):
    code, _, err = run(["sweep", f1_file, "--start", "0.05", "--stop", "0.1"], capsys)
    assert code == 3 and "skipped" in err


def test_compare_exit_codes(f1_file, tmp_path, capsys):
    sweep = tmp_path / "sweep.csv"
    assert run(["sweep", f1_file, "--kinds", "assouad", "--start", "0.1", "--stop", "0.9",
                "--step", "0.1", "-o", sweep], capsys)[0] == 0
    code, text, _ = run(["compare", sweep, "--oracle", "f_lambda", "--lambda", "1"], capsys)
    assert code == 0 and "# summary:" in text
    code, text, _ = run(["compare", sweep, "--oracle", "f_lambda", "--lambda", "5"], capsys)
    assert code == 1 and "false" in text
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run(["compare", empty, "--oracle", "f_lambda", "--lambda", "1"], capsys)[0] == 2
    assert run(["compare", sweep, "--oracle", "f_lambda"], capsys)[0] == 2


def test_validate_reports(interval_file, f1_file, capsys):
    for path in (interval_file, f1_file):
        code, text, _ = run(["validate", path], capsys)
        report = json.loads(text)
        assert code == 0 and report["pass"]
        assert {c["check"] for c in report["checks"]} >= {"general bounds", "lower bounds"}


def test_corrupted_point_file(tmp_path, capsys, f1_file):
    bad = tmp_path / "bad.pts"
    lines = f1_file.read_text().splitlines()
    bad.write_text("\n".join(lines[:5] + ["0.5 oops"] + lines[6:]) + "\n")
    for cmd in (["estimate", bad, "--what", "upper_box"], ["sweep", bad], ["validate", bad]):
        assert run(cmd, capsys)[0] == 2
    bad.write_text("not a header\n0.1\n")
    assert run(["sweep", bad], capsys)[0] == 2


def test_module_entry_point(interval_file):
    proc = subprocess.run([sys.executable, "-m", "dimspec", "estimate", str(interval_file),
                           "--what", "upper_box", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("what,theta,value")


coords = st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.lists(coords, min_size=1, max_size=40, unique=True), st.sampled_from([1, 2]))
def test_point_file_round_trip(values, d):
    if d == 2:
        values = values[: len(values) // 2 * 2] or [0.0, 1.0]
    pts = np.array(values, dtype=float).reshape(-1, d)
    F = FiniteApprox.from_points(pts, 1e-3, "euclidean" if d == 1 else "sup", "t")
    G = pointfile.loads(pointfile.dumps(F))
    assert np.array_equal(G.points, F.points)
    assert (G.resolution, G.metric, G.label, G.d) == (F.resolution, F.metric, F.label, F.d)


def test_point_file_rejects_bad_headers():
    with pytest.raises(pointfile.PointFileError):
        pointfile.loads("dimspec-pts v2 d=1 delta=0.1 metric=euclidean label=x\n0\n")
    with pytest.raises(pointfile.PointFileError):
        pointfile.loads("dimspec-pts v1 d=3 delta=0.1 metric=euclidean label=x\n0 0 0\n")
    with pytest.raises(pointfile.PointFileError):
        pointfile.loads("dimspec-pts v1 d=1 delta=0.1 metric=euclidean label=x\n")
    with pytest.raises(pointfile.PointFileError):
        pointfile.loads("dimspec-pts v1 d=1 delta=0.1 metric=euclidean label=x\nnan\n")
