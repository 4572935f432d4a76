import csv
import json
import math
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from planar_bilinear.cli import AnalysisReport, InputError, build_report, main, parse_system

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

EXPECTED_EXIT = {
    "example1": 0,
    "example2": 2,
    "example3": 1,
    "ej1": 2,
    "ej1_bounded": 1,
    "rotation_plus_identity": 0,
    "rotation": 1,
    "rot_scalar": 0,
    "frozen": 1,
}


def fx(name):
    return str(FIXTURES / f"{name}.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_analyze_exit_codes(name, capsys):
    code, out, _ = run(capsys, "analyze", fx(name))
    assert code == EXPECTED_EXIT[name]
    assert "verdict:" in out


def test_analyze_example1_values(capsys):
    code, out, _ = run(capsys, "analyze", fx("example1"), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["larc"]["holds"]
    assert doc["larc"]["indicator_AB"] == pytest.approx(5.0, abs=1e-12)
    assert doc["larc"]["det_A_det_bracket"] == pytest.approx(5.0, abs=1e-12)
    assert doc["larc"]["shortcut_holds"]


def test_analyze_example3_failure_point(capsys):
    code, out, _ = run(capsys, "analyze", fx("example3"), "--json")
    doc = json.loads(out)
    assert code == 1
    assert doc["verdict"]["status"] == "NotControllable"
    assert doc["larc"]["failure_point"] == [1.0, 0.0]


def test_analyze_ej1_text(capsys):
    code, out, _ = run(capsys, "analyze", fx("ej1"))
    assert code == 2
    lo, hi = (3 - math.sqrt(2)) / 2, (3 + math.sqrt(2)) / 2
    assert f"[{lo:.6f}, {hi:.6f}]" in out
    assert "verdict: Inconclusive" in out


def test_json_round_trip_and_determinism(capsys):
    for name in EXPECTED_EXIT:
        _, first, _ = run(capsys, "analyze", fx(name), "--json", "--seed", "7")
        _, second, _ = run(capsys, "analyze", fx(name), "--json", "--seed", "7")
        assert first == second
        report = AnalysisReport.from_json(first)
        assert report.to_json() == first
        with open(fx(name)) as fh:
            rebuilt = build_report(parse_system(fh.read()), seed=7)
        assert AnalysisReport.from_json(rebuilt.to_json()) == report


def test_json_reasons_match_sections(capsys):
    for name in EXPECTED_EXIT:
        _, out, _ = run(capsys, "analyze", fx(name), "--json")
        doc = json.loads(out)
        reasons = {r["condition"]: r["holds"] for r in doc["verdict"]["reasons"]}
        assert reasons["lie_algebra_rank_condition"] == doc["larc"]["holds"]
        if "projective_controllability" in reasons:
            assert reasons["projective_controllability"] == doc["angular"]["controllable"]


def test_exit_code_is_function_of_status(capsys):
    codes = {}
    for name in EXPECTED_EXIT:
        code, out, _ = run(capsys, "analyze", fx(name), "--json")
        codes.setdefault(json.loads(out)["verdict"]["status"], set()).add(code)
    assert all(len(v) == 1 for v in codes.values())


@pytest.mark.parametrize("text, line, fragment", [
    ('{\n  "A": [[1, 2], [3, 4]],\n  "B": [[1, 2]]\n}\n', 3, "2x2"),
    ('{\n  "A": [[1, 2], [3, NaN]],\n  "B": [[1, 0], [0, 1]]\n}\n', 2, "finite"),
    ('{\n  "A": [[1, 2], [3, 4]],\n  "B": [[1, 0], [0, Infinity]]\n}\n', 3, "finite"),
    ('{\n  "A": [[1, 2], [3, 4]],\n  "B": [[1, "x"], [0, 1]]\n}\n', 3, "non-numeric"),
    ('{\n  "A": [[1, 2], [3, 4]]\n  "B": [[1, 0], [0, 1]]\n}\n', 3, ""),
    ('{\n  "A": [[1, 2], [3, 4]]\n}\n', 1, "B"),
])
def test_input_errors_are_line_anchored(tmp_path, capsys, text, line, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 64
    assert err.startswith(f"{path}:{line}: error:")
    assert fragment in err


def test_interval_control_set_validation(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"A": [[1, 0], [0, 1]], "B": [[0, 1], [-1, 0]], "control_set": [2, 1]}')
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 64 and "error" in err
    with pytest.raises(InputError):
        parse_system('{"A": [[1, 0], [0, 1]], "B": [[0, 1], [-1, 0]], "control_set": "ints"}')


def test_missing_file_and_bad_flags(tmp_path, capsys):
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == 64
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 64
    code, _, _ = run(capsys, "--eps", "-1", "analyze", fx("ej1"))
    assert code == 64


def test_simulate_rotation(tmp_path, capsys):
    out = tmp_path / "rot.csv"
    code, _, _ = run(capsys, "simulate", fx("rotation"), "--u-schedule", f"{2 * math.pi!r}:0",
                     "--x0", "1,0", "--dt", "1e-3", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "x1", "x2", "u"]
    last = [float(x) for x in rows[-1]]
    assert last[0] == pytest.approx(2 * math.pi)
    assert abs(last[1] - 1.0) <= 1e-6 and abs(last[2]) <= 1e-6
    # full double precision round-trips
    assert all(float(repr(float(x))) == float(x) for x in rows[5])


def test_simulate_ej1_angular(tmp_path, capsys):
    out = tmp_path / "ang.csv"
    t = 2 * 2 * math.pi / math.sqrt(7)
    code, _, _ = run(capsys, "simulate", fx("ej1"), "--u-schedule", "1:2", "--theta0", "0.3",
                     "--t", repr(t), "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "theta", "u"]
    advance = float(rows[-1][1]) - float(rows[1][1])
    assert abs(advance) == pytest.approx(2 * math.pi, abs=1e-4)
    assert float(rows[-1][0]) == pytest.approx(t)


def test_simulate_frozen_theta(tmp_path, capsys):
    out = tmp_path / "frozen.csv"
    code, _, _ = run(capsys, "simulate", fx("frozen"), "--u-schedule", "1:-0.5,1:3", "--theta0", "0.4",
                     "--out", str(out))
    assert code == 0
    thetas = {row[1] for row in list(csv.reader(out.open()))[1:]}
    assert thetas == {"0.40000000000000002"}


def test_simulate_input_errors(tmp_path, capsys):
    out = str(tmp_path / "x.csv")
    with pytest.raises(SystemExit) as exc:
        main(["simulate", fx("ej1"), "--u-schedule", "1:0", "--x0", "1,0", "--theta0", "0", "--out", out])
    assert exc.value.code == 64
    for extra in (["--x0", "0,0"], ["--x0", "1"], ["--x0", "1,0", "--dt", "0"],
                  ["--x0", "1,0", "--dt", "10"], ["--theta0", "0", "--t", "-1"]):
        code, _, err = run(capsys, "simulate", fx("ej1"), "--u-schedule", "1:2", *extra, "--out", out)
        assert code == 64, extra
        assert "error" in err
    code, _, _ = run(capsys, "simulate", fx("ej1"), "--u-schedule", "1:x", "--theta0", "0", "--out", out)
    assert code == 64
    code, _, err = run(capsys, "simulate", fx("ej1_bounded"), "--u-schedule", "1:5", "--theta0", "0",
                       "--out", out)
    assert code == 64 and "admissible" in err


def test_simulate_truncation_warns(tmp_path, capsys):
    path = tmp_path / "grow.json"
    path.write_text('{"A": [[50, 0], [0, 50]], "B": [[0, 0], [0, 0]]}')
    out = tmp_path / "g.csv"
    code, _, err = run(capsys, "simulate", str(path), "--u-schedule", "20:0", "--x0", "1,0",
                       "--out", str(out))
    assert code == 0 and "truncated" in err


def _scan(tmp_path, capsys, name, lo_hi, n):
    out = tmp_path / f"{name}.csv"
    code, _, _ = run(capsys, "delta-scan", fx(name), "--u-range", lo_hi, "--n", str(n), "--out", str(out))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["u", "delta", "re_lambda1", "re_lambda2", "im_lambda1", "case_tag"]
    return np.array([[float(x) for x in r[:5]] for r in rows[1:]]), [r[5] for r in rows[1:]]


def test_delta_scan_ej1(tmp_path, capsys):
    data, tags = _scan(tmp_path, capsys, "ej1", "-1,2", 301)
    assert len(data) == 301
    u = data[:, 0]
    np.testing.assert_allclose(data[:, 1], -4 * u * u + 4 * u + 1, rtol=0, atol=1e-12)
    # complex eigenvalues exactly where the flow on the projective line rotates
    for delta, tag in zip(data[:, 1], tags):
        assert (tag == "Rotational") == (delta < 0)
    assert tags[0] == "Rotational" and tags[150] == "TwoRealRoots"


def test_delta_scan_constant_columns(tmp_path, capsys):
    data, _ = _scan(tmp_path, capsys, "rotation", "-3,3", 11)
    assert np.all(data[:, 1] == data[0, 1])
    data, tags = _scan(tmp_path, capsys, "rot_scalar", "-5,5", 21)
    np.testing.assert_allclose(data[:, 1], -16.0, atol=1e-12)
    assert set(tags) == {"Rotational"}


def test_delta_scan_input_errors(capsys):
    assert run(capsys, "delta-scan", fx("ej1"), "--u-range", "2,1", "--out", "-")[0] == 64
    assert run(capsys, "delta-scan", fx("ej1"), "--u-range", "0,1", "--n", "1", "--out", "-")[0] == 64
    assert run(capsys, "delta-scan", fx("ej1"), "--u-range", "a,b", "--out", "-")[0] == 64


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "planar_bilinear", "analyze", fx("example3")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "NotControllable" in proc.stdout
