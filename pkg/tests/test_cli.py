import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from minsplit.cli import RunConfig, main
from minsplit.errors import ValidationError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_encoding_d7(capsys):
    code, out, _ = run(capsys, "verify-encoding", "--d", "7")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["certificate"]["gap"] <= 1e-9
    assert doc["part0_value"] == pytest.approx(0.6889822, abs=1e-7)
    assert doc["part1_value"] == pytest.approx(0.6889822, abs=1e-7)


def test_verify_encoding_rejects_composite(capsys):
    code, _, err = run(capsys, "verify-encoding", "--d", "4")
    assert code == 2 and "d must be prime" in err


def test_verify_encoding_json_d2(capsys):
    code, out, _ = run(capsys, "verify-encoding", "--d", "2", "--format", "json")
    assert code == 0 and json.loads(out)["certificate"]["primal_value"] == pytest.approx(0.5)


def test_verify_encoding_csv(capsys):
    code, out, _ = run(capsys, "verify-encoding", "--d", "3", "--format", "csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert code == 0 and rows["passed"] == "True"


def test_verify_encoding_tight_tolerance_fails(capsys):
    code, _, _ = run(capsys, "verify-encoding", "--d", "31", "--tol", "1e-18")
    assert code == 1


def test_splitting_demo_corpus(capsys):
    code, out, _ = run(capsys, "splitting-demo", "--d", "2", "--n", "200", "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["cases"] == 201 and doc["passed"]
    assert all(r["hidden_c_pass"] and r["given_c_pass"] for r in doc["reports"])


def test_splitting_demo_coin_only(capsys):
    code, out, _ = run(capsys, "splitting-demo", "--d", "2", "--n", "0")
    doc = json.loads(out)
    assert code == 0 and doc["cases"] == 1
    assert doc["pointer_hyc_given_c_bits"] == pytest.approx(1.0)


def test_splitting_demo_csv(capsys):
    code, out, _ = run(capsys, "splitting-demo", "--format", "csv", "--n", "3", "--seed", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["case", "alpha_bits", "hyc_c_bits", "bound_bits", "pass"]
    assert len(rows) == 5 and rows[1][0] == "coin"


def test_seed_required(capsys):
    code, _, err = run(capsys, "splitting-demo", "--n", "5")
    assert code == 2 and "--seed" in err
    code, _, err = run(capsys, "violation-scan", "--d", "5", "--n", "5")
    assert code == 2


def test_violation_scan_d101(capsys):
    code, out, _ = run(capsys, "violation-scan", "--d", "101", "--n", "500", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["quantum_bits_upper"] <= 0.8632
    assert doc["classical_bound_bits"] == pytest.approx(2.3291, abs=1e-4)


def test_violation_scan_not_prime(capsys):
    code, _, err = run(capsys, "violation-scan", "--d", "6", "--seed", "1")
    assert code == 2 and "d must be prime" in err


def test_violation_curve_csv(capsys):
    code, out, _ = run(capsys, "violation-curve", "--d-list", "2,3,5,7,11,13", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    gaps = [float(r["gap_bits"]) for r in rows]
    assert code == 0 and len(rows) == 6
    assert gaps[0] < 0 < gaps[-1] and all(b > a for a, b in zip(gaps, gaps[1:]))


def test_violation_curve_svg(tmp_path, capsys):
    path = tmp_path / "curve.svg"
    code, _, _ = run(capsys, "violation-curve", "--format", "svg", "--out", str(path))
    root = ET.parse(path).getroot()
    ns = {"s": "http://www.w3.org/2000/svg"}
    assert code == 0 and len(root.findall("s:polyline", ns)) == 2
    texts = [t.text for t in root.findall("s:text", ns)]
    assert "classical bound" in texts and "quantum upper" in texts


def test_violation_curve_rejects_composite(capsys):
    code, _, _ = run(capsys, "violation-curve", "--d-list", "2,9")
    assert code == 2


def test_leakage(capsys):
    code, out, _ = run(capsys, "leakage", "--m", "1", "--seed", "0")
    doc = json.loads(out)
    assert code == 0 and doc["smallest_prime_arithmetic"] == doc["smallest_prime_scan"] == 53


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2
    code, _, _ = run(capsys, "violation-scan", "--d", "3", "--n", "-1", "--seed", "0")
    assert code == 2


def test_run_config_invariants():
    with pytest.raises(ValidationError):
        RunConfig("verify-encoding", tolerance=0.0)
    with pytest.raises(ValidationError):
        RunConfig("verify-encoding", d=1)


@pytest.mark.parametrize("argv", [
    ["splitting-demo", "--d", "3", "--n", "20", "--seed", "5"],
    ["violation-scan", "--d", "7", "--n", "50", "--seed", "2"],
    ["violation-curve", "--format", "svg"],
])
def test_byte_identical_files(tmp_path, argv):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}"
        assert main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "minsplit.cli", "verify-encoding", "--d", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "d must be prime" in proc.stderr
