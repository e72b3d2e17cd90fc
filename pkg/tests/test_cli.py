import json
import math
import subprocess
import sys

import pytest

from nlg.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_row_d1_p1(capsys):
    code, out, _ = run_cli(capsys, "constants", "--d", "1", "--p", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "d,p,C_p,G_dp,gamma_limit_constant"
    fields = row.split(",")
    assert fields[0] == "1"
    assert math.isclose(float(fields[-1]), 2.0 * math.log(2.0), rel_tol=1e-12)


def test_constants_row_d1_p2(capsys):
    _, out, _ = run_cli(capsys, "constants", "--d", "1", "--p", "2")
    assert out.strip().splitlines()[1].endswith(",0.5")


def test_constants_row_d2_p2(capsys):
    _, out, _ = run_cli(capsys, "constants", "--d", "2", "--p", "2")
    last = float(out.strip().splitlines()[1].split(",")[-1])
    assert math.isclose(last, math.pi / 4.0, rel_tol=1e-12)


@pytest.fixture
def staircase_file(tmp_path):
    path = tmp_path / "stairs.json"
    path.write_text(json.dumps({
        "breakpoints": [0.0, 1 / 3, 2 / 3, 1.0],
        "values": [0.0, 0.1, 0.2],
        "tail_mode": "domain_only",
    }))
    return str(path)


def test_lambda_staircase(capsys, staircase_file):
    code, out, _ = run_cli(capsys, "lambda", "--input", staircase_file,
                           "--delta", "0.1", "--p", "2")
    assert code == 0
    assert math.isclose(float(out), 0.01, rel_tol=1e-12)


def test_lambda_constant_fixture(capsys, tmp_path):
    path = tmp_path / "const.json"
    path.write_text(json.dumps({"breakpoints": [0.0, 1.0], "values": [0.4],
                                "tail_mode": "domain_only"}))
    _, out, _ = run_cli(capsys, "lambda", "--input", str(path),
                        "--delta", "0.1", "--p", "1")
    assert out.strip() == "0"


def test_lambda_divergent_prints_inf(capsys, tmp_path):
    path = tmp_path / "jump.json"
    path.write_text(json.dumps({"breakpoints": [0.0, 1.0, 2.0],
                                "values": [0.0, 1.0],
                                "tail_mode": "domain_only"}))
    _, out, _ = run_cli(capsys, "lambda", "--input", str(path),
                        "--delta", "0.4", "--p", "1")
    assert out.strip() == "inf"


def test_lambda_pwa_requires_segment_flag(capsys, tmp_path):
    path = tmp_path / "tent.json"
    path.write_text(json.dumps({"nodes": [[0, 0], [1, 1], [2, 0]],
                                "compact_support": True}))
    code, _, err = run_cli(capsys, "lambda", "--input", str(path),
                           "--delta", "0.25", "--p", "1")
    assert code == 2 and "--segment" in err
    code, out, _ = run_cli(capsys, "lambda", "--input", str(path),
                           "--delta", "0.25", "--p", "1", "--segment")
    assert code == 0 and float(out) > 0.0


def test_segment_roundtrip(capsys, tmp_path):
    src = tmp_path / "tent.json"
    src.write_text(json.dumps({"nodes": [[0, 0], [1, 1], [2, 0]],
                               "compact_support": True}))
    dst = tmp_path / "step.json"
    code, _, _ = run_cli(capsys, "segment", "--input", str(src),
                         "--delta", "0.25", "--output", str(dst))
    assert code == 0
    step = json.loads(dst.read_text())
    assert step["tail_mode"] == "compact_support"
    assert step["values"] == [0.25, 0.5, 0.75, 0.5, 0.25]


def test_rearrange_discrete(capsys, tmp_path):
    src = tmp_path / "arr.json"
    src.write_text(json.dumps({"species": [2, 0, 1]}))
    code, out, _ = run_cli(capsys, "rearrange", "--input", str(src))
    assert code == 0
    assert json.loads(out) == {"species": [0, 1, 2]}


def test_rearrange_step(capsys, tmp_path):
    src = tmp_path / "step.json"
    src.write_text(json.dumps({"breakpoints": [0.0, 0.3, 1.0],
                               "values": [1.0, 0.0],
                               "tail_mode": "domain_only"}))
    code, out, _ = run_cli(capsys, "rearrange", "--input", str(src),
                           "--domain", "0", "1")
    assert code == 0
    got = json.loads(out)
    assert got["values"] == [0.0, 1.0]
    assert got["breakpoints"] == [0.0, 0.7, 1.0]


def test_hostility(capsys, tmp_path):
    (tmp_path / "arr.json").write_text(json.dumps({"species": [0, 2, 0]}))
    (tmp_path / "h.json").write_text(json.dumps({"h": [1.0, 0.5, 1 / 3]}))
    (tmp_path / "e.json").write_text(json.dumps({"band_complement": 1}))
    code, out, _ = run_cli(capsys, "hostility",
                           "--arrangement", str(tmp_path / "arr.json"),
                           "--weights", str(tmp_path / "h.json"),
                           "--enemies", str(tmp_path / "e.json"))
    assert code == 0 and out.strip() == "1"


def test_hostility_schema_error_exit_code(capsys, tmp_path):
    (tmp_path / "arr.json").write_text(json.dumps({"species": [0, 2, 0]}))
    (tmp_path / "h.json").write_text(json.dumps({"h": [1.0, 2.0]}))
    (tmp_path / "e.json").write_text(json.dumps({"band_complement": 1}))
    code, _, err = run_cli(capsys, "hostility",
                           "--arrangement", str(tmp_path / "arr.json"),
                           "--weights", str(tmp_path / "h.json"),
                           "--enemies", str(tmp_path / "e.json"))
    assert code == 1 and "nonincreasing" in err


def test_fuzz_no_violations(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "--n-max", "4", "--species-max", "3",
                           "--k", "1", "--trials", "10", "--seed", "7")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "checked,violations"
    assert row.endswith(",0")


def test_fuzz_flat_weights_tie_handling(capsys):
    # constant h exercises the tie case: still no violations expected
    code, out, _ = run_cli(capsys, "fuzz", "--n-max", "3", "--species-max", "3",
                           "--k", "2", "--trials", "3", "--seed", "123")
    assert code == 0 and out.strip().splitlines()[1].endswith(",0")


def test_converge_recovery_ramp(capsys):
    code, out, _ = run_cli(capsys, "converge-recovery", "--shape", "ramp",
                           "--p", "2", "--delta-start", "0.01",
                           "--delta-factor", "0.1", "--steps", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "delta,lambda,limit,ratio"
    assert len(lines) == 5  # three deltas + extrapolated row
    ratios = [float(l.split(",")[-1]) for l in lines[1:]]
    assert ratios[-1] == pytest.approx(1.0, abs=1e-3)
    # tail ratios approach 1 monotonically
    assert abs(ratios[2] - 1.0) < abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)


def test_converge_recovery_single_step_no_extrapolation(capsys):
    code, out, _ = run_cli(capsys, "converge-recovery", "--shape", "tent",
                           "--p", "1", "--delta-start", "0.1",
                           "--delta-factor", "0.5", "--steps", "1")
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_converge_sectioning_small(capsys):
    code, out, _ = run_cli(capsys, "converge-sectioning", "--d", "2",
                           "--shape", "radial-tent", "--delta", "0.4",
                           "--p", "2", "--dirs", "8", "--offsets", "32",
                           "--mc-samples", "20000", "--seed", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "delta,sectioning_estimate,mc_estimate,mc_stderr,limit"
    fields = [float(v) for v in lines[1].split(",")]
    sect, mc, se, lim = fields[1], fields[2], fields[3], fields[4]
    assert abs(sect - mc) < 6.0 * se + 0.2
    assert math.isclose(lim, math.pi ** 2 / 4.0, rel_tol=1e-12)


def test_unknown_flag_is_error():
    proc = subprocess.run([sys.executable, "-m", "nlg.cli", "constants",
                           "--p", "1", "--bogus"], capture_output=True)
    assert proc.returncode == 2


def _run_bytes(args):
    proc = subprocess.run([sys.executable, "-m", "nlg.cli"] + args,
                          capture_output=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def test_byte_identical_reruns(tmp_path):
    (tmp_path / "arr.json").write_text(json.dumps({"species": [3, 1, 2]}))
    invocations = [
        ["constants", "--d", "2", "--p", "1.5"],
        ["fuzz", "--n-max", "3", "--species-max", "3", "--k", "1",
         "--trials", "7", "--seed", "99"],
        ["converge-recovery", "--shape", "tent", "--p", "1",
         "--delta-start", "0.2", "--delta-factor", "0.5", "--steps", "3"],
        ["rearrange", "--input", str(tmp_path / "arr.json")],
        ["converge-sectioning", "--delta", "0.4", "--p", "2", "--dirs", "6",
         "--offsets", "24", "--mc-samples", "5000", "--seed", "17"],
    ]
    for args in invocations:
        assert _run_bytes(args) == _run_bytes(args)
