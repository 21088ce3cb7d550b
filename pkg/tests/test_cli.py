import json
import math
import subprocess
import sys

import numpy as np
import pytest

from bellud import BellLikeFamily, optimal_discrimination_unitary
from bellud.cli import main


def run_cli(*args, cwd=None):
    proc = subprocess.run([sys.executable, "-m", "bellud.cli", *map(str, args)],
                          capture_output=True, cwd=cwd)
    return proc.returncode, proc.stdout.decode(), proc.stderr.decode()


def csv_rows(text):
    return [line.split(",") for line in text.splitlines()]


def test_optimal_unitary_bell_point(capsys):
    assert main(["optimal-unitary", "--theta2", "0.7853981634"]) == 0
    data = json.loads(capsys.readouterr().out)
    entries = np.array(data["entries"])
    u = entries[..., 0] + 1j * entries[..., 1]
    r = 1 / math.sqrt(2)
    expected_dag = np.array([[r, 0, -r, 0], [0, r, 0, -r], [r, 0, r, 0], [0, r, 0, r]])
    np.testing.assert_allclose(u.conj().T, expected_dag, atol=1e-10)


def test_table_separable_is_permutation(capsys):
    assert main(["table", "--theta1", "0", "--theta2", "0", "--phi", "0"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert rows[0][0] == "state" and len(rows) == 5
    body = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    np.testing.assert_allclose(body.sum(axis=1), 1, atol=1e-12)
    # every column has at most one nonzero state
    assert all(np.count_nonzero(body[:, k]) <= 1 for k in range(body.shape[1]))


def test_verify_end_to_end():
    code, out, _ = run_cli("verify", "--theta2", "0.5236", "--seed", "7")
    assert code == 0
    assert "success=0.250000 PASS" in out
    assert "FAIL" not in out


@pytest.mark.parametrize("args,line", [(("--theta1", "0.785398163397448", "--theta2",
                                         "0.785398163397448"), "success=0.500000 PASS"),
                                       (("--theta1", "0", "--theta2", "0"),
                                        "success=1.000000 PASS")])
def test_verify_special_points(capsys, args, line):
    assert main(["verify", *args]) == 0
    assert line in capsys.readouterr().out


def test_probs(tmp_path, capsys):
    state = tmp_path / "s.json"
    state.write_text(json.dumps({"a13": [1, 0]}))
    assert main(["probs", "--state", str(state), "--eta1", str(1 / math.sqrt(2))]) == 0
    rows = csv_rows(capsys.readouterr().out)
    probs = {(r[0], r[1]): float(r[2]) for r in rows[1:]}
    assert probs[("1", "1")] == pytest.approx(0.5) and probs[("1", "3")] == 0


def test_confidence_sweep(capsys):
    assert main(["confidence-sweep", "--c1", "0", "--c2-points", "3", "--phi-points", "4"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert rows[0] == ["c2", "phi", "D1", "D2", "D3"]
    assert len(rows) == 1 + 12
    assert all(float(v) <= 1 + 1e-15 for row in rows[1:] for v in row[2:])


def test_unitary_file_and_out(tmp_path):
    fam = BellLikeFamily.from_angles(math.pi / 6, math.pi / 8)
    uf = tmp_path / "u.json"
    uf.write_text(json.dumps(optimal_discrimination_unitary(fam).to_json()))
    out = tmp_path / "t.csv"
    assert main(["verify", "--theta1", str(math.pi / 6), "--theta2", str(math.pi / 8),
                 "--unitary-file", str(uf), "--out", str(out)]) == 0
    assert "success=0.250000 INFO" in out.read_text()


def test_sweep_csv(tmp_path, capsys):
    grid = tmp_path / "grid.csv"
    grid.write_text("theta1,theta2\n0.2,0.3\n0,0\n")
    assert main(["sweep", "--grid-file", str(grid), "--restarts", "4"]) == 0
    text = capsys.readouterr().out
    rows = csv_rows(text)
    assert rows[0] == ["theta1", "theta2", "c2", "best_success"]
    assert float(rows[1][3]) == pytest.approx(0.25, abs=1e-6)
    assert float(rows[2][3]) == pytest.approx(1.0, abs=1e-6)
    assert "\r" not in text


def test_degrees_and_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta1": 0.1, "theta2": 0.2, "phi": 0.3}))
    assert main(["table", "--config", str(cfg), "--theta1", "30", "--theta2", "22.5",
                 "--phi", "22.5", "--degrees"]) == 0
    via_cfg = capsys.readouterr().out
    assert main(["table", "--theta1", str(math.pi / 6), "--theta2", str(math.pi / 8),
                 "--phi", str(math.pi / 8)]) == 0
    assert via_cfg == capsys.readouterr().out


def test_csv_format(capsys):
    main(["table", "--theta1", "0.3", "--theta2", "0.4", "--phi", "0.5"])
    out = capsys.readouterr().out
    for v in csv_rows(out)[1][1:]:
        assert len(v.replace("-", "").replace(".", "").lstrip("0")) <= 15


def test_optimize_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        code, _, _ = run_cli("optimize", "--theta1", "0.3", "--theta2", "0.6", "--restarts", "3",
                             "--seed", "4", "--out", tmp_path / name)
        assert code == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert {"best_success", "best_params", "seed", "evaluations"} <= set(data)


@pytest.mark.parametrize("args", [["bogus"], ["table", "--theta1", "abc"],
                                  ["table", "--eta1", "0.5", "--unitary-file", "u.json"],
                                  ["probs"]])
def test_usage_errors(args):
    code, _, err = run_cli(*args)
    assert code == 2 and "usage" in err


@pytest.mark.parametrize("args,needle", [(["table", "--theta1", "2.0"], "theta1"),
                                         (["table", "--epsilon", "0.5"], "epsilon"),
                                         (["table", "--priors", "0.5,0.5,0.5,0.5"], "priors")])
def test_validation_errors(args, needle):
    code, _, err = run_cli(*args)
    assert code == 1 and needle in err
