import csv
import json
import math

import numpy as np
import pytest

from entcap import io
from entcap.cli import EXIT_INPUT, EXIT_OK, EXIT_VERIFY, build_parser, main
from entcap.self_inverse import h1, ising, parity
from entcap.states import random_state

BETA = 1.912273289


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_state_json_round_trip():
    rng = np.random.default_rng(40)
    s = random_state(2, 3, rng)
    back = io.state_from_json(json.loads(json.dumps(io.state_to_json(s))))
    assert (back.dA, back.dB) == (2, 3)
    assert back.fidelity(s) > 1 - 1e-12
    with pytest.raises(io.SpecError):
        io.state_from_json({"dA": 2, "re": [1, 0]})
    with pytest.raises(io.SpecError):
        io.state_from_json({"dA": 2, "dB": 2, "re": [1, 0]})


def test_factor_json_round_trip():
    x = parity("3/2")
    back = io.factor_from_json(json.loads(json.dumps(io.factor_to_json(x))))
    assert np.allclose(back.matrix, x.matrix)


def test_parse_factor_specs(tmp_path):
    assert io.parse_factor("pauli-z").dim == 2
    assert io.parse_factor("parity:j=3/2").dim == 4
    assert io.parse_factor("boson:D=9").dim == 9
    path = tmp_path / "x.json"
    path.write_text(json.dumps(io.factor_to_json(parity(1))))
    assert io.parse_factor(f"file:{path}").dim == 3
    assert io.parse_factor(str(path)).dim == 3
    for bad in ("nonsense", "parity:j", "parity:j=0.3", "boson:D=x", f"file:{tmp_path / 'missing.json'}"):
        with pytest.raises(io.SpecError):
            io.parse_factor(bad)


def test_parse_hamiltonian_and_state(tmp_path):
    h = io.parse_hamiltonian("parity:j=1")
    assert h.dims == (3, 3)
    assert io.parse_hamiltonian("ising").dims == (2, 2)
    path = tmp_path / "h.json"
    m = ising().matrix
    path.write_text(json.dumps({"dA": 2, "dB": 2, "re": m.real.ravel().tolist(), "im": m.imag.ravel().tolist()}))
    hm, dA, dB = io.parse_hamiltonian(f"file:{path}")
    assert np.allclose(hm, m) and (dA, dB) == (2, 2)
    with pytest.raises(io.SpecError):
        io.parse_hamiltonian("heisenberg")

    x0 = 0.9167782798
    assert io.parse_state("optimal", h, x0).dA == 3
    assert io.parse_state("optimal:x=0.7,phase=+i", h, x0).dA == 3
    assert io.parse_state("eigen-product", h, x0).dB == 3
    assert io.parse_state("ecs:eta=0.7853981634,x=0.8", h, x0).dA == 3
    with pytest.raises(io.SpecError):
        io.parse_state("optimal", None, x0)
    with pytest.raises(io.SpecError):
        io.parse_state("optimal:x=1.5", h, x0)
    with pytest.raises(io.SpecError):
        io.parse_state("ghz", h, x0)


def test_run_record_formats():
    rec = io.RunRecord("demo", {"a": 1})
    assert rec.check("v", 1.00001, 1.0, 1e-3)
    assert not rec.check("w", 2.0, 1.0, 1e-3)
    assert not rec.passed
    obj = json.loads(rec.to_json())
    assert obj["outputs"]["v"] == 1.00001
    assert "FAIL" in rec.to_text() and "PASS" in rec.to_text()
    assert io.fmt(1 / 3) == "0.3333333333"
    assert io.fmt(-0.0) == "0"


def test_cli_beta(capsys):
    code, out, _ = _run(capsys, "--json", "beta")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert abs(obj["outputs"]["beta"] - BETA) < 1e-9
    assert obj["checks"][0]["passed"] is True


def test_cli_capability_writes_state(capsys, tmp_path):
    out_path = tmp_path / "opt.json"
    code, out, _ = _run(capsys, "capability", "--factor-a", "parity:j=1", "--factor-b", "boson:D=8",
                        "--state-out", str(out_path))
    assert code == EXIT_OK
    assert "beta" in out
    s = io.state_from_json(json.loads(out_path.read_text()))
    assert (s.dA, s.dB) == (3, 8)


def test_cli_invalid_inputs_exit_two(capsys, tmp_path):
    code, _, err = _run(capsys, "capability", "--factor-a", "identity:d=2", "--factor-b", "pauli-z")
    assert code == EXIT_INPUT
    assert "error" in err
    code, _, _ = _run(capsys, "capability", "--factor-a", f"file:{tmp_path / 'nope.json'}", "--factor-b", "pauli-z")
    assert code == EXIT_INPUT
    code, _, _ = _run(capsys, "rate-curve", "--steps", "1", "--out", str(tmp_path / "c.csv"))
    assert code == EXIT_INPUT


def test_cli_verify_failure_exit_three(capsys):
    code, out, _ = _run(capsys, "verify", "--only", "beta-bound", "--beta-ref", "1.95")
    assert code == EXIT_VERIFY
    assert out.splitlines()[0].startswith("FAIL  beta-bound")
    code, out, _ = _run(capsys, "verify", "--only", "beta-bound")
    assert code == EXIT_OK
    assert out.startswith("PASS  beta-bound")


def test_cli_rate_curve_csv_round_trip(capsys, tmp_path):
    path = tmp_path / "curve.csv"
    code, out, _ = _run(capsys, "--json", "rate-curve", "--hamiltonian", "parity:j=1", "--state", "optimal",
                        "--steps", "21", "--out", str(path))
    assert code == EXIT_OK
    obj = json.loads(out)
    rows = _csv(path)
    assert len(rows) == 21
    assert list(rows[0]) == ["t", "entropy_bits", "gamma_bits_per_time", "method"]
    best = max(rows, key=lambda r: float(r["gamma_bits_per_time"]))
    assert abs(float(best["gamma_bits_per_time"]) - obj["outputs"]["gamma_max_sampled"]) < 1e-12
    assert abs(float(best["t"]) - obj["outputs"]["t_at_gamma_max"]) < 1e-12
    assert abs(obj["outputs"]["gamma_at_t0_zero"] - BETA) < 1e-8


def test_cli_rate_curve_from_files(capsys, tmp_path):
    m = ising().matrix
    hpath = tmp_path / "h.json"
    hpath.write_text(json.dumps({"dA": 2, "dB": 2, "re": m.real.ravel().tolist(), "im": m.imag.ravel().tolist()}))
    spath = tmp_path / "s.json"
    spath.write_text(json.dumps(io.state_to_json(random_state(2, 2, np.random.default_rng(41)))))
    code, _, _ = _run(capsys, "rate-curve", "--hamiltonian", f"file:{hpath}", "--state", f"file:{spath}",
                      "--steps", "5", "--out", str(tmp_path / "c.csv"))
    assert code == EXIT_OK
    spath.write_text(json.dumps(io.state_to_json(random_state(2, 3, np.random.default_rng(42)))))
    code, _, _ = _run(capsys, "rate-curve", "--hamiltonian", f"file:{hpath}", "--state", f"file:{spath}",
                      "--steps", "5", "--out", str(tmp_path / "c.csv"))
    assert code == EXIT_INPUT


def test_cli_op_rate(capsys, tmp_path):
    path = tmp_path / "op.csv"
    code, out, _ = _run(capsys, "--json", "op-rate", "--hamiltonian", "parity:j=3/2", "--out", str(path))
    assert code == EXIT_OK
    obj = json.loads(out)
    assert abs(obj["outputs"]["r_max"] - BETA) < 2e-4
    rows = _csv(path)
    assert all(r["rate_analytic"] != "" for r in rows)
    best = max(rows, key=lambda r: float(r["rate_fd"]))
    assert abs(float(best["rate_fd"]) - obj["outputs"]["rate_max_sampled"]) < 1e-12


def test_cli_op_rate_non_traceless_leaves_analytic_blank(capsys, tmp_path):
    path = tmp_path / "op.csv"
    code, _, _ = _run(capsys, "op-rate", "--factor-a", "parity:j=1", "--factor-b", "parity:j=1",
                      "--steps", "10", "--out", str(path))
    assert code == EXIT_OK
    assert all(r["rate_analytic"] == "" for r in _csv(path))


def test_cli_ecs_scan(capsys, tmp_path):
    path = tmp_path / "ecs.csv"
    code, out, _ = _run(capsys, "--json", "ecs-scan", "--j", "1", "--steps", "5", "--out", str(path))
    assert code == EXIT_OK
    obj = json.loads(out)
    assert abs(obj["outputs"]["orthogonal_branch_rate"] + BETA) < 1e-8
    assert abs(obj["outputs"]["overlap_at_unit_modulus"] - math.cos(2.0) ** 2) < 1e-9
    assert len(_csv(path)) == 5


def test_cli_lower_bound(capsys):
    code, out, _ = _run(capsys, "--json", "lower-bound", "--hamiltonian", "ising", "--samples", "200",
                        "--steps", "40")
    assert code == EXIT_OK
    assert json.loads(out)["outputs"]["lower_bound_holds"] is True


def test_cli_deterministic_modulo_timestamp(capsys, tmp_path):
    outs = []
    for _ in range(2):
        _, out, _ = _run(capsys, "--json", "--seed", "5", "rate-curve", "--steps", "11",
                         "--out", str(tmp_path / "c.csv"))
        obj = json.loads(out)
        obj.pop("timestamp")
        outs.append(obj)
    assert outs[0] == outs[1]


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("ENTCAP_SEED", "17")
    assert build_parser().parse_args(["beta"]).seed == 17
    monkeypatch.setenv("ENTCAP_SEED", "junk")
    assert build_parser().parse_args(["beta"]).seed == 0
