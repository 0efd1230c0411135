import json

import numpy as np
import pytest

from loravg.cli import dispatch


@pytest.fixture
def space_file(tmp_path):
    path = tmp_path / "space.json"
    path.write_text(json.dumps({"kind": "lattice", "L": 9}))
    return str(path)


@pytest.fixture
def chi_file(tmp_path):
    path = tmp_path / "chi.json"
    path.write_text(json.dumps({"values": [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]}))
    return str(path)


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_norm_subcommand(capsys, space_file, chi_file):
    code, out = run(capsys, "norm", "--space", space_file, "--fn", chi_file,
                    "--p", "2", "--q", "1", "--variant", "plain")
    assert code == 0
    payload = json.loads(out)
    assert payload == {"value": 4.0, "normable": True}


def test_build_space_round_trip(capsys, tmp_path, space_file):
    out1 = tmp_path / "canon1.json"
    out2 = tmp_path / "canon2.json"
    assert dispatch(["build-space", "--space", space_file, "--out", str(out1)]) == 0
    assert dispatch(["build-space", "--space", str(out1), "--out", str(out2)]) == 0
    a, b = json.loads(out1.read_text()), json.loads(out2.read_text())
    assert a["dist"] == b["dist"] and a["weights"] == b["weights"]
    assert out1.read_bytes() == out2.read_bytes()


def test_rearrange_subcommand(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({
        "kind": "matrix", "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
        "weights": [1, 2, 1]}))
    fn = tmp_path / "f.json"
    fn.write_text(json.dumps({"values": [3, 1, 2]}))
    svg = tmp_path / "star.svg"
    code, out = run(capsys, "rearrange", "--space", str(space), "--fn", str(fn),
                    "--plot", str(svg))
    assert code == 0
    payload = json.loads(out)
    assert payload["breakpoints"] == [0, 1, 2, 4]
    assert payload["levels"] == [3, 2, 1]
    content = svg.read_text()
    assert content.count("<line") >= 3 + 2  # three segments plus axes
    code, out = run(capsys, "rearrange", "--space", str(space), "--fn", str(fn),
                    "--distribution")
    assert json.loads(out)["levels"] == [4, 2, 1]


def test_avg_subcommand(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"kind": "lattice", "L": 4}))
    fn = tmp_path / "f.json"
    fn.write_text(json.dumps({"values": [0, 0, 3, 0, 0]}))
    code, out = run(capsys, "avg", "--space", str(space), "--fn", str(fn), "--r", "1")
    assert code == 0
    assert json.loads(out)["values"] == [0, 1, 1, 1, 0]


def test_verify_operator_bound(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"kind": "lattice", "L": 200}))
    code, out = run(capsys, "verify", "--lemma", "operator-bound",
                    "--space", str(space), "--r", "1", "--p", "2", "--q", "2",
                    "--seed", "7", "--trials", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["constant_c"] == pytest.approx(20 / 3, rel=1e-12)
    assert payload["worst_ratio"] <= 1.0
    assert all(ch["pass"] for ch in payload["checks"])


def test_verify_all_lemmas_pass(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"kind": "lattice", "L": 40}))
    for lemma in ("distribution", "rearrange", "equicontinuity"):
        code, out = run(capsys, "verify", "--lemma", lemma, "--space", str(space),
                        "--r", "1", "--p", "2", "--q", "2", "--seed", "11",
                        "--trials", "3")
        assert code == 0, lemma
        assert json.loads(out)["pass"] is True


def test_verify_missing_seed_is_usage_error(capsys, space_file):
    code, _ = run(capsys, "verify", "--lemma", "distribution", "--space", space_file,
                  "--r", "1", "--p", "2", "--q", "2")
    assert code == 2


def test_verify_contract_failure_exits_one(capsys, tmp_path, monkeypatch, space_file):
    from loravg import averaging
    from loravg.averaging import OperatorBoundReport

    def broken(space, f, r, spec):
        return OperatorBoundReport(constant_c=2.0, factor=4.0, lhs=5.0, rhs=1.0,
                                   passed=False)

    monkeypatch.setattr(averaging, "verify_operator_bound", broken)
    code, out = run(capsys, "verify", "--lemma", "operator-bound",
                    "--space", space_file, "--r", "1", "--p", "2", "--q", "2",
                    "--seed", "1", "--trials", "1")
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_malformed_json_reports_line_column(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "lattice", "L": }')
    code = dispatch(["build-space", "--space", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 1" in err and "column" in err


def test_metric_violation_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "matrix",
                               "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
    code = dispatch(["build-space", "--space", str(bad)])
    assert code == 2
    assert "triangle" in capsys.readouterr().err


def test_witness_subcommand(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"kind": "lattice", "L": 100}))
    code, out = run(capsys, "witness", "--space", str(space), "--r", "1",
                    "--k", "5", "--p", "2", "--q", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["centers"] == [0, 5, 10, 15, 20]
    assert payload["c_lower"] == pytest.approx(0.6)

    small = tmp_path / "small.json"
    small.write_text(json.dumps({"kind": "lattice", "L": 3}))
    code, out = run(capsys, "witness", "--space", str(small), "--r", "1",
                    "--k", "5", "--p", "2", "--q", "2")
    assert code == 0
    assert json.loads(out)["bounded_regime"] is True


def test_probe_subcommand(capsys, tmp_path):
    csv_path = tmp_path / "trend.csv"
    svg_path = tmp_path / "trend.svg"
    code = dispatch(["probe", "--family", "lattice:10:30:10", "--r", "1",
                     "--p", "2", "--q", "2", "--epsilon", "0.3", "--n", "20",
                     "--seed", "7", "--out", str(csv_path), "--svg", str(svg_path)])
    assert code == 0
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "L,k,witness_count,witness_min,c_lower"
    assert len(lines) == 4
    assert svg_path.exists()
    code = dispatch(["probe", "--family", "lattice:10:30:10", "--r", "1",
                     "--p", "2", "--q", "2", "--epsilon", "0.3", "--n", "20"])
    assert code == 2  # seed mandatory


def test_approx_subcommand(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"kind": "lattice", "L": 20}))
    fn = tmp_path / "f.json"
    fn.write_text(json.dumps({"values": list(np.linspace(0, 1, 21))}))
    code, out = run(capsys, "approx", "--space", str(space), "--fn", str(fn),
                    "--r", "1", "--epsilon", "0.6", "--p", "2", "--q", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["error"] <= 0.6
    assert len(payload["centers"]) == len(payload["radii"])
