import json
import os
import subprocess
import sys

import numpy as np
import pytest

from jtlab.cli import main
from jtlab.factors import Element, parse_factor, rectangular, spin, triple_product
from jtlab.sampling import random_element

R22 = rectangular(2, 2)


def write(tmp_path, name, obj):
    p = tmp_path / name
    if isinstance(obj, Element):
        obj = obj.to_json()
    elif isinstance(obj, list) and obj and isinstance(obj[0], Element):
        obj = [e.to_json() for e in obj]
    p.write_text(json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def diag(*d):
    return Element.from_matrix(rectangular(len(d), len(d)), np.diag(np.asarray(d, dtype=complex)))


class TestEval:
    def test_bpq(self, tmp_path, capsys):
        code, out = run_json(capsys, "bpq", "--in", write(tmp_path, "a.json", diag(1, 2)))
        assert code == 0 and out["bpq"] is True and out["bergmann_norm"] <= 1e-9

    def test_norm_spin(self, tmp_path, capsys):
        code, out = run_json(capsys, "norm", "--in", write(tmp_path, "x.json", Element(spin(2), [1, 1j])))
        assert code == 0 and out["norm"] == pytest.approx(2.0, abs=1e-12)

    def test_meb(self, tmp_path, capsys):
        code, out = run_json(capsys, "meb", "--points", write(tmp_path, "p.json", [[0, 0], [2, 0]]))
        assert code == 0 and np.allclose(out["center"], [1, 0]) and out["radius"] == pytest.approx(1.0)

    def test_product_round_trip(self, tmp_path, capsys, rng):
        f = parse_factor("sum:rect:2,3,spin:3")
        xs = [random_element(f, rng) for _ in range(3)]
        code, out = run_json(capsys, "product", "--in", write(tmp_path, "xyz.json", xs))
        assert code == 0
        got = Element.from_json(out["product"])
        assert np.max(np.abs(got.coords - triple_product(*xs).coords)) <= 1e-15

    def test_peirce(self, tmp_path, capsys):
        e = Element.from_matrix(R22, np.diag([1, 0]).astype(complex))
        x = Element.from_matrix(R22, np.array([[1, 2], [3, 4]], dtype=complex))
        code, out = run_json(capsys, "peirce", "--in", write(tmp_path, "e.json", [e, x]))
        assert code == 0
        assert out["tripotent"]["peirce_dims"] == {"2": 1, "1": 2, "0": 1}
        c0 = Element.from_json(out["components"]["0"])
        assert np.allclose(c0.matrix, [[0, 0], [0, 4]])

    def test_range_tripotent_and_gen_inverse(self, tmp_path, capsys):
        a = write(tmp_path, "a.json", diag(2, 0))
        code, out = run_json(capsys, "range-tripotent", "--in", a)
        assert code == 0 and np.allclose(Element.from_json(out["range_tripotent"]["element"]).matrix,
                                         np.diag([1, 0]))
        code, out = run_json(capsys, "gen-inverse", "--in", a)
        assert code == 0 and np.allclose(Element.from_json(out["generalized_inverse"]).matrix, np.diag([0.5, 0]))
        assert max(out["residuals"].values()) <= 1e-12

    def test_relation(self, tmp_path, capsys):
        code, out = run_json(capsys, "relation", "--in", write(tmp_path, "ab.json", [diag(1, 0), diag(0, 1)]))
        assert code == 0 and out["relation"] == "orthogonal"

    def test_annihilator(self, tmp_path, capsys):
        code, out = run_json(capsys, "annihilator", "--in", write(tmp_path, "a.json", diag(1, 0)))
        assert code == 0 and len(out["annihilator"]) == 1

    def test_dist(self, tmp_path, capsys):
        x = write(tmp_path, "x.json", diag(1, 1))
        V = write(tmp_path, "V.json", [diag(1, 0)])
        code, out = run_json(capsys, "dist", "--in", x, "--basis", V, "--seed", "3")
        assert code == 0 and out["verdict"] == "non_unique"
        assert out["distance"] == pytest.approx(1.0, abs=1e-8)

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "sub" / "n.json"
        code, _ = run(capsys, "norm", "--in", write(tmp_path, "x.json", diag(3, 1)), "--out", str(target))
        assert code == 0 and json.loads(target.read_text())["norm"] == pytest.approx(3.0)


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        code, out = run_json(capsys, "norm", "--in", str(tmp_path / "nope.json"))
        assert code == 2 and "error" in out and "message" in out

    def test_bad_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, out = run_json(capsys, "norm", "--in", str(p))
        assert code == 2

    def test_invalid_element(self, tmp_path, capsys):
        bad = {"factor": {"kind": "symmetric", "n": 2}, "re": [0, 1, 0, 0]}  # not symmetric
        code, out = run_json(capsys, "norm", "--in", write(tmp_path, "x.json", bad))
        assert code == 2 and out["error"] == "ValidationError"

    def test_wrong_arity(self, tmp_path, capsys):
        code, _ = run_json(capsys, "product", "--in", write(tmp_path, "x.json", diag(1, 0)))
        assert code == 2

    def test_unknown_command_and_suite(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "suite", "no-such-suite")[0] == 2

    def test_bad_flag_values(self, capsys):
        assert run(capsys, "suite", "axioms", "--trials", "0")[0] == 2
        assert run(capsys, "suite", "axioms", "--eps-f", "-1")[0] == 2
        assert run(capsys, "suite", "axioms", "--factor", "rect:0,2")[0] == 2

    def test_seed_env(self, monkeypatch, capsys):
        monkeypatch.setenv("JTLAB_SEED", "oops")
        assert run(capsys, "suite", "meb-oracle", "--trials", "1")[0] == 2


class TestSuite:
    def test_meb_oracle(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, text = run(capsys, "suite", "meb-oracle", "--max-points", "8", "--dim", "4", "--trials", "20",
                         "--out", str(out))
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["passed"] and rep["suite"] == "meb-oracle" and len(rep["trials"]) == 20
        assert json.loads(text)["passed"] is True

    def test_axioms_spin(self, capsys):
        code, text = run(capsys, "suite", "axioms", "--factor", "spin:5", "--trials", "30")
        rep = json.loads(text)
        assert code == 0 and rep["summary"]["worst_residuals"]["jordan"] <= 1e-8

    def test_csv(self, capsys):
        code, text = run(capsys, "suite", "meb-oracle", "--trials", "3", "--format", "csv")
        assert code == 0 and len(text.strip().splitlines()) == 4

    def test_seed_fallback(self, monkeypatch, capsys):
        monkeypatch.setenv("JTLAB_SEED", "17")
        _, a = run(capsys, "suite", "meb-oracle", "--trials", "2")
        _, b = run(capsys, "suite", "meb-oracle", "--trials", "2", "--seed", "17")
        assert json.loads(a)["seed"] == 17 and a == b

    @pytest.mark.parametrize("name,extra", [
        ("theorem-2.6", ["--factor", "rect:2,2", "--trials", "2"]),
        ("prop-3.5-3.6", []),
        ("theorem-3.8-a", ["--trials", "2"]),
        ("theorem-3.8-b", ["--trials", "1"]),
        ("theorem-3.8-c", ["--trials", "3"]),
        ("theorem-3.8-d", ["--trials", "2"]),
        ("corollary-3.9", ["--n", "2", "--trials", "2"]),
    ])
    def test_every_suite_runs(self, name, extra, capsys):
        code, text = run(capsys, "suite", name, "--seed", "42", *extra)
        rep = json.loads(text)
        assert code == 0 and rep["passed"] and rep["suite"] == name


def test_console_script_module_entry(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps(Element(spin(2), [1, 1j]).to_json()))
    proc = subprocess.run([sys.executable, "-m", "jtlab", "norm", "--in", str(p)], capture_output=True, text=True,
                          env={**os.environ})
    assert proc.returncode == 0 and json.loads(proc.stdout)["norm"] == pytest.approx(2.0)
