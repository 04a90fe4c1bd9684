import io as stdio
import json

import pytest

from orbigenus import io, library
from orbigenus.cli import main
from orbigenus.localization import order_cutoff, orbifold_elliptic_genus


def run(*argv):
    out = stdio.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def model_file(tmp_path):
    def write(name):
        p = tmp_path / f"{name}.json"
        p.write_text(io.dumps(library.model_by_name(name)))
        return str(p)
    return write


def test_genus_cp1(model_file):
    code, out = run("genus", "--model", model_file("cp1"), "--order", "0")
    assert code == 0
    assert out.splitlines()[0] == "q^(0): y^(1/2) + y^(-1/2)"
    assert "# normalization:" in out


def test_genus_pt_z3(model_file):
    code, out = run("genus", "--model", model_file("pt_z3"), "--order", "2")
    lines = [l for l in out.splitlines() if l.startswith("q^")]
    assert code == 0 and lines == ["q^(0): 3"]


def test_genus_json(model_file):
    code, out = run("genus", "--model", model_file("cp1"), "--order", "0", "--format", "json")
    d = json.loads(out)
    assert d["schema"] == 1
    assert d["terms"][0]["q"] == "0"
    assert d["terms"][0]["coeff"] == {"y^(1/2)": "1", "y^(-1/2)": "1"}
    assert "normalization" in d["meta"] and "cutoff" in d["meta"]


def test_rational_order(model_file):
    code, out = run("genus", "--builtin", "spindle_2_3", "--order", "1/2")
    assert code == 0 and out.startswith("q^(0):")


def test_malformed_rational_exit_2(tmp_path, capsys):
    d = json.loads(io.dumps(library.make_cp1()))
    d["components"][0]["weight"] = "1.5"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    code, _ = run("genus", "--model", str(p))
    assert code == 2
    assert "components/0/weight" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert run("genus", "--model", str(tmp_path / "nope.json"))[0] == 2


def test_rigidity_cp1(model_file):
    code, out = run("equivariant", "--model", model_file("cp1"), "--order", "4", "--y", "-1", "--check-rigidity")
    assert code == 0
    assert out.count("verdict: constant") == 5


def test_rigidity_half_cp1():
    code, out = run("equivariant", "--builtin", "half_cp1", "--order", "0", "--check-rigidity")
    assert "q^(0): verdict: residual (pole u=1)" in out


def test_level_guard_exit_3():
    assert run("equivariant", "--builtin", "cp1", "--y", "i")[0] == 3


def test_theta_checks():
    code, out = run("theta", "--check", "transforms", "--tol", "1e-9", "--terms", "50")
    assert code == 0 and out.count("pass") == 4
    code, out = run("theta", "--check", "triple-product")
    assert code == 0 and "q^10: exact pass" in out
    code, out = run("theta", "--check", "quasi")
    assert code == 0 and out.count("exact pass") == 3


def test_theta_quasi_odd_a_exit_4():
    assert run("theta", "--check", "quasi", "--a", "1")[0] == 4


def test_models_list_and_emit(tmp_path):
    code, out = run("models", "list")
    for name in ("cp1", "cp2", "pt_zn", "spindle_a_b", "t2_zk", "t4_z2"):
        assert f"{name}:" in out
    code, text = run("models", "emit", "t4_z2")
    m = io.loads(text)
    p = tmp_path / "k3.json"
    p.write_text(text)
    _, from_file = run("genus", "--model", str(p), "--order", "1")
    g = orbifold_elliptic_genus(m, order_cutoff(m, 1))
    assert from_file.splitlines()[: len(g.text_lines())] == g.text_lines()


def test_output_is_deterministic(monkeypatch):
    a = run("genus", "--builtin", "spindle_2_3", "--order", "1")[1]
    monkeypatch.setenv("ORBIGENUS_THREADS", "4")
    assert run("genus", "--builtin", "spindle_2_3", "--order", "1")[1] == a


def test_anomaly_cli():
    code, out = run("anomaly", "--builtin", "cp1_w1", "--twist", "tangent")
    assert code == 0 and "n: 0" in out


def test_fa_scan_cli():
    code, out = run("fa", "--builtin", "cp1", "--matrix", "S", "--y", "-1", "--scan")
    assert code == 0 and "holomorphic: pass" in out


def test_spin_kind():
    code, out = run("genus", "--builtin", "t2_z2", "--kind", "spin", "--order", "0")
    assert out.splitlines()[0] == "q^(0): 4"
