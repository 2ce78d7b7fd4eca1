import io
import subprocess
import sys

import pytest

from wavelet_cn.cli import main

X = "field zp p=3 prec=20\nlevel 1 depth 0\nterm r= j=1 c=1\n"
G = ("field zp p=3 prec=20\nlevel 1 depth 1\n"
     "# g = x + chi_1 - chi_2; at level 1 the chi_r term carries gamma_r^-1\n"
     "term r= j=1 c=1\nterm r=1 j=0 c=1\nterm r=2 j=0 c=-1/2\n")
F = "field zp p=3 prec=20\nlevel 1 depth 1\nterm r= j=1 c=1\nterm r=1 j=0 c=1\n"
ZERO = "field zp p=3 prec=20\nlevel 1 depth 0\n"


def run(tmp_path, args, text=None):
    if text is not None:
        path = tmp_path / "f.txt"
        path.write_text(text)
        args = [args[0], str(path)] + args[1:]
    out, err = io.StringIO(), io.StringIO()
    code = main(args, out, err)
    return code, out.getvalue(), err.getvalue()


def test_expand_x(tmp_path):
    code, out, _ = run(tmp_path, ["expand", "--n", "1"], X)
    assert code == 0
    assert out == "field zp p=3 prec=20\nlevel 1 depth 0\nb r= j=1 v=1\n"


def test_expand_empty(tmp_path):
    code, out, _ = run(tmp_path, ["expand"], ZERO)
    assert code == 0 and out == ZERO


def test_characteristic_violation_exit_3(tmp_path):
    code, out, err = run(tmp_path, ["expand", "--n", "3"], "field fpt p=3 prec=20\nlevel 3 depth 0\n")
    assert code == 3 and out == ""
    assert err.startswith("error: CharacteristicViolation:") and err.count("\n") == 1
    code, _, _ = run(tmp_path, ["antiderive", "--n", "3"], "field fpt p=3 prec=20\nlevel 2 depth 0\n")
    assert code == 3


def test_norm_and_lipschitz(tmp_path):
    assert run(tmp_path, ["norm", "--n", "1"], X)[:2] == (0, "1\n")
    assert run(tmp_path, ["lipschitz", "--n", "1"], ZERO)[:2] == (0, "0\n")
    code, out, _ = run(tmp_path, ["norm", "--n", "1", "--bruteforce", "--probe", "2"], X)
    assert code == 0 and out.splitlines()[0] == "1"
    code, out, _ = run(tmp_path, ["norm", "--n", "1", "--bruteforce", "--probe", "3", "--budget", "50", "--seed", "9"], X)
    assert "sampled seed=9" in out


def test_classify(tmp_path):
    assert run(tmp_path, ["classify", "--kind", "isometry"], G)[1] == "answer=yes witness=none depth=2\n"
    assert run(tmp_path, ["classify", "--kind", "increasing"], G)[1].startswith("answer=no witness=(1)")
    assert run(tmp_path, ["classify", "--kind", "isometry"], F)[1] == "answer=no witness=(1)(2) depth=2\n"
    assert run(tmp_path, ["classify", "--kind", "monotone", "--s", "1"], X)[1].startswith("answer=yes")
    code, out, _ = run(tmp_path, ["classify", "--kind", "limit", "--n", "0", "--at", "2", "--tol", "4"], X)
    assert code == 0 and out == "answer=yes witness=none depth=9\nlimits=1 settled_at=1 tol=4\n"
    code, out, _ = run(tmp_path, ["classify", "--kind", "limit", "--at", "2", "--tol", "4"], X)
    assert out.splitlines()[1] == "limits=0;0 settled_at=1,1 tol=4"


def test_antiderive(tmp_path):
    code, out, _ = run(tmp_path, ["antiderive", "--n", "2"], X)
    assert code == 0
    assert out == "field zp p=3 prec=20\nlevel 2 depth 0\nterm r= j=2 c=1/2\n"
    code, out, _ = run(tmp_path, ["antiderive", "--iterated", "--n", "2"],
                       "field zp p=3 prec=20\nlevel 0 depth 1\nterm r=1 j=0 c=1\n")
    assert out.splitlines()[2] == "term r=1 j=2 c=1"


def test_header_authority(tmp_path):
    code, _, err = run(tmp_path, ["norm", "--p", "5"], X)
    assert code == 2 and "FieldMismatch" in err
    code, _, err = run(tmp_path, ["norm", "--field", "fpt"], X)
    assert code == 2
    code, out, _ = run(tmp_path, ["expand", "--prec", "9"], X)
    assert code == 0 and out.startswith("field zp p=3 prec=9\n")


def test_parse_error_exit_2(tmp_path):
    code, _, err = run(tmp_path, ["expand"], X + "term r=1 j=0 c=1\nterm r=1 j=0 c=2\n")
    assert code == 2 and "line" in err
    code, _, err = run(tmp_path, ["expand", str(tmp_path / "missing.txt")])
    assert code == 2


def test_precision_exit_4(tmp_path):
    code, _, err = run(tmp_path, ["norm", "--n", "1", "--bruteforce", "--probe", "5"],
                       "field zp p=3 prec=4\nlevel 1 depth 0\nterm r= j=1 c=1\n")
    assert code == 4 and err.startswith("error: PrecisionExhausted")


def test_unsupported_degree_exit_2(tmp_path):
    code, _, err = run(tmp_path, ["norm", "--n", "1"], "field zp p=3 prec=20\nlevel 2 depth 0\nterm r= j=2 c=1\n")
    assert code == 2 and "UnsupportedDegree" in err


def test_verify_exit_codes(tmp_path):
    code, out, _ = run(tmp_path, ["verify", "--trials", "0"])
    assert code == 0 and "no trials" in out
    code, out, _ = run(tmp_path, ["verify", "--trials", "2", "--suite", "lemlem1", "--field", "fpt", "--p", "3", "--n", "2"])
    assert code == 0 and "PASS lemlem1: 2/2" in out
    code, _, err = run(tmp_path, ["verify", "--trials", "1", "--field", "fpt", "--p", "3", "--n", "3"])
    assert code == 3


def test_verify_failure_exit_5(tmp_path, monkeypatch):
    from wavelet_cn import verify
    monkeypatch.setitem(verify.SUITES, "lemlem1", lambda rng, ctx: "forced failure")
    code, out, _ = run(tmp_path, ["verify", "--trials", "1", "--suite", "lemlem1"])
    assert code == 5 and "FAIL lemlem1: 0/1 first counterexample: trial 0: forced failure" in out


def test_module_entry_point(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text(X)
    proc = subprocess.run([sys.executable, "-m", "wavelet_cn", "norm", str(path), "--n", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n"
