import csv
import io
import json
import subprocess
import sys

import pytest

from zetalab.cli import RunConfig, fmt_number, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fmt_number():
    assert fmt_number(0.1) == "0.10000000000000001"
    assert fmt_number(1.0) == "1"
    assert fmt_number(3) == "3"
    assert fmt_number(float("nan")) == "nan"


def test_run_config_defaults():
    cfg = RunConfig()
    assert (cfg.fmt, cfg.seed, cfg.workers, cfg.tol) == ("csv", 42, 1, 1e-12)


def test_eval_zeta_two():
    code, out, _ = run("eval", "--func", "zeta", "--s", "2,0")
    assert code == 0
    (rec,) = rows(out)
    assert list(rec) == ["func", "s_re", "s_im", "value_re", "value_im", "abs_err_bound", "terms_used"]
    assert abs(float(rec["value_re"]) - 1.6449340668482264) < 1e-12


def test_eval_pole():
    code, out, err = run("eval", "--func", "zeta", "--s", "1,0")
    assert code == 2
    assert "pole at s=1" in err
    assert out == ""


def test_eval_gamma_one_exact():
    code, out, _ = run("eval", "--func", "gamma", "--s", "1,0")
    assert code == 0
    assert rows(out)[0]["value_re"] == "1"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--func", "eta", "--s", "0.5,0"],
        ["eval", "--func", "gfactor", "--s", "0.5,3"],
        ["eval", "--func", "xi", "--s", "0.5,0"],
        ["eval", "--func", "hurwitz", "--s", "2,0", "--a", "0.5"],
        ["eval", "--func", "lfunc", "--s", "1,0", "--modulus", "4", "--char-index", "1"],
        ["eval", "--func", "zeta", "--s=-1,0"],
    ],
)
def test_eval_other_funcs(argv):
    code, out, _ = run(*argv)
    assert code == 0
    assert len(rows(out)) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--func", "zeta", "--s", "a,b"],
        ["eval", "--func", "hurwitz", "--s", "2,0"],
        ["eval", "--func", "lfunc", "--s", "2,0", "--modulus", "4"],
        ["eval", "--func", "lfunc", "--s", "2,0", "--modulus", "4", "--char-index", "7"],
        ["eval", "--func", "nope", "--s", "2,0"],
        ["check-fe", "--samples", "0"],
        ["scan", "--sigma-min", "0.9", "--sigma-max", "0.1"],
        ["scan", "--n-sigma", "1"],
        ["zeros", "--tmin", "5", "--tmax", "1"],
        ["lzeros", "--modulus", "10", "--char-index", "1", "--tmin", "0", "--tmax", "5"],
        ["--workers", "0", "eval", "--func", "zeta", "--s", "2"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 1


def test_eval_json():
    code, out, _ = run("--format", "json", "eval", "--func", "zeta", "--s", "2,0")
    assert code == 0
    rec = json.loads(out)
    assert rec["func"] == "zeta" and rec["terms_used"] > 0


def test_global_flags_after_subcommand():
    a = run("--format", "json", "eval", "--func", "zeta", "--s", "2,0")
    b = run("eval", "--func", "zeta", "--s", "2,0", "--format", "json")
    assert a == b


def test_check_fe_default():
    code, out, _ = run("check-fe")
    assert code == 0
    rec = rows(out)[0]
    assert rec["samples"] == "1000" and rec["skipped"] == "0"
    assert float(rec["max_residual"]) < 1e-9


def test_check_fe_seed_changes_sample():
    a = run("check-fe", "--samples", "20")[1]
    b = run("check-fe", "--samples", "20", "--seed", "7")[1]
    assert a != b
    assert a == run("check-fe", "--samples", "20", "--seed", "42")[1]


def test_check_fe_skips_poles(monkeypatch):
    from zetalab import cli

    def pts(*args):
        return [complex(1.0, 0.0), complex(0.3, 2.0)]

    monkeypatch.setattr(cli, "sample_points", pts)
    code, out, err = run("check-fe", "--sigma-min", "0", "--sigma-max", "1", "--samples", "2")
    assert code == 0
    rec = rows(out)[0]
    assert rec["skipped"] == "1" and rec["evaluated"] == "1"
    assert "skipped 1" in err


def test_zeros_commands():
    code, out, _ = run("zeros", "--tmin", "0", "--tmax", "30", "--step", "0.05")
    assert code == 0
    recs = rows(out)
    assert len(recs) == 3
    assert list(recs[0]) == ["t", "sigma", "abs_value", "refine_iters"]
    code, out, _ = run("zeros", "--tmin", "0", "--tmax", "1")
    assert code == 0 and out == "t,sigma,abs_value,refine_iters\n"
    code, out, _ = run("zeros", "--tmin", "0", "--tmax", "30", "--method", "winding")
    assert code == 0 and len(rows(out)) == 3


def test_zeros_step_too_coarse():
    code, _, err = run("zeros", "--tmin", "0", "--tmax", "30", "--step", "10")
    assert code == 3
    assert "exceeds" in err


def test_lzeros_mod4():
    code, out, _ = run("lzeros", "--modulus", "4", "--char-index", "1", "--tmin", "0", "--tmax", "10")
    assert code == 0
    assert abs(float(rows(out)[0]["t"]) - 6.0209) < 1e-4


def test_solve_sigma():
    code, out, _ = run("solve-sigma", "--eq", "9", "--lo", "0.1", "--hi", "0.9", "--tol", "1e-12")
    assert code == 0 and float(rows(out)[0]["root"]) == pytest.approx(0.5, abs=1e-12)
    assert run("solve-sigma", "--eq", "5", "--lo", "0.6", "--hi", "0.9")[0] == 3
    code, out, _ = run("solve-sigma", "--eq", "5", "--lo", "0.3", "--hi", "0.7", "--tol", "1e-10")
    assert code == 0 and abs(float(rows(out)[0]["root"]) - 0.5) < 1e-9


def test_scan_minimal_and_antisymmetric():
    code, out, _ = run("scan", "--n-sigma", "2", "--n-t", "2")
    assert code == 0
    assert len(rows(out)) == 4
    code, out, err = run("scan", "--sigma-min", "0.2", "--sigma-max", "0.8", "--n-sigma", "5",
                         "--n-t", "3", "--field", "factor_gap")
    assert code == 0
    recs = rows(out)
    for i in range(0, len(recs), 5):
        vals = [float(r["value"]) for r in recs[i:i + 5]]
        assert vals == pytest.approx([-v for v in reversed(vals)], abs=1e-12)
    assert err.count("sign_changes=1") == 3


def test_scan_row_major_t_outer():
    _, out, _ = run("scan", "--n-sigma", "3", "--n-t", "2")
    ts = [r["t"] for r in rows(out)]
    assert ts == ["2", "2", "2", "30", "30", "30"]


def test_certify():
    code, out, err = run("certify", "--target", "g", "--samples", "10")
    assert code == 0
    assert len(rows(out)) == 10
    assert "all_negative=True" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zetalab", "eval", "--func", "zeta", "--s", "2,0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("func,")
