"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import io
import math
import time

import numpy as np
import pytest

from zetalab import dirichlet_l as dl
from zetalab import functional_eq as fe
from zetalab import sigma_solver as ss
from zetalab import special_core as sc
from zetalab import zero_finder as zf
from zetalab.cli import main, sample_points

SEED = 42


def test_criterion_1_functional_equation(report):
    start = time.perf_counter()
    pts = sample_points(0.05, 0.95, 0.5, 50.0, 1000, SEED)
    worst = max(fe.fe_residual(p) for p in pts)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed <= 30.0
    report(1, ok, f"max residual {worst:.2e} over 1000 points (<= 1e-9), {elapsed:.1f} s (<= 30 s)")
    assert ok


def test_criterion_2_zero_census(report):
    start = time.perf_counter()
    line30 = zf.find_zeros(0.0, 30.0, 0.05)
    line100 = zf.find_zeros(0.0, 100.0, 0.05)
    wind30 = zf.find_zeros_winding(0.0, 30.0)
    wind100 = zf.find_zeros_winding(0.0, 100.0)
    count30 = zf.count_zeros(zf.cover_rect(0.1, 30.0))
    count100 = zf.count_zeros(zf.cover_rect(0.1, 100.0))
    elapsed = time.perf_counter() - start
    same_t = all(abs(a.t - b.t) < 1e-8 for a, b in zip(line100, wind100))
    ok = (
        len(line30) == len(wind30) == count30 == 3
        and len(line100) == len(wind100) == count100 == 29
        and same_t
        and elapsed <= 120.0
    )
    report(2, ok, f"line-scan {len(line30)}/{len(line100)}, winding {len(wind30)}/{len(wind100)}, "
                  f"contour {count30}/{count100} (want 3/29), {elapsed:.1f} s (<= 120 s)")
    assert ok


def test_criterion_3_on_line(report):
    recs = zf.find_zeros(0.0, 100.0, 0.05)
    worst_sigma = 0.0
    worst_zeta = 0.0
    for r in recs:
        # independent restart from a start displaced in both coordinates
        p, _ = zf.refine_zero_2d(lambda s: zf.xi(s).value, r.t + 0.01, sigma0=0.55)
        for sigma, t in ((r.sigma, r.t), (p.real, p.imag)):
            worst_sigma = max(worst_sigma, abs(sigma - 0.5))
            worst_zeta = max(worst_zeta, abs(sc.zeta(complex(0.5, t)).value))
    ok = len(recs) == 29 and worst_sigma < 1e-9 and worst_zeta < 1e-8
    report(3, ok, f"{len(recs)} zeros, max |sigma-1/2| {worst_sigma:.1e} (< 1e-9), "
                  f"max |zeta(1/2+it)| {worst_zeta:.1e} (< 1e-8)")
    assert ok


def test_criterion_4_sigma_solvers(report):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    los = rng.uniform(0.01, 0.49, 50)
    his = rng.uniform(0.51, 0.99, 50)
    worst = 0.0
    for lo, hi in zip(los, his):
        for solve in (ss.solve_eq5, ss.solve_eq9):
            worst = max(worst, abs(solve(lo, hi, 1e-12).root - 0.5))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed <= 10.0
    report(4, ok, f"max |root-1/2| {worst:.1e} over 2x50 brackets (<= 1e-10), {elapsed:.1f} s (<= 10 s)")
    assert ok


def test_criterion_5_derivative_certification(report):
    parts = []
    ok = True
    for target in ss.TARGETS:
        cert = ss.certify_monotone(target, 100)
        good = len(cert.checks) == 100 and cert.all_negative and cert.max_rel_err <= 1e-5
        ok = ok and good
        parts.append(f"{target} {cert.max_rel_err:.1e}")
    report(5, ok, "max rel err (<= 1e-5, all negative): " + ", ".join(parts))
    assert ok


def test_criterion_6_locus_scan(report):
    grid = fe.locus_scan(fe.StripRect(0.05, 0.95, 2.0, 30.0), 91, 281, "abs_gap")
    changes = grid.sign_changes()
    single = sum(len(c) == 1 for c in changes)
    contain = sum(len(c) == 1 and c[0][0] <= 0.5 <= c[0][1] for c in changes)
    ok = grid.values.shape == (281, 91) and single == contain == 281 and grid.failed_cells == 0
    report(6, ok, f"{single}/281 rows with one sign change, {contain}/281 brackets contain 1/2")
    assert ok


def test_criterion_7_oracle_agreement(report):
    rng = np.random.default_rng(SEED)
    sig = rng.uniform(0.01, 0.99, 1000)
    ts = rng.uniform(-100.0, 100.0, 1000)
    worst_ratio = 0.0
    inside = 0
    for a, b in zip(sig, ts):
        s = complex(a, b)
        x, y = sc.zeta(s), sc.zeta_em(s)
        ratio = abs(x.value - y.value) / (x.abs_err_bound + y.abs_err_bound)
        worst_ratio = max(worst_ratio, ratio)
        inside += ratio <= 1.0
    z2 = abs(sc.zeta(2.0).value - math.pi ** 2 / 6)
    zm1 = abs(fe.zeta_reflected(-1.0) - (-1.0 / 12.0))
    ok = inside == 1000 and z2 <= 1e-10 and zm1 <= 1e-10
    report(7, ok, f"{inside}/1000 within combined bounds (worst ratio {worst_ratio:.2f}), "
                  f"zeta(2) err {z2:.1e}, reflected zeta(-1) err {zm1:.1e} (<= 1e-10)")
    assert ok


def test_criterion_8_dirichlet(report):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    n_chars = 0
    for q in range(1, 11):
        for chi in dl.characters(q):
            if not chi.primitive:
                continue
            n_chars += 1
            sig = rng.uniform(0.05, 0.95, 100)
            ts = rng.uniform(-30.0, 30.0, 100)
            worst = max(worst, max(dl.l_fe_residual(complex(a, b), chi) for a, b in zip(sig, ts)))
    chi4 = next(c for c in dl.characters(4) if c.parity == "odd")
    zeros = dl.find_l_zeros(chi4, 0.0, 10.0, 0.02)
    first = zeros[0]
    wind = dl.count_l_zeros(chi4, fe.StripRect(0.01, 0.99, 0.0, 6.5))
    elapsed = time.perf_counter() - start
    ok = (
        worst < 1e-8
        and abs(first.t - 6.0209) < 1e-4
        and abs(first.sigma - 0.5) < 1e-8
        and wind == 1
        and elapsed <= 120.0
    )
    report(8, ok, f"{n_chars} primitive characters, max residual {worst:.1e} (< 1e-8); "
                  f"first mod-4 zero t={first.t:.10f} |sigma-1/2|={abs(first.sigma - 0.5):.1e}, "
                  f"winding count {wind}; {elapsed:.1f} s (<= 120 s)")
    assert ok


ACCEPTANCE_COMMANDS = [
    ["check-fe"],
    ["zeros", "--tmin", "0", "--tmax", "100"],
    ["zeros", "--tmin", "0", "--tmax", "100", "--method", "winding"],
    ["solve-sigma", "--eq", "5", "--lo", "0.1", "--hi", "0.9"],
    ["solve-sigma", "--eq", "9", "--lo", "0.1", "--hi", "0.9"],
    ["certify", "--target", "zeta"],
    ["scan"],
    ["lzeros", "--modulus", "4", "--char-index", "1", "--tmin", "0", "--tmax", "10"],
    ["--format", "json", "check-fe"],
]


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_9_determinism(report):
    mismatched = []
    for cmd in ACCEPTANCE_COMMANDS:
        runs = [_run(["--seed", str(SEED), "--workers", str(w)] + cmd) for w in (1, 1, 2)]
        if not (runs[0] == runs[1] == runs[2]) or runs[0][0] != 0:
            mismatched.append(" ".join(cmd))
    ok = not mismatched
    report(9, ok, f"{len(ACCEPTANCE_COMMANDS)} commands x (workers 1, 1, 2) byte-identical"
                  + ("" if ok else f"; differing: {mismatched}"))
    assert ok
