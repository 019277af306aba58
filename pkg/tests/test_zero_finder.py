import math

import numpy as np
import pytest

from zetalab import special_core as sc
from zetalab import zero_finder as zf
from zetalab.errors import ContourTooClose, DomainError, RoundingDefect, StepTooCoarse
from zetalab.functional_eq import StripRect

# published ordinates of the first zeros, used only as a comparison table
KNOWN = [14.134725141734693, 21.022039638771555, 25.010857580145688]


def test_xi_at_half(mp):
    r = zf.xi(0.5)
    assert r.value.imag == 0.0
    s = mp.mpf(0.5)
    ref = float(0.5 * s * (s - 1) * mp.pi ** (-s / 2) * mp.gamma(s / 2) * mp.zeta(s))
    assert abs(r.value.real - ref) < 1e-12
    assert abs(r.value.real - 0.4971207782) < 1e-9


def test_xi_symmetry_pair():
    a = zf.xi(complex(0.3, 8.0)).value
    b = zf.xi(complex(0.7, -8.0)).value
    assert abs(a - b) < 1e-9


def test_xi_regular_at_zero_and_one():
    assert abs(zf.xi(0.0).value - 0.5) < 1e-12
    assert abs(zf.xi(1.0).value - 0.5) < 1e-12


def test_xi_first_zero():
    assert abs(zf.xi(complex(0.5, 14.134725)).value) < 1e-8


def test_contour_winding_polynomial():
    # (s - a)(s - b) with two roots inside and one outside
    roots = [complex(0.3, 1.0), complex(0.6, 2.5), complex(0.5, 5.0)]

    def f(s):
        v = np.prod([s - r for r in roots])
        return v, abs(v)

    w, _ = zf.contour_winding(f, StripRect(0.1, 0.9, 0.5, 3.0))
    assert zf.rounded_winding(w) == 2


def test_contour_too_close():
    def f(s):
        return s - complex(0.5, 1.0), abs(s - complex(0.5, 1.0))

    with pytest.raises(ContourTooClose):
        zf.contour_winding(f, StripRect(0.5, 0.9, 1.0, 2.0))


def test_rounded_winding_defect():
    assert zf.rounded_winding(2.9) == 3
    with pytest.raises(RoundingDefect):
        zf.rounded_winding(2.5)


@pytest.mark.parametrize(
    "rect, expected",
    [
        (StripRect(0.01, 0.99, 0.1, 30.0), 3),
        (StripRect(0.01, 0.99, 0.1, 1.0), 0),
        (StripRect(0.4, 0.6, 14.0, 14.3), 1),
    ],
)
def test_count_zeros(rect, expected):
    assert zf.count_zeros(rect) == expected


def test_hardy_rotation():
    assert zf.hardy_rotation(0.0) == 0.0
    assert abs(zf.hardy_z_complex(20.0).imag) < 1e-9


def test_hardy_rotation_against_mpmath(mp):
    for t in (1.0, 17.5, 80.0):
        assert zf.hardy_rotation(t) == pytest.approx(float(mp.siegeltheta(t)), abs=1e-11)
        assert zf.hardy_z(t) == pytest.approx(float(mp.siegelz(t)), abs=1e-11)


def test_find_zeros_first_three():
    recs = zf.find_zeros(0.0, 30.0, 0.05)
    assert len(recs) == 3
    for r, t in zip(recs, KNOWN):
        assert abs(r.t - t) < 1e-9
        assert abs(r.sigma - 0.5) < 1e-9
        assert r.abs_zeta < 1e-8
    assert [r.t for r in recs] == sorted(r.t for r in recs)


def test_find_zeros_empty_and_single():
    assert zf.find_zeros(0.0, 1.0, 0.05) == []
    recs = zf.find_zeros(14.0, 14.3, 0.01)
    assert len(recs) == 1


def test_find_zeros_step_too_coarse():
    with pytest.raises(StepTooCoarse):
        zf.find_zeros(0.0, 30.0, 10.0)


def test_find_zeros_domain():
    with pytest.raises(DomainError):
        zf.find_zeros(5.0, 5.0)
    with pytest.raises(DomainError):
        zf.find_zeros(0.0, 5.0, 0.0)


def test_winding_method_matches_line_scan():
    a = zf.find_zeros(10.0, 40.0, 0.05)
    b = zf.find_zeros_winding(10.0, 40.0)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert abs(x.t - y.t) < 1e-9


def test_find_zeros_against_mpmath(mp):
    recs = zf.find_zeros(30.0, 60.0)
    ref = [float(mp.zetazero(n).imag) for n in range(1, 20)]
    ref = [t for t in ref if 30.0 < t < 60.0]
    assert [round(r.t, 9) for r in recs] == [round(t, 9) for t in ref]


def test_refine_from_perturbed_start():
    p, iters = zf.refine_zero_2d(lambda s: zf.xi(s).value, KNOWN[0] + 0.02, sigma0=0.55)
    assert abs(p.real - 0.5) < 1e-9
    assert abs(p.imag - KNOWN[0]) < 1e-9
    assert iters > 0


def test_find_zeros_worker_independent():
    a = zf.find_zeros(0.0, 40.0, workers=1)
    b = zf.find_zeros(0.0, 40.0, workers=2)
    assert a == b


def test_hardy_z_realness():
    rng = np.random.default_rng(5)
    for t in rng.uniform(0.0, 100.0, 200):
        assert abs(zf.hardy_z_complex(t).imag) <= 1e-8


def test_conjugate_zeros():
    for r in zf.find_zeros(0.0, 50.0):
        assert abs(sc.zeta(complex(0.5, -r.t)).value) < 1e-8


def test_count_matches_find_on_intervals():
    for a, b in [(0.0, 20.0), (20.0, 45.0), (45.0, 70.0)]:
        assert len(zf.find_zeros(a, b, check_count=False)) == zf.count_zeros(zf.cover_rect(a, b))
