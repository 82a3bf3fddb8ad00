import math
from fractions import Fraction as F

import mpmath as mp
import pytest

from symmops.ladder import LadderFamily
from symmops.models import Params
from symmops.oracle import (
    EigenState, OutOfDomain, check_angular_ladder, check_eigen, check_pvz_ground,
    check_radial_ladder, default_grid, oracle_report, pvz_angular_discretize, pvz_expected,
    radial_state, ttw_angular,
)

mp.mp.dps = 30


def _mp_angular(P, l, theta):
    k, a, b = mp.mpf(P.k.numerator) / P.k.denominator, mp.mpf(float(P.alpha)), mp.mpf(float(P.beta))
    f = lambda t: (mp.sin(k * t) ** (a + mp.mpf(1) / 2) * mp.cos(k * t) ** (b + mp.mpf(1) / 2)
                   * mp.jacobi(l, a, b, mp.cos(2 * k * t)))
    return f(theta), mp.diff(f, theta), mp.diff(f, theta, 2)


def _mp_radial(P, m, mu, r):
    w, kap = mp.mpf(float(P.omega)), mp.mpf(float(P.kappa))
    mu = mp.mpf(mu)
    if kap == 0:
        f = lambda x: x ** mu * mp.exp(-w * x * x / 2) * mp.laguerre(m, mu, w * x * x)
    else:
        def f(x):
            if kap > 0:
                s, c = mp.sin(mp.sqrt(kap) * x) / mp.sqrt(kap), mp.cos(mp.sqrt(kap) * x)
            else:
                s, c = mp.sinh(mp.sqrt(-kap) * x) / mp.sqrt(-kap), mp.cosh(mp.sqrt(-kap) * x)
            return s ** mu * c ** (mp.mpf(1) / 2 + w / kap) * mp.jacobi(m, mu, w / kap, c * c - kap * s * s)
    return f(r), mp.diff(f, r), mp.diff(f, r, 2)


def test_angular_against_mpmath(ttw11, curved):
    for P in (ttw11, curved, Params(1, 1, F(1, 2), F(1, 2), 1, 0)):
        for l in range(4):
            for th in (0.2, math.pi / 4 / float(P.k), 0.7 / float(P.k)):
                ours = ttw_angular(P, l, th)
                ref = _mp_angular(P, l, th)
                for x, y in zip(ours, ref):
                    assert abs(x - float(y)) < 1e-10 * max(1.0, abs(float(y)))


def test_half_half_closed_form():
    # alpha = beta = 1/2, k = 1: Theta_1 = sin cos * P_1^(1/2,1/2)(cos 2 theta) = (3/2) cos(2t) sin cos
    P = Params(1, 1, F(1, 2), F(1, 2), 1, 0)
    th = math.pi / 4
    assert abs(ttw_angular(P, 1, th)[0]) < 1e-15
    th = 0.3
    want = 1.5 * math.cos(2 * th) * math.sin(th) * math.cos(th)
    assert abs(ttw_angular(P, 1, th)[0] - want) < 1e-14


def test_radial_against_mpmath(ttw11, curved, hyperbolic):
    for P in (ttw11, curved, hyperbolic):
        st = EigenState(P, 2, 1)
        for r in (0.4, 0.9, 1.3):
            ours = radial_state(P, 2, st.mu, r)
            ref = _mp_radial(P, 2, st.mu, r)
            for x, y in zip(ours, ref):
                assert abs(x - float(y)) < 1e-9 * max(1.0, abs(float(y)))


def test_domain_errors(ttw11):
    with pytest.raises(OutOfDomain):
        ttw_angular(ttw11, 0, 2.0)
    with pytest.raises(OutOfDomain):
        radial_state(ttw11, 0, 1.0, -0.1)
    with pytest.raises(ValueError):
        pvz_angular_discretize(ttw11, 3, grid_size=16)


def test_grid_stays_inside_domain(curved):
    for r, th in default_grid(curved, 50):
        assert r > 0 and math.cos(math.sqrt(0.5) * r) > 0
        assert 0 < float(curved.k) * th < math.pi / 2


@pytest.mark.parametrize("name", ["ttw11", "curved", "hyperbolic"])
def test_eigen_residuals(name, request):
    P = request.getfixturevalue(name)
    for m in range(3):
        for l in range(3):
            r = check_eigen(P, m, l)
            assert r["H"] < 1e-8 and r["M2"] < 1e-8


@pytest.mark.parametrize("name", ["ttw11", "curved", "hyperbolic"])
def test_ladder_actions(name, request):
    P = request.getfixturevalue(name)
    A, R = LadderFamily("ttw", P), LadderFamily("radial", P)
    for l in range(2):
        r = check_angular_ladder(A, l, 1)
        assert r["dev_up"] < 1e-8 and r["dev_down"] < 1e-8 and r["consistency"] < 1e-8
    assert check_angular_ladder(A, 0, -1)["annihilated"]
    r = check_radial_ladder(R, 2, 1, 1)
    assert r["dev_up"] < 1e-8 and r["consistency"] < 1e-8
    assert check_radial_ladder(R, 0, 1, 1)["annihilated"]


@pytest.mark.parametrize("name", ["ttw11", "curved", "hyperbolic"])
def test_pvz_collocation(name, request):
    P = request.getfixturevalue(name)
    out = pvz_angular_discretize(P, 3)
    want = sorted(pvz_expected(P, 3), key=abs)
    assert len(out["eigenvalues"]) == 4
    assert max(abs(a - b) for a, b in zip(out["eigenvalues"], want)) < 1e-6
    assert out["drift"] < 1e-5 and out["max_imag"] < 1e-8
    # the signs alternate with l
    assert [v > 0 for v in out["eigenvalues"]] == [False, True, False, True]
    assert check_pvz_ground(P) < 1e-9


def test_oracle_report(curved):
    rep = oracle_report(curved, m_max=1, l_max=1)
    assert rep["pass"]
    assert rep["pvz"]["warnings"] == []
