import random
from fractions import Fraction as F

import pytest
import sympy as sp

from symmops.exact import M_SYM
from symmops.operators import (Sector, RawOp, ConsolidatedOp, raw_compose, consolidate, expand,
                               compose, commutator, op_div_linear, GradedOp, verify_grade,
                               verify_grade_raw, op_from_json, OddSymbolError)
from symmops.exact import DivisionRemainder
from symmops.ladder import principal_ttw, principal_pvz, principal_radial

from conftest import apply_raw_sympy, numeric_zero, SAMPLE, TH, RR


def random_func(S, rng):
    F_ = S.field
    out = F_.const(rng.randint(-3, 3))
    for ax in F_.axes:
        b = F_.base(ax.name)
        out = out + b.scale(F(rng.randint(-4, 4), rng.randint(1, 5)))
        if ax.ext is not None and rng.random() < 0.5:
            out = out + F_.ext(ax.name) * b.scale(rng.randint(1, 3))
        if rng.random() < 0.5:
            out = out + (1 / (b + 2)).scale(rng.randint(1, 3))
    return out


def random_raw(S, rng, nterms=3, max_order=2):
    terms = {}
    for _ in range(nterms):
        a = rng.randint(0, max_order) if S.ang else 0
        b = rng.randint(0, max_order) if S.rad else 0
        e = rng.randint(0, 1) if S.pvz else 0
        m = rng.randint(0, 1) if S.kind == "radial" else 0
        terms[(a, b, e, m)] = random_func(S, rng)
    return RawOp(S, terms)


@pytest.mark.parametrize("kind", ["ttw-2d", "pvz-2d", "radial", "pvz-ang"])
def test_raw_associativity(kind, curved):
    S = Sector(kind, curved)
    rng = random.Random(11)
    for _ in range(3):
        x, y, z = (random_raw(S, rng) for _ in range(3))
        assert raw_compose(raw_compose(x, y), z) == raw_compose(x, raw_compose(y, z))


@pytest.mark.parametrize("kind", ["ttw-2d", "pvz-ang"])
def test_raw_compose_matches_sympy(kind, hyperbolic):
    P = hyperbolic
    S = Sector(kind, P)
    rng = random.Random(5)
    x, y = random_raw(S, rng, 2, 1), random_raw(S, rng, 2, 1)
    g = sp.exp(sp.Rational(1, 3) * TH) * sp.cos(TH) * (1 + RR ** 2)
    lhs = apply_raw_sympy(raw_compose(x, y), g, P)
    rhs = apply_raw_sympy(x, apply_raw_sympy(y, g, P), P)
    assert numeric_zero(lhs - rhs, SAMPLE)


@pytest.mark.parametrize("kind", ["pvz-2d", "radial", "pvz-ang", "ttw-2d"])
def test_expand_consolidate_round_trip(kind, curved):
    S = Sector(kind, curved)
    rng = random.Random(3)
    for _ in range(3):
        raw = random_raw(S, rng, 3, 3)
        back = expand(consolidate(raw))
        if S.ttw:
            ev, od = back
            assert od.is_zero()
            back = ev
        assert back == raw


def test_consolidated_product_agrees_with_raw(curved):
    S = Sector("pvz-2d", curved)
    rng = random.Random(8)
    x = consolidate(random_raw(S, rng, 3, 2))
    y = consolidate(random_raw(S, rng, 3, 2))
    assert expand(compose(x, y)) == raw_compose(expand(x), expand(y))


def test_hamiltonian_matches_sympy(hyperbolic):
    P = hyperbolic
    S = Sector("ttw-2d", P)
    g = sp.sin(TH) ** 2 * sp.exp(-RR)
    k = sp.Rational(2)
    a, b = sp.Rational(2, 7), sp.Rational(3, 5)
    kap = sp.Rational(-1, 3)
    s = sp.sinh(sp.sqrt(-kap) * RR) / sp.sqrt(-kap)
    c = sp.cosh(sp.sqrt(-kap) * RR)
    W = k ** 2 * ((a ** 2 - sp.Rational(1, 4)) / sp.sin(k * TH) ** 2 +
                  (b ** 2 - sp.Rational(1, 4)) / sp.cos(k * TH) ** 2)
    M2g = -sp.diff(g, TH, 2) + W * g
    V = sp.Rational(5, 3) ** 2 - kap ** 2 / 4
    Hg = (-sp.diff(g, RR, 2) - c / s * sp.diff(g, RR) + M2g / s ** 2 + V * s ** 2 / c ** 2 * g) / 2
    assert numeric_zero(apply_raw_sympy(S.raw_H(), g, P) - Hg, SAMPLE)


def test_division_by_linear_factor(ttw11):
    S = Sector("radial", ttw11)
    X = principal_radial(ttw11, 1).body
    Y = X.rmul_poly(M_SYM + 3)
    assert op_div_linear(Y, 3) == X
    with pytest.raises(DivisionRemainder):
        op_div_linear(X + ConsolidatedOp.unit(S), 3)


@pytest.mark.parametrize("sign", [1, -1])
def test_principal_ladders_certified(sign, hyperbolic):
    for g in (principal_ttw(hyperbolic, sign), principal_pvz(hyperbolic, sign),
              principal_radial(hyperbolic, sign)):
        ok, res = verify_grade(g)
        assert ok and res.is_zero()
        assert verify_grade_raw(g)


def test_wrong_grade_is_rejected(ttw11):
    g = principal_radial(ttw11, 1)
    bad = GradedOp(g.body, 2, g.kind)
    assert not verify_grade(bad)[0]


def test_ttw_odd_symbol_guard(ttw11):
    S = Sector("ttw-ang", ttw11)
    with pytest.raises(OddSymbolError):
        S.raw_M()


def test_commutator_of_M_symbol_is_zero_radial(curved):
    S = Sector("radial", curved)
    m = ConsolidatedOp.symbol(S, m=1)
    h = ConsolidatedOp.symbol(S, h=1)
    assert commutator(m, h).is_zero()


def test_operator_json_round_trip(curved):
    g = principal_pvz(curved, 1).body
    assert op_from_json(g.sector, g.to_json()) == g
