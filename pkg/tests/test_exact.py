from fractions import Fraction as F

import pytest
import sympy as sp

from symmops.exact import (Q, qstr, fq, mpoly, M_SYM, H_SYM, mp_shift, mp_neg_M, mp_eval,
                           mp_value, mp_to_json, mp_from_json, mpoly_gcd, mpoly_exact_div,
                           linear_factor, DivisionRemainder, RatFunc, angular_field,
                           radial_field, plane_field, func_from_json)

from conftest import to_sympy, SAMPLE, numeric_zero, TH, RR


def test_rational_coercion():
    assert Q("3/4") == F(3, 4)
    assert Q(fq(F(-2, 6))) == F(-1, 3)
    assert qstr(F(6, 3)) == "2"
    assert qstr(F(-1, 3)) == "-1/3"
    with pytest.raises(TypeError):
        Q(0.5)


def test_mpoly_shift_and_negation():
    p = M_SYM ** 2 + H_SYM * M_SYM + fq(F(1, 2))
    assert mp_shift(p, 1) == (M_SYM + 1) ** 2 + H_SYM * (M_SYM + 1) + fq(F(1, 2))
    assert mp_neg_M(mp_neg_M(p)) == p
    assert mp_value(p, M=2, H=3) == F(21, 2)
    assert mp_eval(p, M=0) == mpoly({(0, 0): F(1, 2)})


def test_mpoly_json_round_trip():
    p = M_SYM ** 3 * fq(F(-5, 7)) + H_SYM + 4
    assert mp_from_json(mp_to_json(p)) == p
    assert mp_to_json(p) == mp_to_json(mp_from_json(mp_to_json(p)))


def test_gcd_and_exact_division():
    a = (M_SYM + 1) * (M_SYM - 2) * (H_SYM + M_SYM)
    b = (M_SYM + 1) * (M_SYM + 3)
    g = mpoly_gcd([a, b])
    assert g == M_SYM + 1
    assert mpoly_exact_div(a, linear_factor(1)) == (M_SYM - 2) * (H_SYM + M_SYM)
    with pytest.raises(DivisionRemainder):
        mpoly_exact_div(a, linear_factor(5))


def test_ratfunc_canonical():
    r = RatFunc([1, 1]) / RatFunc([-1, 0, 1])  # (1+x)/(x^2-1) = 1/(x-1)
    assert r == RatFunc([1], [-1, 1])
    assert r(3) == F(1, 2)
    with pytest.raises(ZeroDivisionError):
        RatFunc([1], [0])


def test_angular_relation_and_inverse():
    Fd = angular_field(F(2, 3))
    x, y = Fd.base("ang"), Fd.ext("ang")
    assert x * x + y * y == Fd.const(1)
    f = (x + y.scale(3)) / (1 - x)
    assert f * f.inverse() == Fd.const(1)
    assert (f - f).is_zero()


def test_radial_relation_curved():
    Fd = radial_field(F(1, 2))
    s, c = Fd.base("rad"), Fd.ext("rad")
    assert c * c + (s * s).scale(F(1, 2)) == Fd.const(1)


@pytest.mark.parametrize("kappa", [F(0), F(1, 2), F(-1, 3)])
def test_derivation_matches_sympy(kappa, ttw11):
    P = ttw11.with_(kappa=kappa)
    Fd = plane_field(P.k, kappa)
    x, y = Fd.base("ang"), Fd.ext("ang")
    s = Fd.base("rad")
    f = (x * s + y) / (s * s + 1 - x) + (1 / s)
    for var, sym in (("theta", TH), ("r", RR)):
        got = to_sympy(f.derive(var), P)
        want = sp.diff(to_sympy(f, P), sym)
        assert numeric_zero(got - want, SAMPLE)


def test_involution_flips_sine():
    Fd = angular_field(1)
    x, y = Fd.base("ang"), Fd.ext("ang")
    f = x + y * x
    assert f.involution() == x - y * x
    assert f.involution().involution() == f


def test_canonical_form_is_unique():
    Fd = angular_field(1)
    x = Fd.base("ang")
    a = (x * x - 1) / (x - 1)
    b = x + 1
    assert a == b and hash(a) == hash(b)
    assert a.canonical_str() == b.canonical_str()


def test_func_json_round_trip():
    Fd = plane_field(F(1, 2), F(-1, 3))
    x, y = Fd.base("ang"), Fd.ext("ang")
    s, c = Fd.base("rad"), Fd.ext("rad")
    f = (x * c + y.scale(F(2, 7))) / (s * s)
    assert func_from_json(Fd, f.to_json()) == f


def test_evaluate_exact():
    Fd = angular_field(1)
    x, y = Fd.base("ang"), Fd.ext("ang")
    f = (x + y) / (1 + x)
    assert f.evaluate({"x": F(3, 5), "y": F(4, 5)}) == F(7, 8)


def test_derive_examples():
    k = F(2, 3)
    Fd = angular_field(k)
    x, y = Fd.base("ang"), Fd.ext("ang")
    assert x.derive("theta") == y.scale(-2 * k)
    assert (y * y).derive("theta") == (1 - x * x).derive("theta")
    kap = F(1, 2)
    R = radial_field(kap)
    s, c = R.base("rad"), R.ext("rad")
    d = 1 - (s * s).scale(kap)
    f = s * s / d
    want = (s * c).scale(2) / d + (s * s * s * c).scale(2 * kap) / (d * d)
    assert f.derive("r") == want


def test_division_examples():
    p = F(3, 2)
    assert mpoly_exact_div(M_SYM ** 2 - fq(p * p), linear_factor(-p)) == M_SYM + fq(p)
    with pytest.raises(DivisionRemainder) as info:
        mpoly_exact_div(M_SYM ** 2 + 1, linear_factor(-1))
    assert info.value.remainder == mpoly(2)
    cube = (M_SYM + 3) * (M_SYM + 5) * (M_SYM + 7)
    assert mpoly_exact_div(cube, linear_factor(5)) == (M_SYM + 3) * (M_SYM + 7)


def test_gcd_examples():
    assert mpoly_gcd([M_SYM - 1, M_SYM + 1]) == mpoly(1)
    assert mpoly_gcd([(M_SYM + 1) * (M_SYM + 2), (M_SYM + 1) * (M_SYM + 3)]) == M_SYM + 1


def _random_elements(Fd, rng, n):
    out = []
    for _ in range(n):
        f = Fd.const(F(rng.randint(-5, 5), rng.randint(1, 4)))
        for ax in Fd.axes:
            b = Fd.base(ax.name)
            f = f + b.scale(rng.randint(-3, 3)) + (b * b).scale(F(1, rng.randint(1, 6)))
            if ax.ext is not None:
                f = f + Fd.ext(ax.name).scale(rng.randint(-2, 2))
            f = f / (b + rng.randint(2, 6))
        out.append(f)
    return out


@pytest.mark.parametrize("field", [angular_field(F(1, 2)), radial_field(F(-1, 3)),
                                   plane_field(F(3, 2), F(1, 2))])
def test_leibniz_rule_random_pairs(field):
    import random
    rng = random.Random(7)
    var = "theta" if field.axes[0].name == "ang" else "r"
    els = _random_elements(field, rng, 40)
    for _ in range(200):
        a, b = rng.choice(els), rng.choice(els)
        assert (a * b).derive(var) == a.derive(var) * b + a * b.derive(var)


def test_involution_anticommutes_with_theta_derivative():
    import random
    Fd = angular_field(F(1, 3))
    for f in _random_elements(Fd, random.Random(2), 20):
        assert f.involution().involution() == f
        assert f.derive("theta").involution() == -(f.involution().derive("theta"))


def test_evaluation_homomorphism():
    import random
    rng = random.Random(4)
    Fd = angular_field(1)
    els = _random_elements(Fd, rng, 10)
    pt = {"x": F(3, 5), "y": F(4, 5)}
    for a in els:
        for b in els[:3]:
            assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
            assert (a - b).evaluate(pt) == a.evaluate(pt) - b.evaluate(pt)
