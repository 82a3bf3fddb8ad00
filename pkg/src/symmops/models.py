"""Model parameters, random parameter tuples and the analytic spectrum."""

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exact import Q, qstr


@dataclass(frozen=True)
class Params:
    """Exact parameters of a TTW or PVZ Hamiltonian with k = p/q."""
    p: int
    q: int
    alpha: Fraction
    beta: Fraction
    omega: Fraction
    kappa: Fraction

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0 or gcd(self.p, self.q) != 1:
            raise ValueError("p, q must be coprime positive integers")
        for name in ("alpha", "beta", "omega", "kappa"):
            object.__setattr__(self, name, Q(getattr(self, name)))

    @property
    def k(self):
        return Fraction(self.p, self.q)

    @property
    def V(self):
        """Coefficient of s^2/c^2 in the radial potential."""
        return self.omega ** 2 - self.kappa ** 2 / 4

    def with_(self, **kw):
        d = self.as_dict()
        d.update(kw)
        return Params(**d)

    def as_dict(self):
        return dict(p=self.p, q=self.q, alpha=self.alpha, beta=self.beta,
                    omega=self.omega, kappa=self.kappa)

    def to_json(self):
        return {"p": self.p, "q": self.q, "alpha": qstr(self.alpha), "beta": qstr(self.beta),
                "omega": qstr(self.omega), "kappa": qstr(self.kappa)}


def random_params(p, q, rng, kappa=None):
    """A random rational tuple with generic alpha, beta (alpha +- beta not integers)."""
    def rat(lo, hi, dens=(3, 5, 7, 11, 13)):
        d = rng.choice(dens)
        return Fraction(rng.randint(lo * d, hi * d), d)
    while True:
        a = rat(0, 3)
        b = rat(0, 3)
        if a <= 0 or b <= 0:
            continue
        if (a + b).denominator == 1 or (a - b).denominator == 1:
            continue
        if a.denominator == 1 or b.denominator == 1:
            continue
        break
    w = rat(1, 3)
    if w <= 0:
        w = Fraction(1)
    if kappa is None:
        kappa = rng.choice([Fraction(0), rat(-1, 1)])
    return Params(p, q, a, b, w, kappa)


def param_tuples(p, q, count=5, seed=0):
    """Deterministic list of random tuples for (p, q)."""
    rng = random.Random(1000003 * p + 7919 * q + seed)
    out = []
    kappas = [Fraction(0), Fraction(1, 2), Fraction(-1, 3)]
    for i in range(count):
        out.append(random_params(p, q, rng, kappa=kappas[i % 3] if i < 3 else None))
    return out


def epsilon(params, m, l, gamma=None):
    """2m + 1 + k(2l + gamma + 1), gamma defaults to alpha + beta."""
    if gamma is None:
        gamma = params.alpha + params.beta
    return 2 * m + 1 + params.k * (2 * l + gamma + 1)


def energy(params, m, l, gamma=None, sign=1):
    """E = +-omega*eps + kappa*eps^2/2."""
    e = epsilon(params, m, l, gamma)
    return sign * params.omega * e + params.kappa * e * e / 2
