"""Deformed-oscillator realizations, finite irreps and the algebraic spectrum.

The oscillator is realized on the span of |i>, i >= 0, in the gauge

    N|i> = i|i>,   b|i> = Xi(i)|i-1>,   b^dagger|i> = |i+1>,

so that b^dagger b = Xi(N) and b b^dagger = Xi(N+1) as in the unitary gauge
b|i> = sqrt(Xi(i))|i-1>, but every matrix entry stays rational.
"""

from fractions import Fraction

from .exact import Q, qstr, mp_value
from .models import energy


class SpectrumMismatch(AssertionError):
    """A physical energy is missing from the algebraic spectrum."""


# ------------------------------------------------------------ operators

class OscOp:
    """A linear map on span{|i>} given by its action i -> {j: coefficient}."""

    def __init__(self, act):
        self._act = act
        self._memo = {}

    def __call__(self, i):
        r = self._memo.get(i)
        if r is None:
            r = {j: c for j, c in self._act(i).items() if c != 0}
            self._memo[i] = r
        return r

    def __add__(self, o):
        o = _lift(o)

        def act(i):
            out = dict(self(i))
            for j, c in o(i).items():
                out[j] = out.get(j, 0) + c
            return out
        return OscOp(act)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) - self

    def scale(self, c):
        return OscOp(lambda i: {j: c * v for j, v in self(i).items()})

    def __mul__(self, o):
        """Operator product self * o (o acts first)."""
        if not isinstance(o, OscOp):
            return self.scale(o)

        def act(i):
            out = {}
            for j, c in o(i).items():
                for l, d in self(j).items():
                    out[l] = out.get(l, 0) + c * d
            return out
        return OscOp(act)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero_on(self, indices):
        return all(not self(i) for i in indices)


def _lift(o):
    if isinstance(o, OscOp):
        return o
    return diag(lambda i: o)


def diag(f):
    return OscOp(lambda i: {i: Q(f(i))})


def raising():
    return OscOp(lambda i: {i + 1: Fraction(1)})


def lowering(xi):
    return OscOp(lambda i: {i - 1: xi(i)} if i > 0 else {})


def comm(x, y):
    return x * y - y * x


def acomm(x, y):
    return x * y + y * x


# ------------------------------------------------------------ Xi

def _sign(n):
    return -1 if n % 2 else 1


class XiFunction:
    """Xi(N; u, E) for one case, evaluated exactly at integer N.

    ttw:      Xi(N) = 4 Phi^q(-2p[N+u]) Psi^p(-2p[N+u], E)
    pvz-even: Xi(N) = Phi^{-q}(2p[N+u]) Psi^p(-2p[N+u], E)
    pvz-odd:  Xi(N) = -Phi^{q s}(-2p[N+u] s) Psi^p(-2p[N+u], E),  s = (-1)^N

    These are the forms for which the realizations in `realize` satisfy the
    algebra relations exactly (checked by `relation_residuals`).
    """

    def __init__(self, data):
        self.data = data
        self.case = data.case
        P = data.params
        self.p, self.q = P.p, P.q
        self.phi = {u: data.ang.structure(u) for u in (P.q, -P.q)}
        self.psi = data.rad.structure(P.p)
        self.scale = {"ttw": 4, "pvz-even": 1, "pvz-odd": -1}[self.case]

    def arg(self, N, u):
        """The M value fed to Phi at level N."""
        p = self.p
        if self.case == "ttw":
            return -2 * p * (N + u)
        if self.case == "pvz-even":
            return 2 * p * (N + u)
        return -2 * p * (N + u) * _sign(N)

    def phi_part(self, N, u):
        q = self.q
        if self.case == "ttw":
            j = q
        elif self.case == "pvz-even":
            j = -q
        else:
            j = q * _sign(N)
        return mp_value(self.phi[j], M=self.arg(N, u))

    def psi_part(self, N, u, E):
        return mp_value(self.psi, M=-2 * self.p * (N + u), H=E)

    def __call__(self, N, u, E):
        return self.scale * self.phi_part(N, u) * self.psi_part(N, u, E)

    def bound(self, u, E):
        """The function N -> Xi(N; u, E)."""
        return lambda N: self(N, u, E)


# ------------------------------------------------------------ realizations

def _inv(f):
    def g(i):
        v = Q(f(i))
        if v == 0:
            raise ZeroDivisionError("singular oscillator coefficient at N = %d" % i)
        return 1 / v
    return g


def realize(data, xi, u, E):
    """A, B, C as OscOps for the case, together with the central values.

    Returns (ops, centrals) where ops = {"A","B","C"} and centrals holds the
    constants and the central polynomials as functions of N.
    """
    from .symalg import lambdas
    P = data.params
    p = P.p
    u, E = Q(u), Q(E)
    lam = lambdas(data)
    c = data.consts
    k00 = mp_value(c["K00(-p,H)"], H=E)
    X = xi.bound(u, E)
    bd, b = raising(), lowering(X)
    n = lambda i: i + u
    if data.case == "pvz-even":
        A = diag(n)
        B, C = bd, b
        cent = {"M": lambda i: 2 * p * n(i)}
    elif data.case == "pvz-odd":
        s = _sign
        A = diag(lambda i: -n(i) * s(i))
        w = diag(_inv(lambda i: 2 * n(i) - 1))
        jp, jm = c["J00(-p)"], c["J-00(p)"]
        shift_p = diag(lambda i: k00 * jp / (2 * n(i) * s(i) - 1))
        shift_m = diag(lambda i: k00 * jm / (2 * n(i) * s(i) + 1))
        B = b * w + w * bd + shift_p + shift_m
        C = diag(s) * (b * w - w * bd) - shift_p + shift_m
        cent = {"M": lambda i: -2 * p * n(i) * s(i)}
    else:
        cc = mp_value(c["K00(-p,H)"], H=E) * c["J00(-p)"]
        A = diag(lambda i: n(i) ** 2 - Fraction(1, 4))
        up = diag(_inv(lambda i: 4 * n(i) * (2 * n(i) + 1)))
        down = diag(_inv(lambda i: 4 * n(i) * (2 * n(i) - 1)))
        B = bd * up + b * down - diag(lambda i: 2 * cc / (4 * n(i) ** 2 - 1))
        quarter = diag(_inv(lambda i: 4 * n(i)))
        C = (bd - b) * quarter
        cent = {"M": lambda i: 2 * p * n(i)}
    vals = {name: (lambda P_: (lambda i: mp_value(P_, M=cent["M"](i), H=E)))(poly)
            for name, poly in lam.items()}
    return {"A": A, "B": B, "C": C}, vals, k00


def relation_residuals(data, xi, u, E):
    """Oscillator-side residuals of the case's relations (OscOps)."""
    ops, lam, k00 = realize(data, xi, u, E)
    A, B, C = ops["A"], ops["B"], ops["C"]
    c = data.consts
    L = {k: diag(v) for k, v in lam.items()}
    out = {}
    if data.case == "pvz-even":
        out["[A,B]=B"] = comm(A, B) - B
        out["[A,C]=-C"] = comm(A, C) + C
        out["[B,C]=L- - L+"] = comm(B, C) - L["Lambda-"] + L["Lambda+"]
        out["Casimir"] = acomm(B, C) - L["Lambda+"] - L["Lambda-"]
    elif data.case == "pvz-odd":
        jp, jm = c["J00(-p)"], c["J-00(p)"]
        out["{A,B}=C-(J+J)K"] = acomm(A, B) - C + (jp + jm) * k00
        out["{A,C}=B+(J-J)K"] = acomm(A, C) - B - (jp - jm) * k00
        out["{B,C}=2L+ - 2L-"] = acomm(B, C) - (L["Lambda+"] - L["Lambda-"]).scale(2)
        out["Casimir"] = B * B + C * C + (L["Lambda+"] + L["Lambda-"]).scale(2)
    else:
        cc = k00 * c["J00(-p)"]
        B2 = B * B
        out["[A,B]=C"] = comm(A, B) - C
        out["[A,C]=2{A,B}+2c"] = comm(A, C) - acomm(A, B).scale(2) - 2 * cc
        out["[B,C]=-2B^2+Lambda"] = comm(B, C) + B2.scale(2) - L["Lambda"]
        out["Casimir"] = C * C + B2.scale(4) - acomm(A, B2).scale(2) - B.scale(4 * cc) + L["Omega"]
    return out


# ------------------------------------------------------------ roots

def phi_roots(poly):
    """Rational roots of a polynomial in M (MPoly), with multiplicity ignored."""
    if poly.is_constant():
        return []
    _, facs = poly.factor()
    roots = set()
    for f, _ in facs:
        d = f.to_dict()
        if max(i for (i, j) in d) == 1 and all(j == 0 for (i, j) in d):
            a = Q(d.get((1, 0), 0))
            b = Q(d.get((0, 0), 0))
            roots.add(-b / a)
    return sorted(roots)


class PsiFactor:
    """E = kappa t^2 / 2 + sign * omega * t with t = M + 2i + 1."""

    def __init__(self, params, i, sign):
        self.params, self.i, self.sign = params, i, sign

    def t(self, M):
        return Q(M) + 2 * self.i + 1

    def energy(self, M):
        t = self.t(M)
        return self.params.kappa * t * t / 2 + self.sign * self.params.omega * t

    def __repr__(self):
        return "PsiFactor(i=%d, sign=%+d)" % (self.i, self.sign)


def psi_factors(params, psi):
    """Factors of Psi^p(M, H), each confirmed by exact division of the computed Psi."""
    from .exact import M_SYM, H_SYM, fq
    out = []
    rest = psi
    for i in range(params.p):
        for sign in (1, -1):
            t = M_SYM + fq(2 * i + 1)
            f = H_SYM - t * t * fq(params.kappa / 2) - t * fq(sign * params.omega)
            rest, rem = divmod(rest, f)
            if not rem.is_zero():
                raise ValueError("Psi is not divisible by %r" % PsiFactor(params, i, sign))
            out.append(PsiFactor(params, i, sign))
    if not rest.is_constant():
        raise ValueError("Psi does not split into the expected factors")
    return out


# ------------------------------------------------------------ irreps

class IrrepSpec:
    """An (n+1)-dimensional irrep: Xi(0) = Xi(n+1) = 0, no interior root."""

    def __init__(self, n, u, E, branch, xi_values, detail=""):
        self.n, self.u, self.E, self.branch = n, u, E, branch
        self.xi = xi_values
        self.detail = detail

    def to_json(self):
        return {"n": self.n, "u": qstr(self.u),
                "E": qstr(self.E) if self.E is not None else "free",
                "branch": self.branch, "detail": self.detail,
                "xi": [qstr(v) for v in self.xi] if self.xi is not None else None}

    def __repr__(self):
        return "IrrepSpec(n=%d, u=%s, E=%s, %s %s)" % (self.n, self.u, self.E, self.branch, self.detail)


def _u_from_arg(xi, N, M):
    """Solve arg(N, u) = M for u (the Phi argument is linear in u)."""
    a0 = xi.arg(N, 0)
    a1 = xi.arg(N, 1) - a0
    return (Q(M) - a0) / a1


def _psi_M(xi, N, u):
    return -2 * xi.p * (N + u)


def _solve_psi_psi(xi, n, fl, fr):
    """u with fl.energy(-2pu) = fr.energy(-2p(n+1+u)); returns rational roots."""
    # energy difference is a polynomial of degree <= 2 in u; interpolate it
    pts = [Fraction(0), Fraction(1), Fraction(2)]
    vals = [fl.energy(_psi_M(xi, 0, x)) - fr.energy(_psi_M(xi, n + 1, x)) for x in pts]
    c = vals[0]
    a = (vals[2] - 2 * vals[1] + vals[0]) / 2
    b = vals[1] - vals[0] - a
    if a == 0:
        if b == 0:
            return []
        return [-c / b]
    disc = b * b - 4 * a * c
    r = _rational_sqrt(disc)
    if r is None:
        raise ValueError("irrational u root")
    return sorted({(-b + r) / (2 * a), (-b - r) / (2 * a)})


def _rational_sqrt(x):
    from math import isqrt
    x = Q(x)
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _admissible(xi, n, u, E):
    """Xi(0) = Xi(n+1) = 0 and Xi(i) != 0 on 1..n.  E=None means E generic."""
    vals = []
    for N in range(n + 2):
        if E is None:
            v = xi.phi_part(N, u)
        else:
            v = xi(N, u, E)
        vals.append(v)
    if vals[0] != 0 or vals[-1] != 0 or any(v == 0 for v in vals[1:-1]):
        return None
    return vals


def enumerate_irreps(data, n_max, xi=None):
    """All irreps of dimension n+1 <= n_max+1 arising from the boundary roots of Xi."""
    xi = xi or XiFunction(data)
    P = data.params
    facs = psi_factors(P, xi.psi)
    out = []
    seen = set()

    def emit(n, u, E, branch, detail):
        key = (n, u, E, branch)
        if key in seen:
            return
        vals = _admissible(xi, n, u, E)
        if vals is None:
            return
        seen.add(key)
        out.append(IrrepSpec(n, u, E, branch, vals if E is not None else None, detail))

    for n in range(n_max + 1):
        left_roots = phi_roots(xi.phi[_phi_index(xi, 0)])
        right_roots = phi_roots(xi.phi[_phi_index(xi, n + 1)])
        lefts = [_u_from_arg(xi, 0, r) for r in left_roots]
        rights = [_u_from_arg(xi, n + 1, r) for r in right_roots]
        for u in lefts:
            if u in rights:
                emit(n, u, None, "phi-phi", "")
            for f in facs:
                emit(n, u, f.energy(_psi_M(xi, n + 1, u)), "phi-psi", "i'=%d sign=%+d" % (f.i, f.sign))
        for u in rights:
            for f in facs:
                emit(n, u, f.energy(_psi_M(xi, 0, u)), "psi-phi", "i=%d sign=%+d" % (f.i, f.sign))
        for fl in facs:
            for fr in facs:
                for u in _solve_psi_psi(xi, n, fl, fr):
                    E = fl.energy(_psi_M(xi, 0, u))
                    branch, detail = _classify_psi_psi(P, n, fl, fr, u, E)
                    emit(n, u, E, branch, detail)
    return out


def _classify_psi_psi(P, n, fl, fr, u, E):
    """Name the (Psi, Psi) root: the double root u0 or the curvature pair u0 +- w/(2 p kappa).

    At the right end the factor is evaluated at -2p(n+1+u), where t is
    negative; in terms of the root index i' of Psi^p(2p[n+u], E) the labels
    are i' = p - 1 - fr.i with the opposite sign.
    """
    p, kap, w = P.p, P.kappa, P.omega
    i, ip = fl.i, p - 1 - fr.i
    N0 = p * n + i + ip + 1
    u0 = Fraction(i - ip - p * n, 2 * p)
    detail = "i=%d i'=%d" % (i, ip)
    if u == u0 and E == kap * N0 * N0 / 2 + fl.sign * w * N0:
        return "psi-psi:u0", detail + " sign=%+d" % fl.sign
    if kap != 0 and E == kap * N0 * N0 / 2 - w * w / (2 * kap) and \
            u in (u0 + w / (2 * p * kap), u0 - w / (2 * p * kap)):
        return "psi-psi:curvature", detail + " u=u0%+s" % ("+" if u > u0 else "-")
    return "psi-psi:other", detail


def _phi_index(xi, N):
    q = xi.q
    if xi.case == "ttw":
        return q
    if xi.case == "pvz-even":
        return -q
    return q * _sign(N)


# ------------------------------------------------------------ spectra

class SpectrumEntry:
    __slots__ = ("m", "l", "E", "cls", "sign")

    def __init__(self, m, l, E, cls, sign=1):
        self.m, self.l, self.E, self.cls, self.sign = m, l, E, cls, sign

    def to_json(self):
        return {"m": self.m, "l": self.l, "E": qstr(self.E), "class": self.cls}


def spectrum_analytic(params, m_max, l_max, n_max=None):
    """E_{m,l} = omega eps + kappa eps^2 / 2 with eps = 2m + 1 + k(2l + alpha + beta + 1).

    Entries are restricted to q m + p l <= n_max when n_max is given.
    """
    out = []
    for m in range(m_max + 1):
        for l in range(l_max + 1):
            cls = params.q * m + params.p * l
            if n_max is not None and cls > n_max:
                continue
            out.append(SpectrumEntry(m, l, energy(params, m, l), cls))
    return out


def degeneracy_pairs(params, table):
    """Pairs (m,l), (m+p, l-q) present in the table; all must share E."""
    by = {(e.m, e.l): e.E for e in table}
    pairs = []
    for (m, l), E in sorted(by.items()):
        other = (m + params.p, l - params.q)
        if other in by:
            pairs.append(((m, l), other, E == by[other]))
    return pairs


def family_label(params, E, search=6):
    """(sign, gamma, m, l) with E = sign*omega*eps + kappa eps^2/2 for gamma in {+-alpha+-beta}."""
    a, b = params.alpha, params.beta
    for gname, g in (("a+b", a + b), ("a-b", a - b), ("-a+b", -a + b), ("-a-b", -a - b)):
        for sign in (1, -1):
            for m in range(search + 1):
                for l in range(search + 1):
                    if energy(params, m, l, gamma=g, sign=sign) == E:
                        return sign, gname, m, l
    return None


def compare_spectra(data, n_max=3, m_max=None, l_max=None, strict=False):
    """Analytic energies with q m + p l <= n_max against the algebraic boundary families.

    With strict=True a missing physical energy raises SpectrumMismatch.
    """
    P = data.params
    m_max = n_max if m_max is None else m_max
    l_max = n_max if l_max is None else l_max
    irreps = enumerate_irreps(data, n_max)
    mixed = [r for r in irreps if r.branch in ("phi-psi", "psi-phi")]
    mixed_E = {r.E for r in mixed}
    table = spectrum_analytic(P, m_max, l_max, n_max)
    matches, missing = [], []
    for e in table:
        (matches if e.E in mixed_E else missing).append(e)
    if strict and missing:
        raise SpectrumMismatch("no boundary family for E_{%d,%d} = %s"
                               % (missing[0].m, missing[0].l, qstr(missing[0].E)))
    physical = {e.E for e in table}
    nonphysical = sorted({r.E for r in irreps if r.E is not None and r.E not in physical})
    curvature = [r for r in irreps if r.branch == "psi-psi:curvature"]
    return {
        "params": P.to_json(),
        "case": data.case,
        "irreps": [r.to_json() for r in irreps],
        "analytic": [e.to_json() for e in table],
        "matches": [{"m": e.m, "l": e.l, "E": qstr(e.E)} for e in matches],
        "mismatches": [{"m": e.m, "l": e.l, "E": qstr(e.E)} for e in missing],
        "nonphysical": [qstr(E) for E in nonphysical],
        "degeneracy": [{"a": list(x), "b": list(y), "equal": ok}
                       for x, y, ok in degeneracy_pairs(P, spectrum_analytic(P, m_max + P.p, l_max + P.q))],
        "curvature_branch": len(curvature),
        "branches": _branch_counts(irreps),
        "pass": not missing and (len(curvature) > 0) == (P.kappa != 0),
    }


def _branch_counts(irreps):
    out = {}
    for r in irreps:
        out[r.branch] = out.get(r.branch, 0) + 1
    return dict(sorted(out.items()))


def check_irrep_realization(data, irrep, indices=None):
    """The case relations on the (n+1)-dimensional module of an irrep.

    For E free (phi-phi) a generic energy is used.  Returns {relation: ok}.
    Coefficients are restricted to the module: components leaving 0..n are
    ignored because b annihilates |0> and b^dagger|n> carries Xi(n+1) = 0.
    A relation is reported as None when the realization is singular on the
    module (a denominator such as 2(N+u) - 1 vanishes for some N in 0..n).
    """
    xi = XiFunction(data)
    E = irrep.E if irrep.E is not None else Fraction(7, 3)
    res = relation_residuals(data, xi, irrep.u, E)
    n = irrep.n
    idx = range(n + 1) if indices is None else indices
    out = {}
    for name, op in res.items():
        ok = True
        try:
            for i in idx:
                for j, c in op(i).items():
                    if 0 <= j <= n and c != 0:
                        ok = False
        except ZeroDivisionError:
            # the realization divides by a factor that vanishes on this module
            ok = None
        out[name] = ok
    return out
