"""Normal-ordered operator algebras: raw and consolidated forms.

Raw operators are sums  f * dth^a * dr^b * R^e  (radial raw operators also
carry a central power M^m).  Consolidated operators are sums

    f * dth^a * dr^b * R^e * M^m * H^h      a, b, e in {0, 1}

where M (PVZ), M^2 (TTW) and H are formal symbols standing for the angular
operator and the Hamiltonian, always kept rightmost.  In the radial sector
M is a central symbol.  Consolidated forms are unique, so an identity holds
iff the consolidated difference has no terms.

Sector kinds: 'ttw-ang', 'pvz-ang', 'radial', 'ttw-2d', 'pvz-2d'.
"""

from fractions import Fraction
from math import comb

from .exact import (M_SYM, H_SYM, Q, fq, mpoly, angular_field,
                    radial_field, plane_field, DivisionRemainder, func_from_json)

KINDS = ("ttw-ang", "pvz-ang", "radial", "ttw-2d", "pvz-2d")
UNIT = (0, 0, 0, 0, 0)


class OddSymbolError(ValueError):
    """A TTW odd power of M would have to cross a coefficient function."""


class CertificateError(ValueError):
    """Graded composition requested with an uncertified right factor."""


# --------------------------------------------------------------- term maps

def _acc(out, key, f):
    if key in out:
        g = out[key] + f
        if g.is_zero():
            del out[key]
        else:
            out[key] = g
    elif not f.is_zero():
        out[key] = f


def _acc_terms(out, terms, f=None, c=None):
    """out += f * terms (f a function, or c a rational)."""
    for key, g in terms.items():
        if f is not None:
            g = f * g
        if c is not None:
            g = g.scale(c)
        _acc(out, key, g)


def _shift_keys(terms, i, j=0):
    return {(a, b, e, m + i, h + j): f for (a, b, e, m, h), f in terms.items()}


class Sector:
    """Parameters, coefficient field and rewrite rules of one operator algebra."""

    def __init__(self, kind, params):
        if kind not in KINDS:
            raise ValueError("unknown sector %r" % kind)
        self.kind = kind
        self.params = params
        self.model = kind.split("-")[0] if kind != "radial" else None
        self.ttw = self.model == "ttw"
        self.pvz = self.model == "pvz"
        self.ang = kind != "radial"
        self.rad = kind in ("radial", "ttw-2d", "pvz-2d")
        k, P = params.k, params
        if self.ang and self.rad:
            self.field = plane_field(k, P.kappa)
        elif self.ang:
            self.field = angular_field(k)
        else:
            self.field = radial_field(P.kappa)
        F = self.field
        self.one = F.const(1)
        self._mono = {}
        self._raw_pow = {}
        self._cons_raw = {}
        if self.ang:
            self.x = F.base("ang")
            self.y = F.ext("ang")
            a, b = P.alpha, P.beta
            if self.ttw:
                self.W = (1 / (1 - self.x)).scale(k * k * (4 * a * a - 1) / 2) + \
                         (1 / (1 + self.x)).scale(k * k * (4 * b * b - 1) / 2)
                self.dW = self.W.derive("theta")
            else:
                self.A = (1 / self.y).scale(k * a)
                self.B = (1 / self.x).scale(k * b)
                self.dA = self.A.derive("theta")
                self.dB = self.B.derive("theta")
        if self.rad:
            s = F.base("rad")
            c = F.ext("rad")
            self.s, self.c = s, c
            self.c_over_s = c / s
            self.inv_s2 = 1 / (s * s)
            self.V = P.V
            self.pot = (s * s / (c * c)).scale(P.V)
            self.c_over_s3 = c / (s * s * s)
            self.pot_d = (s / (c * c * c)).scale(P.V)
            self.half_inv_s2 = self.inv_s2.scale(Fraction(1, 2))
            if self.pvz:
                self.dB_s2 = self.dB * self.inv_s2
            if self.ttw:
                self.dW_2s2 = self.dW * self.half_inv_s2

    def __repr__(self):
        return "Sector(%s, %s)" % (self.kind, self.params)

    def func(self, f):
        """Coerce a rational or a function of a sub-field into this field."""
        if hasattr(f, "field"):
            return f.embed(self.field)
        return self.field.const(f)

    # ------------------------------------------------ monomial rules
    def mono(self, sym, key):
        """sym * T for a coefficient-free monomial T, as a term map (cached)."""
        ck = (sym, key)
        r = self._mono.get(ck)
        if r is None:
            r = self._mono_rule(sym, key)
            self._mono[ck] = r
        return r

    def _mono_rule(self, sym, key):
        a, b, e, m, h = key
        one = self.one
        if sym == "dth":
            if not self.ang:
                raise ValueError("no angular derivative in radial sector")
            if self.ttw:
                if a == 0:
                    return {(1, b, e, m, h): one}
                return _clean({(0, b, 0, m, h): self.W, (0, b, 0, m + 2, h): -one})
            # PVZ: dth = -R M - B + A R
            out = {}
            _acc_terms(out, self.lmul("R", self.mono("M", key)), c=-1)
            _acc(out, key, -self.B)
            _acc_terms(out, self.mono("R", key), f=self.A)
            return out
        if sym == "dr":
            if not self.rad:
                raise ValueError("no radial derivative in angular sector")
            if b == 0:
                return {(a, 1, e, m, h): one}
            base = (0, 0, e, m, h)
            out = {(0, 1, e, m, h): -self.c_over_s}
            _acc_terms(out, self.mono("M2", base), f=self.inv_s2)
            _acc(out, base, self.pot)
            _acc_terms(out, self.mono("H", base), c=-2)
            if a:
                out = self.lmul("dth", out)
            return out
        if sym == "R":
            if not self.pvz:
                raise ValueError("reflection only in PVZ sectors")
            return {(0, b, 1 - e, m, h): one}
        if sym == "M":
            if self.pvz:
                if e == 0:
                    return {(0, b, 0, m + 1, h): one}
                return _clean({(0, b, 1, m + 1, h): -one, (0, b, 0, m, h): self.B.scale(-2)})
            if a:
                raise OddSymbolError("odd M cannot cross dth in the TTW sector")
            return {(0, b, 0, m + 1, h): one}
        if sym == "M2":
            if self.pvz:
                return self.lmul("M", self.mono("M", key))
            if a == 0:
                return {(0, b, 0, m + 2, h): one}
            return _clean({(1, b, 0, m + 2, h): one, (0, b, 0, m, h): -self.dW})
        if sym == "H":
            if not self.rad:
                raise ValueError("no Hamiltonian symbol in angular sector")
            if a:
                sub = (0, b, e, m, h)
                out = self.lmul("dth", self.mono("H", sub))
                _acc(out, sub, -self.dW_2s2)
                return out
            if b:
                sub = (0, 0, e, m, h)
                out = self.lmul("dr", self.mono("H", sub))
                _acc(out, (0, 1, e, m, h), -self.half_inv_s2)
                _acc_terms(out, self.mono("M2", sub), f=self.c_over_s3)
                _acc(out, sub, -self.pot_d)
                return out
            if e == 0:
                return {(0, 0, 0, m, h + 1): one}
            return _clean({(0, 0, 1, m, h + 1): one, (0, 0, 1, m, h): -self.dB_s2})
        raise ValueError("unknown symbol %r" % sym)

    # ------------------------------------------------ left multiplication
    def lmul(self, sym, terms):
        """sym * X for a term map X, returned in consolidated order."""
        out = {}
        for key, f in terms.items():
            self._lmul_term(sym, f, key, out)
        return out

    def _lmul_term(self, sym, f, key, out):
        const = f.is_const()
        if sym == "R":
            _acc_terms(out, self.mono("R", key), f=f.involution())
            return
        if sym == "M" and self.pvz:
            if const:
                _acc_terms(out, self.mono("M", key), f=f)
                return
            tf = f.involution()
            _acc_terms(out, self.mono("M", key), f=tf)
            d = tf.derive("theta")
            if not d.is_zero():
                _acc_terms(out, self.mono("R", key), f=d)
            g = self.A * (tf - f)
            if not g.is_zero():
                _acc(out, key, g)
            return
        if sym == "M" and self.ttw and self.ang and not const and f.depends_on("ang"):
            raise OddSymbolError("odd M cannot cross an angular function in the TTW sector")
        _acc_terms(out, self.mono(sym, key), f=f)
        if const:
            return
        if sym == "dth":
            d = f.derive("theta")
            if not d.is_zero():
                _acc(out, key, d)
        elif sym == "dr":
            d = f.derive("r")
            if not d.is_zero():
                _acc(out, key, d)
        elif sym == "M2" and self.ttw:
            d1 = f.derive("theta")
            if not d1.is_zero():
                _acc(out, key, -d1.derive("theta"))
                _acc_terms(out, self.mono("dth", key), f=d1.scale(-2))
        elif sym == "M2" and self.pvz:
            self._comm_M2_f(f, key, out, Fraction(1))
        elif sym == "H":
            if self.rad:
                fr = f.derive("r")
                if not fr.is_zero():
                    frr = fr.derive("r")
                    _acc(out, key, frr.scale(Fraction(-1, 2)) - (self.c_over_s * fr).scale(Fraction(1, 2)))
                    _acc_terms(out, self.mono("dr", key), f=-fr)
            if self.ang and f.depends_on("ang"):
                if self.ttw:
                    d1 = f.derive("theta")
                    _acc(out, key, -(d1.derive("theta") * self.half_inv_s2))
                    _acc_terms(out, self.mono("dth", key), f=-(d1 * self.inv_s2))
                else:
                    tmp = {}
                    self._comm_M2_f(f, key, tmp, Fraction(1))
                    _acc_terms(out, tmp, f=self.half_inv_s2)

    def _comm_M2_f(self, f, key, out, scale):
        """out += scale * [M^2, f] T  (PVZ), using
        [M^2, f] = 2 f' R M + 2 B f' - f'' + (A'(tau f - f) - 2 A f') R."""
        d1 = f.derive("theta")
        tf = f.involution()
        if d1.is_zero() and tf == f:
            return
        rm = self.lmul("R", self.mono("M", key))
        _acc_terms(out, rm, f=d1.scale(2 * scale))
        _acc(out, key, ((self.B * d1).scale(2) - d1.derive("theta")).scale(scale))
        g = self.dA * (tf - f) - (self.A * d1).scale(2)
        if not g.is_zero():
            _acc_terms(out, self.mono("R", key), f=g.scale(scale))

    # ------------------------------------------------ symbol words
    def apply_word(self, key, terms, cache=None):
        """dth^a dr^b R^e Msym^m H^h * terms, evaluated right to left."""
        a, b, e, m, h = key
        cache = {} if cache is None else cache
        stages = [("H", h), ("M", m), ("R", e), ("dr", b), ("dth", a)]
        cur = terms
        acc_key = ()
        for sym, n in stages:
            acc_key = acc_key + (n,)
            hit = cache.get(acc_key)
            if hit is not None:
                cur = hit
                continue
            if sym == "M":
                cur = self._apply_M_power(cur, n)
            else:
                for _ in range(n):
                    cur = self.lmul(sym, cur)
            cache[acc_key] = cur
        return cur

    def _apply_M_power(self, terms, n):
        if n == 0:
            return terms
        if self.kind == "radial":
            return _shift_keys(terms, n)
        if self.pvz:
            for _ in range(n):
                terms = self.lmul("M", terms)
            return terms
        # TTW: even part through M^2, an odd factor only past angle-free terms
        for _ in range(n // 2):
            terms = self.lmul("M2", terms)
        if n % 2:
            terms = self.lmul("M", terms)
        return terms

    # ------------------------------------------------ raw building blocks
    def raw_M2(self):
        """The raw angular operator M^2 (TTW) or M_PVZ^2."""
        if self.ttw:
            return RawOp(self, {(2, 0, 0, 0): -self.one, (0, 0, 0, 0): self.W})
        if self.pvz:
            m = self.raw_M()
            return raw_compose(m, m)
        return RawOp(self, {(0, 0, 0, 2): self.one})

    def raw_M(self):
        if self.pvz:
            return RawOp(self, {(1, 0, 1, 0): self.one, (0, 0, 1, 0): -self.B,
                                (0, 0, 0, 0): -self.A})
        if self.kind == "radial":
            return RawOp(self, {(0, 0, 0, 1): self.one})
        raise OddSymbolError("M is not a differential operator in the TTW sector")

    def raw_H(self):
        if not self.rad:
            raise ValueError("no Hamiltonian in angular sector")
        half = Fraction(1, 2)
        t = {(0, 2, 0, 0): self.one.scale(-half), (0, 1, 0, 0): self.c_over_s.scale(-half),
             (0, 0, 0, 0): self.pot.scale(half)}
        out = RawOp(self, t)
        m2 = self.raw_M2()
        return out + m2.lmul_func(self.half_inv_s2)

    def raw_sym_power(self, m, h):
        """Raw expansion of Msym^m H^h (m even for TTW)."""
        key = (m, h)
        r = self._raw_pow.get(key)
        if r is not None:
            return r
        if m == 0 and h == 0:
            r = RawOp(self, {(0, 0, 0, 0): self.one})
        elif h > 0:
            r = raw_compose(self.raw_sym_power(m, h - 1), self.raw_H())
        elif self.kind == "radial":
            r = RawOp(self, {(0, 0, 0, m): self.one})
        elif self.pvz:
            r = raw_compose(self.raw_sym_power(m - 1, 0), self.raw_M())
        else:
            if m % 2:
                raise OddSymbolError("odd M power has no raw form in the TTW sector")
            r = raw_compose(self.raw_sym_power(m - 2, 0), self.raw_M2())
        self._raw_pow[key] = r
        return r


def _clean(d):
    return {k: v for k, v in d.items() if not v.is_zero()}


# ------------------------------------------------------------------ RawOp

class RawOp:
    """Normal-ordered differential(-difference) operator f dth^a dr^b R^e (M^m)."""

    __slots__ = ("sector", "terms")

    def __init__(self, sector, terms):
        self.sector = sector
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def __add__(self, o):
        out = dict(self.terms)
        for k, v in o.terms.items():
            _acc(out, k, v)
        return RawOp(self.sector, out)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c):
        return RawOp(self.sector, {k: v.scale(c) for k, v in self.terms.items()})

    def lmul_func(self, f):
        return RawOp(self.sector, {k: f * v for k, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, RawOp) and self.terms == o.terms

    def order(self):
        return max((a + b for (a, b, e, m) in self.terms), default=-1)

    def __repr__(self):
        return "RawOp(%s, %d terms)" % (self.sector.kind, len(self.terms))

    def to_json(self):
        return {"sector": self.sector.kind, "form": "raw",
                "terms": [[[int(i) for i in k], v.to_json()] for k, v in sorted(self.terms.items())]}


def _derivs(f, a, b, cache):
    """Table of dth^i dr^j f for i <= a, j <= b."""
    key = (id(f), a, b)
    t = cache.get(key)
    if t is not None:
        return t
    t = {}
    col = f
    for i in range(a + 1):
        cur = col
        for j in range(b + 1):
            t[(i, j)] = cur
            if j < b:
                cur = cur.derive("r")
        if i < a:
            col = col.derive("theta")
    cache[key] = (f, t)
    return cache[key]


def raw_compose(x, y):
    """Exact normal-ordered product x*y of raw operators."""
    S = x.sector
    out = {}
    cache = {}
    inv_cache = {}
    for (a, b, e, m), f in x.terms.items():
        for (c, d, dl, n), g in y.terms.items():
            if e:
                gg = inv_cache.get(id(g))
                if gg is None:
                    gg = (g, g.involution())
                    inv_cache[id(g)] = gg
                g2 = gg[1]
            else:
                g2 = g
            sign = -1 if (e and c % 2) else 1
            _, tab = _derivs(g2, a, b, cache)
            for i in range(a + 1):
                for j in range(b + 1):
                    dg = tab[(i, j)]
                    if dg.is_zero():
                        continue
                    coef = comb(a, i) * comb(b, j) * sign
                    _acc(out, (a - i + c, b - j + d, (e + dl) % 2, m + n), (f * dg).scale(coef))
    return RawOp(S, out)


def raw_commutator(x, y):
    return raw_compose(x, y) - raw_compose(y, x)


# ---------------------------------------------------------- ConsolidatedOp

class ConsolidatedOp:
    """Sum of f * dth^a dr^b R^e M^m H^h with the symbols rightmost."""

    __slots__ = ("sector", "terms")

    def __init__(self, sector, terms):
        self.sector = sector
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    @classmethod
    def unit(cls, sector, c=1):
        return cls(sector, {UNIT: sector.field.const(c)})

    @classmethod
    def symbol(cls, sector, m=0, h=0, c=1):
        return cls(sector, {(0, 0, 0, m, h): sector.field.const(c)})

    @classmethod
    def from_mpoly(cls, sector, P):
        terms = {}
        for (i, j), c in P.to_dict().items():
            terms[(0, 0, 0, int(i), int(j))] = sector.field.const(Q(c))
        return cls(sector, terms)

    def __add__(self, o):
        if not isinstance(o, ConsolidatedOp):
            o = ConsolidatedOp.unit(self.sector, o)
        out = dict(self.terms)
        for k, v in o.terms.items():
            _acc(out, k, v)
        return ConsolidatedOp(self.sector, out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        if not isinstance(o, ConsolidatedOp):
            o = ConsolidatedOp.unit(self.sector, o)
        return self + o.scale(-1)

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, c):
        c = Q(c)
        return ConsolidatedOp(self.sector, {k: v.scale(c) for k, v in self.terms.items()})

    def lmul_func(self, f):
        f = self.sector.func(f)
        return ConsolidatedOp(self.sector, {k: f * v for k, v in self.terms.items()})

    def rmul_poly(self, P):
        """Right multiplication by a polynomial in the symbols M, H."""
        out = {}
        items = [(tuple(int(e) for e in k), Q(c)) for k, c in P.to_dict().items()]
        for (a, b, e, m, h), f in self.terms.items():
            for (i, j), c in items:
                _acc(out, (a, b, e, m + i, h + j), f.scale(c))
        return ConsolidatedOp(self.sector, out)

    def __mul__(self, o):
        if isinstance(o, ConsolidatedOp):
            return compose(self, o)
        return self.scale(o)

    __rmul__ = scale

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, ConsolidatedOp) and self.terms == o.terms

    def __repr__(self):
        return "ConsolidatedOp(%s, %d terms)" % (self.sector.kind, len(self.terms))

    def max_m(self):
        return max((k[3] for k in self.terms), default=-1)

    def is_even_M(self):
        return all(k[3] % 2 == 0 for k in self.terms)

    def split_M(self):
        """{m: op without M} so that self = sum_m op_m * M^m."""
        out = {}
        for (a, b, e, m, h), f in self.terms.items():
            out.setdefault(m, {})[(a, b, e, 0, h)] = f
        return {m: ConsolidatedOp(self.sector, t) for m, t in out.items()}

    def parity_parts(self):
        """(even, odd) with self = even + odd * M, both even in M."""
        ev, od = {}, {}
        for (a, b, e, m, h), f in self.terms.items():
            if m % 2:
                od[(a, b, e, m - 1, h)] = f
            else:
                ev[(a, b, e, m, h)] = f
        return ConsolidatedOp(self.sector, ev), ConsolidatedOp(self.sector, od)

    def subs_M(self, v):
        """Evaluate the rightmost symbol M at a rational value."""
        v = Q(v)
        out = {}
        for (a, b, e, m, h), f in self.terms.items():
            _acc(out, (a, b, e, 0, h), f.scale(v ** m))
        return ConsolidatedOp(self.sector, out)

    def subs_MH(self, M=None, H=None):
        out = {}
        for (a, b, e, m, h), f in self.terms.items():
            c = Fraction(1)
            if M is not None:
                c *= Q(M) ** m
                m = 0
            if H is not None:
                c *= Q(H) ** h
                h = 0
            _acc(out, (a, b, e, m, h), f.scale(c))
        return ConsolidatedOp(self.sector, out)

    def shift_M(self, d, sign=1):
        """Replace the rightmost symbol M by sign*(M + d) (H untouched)."""
        d = Q(d)
        out = {}
        for (a, b, e, m, h), f in self.terms.items():
            # (sign*(M+d))^m expanded
            for i in range(m + 1):
                c = comb(m, i) * d ** (m - i) * (sign ** m)
                if c:
                    _acc(out, (a, b, e, i, h), f.scale(c))
        return ConsolidatedOp(self.sector, out)

    def is_central(self):
        return all(k[:3] == (0, 0, 0) and f.is_const() for k, f in self.terms.items())

    def central_poly(self):
        """The MPoly of a central operator (ValueError otherwise)."""
        if not self.is_central():
            raise ValueError("operator is not central")
        return mpoly({(k[3], k[4]): f.const_value() for k, f in self.terms.items()})

    def derivative_orders(self):
        return sorted({k[:3] for k in self.terms})

    def embed(self, sector):
        """Map an angular or radial operator into a 2D sector."""
        out = {}
        for k, f in self.terms.items():
            out[k] = f.embed(sector.field)
        return ConsolidatedOp(sector, out)

    def to_json(self):
        return {"sector": self.sector.kind, "form": "consolidated",
                "terms": [[[int(i) for i in k], v.to_json()] for k, v in sorted(self.terms.items())]}


def op_from_json(sector, data):
    if data.get("form") == "raw":
        return RawOp(sector, {tuple(k): func_from_json(sector.field, v) for k, v in data["terms"]})
    return ConsolidatedOp(sector, {tuple(k): func_from_json(sector.field, v) for k, v in data["terms"]})


# ------------------------------------------------------------- composition

def compose(x, y):
    """Direct consolidated product x*y through the sector rewrite rules.

    In TTW sectors an odd power of M in x may only pass angle-free terms of y;
    otherwise OddSymbolError is raised (use graded_compose).
    """
    S = x.sector
    cache = {}
    out = {}
    for key, f in x.terms.items():
        word = S.apply_word(key, y.terms, cache)
        _acc_terms(out, word, f=None if f.is_const() and f.const_value() == 1 else f)
    return ConsolidatedOp(S, out)


def commutator(x, y):
    return compose(x, y) - compose(y, x)


def anticommutator(x, y):
    return compose(x, y) + compose(y, x)


def lmul_symbol(sym, op):
    return ConsolidatedOp(op.sector, op.sector.lmul(sym, op.terms))


# ------------------------------------------------- consolidate and expand

def consolidate(raw):
    """Rewrite a raw operator into consolidated form."""
    S = raw.sector
    out = {}
    unit = {UNIT: S.one}
    for (a, b, e, m), f in raw.terms.items():
        ck = (a, b, e, m)
        word = S._cons_raw.get(ck)
        if word is None:
            cur = _shift_keys(unit, m) if m else unit
            if e:
                cur = S.lmul("R", cur)
            for _ in range(b):
                cur = S.lmul("dr", cur)
            for _ in range(a):
                cur = S.lmul("dth", cur)
            word = cur
            S._cons_raw[ck] = word
        _acc_terms(out, word, f=f)
    return ConsolidatedOp(S, out)


def expand(op):
    """Raw form of a consolidated operator.

    TTW sectors return a pair (even, odd) of raw operators with
    op = even + odd * M; other sectors return a single RawOp.
    """
    S = op.sector
    if S.ttw:
        ev, od = op.parity_parts()
        return _expand_even(ev), _expand_even(od)
    return _expand_even(op)


def _expand_even(op):
    S = op.sector
    out = RawOp(S, {})
    groups = {}
    for (a, b, e, m, h), f in op.terms.items():
        groups.setdefault((m, h), []).append(((a, b, e), f))
    for (m, h), items in groups.items():
        if S.kind == "radial":
            sym = S.raw_sym_power(0, h)
            mm = m
        else:
            sym = S.raw_sym_power(m, h)
            mm = 0
        left = {}
        for (a, b, e), f in items:
            _acc(left, (a, b, e, mm), f)
        out = out + raw_compose(RawOp(S, left), sym)
    return out


def raw_of_unit(sector):
    return RawOp(sector, {(0, 0, 0, 0): sector.one})


# -------------------------------------------------------------- divisions

def op_div_linear(op, c):
    """Right-divide by (M + c) exactly; DivisionRemainder if not divisible."""
    c = Q(c)
    groups = {}
    for (a, b, e, m, h), f in op.terms.items():
        groups.setdefault((a, b, e, h), {})[m] = f
    out = {}
    for (a, b, e, h), coeffs in groups.items():
        top = max(coeffs)
        carry = None
        for m in range(top, -1, -1):
            cur = coeffs.get(m)
            if carry is not None:
                cur = carry if cur is None else cur + carry
            if m == 0:
                if cur is not None and not cur.is_zero():
                    raise DivisionRemainder(cur, "remainder in %s" % ((a, b, e, h),))
                break
            if cur is None or cur.is_zero():
                carry = None
                continue
            out[(a, b, e, m - 1, h)] = cur
            carry = cur.scale(-c)
    return ConsolidatedOp(op.sector, out)


# ---------------------------------------------------------------- GradedOp

class GradedOp:
    """A consolidated operator with an integer grade and a certificate flag.

    kind 'angular' or 'plane': p(M) X = X p(M + 2ku) (TTW) or
    p(M) X = X p((-1)^u (M + 2ku)) (PVZ).  kind 'radial': [X, H] = 2u(u+M)/s^2 X,
    composed with the explicit shift X(M + 2u_y) * Y.
    """

    def __init__(self, body, grade, kind, certified=False, coeffs=None, note=""):
        self.body = body
        self.grade = int(grade)
        self.kind = kind
        self.certified = certified
        self.coeffs = coeffs
        self.note = note

    @property
    def sector(self):
        return self.body.sector

    @property
    def model(self):
        return self.body.sector.model

    def __repr__(self):
        return "GradedOp(u=%d, %s, %s, %d terms)" % (
            self.grade, self.kind, "certified" if self.certified else "uncertified",
            len(self.body.terms))


def radial_shift(op, d):
    """X(M) -> X(M + d) for radial operators, with H -> H + d(2M + d)/(2 s^2)."""
    S = op.sector
    d = Q(d)
    if d == 0:
        return op
    delta_poly = mpoly({(1, 0): 2 * d, (0, 0): d * d})
    half = S.half_inv_s2
    hp = {0: {UNIT: S.one}}
    maxh = max((k[4] for k in op.terms), default=0)
    for i in range(1, maxh + 1):
        prev = hp[i - 1]
        nxt = S.lmul("H", prev)
        t = ConsolidatedOp(S, prev).rmul_poly(delta_poly).lmul_func(half)
        for k, v in t.terms.items():
            _acc(nxt, k, v)
        hp[i] = nxt
    shift_poly = {}
    out = {}
    for (a, b, e, m, h), f in op.terms.items():
        cur = hp[h]
        sp = shift_poly.get(m)
        if sp is None:
            sp = (M_SYM + fq(d)) ** m
            shift_poly[m] = sp
        cur = ConsolidatedOp(S, cur).rmul_poly(sp).terms
        for _ in range(b):
            cur = S.lmul("dr", cur)
        _acc_terms(out, cur, f=f)
    return ConsolidatedOp(S, out)


def push_poly(model, grade, k, P):
    """The polynomial P~ with P(M) X = X P~(M) for a grade-u operator X."""
    u = grade
    if model == "ttw":
        return P.compose(M_SYM + fq(2 * k * u), H_SYM)
    sign = -1 if u % 2 else 1
    return P.compose(sign * (M_SYM + fq(2 * k * u)), H_SYM)


def graded_compose(x, y):
    """Product of graded operators using the push-through law of y."""
    if not y.certified:
        raise CertificateError("right factor is not certified")
    S = x.sector
    if x.kind == "radial":
        body = compose(radial_shift(x.body, 2 * y.grade), y.body)
        return GradedOp(body, x.grade + y.grade, "radial")
    k = S.params.k
    out = ConsolidatedOp(S, {})
    for m, xm in sorted(x.body.split_M().items()):
        prod = compose(xm, y.body)
        if m:
            shifted = push_poly(S.model, y.grade, k, M_SYM ** m)
            prod = prod.rmul_poly(shifted)
        out = out + prod
    return GradedOp(out, composite_grade(S.model, x.grade, y.grade), x.kind)


def composite_grade(model, ux, uy):
    """Grade of X*Y.  In PVZ an odd right factor reverses the sign of M,
    so the grades combine as u_y + (-1)^{u_y} u_x."""
    if model == "pvz" and uy % 2:
        return uy - ux
    return ux + uy


def grade_residual(x):
    """Consolidated residual of the ladder law of a graded operator."""
    S = x.sector
    X = x.body
    u = x.grade
    k = S.params.k
    if x.kind == "radial":
        XH = X.rmul_poly(H_SYM)
        HX = lmul_symbol("H", X)
        rhs = X.rmul_poly(mpoly({(0, 0): 2 * u * u, (1, 0): 2 * u})).lmul_func(S.inv_s2)
        return XH - HX - rhs
    if S.ttw:
        lhs = lmul_symbol("M2", X) - X.rmul_poly(M_SYM ** 2)
        rhs = X.rmul_poly(mpoly({(0, 0): 4 * k * k * u * u, (1, 0): 4 * k * u}))
        return lhs - rhs
    MX = lmul_symbol("M", X)
    XM = X.rmul_poly(M_SYM)
    if u % 2 == 0:
        return MX - XM - X.scale(2 * k * u)
    return MX + XM + X.scale(2 * k * u)


def verify_grade(x):
    """Certify the ladder law exactly; returns (ok, residual).

    The residual is computed in consolidated form and expanded to raw form;
    both are empty exactly when the law holds.
    """
    res = grade_residual(x)
    if res.is_zero():
        x.certified = True
        return True, res
    return False, res


def verify_grade_raw(x):
    """Independent check of the ladder law entirely in raw form."""
    S = x.sector
    X = x.body
    u = x.grade
    k = S.params.k
    if x.kind == "radial":
        R = expand(X)
        lhs = raw_commutator(R, S.raw_H())
        rhs = expand(X.rmul_poly(mpoly({(0, 0): 2 * u * u, (1, 0): 2 * u})).lmul_func(S.inv_s2))
        return (lhs - rhs).is_zero()
    if S.ttw:
        ev, od = expand(X)
        M2 = S.raw_M2()
        rhs = X.rmul_poly(mpoly({(0, 0): 4 * k * k * u * u, (1, 0): 4 * k * u}))
        rev, rod = expand(rhs)
        return (raw_commutator(M2, ev) - rev).is_zero() and (raw_commutator(M2, od) - rod).is_zero()
    R = expand(X)
    Mr = S.raw_M()
    if u % 2 == 0:
        lhs = raw_commutator(Mr, R) - R.scale(2 * k * u)
    else:
        lhs = raw_compose(Mr, R) + raw_compose(R, Mr) + R.scale(2 * k * u)
    return lhs.is_zero()
