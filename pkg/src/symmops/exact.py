"""Exact scalars, polynomials in the formal symbols M and H, and coefficient fields.

Coefficient functions live in a field built from one or two quadratic
"axes".  An axis has a base variable b, an extension variable e with
e^2 = sigma(b), a derivation (b' = A*e, e' = B(b)) and an optional
involution e -> -e.  The angular axis is (x, y) = (cos 2k theta, sin 2k theta),
the radial axis is (s, c).  The plane field carries both axes.

An element is stored as  sum_par e^par * N_par(b) / D(b)  with a single
monic denominator and gcd(D, all N_par) = 1, which is a unique canonical form.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from flint import fmpq, fmpq_mpoly_ctx, fmpq_poly


# ---------------------------------------------------------------- scalars

def Q(v):
    """Coerce ints, strings like '3/4', fmpq and Fractions to Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, fmpq):
        return Fraction(int(v.p), int(v.q))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError("not a rational: %r" % (v,))


def fq(v):
    """Fraction (or int) to flint fmpq."""
    v = Q(v)
    return fmpq(v.numerator, v.denominator)


def qstr(v):
    """Canonical 'num/den' string (integers without the slash)."""
    v = Q(v)
    if v.denominator == 1:
        return str(v.numerator)
    return "%d/%d" % (v.numerator, v.denominator)


class DivisionRemainder(ArithmeticError):
    """An exact division left a nonzero remainder."""

    def __init__(self, remainder, message=None):
        self.remainder = remainder
        super().__init__(message or "nonzero remainder: %s" % (remainder,))


# ------------------------------------------------- polynomials in M and H

MH = fmpq_mpoly_ctx.get(("M", "H"), "lex")
M_SYM, H_SYM = MH.gens()


def mpoly(data=None):
    """Build an MPoly from {(deg_M, deg_H): rational} (or a scalar)."""
    if data is None:
        return MH.from_dict({})
    if isinstance(data, dict):
        return MH.from_dict({k: fq(v) for k, v in data.items() if v != 0})
    return MH.from_dict({(0, 0): fq(data)}) if Q(data) != 0 else MH.from_dict({})


def mp_terms(p):
    """Sorted list of ((i, j), Fraction) pairs."""
    return sorted((tuple(int(e) for e in k), Q(v)) for k, v in p.to_dict().items())


def mp_str(p):
    return str(p)


def mp_to_json(p):
    return [[list(k), qstr(v)] for k, v in mp_terms(p)]


def mp_from_json(data):
    return mpoly({tuple(k): Q(v) for k, v in data})


def mp_shift(p, d):
    """p(M + d, H)."""
    if d == 0:
        return p
    return p.compose(M_SYM + fq(d), H_SYM)


def mp_sub_M(p, expr):
    """Substitute an MPoly expression for M."""
    return p.compose(expr, H_SYM)


def mp_neg_M(p):
    """p(-M, H)."""
    return p.compose(-M_SYM, H_SYM)


def mp_eval(p, M=None, H=None):
    """Substitute rationals for M and/or H; returns an MPoly."""
    sub = {}
    if M is not None:
        sub["M"] = fq(M)
    if H is not None:
        sub["H"] = fq(H)
    return p.subs(sub) if sub else p


def mp_value(p, M=0, H=0):
    """Rational value at (M, H)."""
    return Q(p(fq(M), fq(H)))


def mp_const(p):
    """The value of a constant MPoly (error otherwise)."""
    if p.is_zero():
        return Fraction(0)
    if not p.is_constant():
        raise ValueError("not a constant: %s" % p)
    return Q(p.to_dict()[(0, 0)])


def mp_by_M(p):
    """Split p into {deg_M: poly in H}."""
    out = {}
    for (i, j), c in p.to_dict().items():
        out.setdefault(int(i), {})[(0, j)] = c
    return {i: MH.from_dict(d) for i, d in out.items()}


def mp_deg_M(p):
    return -1 if p.is_zero() else p.degrees()[0]


def mp_deg_H(p):
    return -1 if p.is_zero() else p.degrees()[1]


def mp_product(factors):
    out = mpoly(1)
    for f in factors:
        out = out * f
    return out


def mpoly_exact_div(p, factor):
    """Divide p by a monic linear polynomial in M; raise on a remainder."""
    parts = mp_by_M(factor)
    if set(parts) != {0, 1} or parts[1] != mpoly(1):
        if set(parts) == {1} and parts[1] == mpoly(1):
            pass
        else:
            raise ValueError("factor must be monic linear in M: %s" % factor)
    quo, rem = divmod(p, factor)
    if not rem.is_zero():
        raise DivisionRemainder(rem)
    return quo


def _content_M(p):
    """gcd of the H-coefficients of the powers of M."""
    g = None
    for c in mp_by_M(p).values():
        g = c if g is None else g.gcd(c)
    return g


def mpoly_gcd(ps):
    """Monic gcd in M of a family of MPolys, H-content removed."""
    nz = [p for p in ps if not p.is_zero()]
    if not nz:
        raise ValueError("gcd of an all-zero family")
    g = nz[0]
    for p in nz[1:]:
        g = g.gcd(p)
        if g.is_constant():
            break
    if g.is_constant():
        return mpoly(1)
    g = g / _content_M(g)
    lead = mp_by_M(g)[mp_deg_M(g)]
    lc = lead.leading_coefficient()
    return g / lc


def linear_factor(c):
    """The polynomial M + c."""
    return M_SYM + fq(c)


# ------------------------------------------------------- univariate RatFunc

class RatFunc:
    """Univariate rational function num/den with den monic and coprime to num."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, fmpq_poly) else fmpq_poly(num)
        den = fmpq_poly([1]) if den is None else (den if isinstance(den, fmpq_poly) else fmpq_poly(den))
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            self.num, self.den = fmpq_poly([]), fmpq_poly([1])
            return
        g = num.gcd(den)
        num, den = num // g, den // g
        lc = den[den.degree()]
        self.num, self.den = num / lc, den / lc

    def __add__(self, o):
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return RatFunc(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return RatFunc(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if o.num == 0:
            raise ZeroDivisionError("division by zero")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __eq__(self, o):
        return isinstance(o, RatFunc) and self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __call__(self, x):
        return Q(self.num(fq(x))) / Q(self.den(fq(x)))

    def is_zero(self):
        return self.num == 0

    def __repr__(self):
        return "RatFunc((%s)/(%s))" % (self.num, self.den)


# ------------------------------------------------------------------ fields

@dataclass(frozen=True)
class Axis:
    """One quadratic extension  e^2 = sigma(b)  with its derivation.

    ``ext`` is None for the trivial case sigma = 1 (flat radial axis), where
    e is identically 1.  Polynomial data are coefficient tuples, low degree first.
    """
    name: str
    base: str
    ext: object
    sigma: tuple
    dbase: Fraction
    dext: tuple
    deriv: str
    flip: bool


def angular_axis(k):
    k = Q(k)
    return Axis("ang", "x", "y", (Fraction(1), Fraction(0), Fraction(-1)),
                -2 * k, (Fraction(0), 2 * k), "theta", True)


def radial_axis(kappa):
    kappa = Q(kappa)
    if kappa == 0:
        return Axis("rad", "s", None, (Fraction(1),), Fraction(1), (), "r", False)
    return Axis("rad", "s", "c", (Fraction(1), Fraction(0), -kappa),
                Fraction(1), (Fraction(0), -kappa), "r", False)


class FieldSpec:
    """A coefficient field: an ordered tuple of axes sharing one mpoly context."""

    def __init__(self, axes):
        self.axes = tuple(axes)
        self.names = tuple(a.base for a in self.axes)
        self.ctx = fmpq_mpoly_ctx.get(self.names, "lex")
        gens = self.ctx.gens()
        self.gens = dict(zip(self.names, gens))
        self.n = len(self.axes)
        self.sigma = []
        self.dext = []
        for i, a in enumerate(self.axes):
            b = gens[i]
            self.sigma.append(self._upoly(a.sigma, b))
            self.dext.append(self._upoly(a.dext, b))
        self.zero_par = (0,) * self.n
        self.one = self.ctx.from_dict({(0,) * self.n: fmpq(1)})
        self.key = tuple(self.axes)

    def _upoly(self, coeffs, var):
        out = self.ctx.from_dict({})
        for i, c in enumerate(coeffs):
            if c != 0:
                out = out + fq(c) * var ** i
        return out

    def axis_index(self, name):
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        return None

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "FieldSpec(%s)" % ", ".join(
            "%s:%s^2=%s" % (a.name, a.ext, a.sigma) for a in self.axes)

    # constructors
    def const(self, v):
        v = Q(v)
        if v == 0:
            return QuadExtFunc(self, {}, self.one, False)
        return QuadExtFunc(self, {self.zero_par: self.one * fq(v)}, self.one, False)

    def zero(self):
        return self.const(0)

    def base(self, name):
        """The base variable of the named axis ('ang' -> x, 'rad' -> s)."""
        i = self.axis_index(name)
        return QuadExtFunc(self, {self.zero_par: self.gens[self.axes[i].base]}, self.one, False)

    def ext(self, name):
        """The extension variable of the named axis ('ang' -> y, 'rad' -> c)."""
        i = self.axis_index(name)
        if self.axes[i].ext is None:
            return self.const(1)
        par = tuple(1 if j == i else 0 for j in range(self.n))
        return QuadExtFunc(self, {par: self.one}, self.one, False)


@lru_cache(maxsize=None)
def _field(axes):
    return FieldSpec(axes)


def angular_field(k):
    """Field of x = cos 2k theta, y = sin 2k theta."""
    return _field((angular_axis(k),))


def radial_field(kappa):
    """Field of the generalized sine s and cosine c of curvature kappa."""
    return _field((radial_axis(kappa),))


def plane_field(k, kappa):
    """Tensor field carrying both the angular and the radial axes."""
    return _field((angular_axis(k), radial_axis(kappa)))


def _par_mul(field, p, q):
    """Product of extension monomials e^p e^q -> (parity, sigma factor or None)."""
    r = []
    fac = None
    for i in range(field.n):
        if p[i] and q[i]:
            r.append(0)
            fac = field.sigma[i] if fac is None else fac * field.sigma[i]
        else:
            r.append(p[i] | q[i])
    return tuple(r), fac


class QuadExtFunc:
    """Element of a (one- or two-axis) quadratic-extension rational function field.

    Immutable.  ``nums`` maps an extension parity tuple to an mpoly numerator,
    ``den`` is the shared monic denominator.
    """

    __slots__ = ("field", "nums", "den", "_hash")

    def __init__(self, field, nums, den, normalize=True):
        self.field = field
        self._hash = None
        nums = {p: n for p, n in nums.items() if not n.is_zero()}
        if not nums:
            self.nums, self.den = {}, field.one
            return
        if normalize:
            if not den.is_constant():
                g = den
                for n in nums.values():
                    g = g.gcd(n)
                    if g.is_constant():
                        break
                if not g.is_constant():
                    den = den / g
                    nums = {p: n / g for p, n in nums.items()}
            lc = den.leading_coefficient()
            if lc != 1:
                den = den / lc
                nums = {p: n / lc for p, n in nums.items()}
        self.nums, self.den = nums, den

    # -- basic predicates
    def is_zero(self):
        return not self.nums

    def is_const(self):
        return self.den.is_constant() and all(
            p == self.field.zero_par and n.is_constant() for p, n in self.nums.items())

    def const_value(self):
        if self.is_zero():
            return Fraction(0)
        if not self.is_const():
            raise ValueError("not a constant")
        return Q(self.nums[self.field.zero_par].to_dict()[(0,) * self.field.n])

    def depends_on(self, axis_name):
        """True unless the element is free of the named axis variables."""
        i = self.field.axis_index(axis_name)
        if i is None:
            return False
        if any(p[i] for p in self.nums):
            return True
        if self.den.degrees()[i] > 0:
            return True
        return any(n.degrees()[i] > 0 for n in self.nums.values())

    # -- arithmetic
    def _check(self, other):
        if not isinstance(other, QuadExtFunc):
            return self.field.const(other)
        if other.field is not self.field and other.field != self.field:
            raise ValueError("field descriptor mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        if not other.nums:
            return self
        if not self.nums:
            return other
        if self.den == other.den:
            nums = dict(self.nums)
            for p, n in other.nums.items():
                nums[p] = nums[p] + n if p in nums else n
            return QuadExtFunc(self.field, nums, self.den)
        g = self.den.gcd(other.den)
        a = other.den / g
        b = self.den / g
        nums = {p: n * a for p, n in self.nums.items()}
        for p, n in other.nums.items():
            nums[p] = nums[p] + n * b if p in nums else n * b
        return QuadExtFunc(self.field, nums, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtFunc(self.field, {p: -n for p, n in self.nums.items()}, self.den, False)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c):
        c = Q(c)
        if c == 0:
            return self.field.zero()
        f = fq(c)
        return QuadExtFunc(self.field, {p: n * f for p, n in self.nums.items()}, self.den, False)

    def __mul__(self, other):
        if not isinstance(other, QuadExtFunc):
            return self.scale(other)
        other = self._check(other)
        if not self.nums or not other.nums:
            return self.field.zero()
        if other.is_const():
            return self.scale(other.const_value())
        if self.is_const():
            return other.scale(self.const_value())
        nums = {}
        for p, a in self.nums.items():
            for q, b in other.nums.items():
                r, fac = _par_mul(self.field, p, q)
                t = a * b
                if fac is not None:
                    t = t * fac
                nums[r] = nums[r] + t if r in nums else t
        return QuadExtFunc(self.field, nums, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.nums:
            raise ZeroDivisionError("inverse of zero")
        # multiply by conjugates axis by axis until the numerator is base-only
        num = QuadExtFunc(self.field, self.nums, self.field.one, False)
        res = QuadExtFunc(self.field, {self.field.zero_par: self.den}, self.field.one, False)
        for i in range(self.field.n):
            if not any(p[i] for p in num.nums):
                continue
            conj = num._conj(i)
            num = num * conj
            res = res * conj
        n0 = num.nums[self.field.zero_par]
        return QuadExtFunc(self.field, res.nums, res.den * n0)

    def _conj(self, i):
        return QuadExtFunc(self.field, {p: (-n if p[i] else n) for p, n in self.nums.items()},
                           self.den, False)

    def __truediv__(self, other):
        other = self._check(other)
        if not other.nums:
            raise ZeroDivisionError("division by zero function")
        if other.is_const():
            return self.scale(1 / other.const_value())
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, QuadExtFunc):
            try:
                other = self.field.const(other)
            except TypeError:
                return NotImplemented
        if self.field != other.field or self.nums.keys() != other.nums.keys():
            return False
        return self.den == other.den and all(self.nums[p] == other.nums[p] for p in self.nums)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.key, self.canonical_str()))
        return self._hash

    # -- derivation and involution
    def derive(self, var):
        """Derivative along 'theta' or 'r' (zero if no axis carries it)."""
        fld = self.field
        idx = None
        for i, a in enumerate(fld.axes):
            if a.deriv == var:
                idx = i
        if idx is None or not self.nums:
            return fld.zero()
        ax = fld.axes[idx]
        bname = ax.base
        A = fq(ax.dbase)
        B = fld.dext[idx]
        has_ext = ax.ext is not None
        D = self.den

        def d_poly(n):
            # derivative of a base polynomial: (dn/db) * A * e
            dn = n.derivative(bname)
            return dn * A

        out = {}

        def acc(par, t):
            if par in out:
                out[par] = out[par] + t
            else:
                out[par] = t

        dD = d_poly(D)
        for par, n in self.nums.items():
            # d(e^par) * n * D
            if par[idx]:
                q = tuple(0 if j == idx else par[j] for j in range(fld.n))
                acc(q, B * n * D)
            # e^par * (dn) * e * D   and   - e^par * n * (dD) * e
            t = d_poly(n) * D - n * dD
            if t.is_zero():
                continue
            if has_ext:
                if par[idx]:
                    q = tuple(0 if j == idx else par[j] for j in range(fld.n))
                    acc(q, t * fld.sigma[idx])
                else:
                    q = tuple(1 if j == idx else par[j] for j in range(fld.n))
                    acc(q, t)
            else:
                acc(par, t)
        return QuadExtFunc(fld, out, D * D)

    def involution(self):
        """The reflection y -> -y on axes carrying an involution."""
        flips = [i for i, a in enumerate(self.field.axes) if a.flip]
        if not flips:
            return self
        nums = {}
        for p, n in self.nums.items():
            s = sum(p[i] for i in flips) % 2
            nums[p] = -n if s else n
        return QuadExtFunc(self.field, nums, self.den, False)

    # -- evaluation and conversion
    def evaluate(self, values):
        """Evaluate at base values {base_name: number}; extension values given
        under the extension names.  Works with Fractions, floats or numpy arrays."""
        fld = self.field
        def peval(poly):
            total = 0
            for exps, c in poly.to_dict().items():
                term = _num(c)
                for name, e in zip(fld.names, exps):
                    if e:
                        term = term * values[name] ** int(e)
                total = total + term
            return total
        tot = 0
        for par, n in self.nums.items():
            t = peval(n)
            for i, bit in enumerate(par):
                if bit:
                    t = t * values[fld.axes[i].ext]
            tot = tot + t
        return tot / peval(self.den)

    def embed(self, target):
        """Map into a field with a superset of axes (same axis data)."""
        if target == self.field:
            return self
        idx = []
        for a in self.field.axes:
            j = None
            for t, b in enumerate(target.axes):
                if a == b:
                    j = t
            if j is None:
                raise ValueError("axis %s not present in target" % a.name)
            idx.append(j)

        def mp(poly):
            d = {}
            for exps, c in poly.to_dict().items():
                e = [0] * target.n
                for i, v in enumerate(exps):
                    e[idx[i]] = v
                d[tuple(e)] = c
            return target.ctx.from_dict(d)

        nums = {}
        for p, n in self.nums.items():
            q = [0] * target.n
            for i, bit in enumerate(p):
                q[idx[i]] = bit
            nums[tuple(q)] = mp(n)
        return QuadExtFunc(target, nums, mp(self.den), False)

    def parts(self):
        """Even and odd parts of a one-axis element as RatFuncs."""
        if self.field.n != 1:
            raise ValueError("parts() needs a one-axis field")
        def up(poly):
            d = poly.to_dict()
            deg = max((e[0] for e in d), default=0)
            co = [fmpq(0)] * (deg + 1)
            for e, c in d.items():
                co[e[0]] = c
            return fmpq_poly(co)
        den = up(self.den)
        even = up(self.nums.get((0,), self.field.ctx.from_dict({})))
        odd = up(self.nums.get((1,), self.field.ctx.from_dict({})))
        return RatFunc(even, den), RatFunc(odd, den)

    @property
    def even(self):
        return self.parts()[0]

    @property
    def odd(self):
        return self.parts()[1]

    def canonical_str(self):
        items = sorted(self.nums.items())
        return "|".join("%s:%s" % (p, n) for p, n in items) + "//" + str(self.den)

    def to_json(self):
        return {
            "num": [[[int(x) for x in p], _poly_json(n)] for p, n in sorted(self.nums.items())],
            "den": _poly_json(self.den),
        }

    def __repr__(self):
        fld = self.field
        if not self.nums:
            return "0"
        parts = []
        for p, n in sorted(self.nums.items()):
            mono = "*".join(fld.axes[i].ext for i, b in enumerate(p) if b)
            parts.append("(%s)%s" % (n, "*" + mono if mono else ""))
        s = " + ".join(parts)
        if self.den.is_one():
            return s
        return "[%s]/(%s)" % (s, self.den)


def _num(c):
    f = Q(c)
    return f if f.denominator != 1 else f.numerator


def _poly_json(poly):
    return [[[int(x) for x in e], qstr(Q(c))] for e, c in sorted(poly.to_dict().items())]


def func_from_json(field, data):
    ctx = field.ctx
    def mp(terms):
        return ctx.from_dict({tuple(e): fq(Q(c)) for e, c in terms})
    nums = {tuple(p): mp(t) for p, t in data["num"]}
    return QuadExtFunc(field, nums, mp(data["den"]))
