"""Floating-point oracle: eigenfunctions, operator residuals and ladder actions.

This module is deliberately independent of the exact engine's algebra: it
evaluates eigenfunctions with scipy's orthogonal polynomials and applies the
exact operator coefficients, converted to doubles, pointwise.
"""

import math
import warnings

import numpy as np
from scipy import linalg
from scipy.special import eval_genlaguerre, eval_jacobi

from .exact import Q


class DiscretizationWarning(UserWarning):
    pass


class OutOfDomain(ValueError):
    pass


def fvalue(f, point):
    """Value of a field element at point = {axis name: (base value, ext value)}."""
    vals = {}
    for ax in f.field.axes:
        b, e = point[ax.name]
        vals[ax.base] = b
        if ax.ext is not None:
            vals[ax.ext] = e
    return float(f.evaluate(vals))


def angular_point(k, theta):
    k = float(k)
    return (math.cos(2 * k * theta), math.sin(2 * k * theta))


def radial_point(kappa, r):
    kappa = float(kappa)
    if kappa > 0:
        t = math.sqrt(kappa)
        return (math.sin(t * r) / t, math.cos(t * r))
    if kappa < 0:
        t = math.sqrt(-kappa)
        return (math.sinh(t * r) / t, math.cosh(t * r))
    return (r, 1.0)


# ------------------------------------------------------------ eigenfunctions

def ttw_angular(params, l, theta):
    """Theta_l and its first two theta-derivatives (TTW)."""
    k, a, b = float(params.k), float(params.alpha), float(params.beta)
    kt = k * theta
    if not (0 < kt < math.pi / 2):
        raise OutOfDomain("k theta must lie in (0, pi/2)")
    sn, cs = math.sin(kt), math.cos(kt)
    pa, pb = a + 0.5, b + 0.5
    w = sn ** pa * cs ** pb
    g1 = k * (pa * cs / sn - pb * sn / cs)
    g2 = g1 * g1 - k * k * (pa / sn ** 2 + pb / cs ** 2)
    z = math.cos(2 * kt)
    z1 = -2 * k * math.sin(2 * kt)
    z2 = -4 * k * k * z
    P, P1, P2 = _jacobi3(l, a, b, z)
    f0 = w * P
    f1 = w * (g1 * P + P1 * z1)
    f2 = w * (g2 * P + 2 * g1 * P1 * z1 + P2 * z1 * z1 + P1 * z2)
    return f0, f1, f2


def _jacobi3(n, a, b, z):
    """P_n^{(a,b)}(z) with first and second z-derivatives."""
    P = eval_jacobi(n, a, b, z)
    P1 = 0.5 * (n + a + b + 1) * eval_jacobi(n - 1, a + 1, b + 1, z) if n >= 1 else 0.0
    P2 = 0.25 * (n + a + b + 1) * (n + a + b + 2) * eval_jacobi(n - 2, a + 2, b + 2, z) if n >= 2 else 0.0
    return P, P1, P2


def _laguerre3(n, a, z):
    L = eval_genlaguerre(n, a, z)
    L1 = -eval_genlaguerre(n - 1, a + 1, z) if n >= 1 else 0.0
    L2 = eval_genlaguerre(n - 2, a + 2, z) if n >= 2 else 0.0
    return L, L1, L2


def radial_state(params, m, mu, r):
    """S_{m}(r) for angular eigenvalue mu (M = mu) and its first two r-derivatives.

    kappa = 0:  r^mu exp(-omega r^2 / 2) L_m^mu(omega r^2)
    kappa != 0: s^mu c^(1/2 + omega/kappa) P_m^(mu, omega/kappa)(c^2 - kappa s^2)
    (for kappa < 0 the exponent omega/kappa is negative and the state is the
    one with c^(1/2 - omega/|kappa|), which decays).
    """
    kap, w = float(params.kappa), float(params.omega)
    mu = float(mu)
    if r <= 0:
        raise OutOfDomain("r must be positive")
    if kap == 0:
        z = w * r * r
        z1 = 2 * w * r
        z2 = 2 * w
        L, L1, L2 = _laguerre3(m, mu, z)
        g1 = mu / r - w * r
        g2 = g1 * g1 - mu / (r * r) - w
        wgt = r ** mu * math.exp(-w * r * r / 2)
        f0 = wgt * L
        f1 = wgt * (g1 * L + L1 * z1)
        f2 = wgt * (g2 * L + 2 * g1 * L1 * z1 + L2 * z1 * z1 + L1 * z2)
        return f0, f1, f2
    s, c = radial_point(kap, r)
    nu = w / kap
    e = 0.5 + nu
    # ds/dr = c, dc/dr = -kappa s
    if c <= 0 or s <= 0:
        raise OutOfDomain("outside 0 < s, 0 < c")
    g1 = mu * c / s - e * kap * s / c
    g2 = g1 * g1 - mu * (c * c + kap * s * s) / (s * s) - e * kap * (c * c + kap * s * s) / (c * c)
    z = c * c - kap * s * s
    z1 = -4 * kap * s * c
    z2 = -4 * kap * (c * c - kap * s * s)
    P, P1, P2 = _jacobi3(m, mu, nu, z)
    wgt = s ** mu * c ** e
    f0 = wgt * P
    f1 = wgt * (g1 * P + P1 * z1)
    f2 = wgt * (g2 * P + 2 * g1 * P1 * z1 + P2 * z1 * z1 + P1 * z2)
    return f0, f1, f2


class EigenState:
    """A TTW product state Psi_{m,l}(r, theta) = S_{m,l}(r) Theta_l(theta)."""

    def __init__(self, params, m, l):
        self.params, self.m, self.l = params, m, l
        k = params.k
        self.mu = float(k * (2 * l + params.alpha + params.beta + 1))
        self.M2 = self.mu ** 2
        eps = 2 * m + 1 + self.mu
        self.E = float(params.omega) * eps + float(params.kappa) * eps * eps / 2

    def angular(self, theta):
        return ttw_angular(self.params, self.l, theta)

    def radial(self, r):
        return radial_state(self.params, self.m, self.mu, r)


# ------------------------------------------------------------ grids

def default_grid(params, size=20, seed=0):
    """Sample points (r, theta) at least 1e-2 away from singular loci."""
    rng = np.random.default_rng(seed)
    k = float(params.k)
    kap = float(params.kappa)
    r_hi = 2.5
    if kap > 0:
        r_hi = min(r_hi, 0.9 * (math.pi / 2) / math.sqrt(kap))
    pts = []
    while len(pts) < size:
        r = float(rng.uniform(0.3, r_hi))
        kt = float(rng.uniform(0.05, math.pi / 2 - 0.05))
        pts.append((r, kt / k))
    return pts


# ------------------------------------------------------------ operator application

def apply_raw(op, point, derivs, reflect=None):
    """Apply a RawOp pointwise.

    derivs[(a, b)] is d_theta^a d_r^b of the function at the point; reflect
    gives the same table for the reflected function (PVZ only).
    """
    tot = 0.0
    for (a, b, e, m), f in op.terms.items():
        if m:
            raise ValueError("raw operator still carries an M symbol")
        table = derivs if not e else reflect
        tot += fvalue(f, point) * table[(a, b)]
    return tot


def check_eigen(params, m, l, grid=None):
    """Max relative residuals |(H - E) Psi / Psi| and |(M^2 - mu^2) Theta / Theta| (TTW)."""
    from .operators import Sector
    S2 = Sector("ttw-2d", params)
    SA = Sector("ttw-ang", params)
    H = S2.raw_H()
    M2 = SA.raw_M2()
    st = EigenState(params, m, l)
    grid = grid or default_grid(params)
    worst_h = worst_m = 0.0
    for r, th in grid:
        A = st.angular(th)
        R = st.radial(r)
        derivs = {(a, b): A[a] * R[b] for a in range(3) for b in range(3)}
        pt = {"ang": angular_point(params.k, th), "rad": radial_point(params.kappa, r)}
        val = derivs[(0, 0)]
        hres = apply_raw(H, pt, derivs) - st.E * val
        worst_h = max(worst_h, abs(hres) / max(abs(val), 1e-300))
        ad = {(a, 0): A[a] for a in range(3)}
        mres = apply_raw(M2, {"ang": pt["ang"]}, ad) - st.M2 * A[0]
        worst_m = max(worst_m, abs(mres) / max(abs(A[0]), 1e-300))
    return {"H": worst_h, "M2": worst_m, "E": st.E, "mu": st.mu}


# ------------------------------------------------------------ ladder actions

def apply_consolidated(op, point, derivs, mu, E=0.0, reflect=None):
    """Apply a ConsolidatedOp with the symbols M -> mu, H -> E."""
    tot = 0.0
    for (a, b, e, m, h), f in op.terms.items():
        table = derivs if not e else reflect
        tot += fvalue(f, point) * (mu ** int(m)) * (E ** int(h)) * table[(a, b)]
    return tot


def _fit(values, target):
    """Least-squares c with values ~ c * target, and the max relative deviation."""
    v = np.asarray(values)
    t = np.asarray(target)
    c = float(np.dot(v, t) / np.dot(t, t))
    dev = float(np.max(np.abs(v - c * t)) / max(np.max(np.abs(v)), np.max(np.abs(c * t)), 1e-300))
    return c, dev


def check_angular_ladder(family, l, u=1, grid=None):
    """TTW: J^u Theta_l ~ c Theta_{l+u}; Phi^u(mu) ~ c(J^{-u}) c(J^u)."""
    from .exact import mp_value
    P = family.params
    k = float(P.k)
    mu = float(P.k * (2 * l + P.alpha + P.beta + 1))
    grid = grid or default_grid(P)
    thetas = [th for _, th in grid]

    def act(op, lvl, muv):
        vals = []
        for th in thetas:
            A = ttw_angular(P, lvl, th)
            vals.append(apply_consolidated(op, {"ang": angular_point(k, th)}, {(0, 0): A[0], (1, 0): A[1]}, muv))
        return vals

    Jp = family.op(u).body
    Jm = family.op(-u).body
    tgt = l + u
    if tgt < 0:
        vals = act(Jp, l, mu)
        return {"annihilated": bool(max(abs(v) for v in vals) < 1e-8), "consistency": 0.0}
    fwd = act(Jp, l, mu)
    target = [ttw_angular(P, tgt, th)[0] for th in thetas]
    c1, dev1 = _fit(fwd, target)
    back = act(Jm, tgt, mu + 2 * k * u)
    c2, dev2 = _fit(back, [ttw_angular(P, l, th)[0] for th in thetas])
    phi = float(mp_value(family.structure(u), M=Q(P.k * (2 * l + P.alpha + P.beta + 1))))
    cons = abs(c1 * c2 - phi) / max(abs(phi), 1e-300)
    return {"c_up": c1, "c_down": c2, "dev_up": dev1, "dev_down": dev2,
            "phi": phi, "consistency": cons, "annihilated": False}


def check_radial_ladder(family, m, l, u=1, grid=None):
    """K^u S_{m}(mu) ~ c S_{m-u}(mu + 2u) at fixed E; Psi^u(mu, E) ~ c(K^{-u}) c(K^u)."""
    from .exact import mp_value
    P = family.params
    muq = P.k * (2 * l + P.alpha + P.beta + 1)
    mu = float(muq)
    eps = 2 * m + 1 + muq
    Eq = P.omega * eps + P.kappa * eps * eps / 2
    E = float(Eq)
    grid = grid or default_grid(P)
    rs = [r for r, _ in grid]

    def act(op, mm, muv):
        vals = []
        for r in rs:
            R = radial_state(P, mm, muv, r)
            vals.append(apply_consolidated(op, {"rad": radial_point(P.kappa, r)},
                                           {(0, 0): R[0], (0, 1): R[1]}, muv, E))
        return vals

    Kp = family.op(u).body
    Km = family.op(-u).body
    psi = float(mp_value(family.structure(u), M=muq, H=Eq))
    tm = m - u
    fwd = act(Kp, m, mu)
    if tm < 0:
        size = max(abs(v) for v in fwd)
        ref = max(abs(radial_state(P, m, mu, r)[0]) for r in rs)
        return {"annihilated": bool(size < 1e-8 * max(ref, 1.0)), "psi": psi, "consistency": abs(psi)}
    target = [radial_state(P, tm, mu + 2 * u, r)[0] for r in rs]
    c1, dev1 = _fit(fwd, target)
    back = act(Km, tm, mu + 2 * u)
    c2, dev2 = _fit(back, [radial_state(P, m, mu, r)[0] for r in rs])
    cons = abs(c1 * c2 - psi) / max(abs(psi), 1e-300)
    return {"c_up": c1, "c_down": c2, "dev_up": dev1, "dev_down": dev2,
            "psi": psi, "consistency": cons, "annihilated": False}


# ------------------------------------------------------------ PVZ discretization

def _pvz_basis(params, theta, n):
    """w(theta) z^j and d/dtheta of it, j < n, with z = sin 2k theta."""
    k, a, b = float(params.k), float(params.alpha), float(params.beta)
    z = np.sin(2 * k * theta)
    cz = np.cos(2 * k * theta)
    w = np.abs(z) ** (a / 2) * cz ** (b / 2) * np.sqrt(1 + z)
    # log-derivative of w
    dz = 2 * k * cz
    g = (a / 2) * dz / z + (b / 2) * (-2 * k * z) / cz + 0.5 * dz / (1 + z)
    B = np.empty((len(theta), n))
    dB = np.empty((len(theta), n))
    for j in range(n):
        zj = z ** j
        dzj = j * z ** (j - 1) * dz if j else np.zeros_like(z)
        B[:, j] = w * zj
        dB[:, j] = w * (g * zj + dzj)
    return B, dB


def pvz_angular_discretize(params, l_max, grid_size=None):
    """Eigenvalues of M_PVZ by collocation on theta in (-pi/4k, pi/4k).

    Points are placed symmetrically so that R is the index mirror.  Returns
    the l_max + 1 eigenvalues of smallest modulus, sorted by modulus, plus the
    drift between two grid sizes.
    """
    k, a, b = float(params.k), float(params.alpha), float(params.beta)
    grid_size = grid_size or max(8 * max(l_max, 1), 16)
    if grid_size < 8 * l_max:
        raise ValueError("grid_size must be at least 8 * l_max")

    def solve(npts, nb):
        half = (np.arange(1, npts // 2 + 1) - 0.5) / (npts // 2)
        t = (np.pi / (4 * k)) * 0.98 * np.sin(0.5 * np.pi * half)
        theta = np.concatenate([-t[::-1], t])
        mirror = theta.size - 1 - np.arange(theta.size)
        B, dB = _pvz_basis(params, theta, nb)
        z = np.sin(2 * k * theta)
        cz = np.cos(2 * k * theta)
        # (M f)(theta) = f'(-theta) * (-1) ... R then d: d/dtheta[f(-theta)] = -f'(-theta)
        MB = -dB[mirror] - (k * b / cz)[:, None] * B[mirror] - (k * a / z)[:, None] * B
        # least squares: find Mmat with B Mmat = MB
        Mmat, *_ = linalg.lstsq(B, MB)
        resid = np.max(np.abs(B @ Mmat - MB)) / max(np.max(np.abs(MB)), 1e-300)
        ev = linalg.eigvals(Mmat)
        ev = ev[np.argsort(np.abs(ev))]
        return ev, resid

    nb = 2 * l_max + 4
    ev1, r1 = solve(grid_size, nb)
    ev2, r2 = solve(2 * grid_size, nb)
    want = l_max + 1
    e1 = np.sort_complex(ev1[:want])
    e2 = np.sort_complex(ev2[:want])
    drift = float(np.max(np.abs(e1 - e2)))
    if drift > 1e-5:
        warnings.warn("eigenvalue drift %.2e between grid sizes" % drift, DiscretizationWarning)
    vals = sorted((float(v.real) for v in ev2[:want]), key=abs)
    return {"eigenvalues": vals, "drift": drift, "invariance_residual": max(r1, r2),
            "max_imag": float(np.max(np.abs(ev2[:want].imag)))}


def pvz_ground(theta, params):
    """Closed-form PVZ ground state and its theta-derivative (degree-0 polynomial)."""
    B, dB = _pvz_basis(params, np.array([theta]), 1)
    return float(B[0, 0]), float(dB[0, 0])


def check_pvz_ground(params, size=20):
    """|(M + k(alpha+beta+1)) Theta_0 / Theta_0| using the exact M coefficients."""
    from .operators import Sector
    M = Sector("pvz-ang", params).raw_M()
    k = float(params.k)
    lam = k * float(params.alpha + params.beta + 1)
    worst = 0.0
    for j in range(size):
        # symmetric points avoiding theta = 0 and the ends
        kt = (math.pi / 4) * (0.05 + 0.9 * (j + 0.5) / size) * (1 if j % 2 else -1)
        th = kt / k
        f, df = pvz_ground(th, params)
        fr, dfr = pvz_ground(-th, params)
        derivs = {(0, 0): f, (1, 0): df}
        # (R g)(theta) = g(-theta); d/dtheta (R g) = -g'(-theta)
        refl = {(0, 0): fr, (1, 0): -dfr}
        val = apply_raw(M, {"ang": angular_point(k, th)}, derivs, refl)
        worst = max(worst, abs(val + lam * f) / abs(f))
    return worst


def pvz_expected(params, l_max):
    """(-1)^(l+1) k (2l + alpha + beta + 1), l = 0..l_max."""
    k, a, b = float(params.k), float(params.alpha), float(params.beta)
    return [(-1) ** (l + 1) * k * (2 * l + a + b + 1) for l in range(l_max + 1)]


def oracle_report(params, m_max=2, l_max=2, grid_size=20, u_max=2):
    """Numerical checks for one parameter tuple, as a JSON-ready dict."""
    from .ladder import LadderFamily
    grid = default_grid(params, grid_size)
    eig = []
    for m in range(m_max + 1):
        for l in range(l_max + 1):
            r = check_eigen(params, m, l, grid)
            eig.append({"m": m, "l": l, "H_residual": r["H"], "M2_residual": r["M2"]})
    A = LadderFamily("ttw", params)
    R = LadderFamily("radial", params)
    lad = []
    for l in range(l_max + 1):
        for u in range(1, u_max + 1):
            r = check_angular_ladder(A, l, u, grid)
            lad.append({"op": "J", "l": l, "u": u, "consistency": r["consistency"],
                        "deviation": max(r.get("dev_up", 0.0), r.get("dev_down", 0.0))})
    for m in range(m_max + 1):
        for u in (1, -1):
            r = check_radial_ladder(R, m, 1, u, grid)
            if r["annihilated"]:
                lad.append({"op": "K", "m": m, "u": u, "annihilated": True,
                            "consistency": r["consistency"], "deviation": 0.0})
            else:
                lad.append({"op": "K", "m": m, "u": u, "consistency": r["consistency"],
                            "deviation": max(r["dev_up"], r["dev_down"])})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DiscretizationWarning)
        pvz = pvz_angular_discretize(params, l_max)
    want = sorted(pvz_expected(params, l_max), key=abs)
    pvz_err = max(abs(a - b) for a, b in zip(pvz["eigenvalues"], want))
    ground = check_pvz_ground(params)
    max_h = max(e["H_residual"] for e in eig)
    max_m = max(e["M2_residual"] for e in eig)
    max_l = max(max(x["consistency"], x["deviation"]) for x in lad)
    ok = max_h < 1e-8 and max_m < 1e-8 and max_l < 1e-6 and pvz_err < 1e-6 and ground < 1e-9 and not caught
    return {
        "eigen": eig,
        "ladder": lad,
        "pvz": {"computed": pvz["eigenvalues"], "expected": want, "max_error": pvz_err,
                "drift": pvz["drift"], "ground_residual": ground, "warnings": [str(w.message) for w in caught]},
        "max_H_residual": max_h,
        "max_M2_residual": max_m,
        "max_ladder_error": max_l,
        "pass": bool(ok),
    }
