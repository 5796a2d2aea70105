"""Independent first/second-order expansion coefficients by direct quadrature.

The kink fields and their derivatives come from sympy, and the integrals use
composite Simpson on a grid eight times finer than the recursion grid.
"""
import numpy as np
import sympy as sp
from scipy.integrate import cumulative_simpson

I2 = np.eye(2, dtype=complex)
S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)
REFINE = 8


def kink_fields(x0=2.0, v=0.5, sign=-1):
    """Callables (field, rate, field', rate', field'') for both half-lines of the exact kink."""
    x, t = sp.symbols("x t", real=True)
    gamma = 1 / sp.sqrt(1 - sp.Rational(v).limit_denominator() ** 2) if v else 1
    u = 4 * sp.atan(sp.exp(sign * gamma * (x - sp.nsimplify(v) * t - sp.nsimplify(x0))))
    ux, ut = sp.diff(u, x), sp.diff(u, t)
    x_side = [u.subs(t, 0), ut.subs(t, 0)]
    t_side = [u.subs(x, 0), ux.subs(x, 0)]
    out = {}
    for name, (f, r), var in (("x", x_side, x), ("t", t_side, t)):
        exprs = [f, r, sp.diff(f, var), sp.diff(r, var), sp.diff(f, var, 2)]
        out[name] = [sp.lambdify(var, e, "numpy") for e in exprs]
    return out


def _fine(grid):
    n = (len(grid) - 1) * REFINE + 1
    return np.linspace(grid[0], grid[-1], n)


def _cum(s, y, start):
    """Cumulative integral from ``start`` ('0' or 'inf', i.e. the grid end) on fine grid ``s``."""
    re = cumulative_simpson(np.real(y), x=s, initial=0.0)
    im = cumulative_simpson(np.imag(y), x=s, initial=0.0)
    c = re + 1j * im
    return c if start == "0" else c - c[-1]


def _bcast(v, s):
    return np.broadcast_to(np.asarray(v, dtype=float), s.shape)


def x_side_infinity(fields, grid):
    """X1, X2, Z1, Z2, W1, W2 of the x-side large-k expansion on ``grid``."""
    f, r, fx, rx, fxx = fields
    s = _fine(grid)
    F, R, FX, RX, FXX = (_bcast(g(s), s) for g in (f, r, fx, rx, fxx))
    q = FX + R
    dens = -q ** 2 / 2 + np.cos(F) - 1
    out = {}
    for name, start in (("X", "inf"), ("Z", "0")):
        I1 = 0.25j * _cum(s, dens, start)
        M1 = (0.5j * q)[:, None, None] * S1 + I1[:, None, None] * S3
        m22 = M1[:, 1, 1]
        coef = 1j * (-FXX - RX + 0.5j * q * m22 + 0.5 * np.sin(F))
        scal = _cum(s, -0.25j * dens * m22 - 0.25 * q * (FXX + RX), start)
        if name == "Z":
            scal = scal - 0.25 * q[0] ** 2
        M2 = coef[:, None, None] * S2 + scal[:, None, None] * I2
        out[name + "1"], out[name + "2"] = M1, M2
    w12 = -0.5j * q[0]
    out["W1"] = np.broadcast_to(w12 * S1, (len(s), 2, 2))
    inner = _cum(s, 0.25 * (q ** 2 / 2 - np.cos(F) + 1) * w12, "0")
    sc = inner - 1j * (-(FXX[0] + RX[0]) + 0.5 * np.sin(F[0]))
    out["W2"] = (0.5j * q * w12)[:, None, None] * I2 + sc[:, None, None] * S2
    return {k: v[::REFINE] for k, v in out.items()}


def x_side_zero(fields, grid):
    """Hatted X1, X2, Z1, W1 of the x-side small-k expansion."""
    f, r, fx, rx, fxx = fields
    s = _fine(grid)
    F, R, FX, RX, FXX = (_bcast(g(s), s) for g in (f, r, fx, rx, fxx))
    q = FX - R
    dens = q ** 2 / 2 + 1 - np.cos(F)
    out = {}
    for name, start in (("X", "inf"), ("Z", "0")):
        I1 = 0.25j * _cum(s, dens, start)
        M1 = (0.5j * q)[:, None, None] * S1 + I1[:, None, None] * S3
        m22 = M1[:, 1, 1]
        coef = 1j * (FXX - RX + 0.5j * q * m22 - 0.5 * np.sin(F))
        scal = _cum(s, 0.125j * (2 * np.cos(F) - 2 - q ** 2) * m22 + 0.25 * q * (RX - FXX), start)
        if name == "Z":
            scal = scal - 0.25 * q[0] ** 2
        out[name + "1"] = M1
        out[name + "2"] = coef[:, None, None] * S2 + scal[:, None, None] * I2
    out["W1"] = np.broadcast_to(-0.5j * q[0] * S1, (len(s), 2, 2))
    return {k: v[::REFINE] for k, v in out.items()}


def t_side(fields, grid, hatted):
    """T1, T2, Z1, Z2, W1 (hatted variants when ``hatted``) of the t-side expansions."""
    f, r, ft, rt, ftt = fields
    s = _fine(grid)
    G, H, GT, HT, GTT = (_bcast(g(s), s) for g in (f, r, ft, rt, ftt))
    sgn = -1.0 if hatted else 1.0
    q = H + sgn * GT
    dens = q ** 2 / 2 + np.cos(G) - 1
    out = {}
    for name, start in (("T", "inf"), ("Z", "0")):
        # the same sign of the sigma_3 term on both normalizations
        I1 = -0.25j * _cum(s, dens, start)
        M1 = (0.5j * q)[:, None, None] * S1 + I1[:, None, None] * S3
        m22 = M1[:, 1, 1]
        if hatted:
            coef = 1j * (GTT - HT + 0.5j * q * m22 + 0.5 * np.sin(G))
            scal = _cum(s, 0.25j * dens * m22 - 0.25 * q * (HT - GTT), start)
        else:
            coef = 1j * (-GTT - HT + 0.5j * q * m22 - 0.5 * np.sin(G))
            scal = _cum(s, 0.25j * dens * m22 - 0.25 * q * (HT + GTT), start)
        if name == "Z":
            scal = scal - 0.25 * q[0] ** 2
        out[name + "1"] = M1
        out[name + "2"] = coef[:, None, None] * S2 + scal[:, None, None] * I2
    w12 = -0.5j * q[0]
    out["W1"] = np.broadcast_to(w12 * S1, (len(s), 2, 2))
    if not hatted:
        inner = _cum(s, 0.25 * dens * w12, "0")
        sc = inner + 1j * (GTT[0] + HT[0] + 0.5 * np.sin(G[0]))
        out["W2"] = (0.5j * q * w12)[:, None, None] * I2 + sc[:, None, None] * S2
    return {k: v[::REFINE] for k, v in out.items()}
