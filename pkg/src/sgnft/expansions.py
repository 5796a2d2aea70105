"""Formal series of the eigenfunctions at k = infinity and k = 0.

Writing ``lambda = 1/k`` (at infinity) or ``lambda = k`` (at zero, hatted
systems), every case has the form

    F' + i theta [sigma3, F] = (P0 + lambda P1) F,   i theta = (i/4)(p/lambda + q lambda),

with ``(p, q) = (1, -1)`` for the x-side at infinity, ``(-1, 1)`` for the
x-side at zero and ``(1, 1)`` for the t-side at either end.  Matching powers
of ``lambda`` gives, with ``s = sigma3`` and ``o``/``d`` the off-diagonal and
diagonal parts,

    F^o_{j+1} = -2ip s (-F^o_j' - (iq/2) s F^o_{j-1} + P0 F^d_j + P1^o F^d_{j-1} + P1^d F^o_{j-1})
    F^d_{j+1}' = P0 F^o_{j+1} + P1^o F^o_j + P1^d F^d_j

for the series normalized at infinity (``X_j``/``T_j``) and the non-oscillating
part ``Z_j`` of the series normalized at the origin; the oscillating part
``W_j`` (multiplied by ``exp(2i theta s coord)``) satisfies the same relations
with diagonal and off-diagonal roles exchanged.

The algebraic steps differentiate earlier coefficients, so each coefficient is
carried as a stack of normalized Taylor coefficients in the coordinate at
every grid point; only the value of each integrated part needs quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from . import core, eigenfunctions
from .core import SIGMA1, SIGMA2, SIGMA3
from .errors import CapabilityError, ConfigError, DomainError

DEFAULT_GRID_POINTS = 2001
SATURATION_FLOOR = 1e-13

_PQ = {("x", "infinity"): (1.0, -1.0), ("x", "zero"): (-1.0, 1.0),
       ("t", "infinity"): (1.0, 1.0), ("t", "zero"): (1.0, 1.0)}


@dataclass(frozen=True, eq=False)
class ExpansionTable:
    """Coefficients ``F_j, Z_j, W_j`` (j = 0..m+1) on ``grid``; arrays of shape (m+2, n, 2, 2).

    ``F`` is ``X_j`` (x-side) or ``T_j`` (t-side), hatted when ``limit == "zero"``.
    """

    side: str
    limit: str
    m: int
    grid: np.ndarray
    F: np.ndarray
    Z: np.ndarray
    W: np.ndarray

    @property
    def hatted(self):
        return self.limit == "zero"

    def coefficient(self, name, j):
        return {"F": self.F, "X": self.F, "T": self.F, "Z": self.Z, "W": self.W}[name][j]


# --------------------------------------------------------------------------
# Taylor stacks: arrays (r+1, n, 2, 2) of normalized derivative coefficients

def _mul(a, b, r):
    out = np.zeros((r + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=complex)
    for p in range(r + 1):
        for q in range(max(0, p - b.shape[0] + 1), min(p, a.shape[0] - 1) + 1):
            out[p] += a[q] @ b[p - q]
    return out


def _deriv(a):
    p = np.arange(1, a.shape[0]).reshape((-1,) + (1,) * (a.ndim - 1))
    return a[1:] * p


def _trunc(a, r):
    if a.shape[0] >= r + 1:
        return a[: r + 1]
    pad = np.zeros((r + 1 - a.shape[0],) + a.shape[1:], dtype=a.dtype)
    return np.concatenate([a, pad])


def _diag(a):
    return core.diagonal_part(a)


def _off(a):
    return core.offdiagonal_part(a)


def _integrated(rhs, values, r):
    """Stack of order ``r`` whose value is ``values`` and derivative stack is ``rhs``."""
    out = np.zeros((r + 1,) + values.shape, dtype=complex)
    out[0] = values
    for p in range(1, r + 1):
        out[p] = rhs[p - 1] / p
    return out


def _cumulative(grid, y):
    """Cumulative integral from grid[0] (Simpson; trapezoid for very short grids)."""
    if len(grid) < 3:
        integrate = lambda v: cumulative_trapezoid(v, grid, axis=0, initial=0)
    else:
        integrate = lambda v: cumulative_simpson(v, x=grid, axis=0, initial=0)
    return integrate(y.real) + 1j * integrate(y.imag)


# --------------------------------------------------------------------------

def default_grid(data, points=DEFAULT_GRID_POINTS):
    return np.linspace(0.0, data.L, points)


def _potential_stacks(data, grid, r, hatted):
    p2, a1, a3 = core.potential_jets(data, grid, r, hatted)
    P0 = p2[..., None, None] * SIGMA2
    P1o = a1[..., None, None] * SIGMA1
    P1d = a3[..., None, None] * SIGMA3
    return P0, P1o, P1d


def build_expansion(side, limit, data, m=None, grid=None):
    """Coefficient table for the expansions at ``limit`` in {"infinity", "zero"}."""
    if side != data.side:
        raise ConfigError(f"{side}-side expansion requested for {data.side}-side data")
    if (side, limit) not in _PQ:
        raise ConfigError(f"unknown expansion limit {limit!r}")
    m = data.m if m is None else int(m)
    if m < 0:
        raise ConfigError("m must be >= 0")
    grid = default_grid(data) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ConfigError("expansion grid must be increasing and start at 0")
    p, q = _PQ[(side, limit)]
    hatted = limit == "zero"
    J = m + 1                       # highest coefficient index
    R0 = J                          # derivative order needed for the j = 0 level
    P0, P1o, P1d = _potential_stacks(data, grid, R0, hatted)
    n = len(grid)
    s3 = SIGMA3
    ident = np.zeros((R0 + 1, n, 2, 2), dtype=complex)
    ident[0] = core.I2
    zero = np.zeros_like(ident)

    def order(j):
        return J - j

    def offdiag_step(Fj, Fjm1, r, swap=False):
        # algebraic step; swap=True exchanges the roles of the diagonal and off-diagonal parts
        part, other = (_diag, _off) if swap else (_off, _diag)
        inner = (-_trunc(_deriv(part(Fj)), r)
                 - (1j * q / 2) * (s3 @ _trunc(part(Fjm1), r))
                 + _mul(P0, other(Fj), r)
                 + _mul(P1o, other(Fjm1), r)
                 + _mul(P1d, part(Fjm1), r))
        return part(-2j * p * (s3 @ inner))

    def integrand(new_part, Fj, r, swap=False):
        part, other = (_diag, _off) if swap else (_off, _diag)
        return other(_mul(P0, new_part, r) + _mul(P1o, part(Fj), r) + _mul(P1d, other(Fj), r))

    F = [zero, ident]               # F_{-1}, F_0
    Z = [zero, ident]
    W = [zero, zero]
    for j in range(0, J):
        r = order(j + 1)
        rr = max(r - 1, 0)
        # series normalized at infinity: diagonal part vanishes at the end of the grid
        Fo = offdiag_step(F[-1], F[-2], r)
        rhs = integrand(Fo, F[-1], rr)
        C = _cumulative(grid, rhs[0])
        Fd = _integrated(rhs, C - C[-1], r)
        # series normalized at the origin: Z^d(0) = -W^d(0), W^o(0) = -Z^o(0)
        Zo = offdiag_step(Z[-1], Z[-2], r)
        Wd = offdiag_step(W[-1], W[-2], r, swap=True)
        rhs_z = integrand(Zo, Z[-1], rr)
        Zd = _integrated(rhs_z, _cumulative(grid, rhs_z[0]) - Wd[0][0], r)
        rhs_w = integrand(Wd, W[-1], rr, swap=True)
        Wo = _integrated(rhs_w, _cumulative(grid, rhs_w[0]) - Zo[0][0], r)
        F.append(Fo + Fd)
        Z.append(Zo + Zd)
        W.append(Wd + Wo)
    take = lambda seq: np.stack([c[0] for c in seq[1:]])
    return ExpansionTable(side, limit, m, grid, take(F), take(Z), take(W))


def _interp(grid, values, coord):
    """Entrywise linear interpolation of (n, 2, 2) values at a scalar coordinate."""
    if coord < 0:
        raise DomainError("coordinate must be >= 0")
    if coord > grid[-1]:
        coord = grid[-1]
    i = int(np.clip(np.searchsorted(grid, coord) - 1, 0, len(grid) - 2))
    w = (coord - grid[i]) / (grid[i + 1] - grid[i])
    return values[..., i, :, :] * (1 - w) + values[..., i + 1, :, :] * w


def evaluate_series(table: ExpansionTable, coord, k, family="X", terms=None):
    """Truncated series at ``(coord, k)``.

    ``family`` selects the series normalized at infinity (``"X"``, also
    accepted as ``"T"``) or at the origin (``"Y"``/``"U"``).  ``terms`` is the
    number of coefficients kept; the default ``m + 1`` is the full truncation.
    """
    k = complex(k)
    if table.limit == "infinity" and k == 0:
        raise DomainError("spectral parameter k = 0 excluded")
    terms = table.m + 1 if terms is None else int(terms)
    if not 0 <= terms <= table.m + 1:
        raise ConfigError(f"terms must lie in 0..{table.m + 1}")
    lam = 1.0 / k if table.limit == "infinity" else k
    powers = lam ** np.arange(1, terms + 1)
    coord = float(coord)
    out = core.I2.copy()
    if family in ("X", "T"):
        if terms:
            out = out + np.einsum("j,jab->ab", powers, _interp(table.grid, table.F[1: terms + 1], coord))
        return out
    if family not in ("Y", "U"):
        raise ConfigError(f"unknown series family {family!r}")
    if terms:
        Zs = np.einsum("j,jab->ab", powers, _interp(table.grid, table.Z[1: terms + 1], coord))
        Ws = np.einsum("j,jab->ab", powers, _interp(table.grid, table.W[1: terms + 1], coord))
        th = core.theta(k)[0 if table.side == "x" else 1] if k != 0 else None
        if th is None:
            raise DomainError("oscillating factor undefined at k = 0")
        phase = np.diag([np.exp(2j * th * coord), np.exp(-2j * th * coord)])
        out = out + Zs + Ws @ phase
    return out


# --------------------------------------------------------------------------
# remainder decay

@dataclass(frozen=True)
class SlopeResult:
    slope: float
    points: list            # [(|k|, |remainder|), ...]
    saturated: bool = False

    def as_dict(self):
        return {"slope": self.slope, "points": [[float(a), float(b)] for a, b in self.points],
                "saturated": self.saturated}


def fit_slope(ks, values, floor=SATURATION_FLOOR):
    """Least-squares slope of log|values| against log|ks|."""
    ks = np.abs(np.asarray(ks, dtype=complex))
    vals = np.abs(np.asarray(values))
    pts = list(zip(ks.tolist(), vals.tolist()))
    if np.all(vals < floor):
        return SlopeResult(float("nan"), pts, True)
    if np.any(vals == 0):
        raise CapabilityError("remainder vanishes at some sample; slope undefined")
    slope = np.polyfit(np.log(ks), np.log(vals), 1)[0]
    return SlopeResult(float(slope), pts, False)


def remainder_order(side, limit, data, m, k_samples, coord=0.0, terms=None, tol=1e-11, table=None):
    """Measured decay order of ``|F(coord, k) - F_p(coord, k)|`` over ``k_samples``.

    ``F`` is the eigenfunction normalized at infinity (X, T, or hatted X, T
    at zero).  By default the series keeps ``m`` coefficients, whose remainder
    is of exact order ``m + 1`` for generic data; pass ``terms = m + 1`` for
    the full truncation.  Only columns bounded at each sample are compared.
    """
    table = build_expansion(side, limit, data, m) if table is None else table
    terms = m if terms is None else terms
    family = ("X" if side == "x" else "T") + ("hat" if limit == "zero" else "")
    rems = []
    for k in k_samples:
        series = evaluate_series(table, coord, k, terms=terms)
        worst = 0.0
        for col in (1, 2):
            kind = eigenfunctions.EigenfunctionKind(family, col)
            if not kind.is_valid(k):
                continue
            val = eigenfunctions.solve_eigenfunction(kind, data, k, [coord], tol)[0].column
            worst = max(worst, float(np.abs(val - series[:, col - 1]).max()))
        rems.append(worst)
    return fit_slope(k_samples, rems)
