"""Corner compatibility, topological charge, global relation and the first conserved one-form."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import spectral
from .core import as_point
from .eigenfunctions import DEFAULT_TOL
from .errors import CapabilityError, DecayError, RegionError, SgNftError
from .jets import BiJet

ANALYTIC_TOL = 1e-8
SAMPLED_TOL = 1e-4


@dataclass(frozen=True)
class OriginJet:
    """``J[j, i] = d^j/dt^j d^i/dx^i u(0, 0)`` for ``j + i <= degree``."""

    table: np.ndarray
    degree: int

    def __getitem__(self, ji):
        j, i = ji
        if j + i > self.degree:
            raise IndexError(f"J[{j}][{i}] lies beyond total degree {self.degree}")
        return self.table[j, i]


def _corner_jet(init, degree):
    """Normalized coefficients of u(x, t) at the corner, filled from the PDE u_tt = u_xx - sin u."""
    for prof, need in ((init.u0, degree), (init.u1, degree - 1)):
        if need > prof.max_derivative_order:
            raise CapabilityError(
                f"{prof.provenance} profile {prof!r} provides {prof.max_derivative_order} "
                f"derivatives, the corner jet needs {need}")
    fact = np.array([math.factorial(p) for p in range(degree + 1)], dtype=float)
    c = np.zeros((degree + 1, degree + 1))
    c[0, :] = init.u0.derivatives(np.array(0.0), degree) / fact
    if degree >= 1:
        c[1, :degree] = init.u1.derivatives(np.array(0.0), degree - 1) / fact[:degree]
    for j in range(degree - 1):
        # row j of sin u only involves rows <= j, which are final by now
        sin_u = BiJet(c, degree).sincos()[0].c
        for i in range(degree - j - 1):
            c[j + 2, i] = ((i + 2) * (i + 1) * c[j, i + 2] - sin_u[j, i]) / ((j + 2) * (j + 1))
    return c


def origin_jet(init, order):
    """Mixed derivatives of the solution at the corner up to total degree ``order + 2``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    degree = order + 2
    c = _corner_jet(init, degree)
    fact = np.array([math.factorial(p) for p in range(degree + 1)], dtype=float)
    table = c * fact[:, None] * fact[None, :]
    jj, ii = np.indices(table.shape)
    table[jj + ii > degree] = 0.0
    return OriginJet(table, degree)


@dataclass(frozen=True)
class CompatibilityReport:
    order: int
    residuals: list          # [(label, relation order, residual), ...]
    tolerance: float

    @property
    def passed(self):
        return all(abs(r) <= self.tolerance for _, _, r in self.residuals)

    @property
    def failures(self):
        return [(label, o, r) for label, o, r in self.residuals if abs(r) > self.tolerance]

    def as_dict(self):
        return {label: r for label, _, r in self.residuals}


def compatibility_residuals(init, bdry, order, tol=None):
    """Residuals of all corner relations involving derivatives of order <= ``order`` of u0, g0
    and <= ``order - 1`` of u1, g1.

    ``g0^(j)(0) - J[j][0]`` for j <= order and ``g1^(j)(0) - J[j][1]`` for j <= order - 1; the
    relation order is the highest data-derivative order involved (j, respectively j + 1).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    profiles = (init.u0, init.u1, bdry.g0, bdry.g1)
    if tol is None:
        sampled = any(p.provenance == "sampled" for p in profiles)
        tol = SAMPLED_TOL if sampled else ANALYTIC_TOL
    for prof, need in ((bdry.g0, order), (bdry.g1, order - 1)):
        if need > prof.max_derivative_order:
            raise CapabilityError(f"{prof!r} cannot supply derivative order {need}")
    degree = max(order, 1)
    c = _corner_jet(init, degree)
    fact = np.array([math.factorial(p) for p in range(degree + 1)], dtype=float)
    g0 = bdry.g0.derivatives(np.array(0.0), order)
    g1 = bdry.g1.derivatives(np.array(0.0), order - 1) if order >= 1 else []
    out = []
    for j in range(order + 1):
        out.append((f"g0^({j})(0)", j, float(g0[j] - c[j, 0] * fact[j])))
    for j in range(order):
        out.append((f"g1^({j})(0)", j + 1, float(g1[j] - c[j, 1] * fact[j])))
    out.sort(key=lambda item: item[1])
    return CompatibilityReport(order, out, tol)


def topological_charge(init, bdry, tol=1e-8):
    """``N_x - N_t`` after checking both fields sit at their limits at the truncation point."""
    for data in (init, bdry):
        prof = data.field_profile
        dev = abs(prof.eval(data.L) - prof.limit)
        if dev > tol:
            raise DecayError(
                f"{data.field_name}(L = {data.L:g}) is {dev:.3g} away from 2 pi N = {prof.limit:g}")
    return init.N_x - bdry.N_t


# --------------------------------------------------------------------------
# global relation

def default_d1_samples(radii=10, angles=5, r_min=1.0, r_max=20.0):
    """Log-radial by angular grid in the closure of D1."""
    out = []
    for r in np.geomspace(r_min, r_max, radii):
        for phi in np.linspace(0.0, np.pi, angles):
            k = r * np.exp(1j * phi)
            out.append(complex(k.real, max(k.imag, 0.0)))
    return out


@dataclass(frozen=True)
class GlobalRelationResult:
    sup_c: float
    samples: list            # [(SpectralPoint, |c| or None, error message or None), ...]


def global_relation_residual(init, bdry, samples=None, tol=DEFAULT_TOL, threads=1):
    """Supremum of |c(k)| over samples in the closure of D1 (real k allowed)."""
    samples = default_d1_samples() if samples is None else list(samples)

    def one(k):
        try:
            point = as_point(k)
            if not spectral.c_defined(point.k):
                raise RegionError(f"c is not defined at k = {point.k}")
            c = spectral.spectral_cd(init, bdry, point, tol)["c"]
            return point, abs(c), None
        except SgNftError as exc:
            return k, None, f"{exc.kind}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(one, samples))
    else:
        rows = [one(k) for k in samples]
    values = [v for _, v, _ in rows if v is not None]
    return GlobalRelationResult(max(values) if values else float("nan"), rows)


# --------------------------------------------------------------------------
# conserved one-form

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _one_form_integral(solution, vertices, panels=400):
    """``int omega1`` along the polyline through ``vertices``, where

    omega1 = -(i/4)(-(u_x+u_t)^2/2 + cos u - 1) dx + (i/4)((u_x+u_t)^2/2 + cos u - 1) dt.
    """
    total = 0.0
    for (xa, ta), (xb, tb) in zip(vertices[:-1], vertices[1:]):
        edges = np.linspace(0.0, 1.0, panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        s = (mids + half * _GL_X[None, :]).ravel()
        w = (half * _GL_W[None, :]).ravel()
        x, t = xa + s * (xb - xa), ta + s * (tb - ta)
        u, ux, ut = solution.u(x, t), solution.u_x(x, t), solution.u_t(x, t)
        q = (ux + ut) ** 2 / 2
        fx = -(-q + np.cos(u) - 1)
        ft = q + np.cos(u) - 1
        total += np.sum(w * (fx * (xb - xa) + ft * (tb - ta)))
    return 0.25j * total


@dataclass(frozen=True)
class ContourCheck:
    l_shape: complex
    alternate: complex
    residual: float
    L: float


def conservation_contour_check(init, bdry, alternate_contour=None, L=None):
    """Compare ``int omega1`` along (L,0)->(0,0)->(0,L) with an alternate polyline.

    The default alternate path is the straight segment (L,0)->(0,L).  Needs the
    exact solution the data came from (``data.source``).
    """
    sol = init.source
    if sol is None or bdry.source is not sol:
        raise CapabilityError("contour check needs data restricted from a known exact solution")
    L = max(init.L, bdry.L) if L is None else float(L)
    if alternate_contour is None:
        path = [(L, 0.0), (0.0, L)]
    else:
        path = [tuple(map(float, p)) for p in alternate_contour]
        if path[0] != (L, 0.0) or path[-1] != (0.0, L):
            raise ValueError("alternate contour must run from (L, 0) to (0, L)")
    l_val = _one_form_integral(sol, [(L, 0.0), (0.0, 0.0), (0.0, L)])
    alt = _one_form_integral(sol, path)
    return ContourCheck(complex(l_val), complex(alt), float(abs(l_val - alt)), L)
