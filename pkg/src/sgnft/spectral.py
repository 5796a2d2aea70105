"""Spectral functions a, b, A, B, c, d and their invariants.

``a, b`` are the second column of ``X(0, k)``; ``A, B`` the second column of
``T(0, k)``.  For ``|k| < switch_radius`` both come from the gauge-transformed
(hatted) solves, which stay regular as ``k -> 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import core
from .core import SpectralPoint, as_point, in_closure
from .eigenfunctions import DEFAULT_TOL, GAUGE_SWITCH_RADIUS, column_at, eigenfunction_matrix
from .errors import CapabilityError, RegionError

K_MIN = 0.05
K_MAX = 100.0
D_ZERO_K = 1e-3


def default_k_grid(count=200, hatted_count=40):
    """Real grid: ``count`` log-spaced points in +-[0.05, 100] followed by
    ``hatted_count`` log-spaced points in +-[1e-3, 1) for the gauge route."""
    pos = np.geomspace(K_MIN, K_MAX, count // 2)
    hat = np.geomspace(D_ZERO_K, 1.0, hatted_count // 2, endpoint=False)
    return [complex(v) for v in np.concatenate([pos, -pos, hat, -hat])]


@dataclass(frozen=True)
class SpectralSample:
    point: SpectralPoint
    payload: dict           # e.g. {"a": complex, "b": complex}; absent values are None
    route: str              # "direct" or "hatted"

    @property
    def k(self):
        return self.point.k

    def __getitem__(self, name):
        return self.payload[name]


def _route(k, switch_radius):
    return "hatted" if abs(k) < switch_radius else "direct"


def _second_column(family, data, k, tol, switch_radius):
    col = column_at(family, data, k, 0.0, column=2, tol=tol, switch_radius=switch_radius)
    return complex(col[1]), complex(col[0])


def spectral_ab(data, k, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS):
    """``(a, b) = (X(0,k)_22, X(0,k)_12)`` for Im k >= 0."""
    point = as_point(k)
    if not in_closure(point.k, "C+"):
        raise RegionError(f"a, b are defined for Im k >= 0; got k = {point.k}")
    a, b = _second_column("X", data, point.k, tol, switch_radius)
    return SpectralSample(point, {"a": a, "b": b}, _route(point.k, switch_radius))


def spectral_AB(data, k, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS):
    """``(A, B) = (T(0,k)_22, T(0,k)_12)`` for k in the closure of D1 u D3."""
    point = as_point(k)
    if not in_closure(point.k, "D+"):
        raise RegionError(f"A, B are defined on closure(D1 u D3); got k = {point.k}")
    A, B = _second_column("T", data, point.k, tol, switch_radius)
    return SpectralSample(point, {"A": A, "B": B}, _route(point.k, switch_radius))


def c_defined(k):
    return in_closure(k, "D1") or core.classify_region(k) == "RealAxis"


def d_defined(k):
    return in_closure(k, "D2") or core.classify_region(k) == "RealAxis"


def spectral_cd(init, bdry, k, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS):
    """``c = bA - aB`` (closure of D1 and the real line), ``d = a conj(A(conj k)) + b conj(B(conj k))``
    (closure of D2 and the real line).  An undefined member is returned as None."""
    point = as_point(k)
    k = point.k
    want_c, want_d = c_defined(k), d_defined(k)
    if not (want_c or want_d):
        raise RegionError(f"neither c nor d is defined at k = {k}")
    ab = spectral_ab(init, k, tol, switch_radius)
    a, b = ab["a"], ab["b"]
    c = d = None
    if want_c:
        AB = spectral_AB(bdry, k, tol, switch_radius)
        c = b * AB["A"] - a * AB["B"]
    if want_d:
        kc = k.conjugate()
        ABc = spectral_AB(bdry, kc, tol, switch_radius) if kc != k or not want_c else AB
        d = a * ABc["A"].conjugate() + b * ABc["B"].conjugate()
    return SpectralSample(point, {"c": c, "d": d}, ab.route)


# --------------------------------------------------------------------------
# explicit low-order coefficients

@dataclass(frozen=True)
class AsymptoticScalars:
    """Leading coefficients of a, b, A, B at infinity and (hatted) at zero."""

    a1: complex
    b1: complex
    b2: complex
    a1_hat: complex
    b1_hat: complex
    b2_hat: complex
    A1: complex
    B1: complex
    B2: complex
    A1_hat: complex
    B1_hat: complex
    B2_hat: complex
    d1: complex
    c: list = field(default_factory=list)     # c_1, ..., c_m

    def as_dict(self):
        out = {name: getattr(self, name) for name in
               ("a1", "b1", "b2", "a1_hat", "b1_hat", "b2_hat",
                "A1", "B1", "B2", "A1_hat", "B1_hat", "B2_hat", "d1")}
        for j, cj in enumerate(self.c, start=1):
            out[f"c{j}"] = cj
        return out


def _origin_and_integral(data, integrand, points):
    s = np.linspace(0.0, data.L, points)
    f = data.field_profile.derivatives(s, 1)
    r = data.rate_profile.derivatives(s, 0)[0]
    return simpson(integrand(f[1], r, f[0]), x=s)


def _origin_values(data):
    for prof, need in ((data.field_profile, 2), (data.rate_profile, 1)):
        if prof.max_derivative_order < need:
            raise CapabilityError(f"{prof!r} lacks the derivatives needed at the origin")
    f = data.field_profile.derivatives(np.array(0.0), 2)
    r = data.rate_profile.derivatives(np.array(0.0), 1)
    return f[0], f[1], f[2], r[0], r[1]


def x_scalars(init, points=4001):
    """(a1, b1, b2, a1_hat, b1_hat, b2_hat) from closed-form integrals of the initial data."""
    u, ux, uxx, v, vx = _origin_values(init)
    a1 = 0.25j * _origin_and_integral(
        init, lambda fx, r, f: -(fx + r) ** 2 / 2 + np.cos(f) - 1, points)
    b1 = 0.5j * (ux + v)
    b2 = -uxx - vx + 0.5j * (ux + v) * a1 + np.sin(u) / 2
    a1h = 0.25j * _origin_and_integral(
        init, lambda fx, r, f: (fx - r) ** 2 / 2 + 1 - np.cos(f), points)
    b1h = 0.5j * (ux - v)
    b2h = uxx - vx + 0.5j * (ux - v) * a1h - np.sin(u) / 2
    return complex(a1), complex(b1), complex(b2), complex(a1h), complex(b1h), complex(b2h)


def t_scalars(bdry, points=4001):
    """(A1, B1, B2, A1_hat, B1_hat, B2_hat) from closed-form integrals of the boundary data."""
    g, gt, gtt, h, ht = _origin_values(bdry)
    A1 = -0.25j * _origin_and_integral(
        bdry, lambda ft, r, f: (r + ft) ** 2 / 2 + np.cos(f) - 1, points)
    B1 = 0.5j * (h + gt)
    B2 = -gtt - ht + 0.5j * (h + gt) * A1 - np.sin(g) / 2
    A1h = -0.25j * _origin_and_integral(
        bdry, lambda ft, r, f: (r - ft) ** 2 / 2 + np.cos(f) - 1, points)
    B1h = 0.5j * (h - gt)
    B2h = gtt - ht + 0.5j * (h - gt) * A1h + np.sin(g) / 2
    return complex(A1), complex(B1), complex(B2), complex(A1h), complex(B1h), complex(B2h)


def c_coefficients(a, b, A, B):
    """``c_j = b_j - B_j + sum_{r<j} (b_{j-r} A_r - B_{j-r} a_r)`` from coefficient lists (index 0 = order 1)."""
    m = min(len(b), len(B))
    out = []
    for j in range(1, m + 1):
        cj = b[j - 1] - B[j - 1]
        for r in range(1, j):
            cj += b[j - r - 1] * A[r - 1] - B[j - r - 1] * a[r - 1]
        out.append(cj)
    return out


def asymptotic_scalars(init, bdry, m=2, points=4001):
    if not 1 <= m <= 2:
        raise CapabilityError("closed-form coefficients are available for m <= 2")
    a1, b1, b2, a1h, b1h, b2h = x_scalars(init, points)
    A1, B1, B2, A1h, B1h, B2h = t_scalars(bdry, points)
    c = c_coefficients([a1], [b1, b2][:m], [A1], [B1, B2][:m])
    return AsymptoticScalars(a1, b1, b2, a1h, b1h, b2h, A1, B1, B2, A1h, B1h, B2h,
                             a1 + A1.conjugate(), c)


# --------------------------------------------------------------------------
# invariants

def invariant_residuals(init, bdry, k_grid, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS,
                        d_zero_k=D_ZERO_K):
    """Max residuals of the structural identities over the real points of ``k_grid``.

    Residuals that no grid point can reach are reported as None.
    """
    res = {name: None for name in ("unitarity_ab", "unitarity_AB", "unitarity_cd", "det_X",
                                   "det_T", "symmetry_ab", "symmetry_AB", "d_zero_limit")}

    def bump(name, value):
        value = float(value)
        res[name] = value if res[name] is None else max(res[name], value)

    ab_cache, AB_cache = {}, {}

    def ab(k):
        if k not in ab_cache:
            s = spectral_ab(init, k, tol, switch_radius)
            ab_cache[k] = (s["a"], s["b"])
        return ab_cache[k]

    def AB(k):
        if k not in AB_cache:
            s = spectral_AB(bdry, k, tol, switch_radius)
            AB_cache[k] = (s["A"], s["B"])
        return AB_cache[k]

    for k in (complex(k) for k in k_grid):
        if core.classify_region(k) != "RealAxis":
            continue
        a, b = ab(k)
        A, B = AB(k)
        bump("unitarity_ab", abs(abs(a) ** 2 + abs(b) ** 2 - 1))
        bump("unitarity_AB", abs(A * np.conj(A) + B * np.conj(B) - 1))
        c, d = b * A - a * B, a * np.conj(A) + b * np.conj(B)
        bump("unitarity_cd", abs(abs(c) ** 2 + abs(d) ** 2 - 1))
        mirror = complex(-k.real, k.imag)
        am, bm = ab(mirror)
        Am, Bm = AB(mirror)
        bump("symmetry_ab", max(abs(a - np.conj(am)), abs(b - np.conj(bm))))
        bump("symmetry_AB", max(abs(A - np.conj(Am)), abs(B - np.conj(Bm))))
        # the gauge has unit determinant, so the hatted matrices carry the same determinant
        hat = "hat" if abs(k) < switch_radius else ""
        bump("det_X", abs(core.det2(eigenfunction_matrix("X" + hat, init, k, [0.0], tol)[0]) - 1))
        bump("det_T", abs(core.det2(eigenfunction_matrix("T" + hat, bdry, k, [0.0], tol)[0]) - 1))
    if d_zero_k:
        d = spectral_cd(init, bdry, d_zero_k, tol, switch_radius)["d"]
        target = (-1) ** (init.N_x - bdry.N_t)
        res["d_zero_limit"] = float(abs(d - target))
    return res


def unit_circle_residual(bdry, count=64, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS):
    """Max of ``|A(k) conj(A(conj k)) + B(k) conj(B(conj k)) - 1|`` on ``count`` points of |k| = 1."""
    worst = 0.0
    for j in range(count):
        k = complex(np.exp(2j * np.pi * (j + 0.5) / count))
        A, B = (lambda s: (s["A"], s["B"]))(spectral_AB(bdry, k, tol, switch_radius))
        Ac, Bc = (lambda s: (s["A"], s["B"]))(spectral_AB(bdry, k.conjugate(), tol, switch_radius))
        worst = max(worst, abs(A * np.conj(Ac) + B * np.conj(Bc) - 1))
    return worst
