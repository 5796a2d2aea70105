"""Problem data, Pauli algebra, phases, potentials and gauges.

Matrices are plain ``numpy`` complex arrays of shape ``(..., 2, 2)``.  The
x-side potential is ``U(x, k) = U0(x) + U1(x)/k`` built from the initial data
``(u0, u1)``; the t-side potential ``V(t, k)`` comes from the boundary values
``(g0, g1)``.  Their gauge-transformed ("hatted") versions ``P0 + k P1`` are
regular at ``k = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import jets
from .errors import CapabilityError, ConfigError, DomainError, RegionError, SingularityError

I2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

REGIONS = ("D1", "D2", "D3", "D4", "RealAxis", "UnitCircle")
BOUNDARY_TOL = 1e-12


# --------------------------------------------------------------------------
# 2x2 helpers

def pauli(c0, c1, c2, c3):
    """Assemble ``c0 I + c1 s1 + c2 s2 + c3 s3`` (broadcast over leading axes)."""
    c0, c1, c2, c3 = np.broadcast_arrays(*(np.asarray(c, dtype=complex) for c in (c0, c1, c2, c3)))
    out = np.empty(c0.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c0 + c3
    out[..., 0, 1] = c1 - 1j * c2
    out[..., 1, 0] = c1 + 1j * c2
    out[..., 1, 1] = c0 - c3
    return out


def det2(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m):
    m = np.asarray(m)
    d = det2(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / d[..., None, None]


def sigma2_conjugate(m):
    """``sigma2 m sigma2``."""
    return SIGMA2 @ np.asarray(m) @ SIGMA2


def diagonal_part(m):
    out = np.zeros_like(m)
    out[..., 0, 0] = m[..., 0, 0]
    out[..., 1, 1] = m[..., 1, 1]
    return out


def offdiagonal_part(m):
    return m - diagonal_part(m)


# --------------------------------------------------------------------------
# spectral parameter

def _check_k(k):
    k = complex(k)
    if k == 0:
        raise SingularityError("spectral parameter k = 0 excluded")
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise DomainError(f"spectral parameter must be finite, got {k}")
    return k


def theta(k):
    """Phases ``theta1 = (k - 1/k)/4`` and ``theta2 = (k + 1/k)/4``."""
    k = _check_k(k)
    return (k - 1 / k) / 4, (k + 1 / k) / 4


def classify_region(k, tol=BOUNDARY_TOL):
    k = _check_k(k)
    r = abs(k)
    if abs(k.imag) <= tol * max(1.0, r):
        return "RealAxis"
    if abs(r - 1.0) <= tol:
        return "UnitCircle"
    if k.imag > 0:
        return "D1" if r > 1 else "D2"
    return "D4" if r > 1 else "D3"


def in_closure(k, domain, tol=BOUNDARY_TOL):
    """Membership of ``k`` in a closed domain.

    ``domain`` is one of ``C+``, ``C-``, ``D+`` (= D1 u D3), ``D-`` (= D2 u D4),
    ``D1``, ``D2``, ``D3``, ``D4``, ``C`` (punctured plane).
    """
    k = complex(k)
    im, r = k.imag, abs(k)
    scale = tol * max(1.0, r)
    upper = im >= -scale
    lower = im <= scale
    outside = r >= 1.0 - tol
    inside = r <= 1.0 + tol
    table = {
        "C": True,
        "C+": upper,
        "C-": lower,
        "D1": upper and outside,
        "D2": upper and inside,
        "D3": lower and inside,
        "D4": lower and outside,
    }
    if domain in table:
        return table[domain]
    if domain == "D+":
        return table["D1"] or table["D3"]
    if domain == "D-":
        return table["D2"] or table["D4"]
    raise ValueError(f"unknown domain {domain!r}")


@dataclass(frozen=True)
class SpectralPoint:
    k: complex
    region: str | None = None

    def __post_init__(self):
        k = _check_k(self.k)
        object.__setattr__(self, "k", k)
        actual = classify_region(k)
        if self.region is None:
            object.__setattr__(self, "region", actual)
        elif self.region not in REGIONS:
            raise RegionError(f"unknown region tag {self.region!r}")
        elif self.region != actual:
            # boundary points may carry either neighbouring tag
            if not in_closure(k, self.region if self.region.startswith("D") else "C"):
                raise RegionError(f"region tag {self.region} inconsistent with k = {k}")
            if self.region == "RealAxis" or self.region == "UnitCircle":
                raise RegionError(f"region tag {self.region} inconsistent with k = {k}")


def as_point(k):
    return k if isinstance(k, SpectralPoint) else SpectralPoint(complex(k))


# --------------------------------------------------------------------------
# profiles

class HalfLineProfile:
    """Real function on [0, inf) given by a jet-aware callable.

    ``func`` maps a :class:`~sgnft.jets.Jet` in ``s`` to a jet of the profile,
    so any derivative order is available.  ``winding`` is the integer ``N``
    with ``f(s) -> 2 pi N``; ``decay_rate`` and ``offset`` bound the tail
    ``|f - 2 pi N| <~ exp(-decay_rate (s - offset))``.
    """

    provenance = "analytic"
    max_derivative_order = 48

    def __init__(self, func: Callable, winding: int = 0, decay_rate: float = 1.0,
                 offset: float = 0.0, name: str = ""):
        if decay_rate <= 0:
            raise ConfigError("decay_rate must be positive")
        self.func = func
        self.winding = int(winding)
        self.decay_rate = float(decay_rate)
        self.offset = float(offset)
        self.name = name

    def __repr__(self):
        return f"{type(self).__name__}({self.name or 'anonymous'}, N={self.winding})"

    def _check(self, s, order):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise DomainError("profile coordinate must be finite and >= 0")
        if order < 0 or order > self.max_derivative_order:
            raise CapabilityError(
                f"{self.provenance} profile supports derivatives up to order "
                f"{self.max_derivative_order}, requested {order}")
        return s

    def derivatives(self, s, order):
        """Stack ``[f, f', ..., f^(order)]`` evaluated at ``s``."""
        s = self._check(s, order)
        jet = self.func(jets.Jet.variable(s, order))
        out = jet.derivatives()
        return np.broadcast_to(out, (order + 1,) + s.shape).astype(float)

    def eval(self, s, derivative_order=0):
        out = self.derivatives(s, derivative_order)[derivative_order]
        return float(out) if np.ndim(out) == 0 else out

    @property
    def limit(self):
        return 2 * np.pi * self.winding

    def tail_length(self, tol=1e-12, margin=5.0):
        return self.offset + (math.log(1.0 / tol) + margin) / self.decay_rate


def constant_profile(value, winding=0, name=""):
    return HalfLineProfile(lambda z: 0.0 * z + value, winding=winding, decay_rate=1.0,
                           name=name or f"const({value:g})")


class SampledProfile(HalfLineProfile):
    """Cubic-spline profile through samples, reliable up to second derivatives.

    At ``s = 0`` the derivatives come from one-sided finite differences of
    the samples; elsewhere from the spline.  Beyond the last sample the
    profile is held at the last value.
    """

    provenance = "sampled"
    max_derivative_order = 2

    def __init__(self, s, values, winding=0, decay_rate=1.0, offset=0.0, name=""):
        s = np.asarray(s, dtype=float)
        values = np.asarray(values, dtype=float)
        super().__init__(None, winding=winding, decay_rate=decay_rate, offset=offset, name=name)
        self.samples = (s, values)
        self.spline = CubicSpline(s, values)
        self.s_max = float(s[-1])
        self._origin = _one_sided_derivatives(s, values)

    def derivatives(self, s, order):
        s = self._check(s, order)
        out = np.empty((order + 1,) + s.shape)
        inside = s <= self.s_max
        for p in range(order + 1):
            vals = self.spline(np.minimum(s, self.s_max), p)
            tail = self.samples[1][-1] if p == 0 else 0.0
            vals = np.where(inside, vals, tail)
            out[p] = np.where(s == 0.0, self._origin[p], vals)
        return out


def _one_sided_derivatives(s, v):
    # second-order-accurate forward differences on the first samples (uniform or not)
    from scipy.interpolate import BarycentricInterpolator

    n = min(6, len(s))
    poly = BarycentricInterpolator(s[:n], v[:n])
    return [float(v[0]), float(poly.derivative(0.0, 1)), float(poly.derivative(0.0, 2))]


# --------------------------------------------------------------------------
# initial / boundary data

DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class _HalfLineData:
    truncation_L: float | None
    cache: dict = field(default_factory=dict, repr=False, compare=False)
    # exact solution u(x, t) the data were restricted from, when known
    source: object = field(default=None, repr=False, compare=False)

    side = "?"

    # subclasses expose (field, rate, winding)
    def _finish(self):
        if self.field_profile.winding != self.winding:
            raise ConfigError(
                f"{self.field_name} winding target {self.field_profile.winding} "
                f"differs from N = {self.winding}")
        if self.rate_profile.winding != 0:
            raise ConfigError(f"{self.rate_name} must decay to 0")
        if self.m < 0:
            raise ConfigError("expansion order m must be >= 0")
        if self.truncation_L is None:
            L = max(self.field_profile.tail_length(DEFAULT_TAIL_TOL),
                    self.rate_profile.tail_length(DEFAULT_TAIL_TOL))
            object.__setattr__(self, "truncation_L", float(L))
        elif not self.truncation_L > 0:
            raise ConfigError("truncation_L must be positive")

    @property
    def L(self):
        return self.truncation_L


@dataclass(frozen=True, eq=False)
class InitialData(_HalfLineData):
    """Initial data ``u0 = u(x, 0)``, ``u1 = u_t(x, 0)`` with ``u0 -> 2 pi N_x``."""

    u0: HalfLineProfile = None
    u1: HalfLineProfile = None
    N_x: int = 0
    m: int = 2

    side = "x"
    field_name, rate_name = "u0", "u1"

    def __init__(self, u0, u1, N_x=0, m=2, truncation_L=None, source=None):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "N_x", int(N_x))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "truncation_L", truncation_L)
        object.__setattr__(self, "cache", {})
        self._finish()

    field_profile = property(lambda self: self.u0)
    rate_profile = property(lambda self: self.u1)
    winding = property(lambda self: self.N_x)


@dataclass(frozen=True, eq=False)
class BoundaryData(_HalfLineData):
    """Boundary values ``g0 = u(0, t)``, ``g1 = u_x(0, t)`` with ``g0 -> 2 pi N_t``."""

    g0: HalfLineProfile = None
    g1: HalfLineProfile = None
    N_t: int = 0
    m: int = 2

    side = "t"
    field_name, rate_name = "g0", "g1"

    def __init__(self, g0, g1, N_t=0, m=2, truncation_L=None, source=None):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "g0", g0)
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "N_t", int(N_t))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "truncation_L", truncation_L)
        object.__setattr__(self, "cache", {})
        self._finish()

    field_profile = property(lambda self: self.g0)
    rate_profile = property(lambda self: self.g1)
    winding = property(lambda self: self.N_t)


def zero_initial_data(m=2, truncation_L=20.0):
    return InitialData(constant_profile(0.0), constant_profile(0.0), 0, m, truncation_L)


def zero_boundary_data(m=2, truncation_L=20.0):
    return BoundaryData(constant_profile(0.0), constant_profile(0.0), 0, m, truncation_L)


# --------------------------------------------------------------------------
# potentials

def _coords(data, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError(f"{data.side}-coordinate must be >= 0")
    return s


def potential_terms(data, s, hatted=False):
    """Pauli coefficients of the potential at ``s``.

    Returns ``(p2, a1, a3)`` with ``P0 = p2 sigma2`` and ``P1 = a1 sigma1 + a3 sigma3``;
    the full potential is ``P0 + P1/k`` (plain) or ``P0 + k P1`` (hatted).
    """
    s = _coords(data, s)
    f = data.field_profile.derivatives(s, 1)
    r = data.rate_profile.eval(s, 0)
    sin_f, cosm1 = np.sin(f[0]), np.cos(f[0]) - 1.0
    return _terms_from_values(data.side, hatted, f[1], r, sin_f, cosm1)


def _terms_from_values(side, hatted, fprime, rate, sin_f, cosm1):
    if hatted:
        # x and t sides share the hatted form in terms of (field', rate)
        return 0.25j * (fprime - rate), 0.25j * sin_f, -0.25j * cosm1
    sgn = 1.0 if side == "x" else -1.0
    return -0.25j * (fprime + rate), sgn * 0.25j * sin_f, sgn * 0.25j * cosm1


def potential_matrix(data, s, k, hatted=False):
    s_arr = _coords(data, s)
    k = complex(k)
    if not hatted:
        k = _check_k(k)
    p2, a1, a3 = potential_terms(data, s_arr, hatted)
    scale = k if hatted else 1.0 / k
    return pauli(0.0, scale * a1, p2, scale * a3)


def x_potential(data: InitialData, x, k):
    """``U(x, k) = U0(x) + U1(x)/k``."""
    return potential_matrix(data, x, k)


def t_potential(data: BoundaryData, t, k):
    """``V(t, k) = V0(t) + V1(t)/k``."""
    return potential_matrix(data, t, k)


def hat_potentials(data, coord, k):
    """Gauge-transformed potential ``P0_hat + k P1_hat`` (regular at k = 0)."""
    return potential_matrix(data, coord, k, hatted=True)


def gauge(data, coord):
    """``(-1)^N`` times rotation by half the field value (``G0`` or its t analogue)."""
    s = _coords(data, coord)
    half = 0.5 * data.field_profile.eval(s, 0)
    c, sn = np.cos(half), np.sin(half)
    sign = -1.0 if data.winding % 2 else 1.0
    out = np.empty(np.shape(half) + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -sn
    out[..., 1, 0] = sn
    out[..., 1, 1] = c
    return sign * out


def gauge_derivative(data, coord):
    s = _coords(data, coord)
    f = data.field_profile.derivatives(s, 1)
    half = 0.5 * f[0]
    c, sn = np.cos(half), np.sin(half)
    sign = -1.0 if data.winding % 2 else 1.0
    out = np.empty(np.shape(half) + (2, 2), dtype=complex)
    out[..., 0, 0] = -sn
    out[..., 0, 1] = -c
    out[..., 1, 0] = c
    out[..., 1, 1] = -sn
    return sign * 0.5 * f[1][..., None, None] * out


def phase(data, k):
    """The phase function relevant to the data's side (theta1 for x, theta2 for t)."""
    t1, t2 = theta(k)
    return t1 if data.side == "x" else t2


def potential_jets(data, s, order, hatted=False):
    """Normalized Taylor coefficients (in the coordinate) of ``p2, a1, a3``.

    Arrays have shape ``(order + 1, len(s))``; needed by the expansion
    recursions, which differentiate the potential repeatedly.
    """
    s = _coords(data, s)
    need_f, need_r = order + 1, order
    for prof, need in ((data.field_profile, need_f), (data.rate_profile, need_r)):
        if need > prof.max_derivative_order:
            raise CapabilityError(
                f"{prof.provenance} profile {prof!r} provides {prof.max_derivative_order} "
                f"derivatives, expansion needs {need}")
    fact = np.array([math.factorial(p) for p in range(need_f + 1)], dtype=float)[:, None]
    fj = jets.Jet(data.field_profile.derivatives(s, need_f) / fact)
    rj = jets.Jet(data.rate_profile.derivatives(s, need_r) / fact[: need_r + 1])
    fprime = fj.derivative().c[: order + 1]
    f_trunc = jets.Jet(fj.c[: order + 1])
    sin_f, cos_f = jets.sincos(f_trunc)
    cosm1 = cos_f.c.copy()
    cosm1[0] -= 1.0
    return _terms_from_values(data.side, hatted, fprime, rj.c, sin_f.c, cosm1)
