"""Eigenfunctions of the x- and t-parts of the Lax pair.

Each matrix eigenfunction ``M`` solves ``M' + i theta [sigma3, M] = P M`` on a
half-line, normalized either at infinity (families X, T and hatted variants,
truncated at ``data.L``) or at the origin (Y, U and hatted variants).  A
column ``psi`` of ``M`` satisfies the linear system

    psi' = (i theta s_c I - i theta sigma3 + P) psi,   s_c = +1 (column 1), -1 (column 2),

which is integrated with a fourth-order Magnus method.  The 2x2 step
exponentials are evaluated in closed form, and whole runs of steps are
multiplied together by pairwise reduction so that a solve costs a handful of
vectorized ``numpy`` calls.  Step-doubling (Richardson) controls the error.

:func:`picard_oracle` solves the same problem independently by Neumann
iteration of the Volterra integral equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import core
from .core import SpectralPoint, as_point, in_closure
from .errors import ConvergenceError, DomainError, RegionError, SingularityError

FAMILIES = {
    # family: (side, normalized at, hatted)
    "X": ("x", "infinity", False),
    "Y": ("x", "origin", False),
    "T": ("t", "infinity", False),
    "U": ("t", "origin", False),
    "Xhat": ("x", "infinity", True),
    "Yhat": ("x", "origin", True),
    "That": ("t", "infinity", True),
    "Uhat": ("t", "origin", True),
}

DEFAULT_TOL = 1e-8
GAUGE_SWITCH_RADIUS = 1.0
STEP_FLOOR = 1e-9       # relative to L
MAX_STEP = 0.25
PHASE_STEP = 0.5        # step * |theta| at the first attempt
GROWTH_CAP = 1e3        # largest growth allowed inside one reduced chunk


@dataclass(frozen=True)
class EigenfunctionKind:
    family: str
    column: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown eigenfunction family {self.family!r}")
        if self.column not in (1, 2):
            raise ValueError("column must be 1 or 2")

    @property
    def side(self):
        return FAMILIES[self.family][0]

    @property
    def normalized_at(self):
        return FAMILIES[self.family][1]

    @property
    def hatted(self):
        return FAMILIES[self.family][2]

    @property
    def validity_domain(self):
        """Closed k-domain on which this column is bounded (``C`` = any k != 0)."""
        if self.normalized_at == "origin":
            return "C"
        if self.side == "x":
            return "C+" if self.column == 2 else "C-"
        return "D+" if self.column == 2 else "D-"

    def is_valid(self, k):
        k = complex(k)
        return k != 0 and in_closure(k, self.validity_domain)


@dataclass(frozen=True)
class EigenfunctionValue:
    kind: EigenfunctionKind
    k: SpectralPoint
    coord: float
    column: np.ndarray
    phase_factored: bool = True
    error_estimate: float = 0.0


def _check_data_side(kind, data):
    if data.side != kind.side:
        raise ValueError(f"family {kind.family} needs {kind.side}-side data, got {data.side}-side")


def _check_kind_point(kind, k):
    if k == 0:
        raise SingularityError("spectral parameter k = 0 excluded")
    if not kind.is_valid(k):
        raise RegionError(
            f"column {kind.column} of {kind.family} is not bounded at k = {k} "
            f"(valid on closure of {kind.validity_domain})")


# --------------------------------------------------------------------------
# Magnus integrator

_GAUSS = math.sqrt(3.0) / 6.0


def _pauli_coefficients(data, s, k, hatted, cache_key=None):
    """Pauli vector ``n`` of ``P - i theta sigma3`` at ``s`` (shape (len(s), 3))."""
    terms = None
    if cache_key is not None:
        terms = data.cache.get(cache_key)
    if terms is None:
        terms = core.potential_terms(data, s, hatted)
        if cache_key is not None:
            if len(data.cache) > 64:
                data.cache.clear()
            data.cache[cache_key] = terms
    p2, a1, a3 = terms
    scale = k if hatted else 1.0 / k
    th = core.phase(data, k)
    n = np.empty(np.shape(s) + (3,), dtype=complex)
    n[..., 0] = scale * a1
    n[..., 1] = p2
    n[..., 2] = scale * a3 - 1j * th
    return n


def _cross(a, b):
    return np.stack([
        a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
        a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
        a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
    ], axis=-1)


def _cosh_shc(z2):
    """``cosh(sqrt z2)`` and ``sinh(sqrt z2)/sqrt z2``, even in ``sqrt z2``."""
    small = np.abs(z2) < 1e-6
    root = np.sqrt(np.where(small, 1.0, z2))
    ch = np.where(small, 1 + z2 / 2 + z2 ** 2 / 24 + z2 ** 3 / 720, np.cosh(root))
    shc = np.where(small, 1 + z2 / 6 + z2 ** 2 / 120 + z2 ** 3 / 5040, np.sinh(root) / root)
    return ch, shc


def _expm_scaled(w, shift):
    """``exp(shift) exp(w . sigma)`` for complex Pauli vectors ``w`` (shape (..., 3)).

    The diagonal is written as ``exp(shift +- w3)`` plus a correction that is
    analytic in ``d = w1^2 + w2^2`` and vanishes with it.  Once the potential
    has decayed, a step then reproduces the pure phase to the last bit, and
    rounding no longer builds up over long runs of steps.
    """
    w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
    d = w1 * w1 + w2 * w2
    ch, shc = _cosh_shc(w3 * w3 + d)
    ch3, shc3 = _cosh_shc(w3 * w3)
    # first-order Taylor in d when d is negligible against w3^2:
    # d/dz cosh(sqrt z) = shc/2,  d/dz shc(sqrt z) = (cosh - shc)/(2 z)
    z = w3 * w3
    tiny_z = np.abs(z) < 1e-4
    dshc = np.where(tiny_z, 1 / 6 + z / 60 + z * z / 1680,
                    (ch3 - shc3) / (2 * np.where(tiny_z, 1.0, z)))
    linear = np.abs(d) <= 1e-8 * np.maximum(1.0, np.abs(z))
    dch_val = np.where(linear, shc3 * d / 2, ch - ch3)
    dshc_val = np.where(linear, dshc * d, shc - shc3)
    e = np.exp(shift)
    out = np.empty(w.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(shift + w3) + e * (dch_val + w3 * dshc_val)
    out[..., 1, 1] = np.exp(shift - w3) + e * (dch_val - w3 * dshc_val)
    out[..., 0, 1] = e * shc * (w1 - 1j * w2)
    out[..., 1, 0] = e * shc * (w1 + 1j * w2)
    return out


def _step_matrices(data, k, hatted, tau, left, h, key):
    """Magnus-4 propagators for steps ``[left_i, left_i + h_i]`` (``h`` may be negative)."""
    nodes = np.concatenate([left + (0.5 - _GAUSS) * h, left + (0.5 + _GAUSS) * h])
    nodes = np.clip(nodes, 0.0, None)
    n = _pauli_coefficients(data, nodes, k, hatted, cache_key=key)
    m = len(left)
    n1, n2 = n[:m], n[m:]
    hh = h[:, None]
    # Omega = h/2 (A1 + A2) + sqrt(3)/12 h^2 [A2, A1],  [a.s, b.s] = 2i (a x b).s
    w = 0.5 * hh * (n1 + n2) + (math.sqrt(3.0) / 12.0) * hh ** 2 * 2j * _cross(n2, n1)
    return _expm_scaled(w, tau * h)


def _tree_product(mats):
    """Ordered products ``M[..., n-1] @ ... @ M[..., 0]`` along axis -3."""
    while mats.shape[-3] > 1:
        if mats.shape[-3] % 2:
            pad = np.broadcast_to(core.I2, mats.shape[:-3] + (1, 2, 2))
            mats = np.concatenate([mats, pad], axis=-3)
        mats = mats[..., 1::2, :, :] @ mats[..., 0::2, :, :]
    return mats[..., 0, :, :]


def _chunks(start, targets, max_len):
    """Split the path start -> targets (monotone) into chunks no longer than ``max_len``.

    Returns chunk endpoints (including start) and, for each target, the index
    of the endpoint where it sits.
    """
    points = [start]
    where = []
    for tgt in targets:
        gap = abs(tgt - points[-1])
        if gap > 0:
            pieces = max(1, math.ceil(gap / max_len - 1e-12))
            base = points[-1]
            for p in range(1, pieces + 1):
                points.append(base + (tgt - base) * p / pieces)
        where.append(len(points) - 1)
    return np.array(points), where


def _propagate(data, k, hatted, column, start, targets, n_per_chunk, max_len):
    """Column solution at ``targets`` with ``n_per_chunk`` steps in each chunk."""
    tau = 1j * core.phase(data, k) * (1.0 if column == 1 else -1.0)
    ends, where = _chunks(start, targets, max_len)
    a, b = ends[:-1], ends[1:]
    n_chunks = len(a)
    psi0 = np.zeros(2, dtype=complex)
    psi0[column - 1] = 1.0
    out = np.empty((len(targets), 2), dtype=complex)
    if n_chunks == 0:
        out[:] = psi0
        return out
    h = (b - a) / n_per_chunk
    left = a[:, None] + h[:, None] * np.arange(n_per_chunk)[None, :]
    key = ("nodes", hatted, ends.tobytes(), n_per_chunk)
    mats = _step_matrices(data, k, hatted, tau, left.ravel(), np.repeat(h, n_per_chunk), key)
    props = _tree_product(mats.reshape(n_chunks, n_per_chunk, 2, 2))
    values = [psi0]
    psi = psi0
    for j in range(n_chunks):
        psi = props[j] @ psi
        values.append(psi)
    for i, w in enumerate(where):
        out[i] = values[w]
    return out


def solve_column(data, k, hatted, column, normalized_at, coords, tol=DEFAULT_TOL):
    """Integrate one column to ``coords``; returns (values (n, 2), error estimate)."""
    coords = np.asarray(coords, dtype=float).ravel()
    if np.any(coords < 0):
        raise DomainError("coordinates must be >= 0")
    L = data.L
    if normalized_at == "infinity":
        start = L
        order = np.argsort(-coords, kind="stable")
        targets = np.minimum(coords[order], L)
    else:
        start = 0.0
        order = np.argsort(coords, kind="stable")
        targets = coords[order]
    th = abs(core.phase(data, k))
    span = max(abs(start - t) for t in targets) if len(targets) else 0.0
    if span == 0.0:
        vals = np.zeros((len(coords), 2), dtype=complex)
        vals[:, column - 1] = 1.0
        return vals, 0.0
    growth_rate = 2.0 * abs(core.phase(data, k).imag) + 1e-300
    max_len = min(span / 4 if span > 1 else span, math.log(GROWTH_CAP) / growth_rate)
    h0 = min(MAX_STEP, PHASE_STEP / max(th, 1e-12))
    n = max(2, 2 ** math.ceil(math.log2(max_len / h0)))
    coarse = _propagate(data, k, hatted, column, start, targets, n, max_len)
    while True:
        fine = _propagate(data, k, hatted, column, start, targets, 2 * n, max_len)
        diff = np.abs(fine - coarse).max(axis=1) / np.maximum(1.0, np.abs(fine).max(axis=1))
        err = float(diff.max()) / 15.0
        if err <= tol:
            result = fine + (fine - coarse) / 15.0
            break
        n *= 2
        if max_len / n < STEP_FLOOR * L:
            raise ConvergenceError(
                f"step size fell below {STEP_FLOOR:g}*L without meeting tol={tol:g} at k={k}")
        coarse = fine
    vals = np.empty_like(result)
    vals[order] = result
    return vals, err


def solve_eigenfunction(kind, data, k, eval_coords, tol=DEFAULT_TOL):
    """Requested column of the eigenfunction at each coordinate."""
    if isinstance(kind, str):
        kind = EigenfunctionKind(kind)
    point = as_point(k)
    _check_data_side(kind, data)
    _check_kind_point(kind, point.k)
    coords = np.atleast_1d(np.asarray(eval_coords, dtype=float))
    vals, err = solve_column(data, point.k, kind.hatted, kind.column, kind.normalized_at, coords, tol)
    return [EigenfunctionValue(kind, point, float(c), v, True, err) for c, v in zip(coords, vals)]


def eigenfunction_matrix(family, data, k, coords, tol=DEFAULT_TOL):
    """Both columns assembled into matrices (shape (n, 2, 2)); both must be valid at k."""
    coords = np.atleast_1d(np.asarray(coords, dtype=float))
    cols = []
    for c in (1, 2):
        vals = solve_eigenfunction(EigenfunctionKind(family, c), data, k, coords, tol)
        cols.append(np.array([v.column for v in vals]))
    return np.stack(cols, axis=-1)


# --------------------------------------------------------------------------
# gauge route near k = 0

_HAT = {"X": "Xhat", "Y": "Yhat", "T": "That", "U": "Uhat"}


def reconstruct_from_hat(family, data, k, coord, column=2, tol=DEFAULT_TOL):
    """Column of X, Y, T or U assembled from the gauge-transformed solve."""
    if family not in _HAT:
        raise ValueError(f"reconstruct_from_hat handles X, Y, T, U, not {family!r}")
    kind = EigenfunctionKind(family, column)
    _check_data_side(kind, data)
    point = as_point(k)
    _check_kind_point(kind, point.k)
    coords = np.atleast_1d(np.asarray(coord, dtype=float))
    hat = _HAT[family]
    G = core.gauge(data, coords)
    if kind.normalized_at == "infinity":
        vals = solve_eigenfunction(EigenfunctionKind(hat, column), data, point.k, coords, tol)
        psi = np.array([v.column for v in vals])
        out = np.einsum("nij,nj->ni", G, psi)
    else:
        # Y = G(x) Yhat(x) E G(0)^{-1} E^{-1},  E = exp(-i theta x sigma3)
        Yh = eigenfunction_matrix(hat, data, point.k, coords, tol)
        th = core.phase(data, point.k)
        v = core.inv2(core.gauge(data, 0.0))[:, column - 1]
        s = 1.0 if column == 1 else -1.0
        e1 = np.exp(1j * th * coords * (s - 1.0))
        e2 = np.exp(1j * th * coords * (s + 1.0))
        w = np.stack([e1 * v[0], e2 * v[1]], axis=-1)
        out = np.einsum("nij,nj->ni", G, np.einsum("nij,nj->ni", Yh, w))
    return out[0] if np.ndim(coord) == 0 else out


def column_at(family, data, k, coord, column=2, tol=DEFAULT_TOL, switch_radius=GAUGE_SWITCH_RADIUS):
    """Column of an unhatted family, choosing the hatted route for |k| < switch_radius."""
    if abs(complex(k)) < switch_radius:
        return reconstruct_from_hat(family, data, k, coord, column, tol)
    vals = solve_eigenfunction(EigenfunctionKind(family, column), data, k, np.atleast_1d(coord), tol)
    out = np.array([v.column for v in vals])
    return out[0] if np.ndim(coord) == 0 else out


# --------------------------------------------------------------------------
# Neumann-series oracle

def _exp_weights(mu, h):
    """Weights (w0, w1) with  int_0^h e^{mu s} (f0 (1 - s/h) + f1 s/h) ds = w0 f0 + w1 f1."""
    z = mu * h
    if abs(z) < 1e-3:
        phi1 = 1 + z / 2 + z * z / 6 + z ** 3 / 24
        phi2 = 0.5 + z / 6 + z * z / 24 + z ** 3 / 120
    else:
        ez = np.exp(z)
        phi1 = (ez - 1) / z
        phi2 = (ez * (z - 1) + 1) / (z * z)
    return h * (phi1 - phi2), h * phi2


def picard_oracle(kind, data, k, coord, iterations=60, grid_step=1e-3, increment_tol=1e-13):
    """Neumann-series value of the Volterra equation for one column.

    The kernel integrals are evaluated on a uniform grid with weights that
    integrate the exponential factor exactly against the piecewise-linear
    interpolant, so the quadrature error is O(grid_step^2).  Iteration stops
    after ``iterations`` terms or once the increment drops below
    ``increment_tol``.
    """
    if isinstance(kind, str):
        kind = EigenfunctionKind(kind)
    point = as_point(k)
    _check_data_side(kind, data)
    _check_kind_point(kind, point.k)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    k = point.k
    coord = float(coord)
    L = data.L
    if kind.normalized_at == "infinity":
        a, b = coord, max(L, coord)
    else:
        a, b = 0.0, coord
    npts = max(2, int(math.ceil((b - a) / grid_step)) + 1)
    s = np.linspace(a, b, npts)
    h = s[1] - s[0] if npts > 1 else 0.0
    p2, a1, a3 = core.potential_terms(data, s, kind.hatted)
    scale = k if kind.hatted else 1.0 / k
    P = core.pauli(0.0, scale * a1, p2, scale * a3)
    th = core.phase(data, k)
    c = kind.column - 1
    sc = 1.0 if c == 0 else -1.0
    e = np.zeros((npts, 2), dtype=complex)
    e[:, c] = 1.0
    psi = e.copy()
    for _ in range(iterations):
        f = np.einsum("nij,nj->ni", P, psi)
        acc = np.empty_like(f)
        for r in range(2):
            sr = 1.0 if r == 0 else -1.0
            if kind.normalized_at == "infinity":
                # I(s_n) = int_{s_n}^{b} e^{mu (s' - s_n)} f(s') ds'
                mu = 1j * th * (sr - sc)
                w0, w1 = _exp_weights(mu, h)
                g = w0 * f[:-1, r] + w1 * f[1:, r]
                rev = lfilter([1.0], [1.0, -np.exp(mu * h)], g[::-1])[::-1]
                acc[:, r] = -np.append(rev, 0.0)
            else:
                # I(s_n) = int_a^{s_n} e^{-mu (s_n - s')} f(s') ds'
                mu = 1j * th * (sr - sc)
                w0, w1 = _exp_weights(-mu, h)
                g = w1 * f[:-1, r] + w0 * f[1:, r]
                fwd = lfilter([1.0], [1.0, -np.exp(-mu * h)], g)
                acc[:, r] = np.insert(fwd, 0, 0.0)
        new = e + acc
        inc = np.abs(new - psi).max()
        psi = new
        if inc < increment_tol:
            break
    return psi[0] if kind.normalized_at == "infinity" else psi[-1]
