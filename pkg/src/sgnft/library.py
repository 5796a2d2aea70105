"""Test-data families: exact traveling kinks, trivial data, perturbations, CSV samples."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .core import BoundaryData, HalfLineProfile, InitialData, SampledProfile, constant_profile
from .errors import ConfigError, DecayError, ProfileParseError


@dataclass(frozen=True)
class KinkSolution:
    """``u(x, t) = 4 arctan(exp(sign * gamma * (x - v t - x0)))``."""

    x0: float = 0.0
    v: float = 0.0
    sign: int = -1

    def __post_init__(self):
        if not abs(self.v) < 1:
            raise ConfigError(f"kink speed must satisfy |v| < 1, got {self.v}")
        if self.sign not in (1, -1):
            raise ConfigError("kink sign must be +1 or -1")

    @property
    def gamma(self):
        return 1.0 / math.sqrt(1.0 - self.v ** 2)

    def _z(self, x, t):
        return self.sign * self.gamma * (np.asarray(x, float) - self.v * np.asarray(t, float) - self.x0)

    def u(self, x, t):
        z = self._z(x, t)
        e = np.exp(-np.abs(z))
        return np.where(z >= 0, 2 * np.pi - 4 * np.arctan(e), 4 * np.arctan(e))

    def _dz(self, x, t):
        # d/dz 4 arctan(e^z) = 2 sech z
        z = self._z(x, t)
        e = np.exp(-np.abs(z))
        return 4 * e / (1 + e * e)

    def u_x(self, x, t):
        return self.sign * self.gamma * self._dz(x, t)

    def u_t(self, x, t):
        return -self.sign * self.gamma * self.v * self._dz(x, t)

    def _dzz(self, x, t):
        # d^2/dz^2 4 arctan(e^z) = -2 sech z tanh z
        z = self._z(x, t)
        e = np.exp(-np.abs(z))
        sech = 2 * e / (1 + e * e)
        return -2 * sech * np.sign(z) * (1 - e * e) / (1 + e * e)

    def u_xx(self, x, t):
        return self.gamma ** 2 * self._dzz(x, t)

    def u_tt(self, x, t):
        return (self.gamma * self.v) ** 2 * self._dzz(x, t)

    def pde_residual(self, x, t):
        """``u_tt - u_xx + sin u`` evaluated from the closed form."""
        return self.u_tt(x, t) - self.u_xx(x, t) + np.sin(self.u(x, t))

    @property
    def N_x(self):
        return 1 if self.sign > 0 else 0

    @property
    def N_t(self):
        if self.v == 0:
            raise DecayError("a stationary kink has non-decaying boundary values")
        return 1 if self.sign * self.v < 0 else 0

    # profiles --------------------------------------------------------------
    def _x_profiles(self):
        a = self.sign * self.gamma
        u0 = HalfLineProfile(lambda s: jets.kink_angle(a * (s - self.x0)), self.N_x,
                             self.gamma, max(self.x0, 0.0), name="kink u0")
        c = -self.sign * self.gamma * self.v
        u1 = HalfLineProfile(lambda s: c * 2.0 * jets.sech(a * (s - self.x0)), 0,
                             self.gamma, max(self.x0, 0.0), name="kink u1")
        return u0, u1

    def _t_profiles(self):
        a = -self.sign * self.gamma * self.v
        shift = -self.sign * self.gamma * self.x0
        rate = self.gamma * abs(self.v)
        offset = max(-self.x0 / self.v, 0.0) if self.v else 0.0
        N_t = self.N_t
        g0 = HalfLineProfile(lambda s: jets.kink_angle(a * s + shift), N_t, rate, offset, name="kink g0")
        c = self.sign * self.gamma
        g1 = HalfLineProfile(lambda s: c * 2.0 * jets.sech(a * s + shift), 0, rate, offset,
                             name="kink g1")
        return g0, g1

    def initial_data(self, m=2, truncation_L=None):
        u0, u1 = self._x_profiles()
        return InitialData(u0, u1, self.N_x, m, truncation_L, source=self)

    def boundary_data(self, m=2, truncation_L=None):
        g0, g1 = self._t_profiles()
        return BoundaryData(g0, g1, self.N_t, m, truncation_L, source=self)


def generate_kink_data(x0=2.0, v=0.5, sign=-1, m=2):
    """Initial and boundary values of an exact traveling kink (needs v != 0)."""
    sol = KinkSolution(x0, v, sign)
    return sol.initial_data(m), sol.boundary_data(m)


def stationary_kink_initial_data(x0=0.0, sign=-1, m=2):
    """``u0 = 4 arctan(exp(sign (x - x0)))``, ``u1 = 0``."""
    return KinkSolution(x0, 0.0, sign).initial_data(m)


# --------------------------------------------------------------------------
# perturbations and simple families

def bump_profile(amplitude, width, power=2, monomial=0, name="bump"):
    """``amplitude * (s/width)^monomial * exp(-(s/width)^power)``."""
    if width <= 0:
        raise ConfigError("bump width must be positive")
    if power < 1 or monomial < 0:
        raise ConfigError("bump exponents must satisfy power >= 1, monomial >= 0")

    def func(s):
        y = s / width
        out = jets.exp(-(y ** int(power))) * amplitude
        if monomial:
            out = out * (y ** int(monomial))
        return out

    return HalfLineProfile(func, 0, 1.0 / width, 2.0 * width, name=name)


def added_profile(base, extra, name=None):
    return HalfLineProfile(lambda s: base.func(s) + extra.func(s), base.winding,
                           min(base.decay_rate, extra.decay_rate),
                           max(base.offset, extra.offset), name=name or f"{base.name}+{extra.name}")


def perturbed_kink_data(epsilon, width=1.0, power=4, monomial=0, x0=2.0, v=0.5, sign=-1, m=2):
    """Traveling-kink data with ``g1`` shifted by ``epsilon (t/w)^monomial exp(-(t/w)^power)``.

    With ``monomial = 0`` the shift changes ``g1(0)`` by ``epsilon`` and, since
    ``power = 4``, leaves ``g1', g1'', g1'''`` at the origin untouched.  With
    ``monomial = q`` only ``g1^(q)(0)`` and higher move.
    """
    sol = KinkSolution(x0, v, sign)
    init = sol.initial_data(m)
    g0, g1 = sol._t_profiles()
    extra = bump_profile(epsilon, width, power, monomial, name="perturbation")
    bdry = BoundaryData(g0, added_profile(g1, extra), sol.N_t, m)
    return init, bdry


@dataclass(frozen=True)
class ConstantSolution:
    """The equilibrium ``u = 2 pi N``."""

    N: int = 0

    def u(self, x, t):
        return np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, 2 * np.pi * self.N)

    def u_x(self, x, t):
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(t)).shape)

    u_t = u_x


def zero_data(m=2):
    sol = ConstantSolution(0)
    return (InitialData(constant_profile(0.0), constant_profile(0.0), 0, m, 20.0, source=sol),
            BoundaryData(constant_profile(0.0), constant_profile(0.0), 0, m, 20.0, source=sol))


def constant_2pi_data(N=1, m=2):
    sol = ConstantSolution(N)
    field = constant_profile(2 * np.pi * N, N)
    return (InitialData(field, constant_profile(0.0), N, m, 20.0, source=sol),
            BoundaryData(field, constant_profile(0.0), N, m, 20.0, source=sol))


# --------------------------------------------------------------------------
# CSV samples

def load_csv_profile(path, column_map=None, winding=0, decay_rate=1.0, offset=0.0):
    """Cubic-spline profile from a two-column CSV file with header ``x,value`` or ``t,value``.

    ``column_map`` may rename the expected columns, e.g. ``{"coord": "s", "value": "u"}``.
    Errors name the offending line.
    """
    names = {"coord": None, "value": "value"}
    names.update(column_map or {})
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ProfileParseError(f"{path}: not UTF-8 text ({exc})") from None
    if not rows:
        raise ProfileParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    coord_name = names["coord"]
    if coord_name is None:
        coord_name = next((h for h in header if h in ("x", "t")), None)
    if coord_name not in header or names["value"] not in header:
        raise ProfileParseError(
            f"{path}, line 1: header must contain x or t and {names['value']!r}, got {header}")
    ci, vi = header.index(coord_name), header.index(names["value"])
    s, vals = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ProfileParseError(f"{path}, line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            a, b = float(row[ci]), float(row[vi])
        except ValueError:
            raise ProfileParseError(f"{path}, line {lineno}: non-numeric field in {row}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ProfileParseError(f"{path}, line {lineno}: non-finite value in {row}")
        if s and a <= s[-1]:
            raise ProfileParseError(f"{path}, line {lineno}: coordinates must be strictly increasing")
        if not s and a != 0.0:
            raise ProfileParseError(f"{path}, line {lineno}: first coordinate must be 0")
        s.append(a)
        vals.append(b)
    if len(s) < 4:
        raise ProfileParseError(f"{path}: need at least 4 data rows, got {len(s)}")
    return SampledProfile(np.array(s), np.array(vals), winding, decay_rate, offset,
                          name=f"csv:{path}")
