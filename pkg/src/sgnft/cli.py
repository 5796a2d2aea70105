"""Command-line front end: ``sg-nft <command> --config cfg.json``.

The configuration is a JSON document::

    {
      "version": 1,
      "data": {"family": "kink", "params": {"x0": 2, "v": 0.5, "sign": -1}},
      "tolerance": 1e-8,
      "k_grid": {"region": "real", "count": 200, "spacing": "log", "min": 0.05, "max": 100}
    }

``data`` describes both sides at once; ``initial`` and ``boundary`` may
instead be given separately (each a profile spec with ``side`` x or t).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import compatibility, core, expansions, library, spectral
from .eigenfunctions import DEFAULT_TOL
from .errors import ConfigError, SgNftError, SingularityError
from .report import Report, emit_report, now

COMMANDS = ("spectral", "expand", "verify", "compat", "global-relation", "conservation")
FAMILIES = ("zero", "constant2piN", "kink", "kink_perturbed", "gaussian_bump", "csv")
CONFIG_VERSION = 1


# --------------------------------------------------------------------------
# configuration

def _param(params, name, default=None, kind=float):
    if name not in params:
        if default is None:
            raise ConfigError(f"missing parameter {name!r}")
        return default
    try:
        return kind(params[name])
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {name!r} must be {kind.__name__}, got {params[name]!r}") from None


def _sides(spec, side, m, base_dir):
    """Build (InitialData or None, BoundaryData or None) from one profile spec."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("a profile spec needs a 'family' entry")
    family = spec["family"]
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    want_x, want_t = side in ("x", "both"), side in ("t", "both")
    if family == "zero":
        init, bdry = library.zero_data(m)
    elif family == "constant2piN":
        init, bdry = library.constant_2pi_data(_param(params, "N", 0, int), m)
    elif family == "kink":
        sol = library.KinkSolution(_param(params, "x0", 0.0), _param(params, "v", 0.0),
                                   _param(params, "sign", -1, int))
        init = sol.initial_data(m) if want_x else None
        bdry = sol.boundary_data(m) if want_t else None
    elif family == "kink_perturbed":
        init, bdry = library.perturbed_kink_data(
            _param(params, "epsilon"), _param(params, "width", 1.0), _param(params, "power", 4, int),
            _param(params, "monomial", 0, int), _param(params, "x0", 2.0), _param(params, "v", 0.5),
            _param(params, "sign", -1, int), m)
    elif family == "gaussian_bump":
        bump = library.bump_profile(_param(params, "amplitude"), _param(params, "width", 1.0))
        zero = core.constant_profile(0.0)
        init = core.InitialData(zero, bump, 0, m)
        bdry = core.BoundaryData(zero, bump, 0, m)
    else:
        init, bdry = _csv_sides(params, side, m, base_dir)
    return (init if want_x else None), (bdry if want_t else None)


def _csv_sides(params, side, m, base_dir):
    if side == "both":
        raise ConfigError("csv profiles describe one side; give 'initial' and 'boundary' separately")
    N = _param(params, "N", 0, int)
    rate = _param(params, "decay_rate", 1.0)

    def load(key, winding):
        if key not in params:
            return core.constant_profile(0.0)
        path = Path(params[key])
        path = path if path.is_absolute() else Path(base_dir) / path
        return library.load_csv_profile(str(path), winding=winding, decay_rate=rate)

    field_prof = load("field", N)
    rate_prof = load("rate", 0)
    L = params.get("truncation_L")
    if side == "x":
        return core.InitialData(field_prof, rate_prof, N, m, L), None
    return None, core.BoundaryData(field_prof, rate_prof, N, m, L)


def load_data(config, base_dir="."):
    m = int(config.get("m", 2))
    init = bdry = None
    if "data" in config:
        init, bdry = _sides(config["data"], config["data"].get("side", "both"), m, base_dir)
    if "initial" in config:
        init, _ = _sides(config["initial"], "x", m, base_dir)
    if "boundary" in config:
        _, bdry = _sides(config["boundary"], "t", m, base_dir)
    if init is None and bdry is None:
        raise ConfigError("config must describe 'data', 'initial' or 'boundary'")
    return init, bdry


def build_k_grid(spec, default=None):
    """k values from an explicit list or a {region, count, spacing, min, max} description."""
    if spec is None:
        return default if default is not None else spectral.default_k_grid()
    if isinstance(spec, list):
        spec = {"values": spec}
    if "values" in spec:
        out = []
        for v in spec["values"]:
            if isinstance(v, (list, tuple)) and len(v) == 2:
                out.append(complex(float(v[0]), float(v[1])))
            elif isinstance(v, (int, float)):
                out.append(complex(v))
            else:
                raise ConfigError(f"k value {v!r} must be a number or [re, im]")
    else:
        region = spec.get("region", "real")
        count = int(spec.get("count", 200))
        spacing = spec.get("spacing", "log")
        lo, hi = float(spec.get("min", 0.05)), float(spec.get("max", 100.0))
        if spacing not in ("log", "linear"):
            raise ConfigError("k_grid spacing must be 'log' or 'linear'")
        if spacing == "log" and lo <= 0:
            raise ConfigError("log spacing needs min > 0")
        if region == "real":
            half = count // 2
            mags = np.geomspace(lo, hi, half) if spacing == "log" else np.linspace(lo, hi, half)
            out = [complex(v) for v in np.concatenate([mags, -mags])]
        elif region == "D1":
            out = compatibility.default_d1_samples(max(count // 5, 1), 5, max(lo, 1.0), hi)
        elif region == "UnitCircle":
            out = [complex(np.exp(2j * np.pi * (j + 0.5) / count)) for j in range(count)]
        else:
            raise ConfigError(f"unknown k_grid region {region!r}")
    for k in out:
        if k == 0:
            raise SingularityError("spectral parameter k = 0 excluded")
    return out


def read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: top level must be an object")
    version = config.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}")
    return config


# --------------------------------------------------------------------------
# commands

def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _require(init, bdry, need_x, need_t, command):
    if need_x and init is None:
        raise ConfigError(f"{command} needs initial data")
    if need_t and bdry is None:
        raise ConfigError(f"{command} needs boundary data")


def cmd_spectral(config, init, bdry, report, threads):
    quantity = config.get("quantity", "ab")
    tol = float(config.get("tolerance", DEFAULT_TOL))
    ks = build_k_grid(config.get("k_grid"))
    if quantity == "ab":
        _require(init, bdry, True, False, "spectral ab")
        fn = lambda k: spectral.spectral_ab(init, k, tol)
    elif quantity == "AB":
        _require(init, bdry, False, True, "spectral AB")
        fn = lambda k: spectral.spectral_AB(bdry, k, tol)
    elif quantity == "cd":
        _require(init, bdry, True, True, "spectral cd")
        fn = lambda k: spectral.spectral_cd(init, bdry, k, tol)
    else:
        raise ConfigError("quantity must be 'ab', 'AB' or 'cd'")
    for s in _map(fn, ks, threads):
        report.add_sample(s.k, s.payload, s.point.region)
    report.summary["routes"] = {"hatted": sum(1 for k in ks if abs(k) < 1.0),
                                "direct": sum(1 for k in ks if abs(k) >= 1.0)}


def cmd_expand(config, init, bdry, report, threads):
    _require(init, bdry, True, False, "expand")
    m = int(config.get("m", 2))
    tol = float(config.get("tolerance", 1e-11))
    large = config.get("large_k", [10, 20, 40, 80, 160])
    small = config.get("small_k", [0.005, 0.01, 0.02, 0.04])
    sides = [("x", init)] + ([("t", bdry)] if bdry is not None else [])
    jobs = [(side, data, limit, ks) for side, data in sides
            for limit, ks in (("infinity", large), ("zero", small))]

    def run(job):
        side, data, limit, ks = job
        return f"{side}_{limit}_m{m}", expansions.remainder_order(side, limit, data, m, ks, tol=tol)

    for name, res in _map(run, jobs, threads):
        report.slopes[name] = res.as_dict()
    if bdry is not None:
        scal = spectral.asymptotic_scalars(init, bdry, min(max(m, 1), 2))
        report.summary["scalars"] = scal.as_dict()
    else:
        names = ("a1", "b1", "b2", "a1_hat", "b1_hat", "b2_hat")
        report.summary["scalars"] = dict(zip(names, spectral.x_scalars(init)))


def cmd_verify(config, init, bdry, report, threads):
    _require(init, bdry, True, True, "verify")
    tol = float(config.get("tolerance", DEFAULT_TOL))
    ks = [k for k in build_k_grid(config.get("k_grid")) if k.imag == 0]
    pos = sorted({abs(k.real) for k in ks})
    chunks = [pos[i::max(threads, 1)] for i in range(max(threads, 1))]

    def run(chunk):
        grid = [complex(v) for v in chunk]
        return spectral.invariant_residuals(init, bdry, grid, tol, d_zero_k=None) if grid else {}

    merged = {}
    for part in _map(run, chunks, threads):
        for name, value in part.items():
            if value is not None:
                merged[name] = max(merged.get(name, 0.0), value)
    d0 = spectral.spectral_cd(init, bdry, spectral.D_ZERO_K, tol)["d"]
    merged["d_zero_limit"] = abs(d0 - (-1) ** (init.N_x - bdry.N_t))
    merged["unitarity_AB_circle"] = spectral.unit_circle_residual(
        bdry, int(config.get("circle_points", 64)), tol)
    for name in ("unitarity_ab", "unitarity_AB", "unitarity_cd", "det_X", "det_T",
                 "symmetry_ab", "symmetry_AB", "d_zero_limit", "unitarity_AB_circle"):
        report.residuals[name] = merged.get(name)
    report.summary["charge"] = compatibility.topological_charge(init, bdry)


def cmd_compat(config, init, bdry, report, threads):
    _require(init, bdry, True, True, "compat")
    order = int(config.get("order", 4))
    rep = compatibility.compatibility_residuals(init, bdry, order, config.get("compat_tolerance"))
    report.residuals.update(rep.as_dict())
    report.summary.update({"order": order, "pass": rep.passed, "tolerance": rep.tolerance,
                           "failures": [label for label, _, _ in rep.failures]})


def cmd_global_relation(config, init, bdry, report, threads):
    _require(init, bdry, True, True, "global-relation")
    tol = float(config.get("tolerance", DEFAULT_TOL))
    spec = config.get("k_grid")
    ks = build_k_grid(spec, default=compatibility.default_d1_samples())
    res = compatibility.global_relation_residual(init, bdry, ks, tol, threads)
    for point, value, err in res.samples:
        if value is not None:
            report.add_sample(point.k, {"abs_c": value}, point.region)
        else:
            report.summary.setdefault("errors", []).append(err)
    report.residuals["sup_c"] = res.sup_c
    report.summary["charge"] = compatibility.topological_charge(init, bdry)


def cmd_conservation(config, init, bdry, report, threads):
    _require(init, bdry, True, True, "conservation")
    alt = config.get("alternate_contour")
    check = compatibility.conservation_contour_check(init, bdry, alt)
    d1 = spectral.asymptotic_scalars(init, bdry, 1).d1
    report.residuals["contour_residual"] = check.residual
    report.residuals["d1_vs_contour"] = abs(d1 - check.l_shape)
    report.summary.update({"d1": d1, "integral_l_shape": check.l_shape,
                           "integral_alternate": check.alternate, "L": check.L})


HANDLERS = {
    "spectral": cmd_spectral,
    "expand": cmd_expand,
    "verify": cmd_verify,
    "compat": cmd_compat,
    "global-relation": cmd_global_relation,
    "conservation": cmd_conservation,
}


# --------------------------------------------------------------------------

def _threads(arg):
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("SG_NFT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SG_NFT_THREADS must be an integer, got {env!r}") from None
    return 1


def run_command(command, config, base_dir=".", threads=1):
    """Execute one command; returns the filled :class:`Report`."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    report = Report(command, config, started=now())
    init, bdry = load_data(config, base_dir)
    HANDLERS[command](config, init, bdry, report, threads)
    return report


def _error_object(exc, code):
    kind = getattr(exc, "kind", "io_error" if isinstance(exc, OSError) else "error")
    return json.dumps({"error": {"kind": kind, "message": str(exc), "exit_code": code}})


def main(argv=None):
    parser = argparse.ArgumentParser(prog="sg-nft", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for k sweeps (default: $SG_NFT_THREADS or 1)")
    args = parser.parse_args(argv)
    try:
        threads = _threads(args.threads)
        config = read_config(args.config)
        report = run_command(args.command, config, Path(args.config).resolve().parent, threads)
        text = emit_report(report, args.format)
    except SgNftError as exc:
        print(_error_object(exc, exc.exit_code), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(_error_object(exc, 5), file=sys.stderr)
        return 5
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(_error_object(exc, 5), file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
