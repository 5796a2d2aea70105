"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import json
import re
import subprocess
import sys

import numpy as np
import pytest

import closed_forms as cf
from sgnft import cli, compatibility as cp, core, eigenfunctions as ef, expansions as ex
from sgnft import library, spectral

SOLVER_TOL = 1e-8


@pytest.fixture(scope="module")
def real_grid():
    mags = np.geomspace(0.05, 100.0, 100)
    return [complex(v) for v in np.concatenate([mags, -mags])]


@pytest.fixture(scope="module")
def kink_invariants(kink, real_grid):
    return spectral.invariant_residuals(*kink, real_grid, SOLVER_TOL, d_zero_k=None)


def test_01_trivial_data_identity(zero, verdict):
    init, bdry = zero
    worst = 0.0
    for k in spectral.default_k_grid():
        ab = spectral.spectral_ab(init, k)
        AB = spectral.spectral_AB(bdry, k)
        cd = spectral.spectral_cd(init, bdry, k)
        worst = max(worst, abs(ab["a"] - 1), abs(ab["b"]), abs(AB["A"] - 1), abs(AB["B"]),
                    abs(cd["c"]), abs(cd["d"] - 1))
    assert verdict("1", worst <= 1e-12, f"max deviation {worst:.2e} <= 1e-12")


def test_02_unitarity(kink_invariants, verdict):
    ab, cd = kink_invariants["unitarity_ab"], kink_invariants["unitarity_cd"]
    ok = ab <= 1e-6 and cd <= 1e-6
    assert verdict("2", ok, f"|a|^2+|b|^2-1 {ab:.2e}, |c|^2+|d|^2-1 {cd:.2e} <= 1e-6")


def test_03_circle_unitarity(kink, verdict):
    r = spectral.unit_circle_residual(kink[1], 64, SOLVER_TOL)
    assert verdict("3", r <= 1e-6, f"unit-circle residual {r:.2e} <= 1e-6")


def test_04_determinant_and_symmetry(kink_invariants, verdict):
    det, sym = kink_invariants["det_X"], kink_invariants["symmetry_ab"]
    ok = det <= 1e-8 and sym <= 1e-8
    assert verdict("4", ok, f"|det X - 1| {det:.2e}, |a(k) - conj a(-k)| {sym:.2e} <= 1e-8")


def _random_valid(rng, kind):
    while True:
        r = rng.uniform(0.05, 1.5) if kind.hatted else rng.uniform(0.3, 4.0)
        k = complex(r * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        if kind.is_valid(k):
            return k


def test_05_oracle_equivalence(kink, verdict):
    rng = np.random.default_rng(5)
    init, bdry = kink
    worst = {}
    for family in ef.FAMILIES:
        data = init if ef.FAMILIES[family][0] == "x" else bdry
        dev = 0.0
        for _ in range(20):
            kind = ef.EigenfunctionKind(family, int(rng.integers(1, 3)))
            k, x = _random_valid(rng, kind), rng.uniform(0, 5)
            direct = ef.solve_eigenfunction(kind, data, k, [x], 1e-10)[0].column
            oracle = ef.picard_oracle(kind, data, k, x, grid_step=5e-4)
            dev = max(dev, float(np.abs(direct - oracle).max()))
        worst[family] = dev
    top = max(worst.values())
    assert verdict("5", top <= 1e-6, f"max |solve - picard| {top:.2e} <= 1e-6 over 8 families x 20")


def test_06_recursion_vs_closed_forms(kink, kink_sympy, verdict):
    init, bdry = kink
    arrays = lambda tab: {"X": tab.F, "T": tab.F, "Z": tab.Z, "W": tab.W}
    worst = 0.0
    cases = [("x", "infinity", init, lambda g: cf.x_side_infinity(kink_sympy["x"], g)),
             ("x", "zero", init, lambda g: cf.x_side_zero(kink_sympy["x"], g)),
             ("t", "infinity", bdry, lambda g: cf.t_side(kink_sympy["t"], g, False)),
             ("t", "zero", bdry, lambda g: cf.t_side(kink_sympy["t"], g, True))]
    for side, limit, data, oracle in cases:
        tab = ex.build_expansion(side, limit, data, 2)
        for name, ref in oracle(tab.grid).items():
            worst = max(worst, float(np.abs(arrays(tab)[name[0]][int(name[1])] - ref).max()))
    assert verdict("6", worst <= 1e-7, f"max coefficient deviation {worst:.2e} <= 1e-7")


def test_07_large_k_order(kink, verdict):
    init, _ = kink
    ks = [10, 20, 40, 80, 160]
    slopes = {}
    for m in (1, 2):
        tab = ex.build_expansion("x", "infinity", init, m)
        rem = []
        for k in ks:
            s = spectral.spectral_ab(init, k, 1e-12)
            series = ex.evaluate_series(tab, 0.0, k, terms=m)
            rem.append(max(abs(s["a"] - series[1, 1]), abs(s["b"] - series[0, 1])))
        slopes[m] = ex.fit_slope(ks, rem).slope
    ok = -2.15 <= slopes[1] <= -1.85 and -3.15 <= slopes[2] <= -2.85
    assert verdict("7", ok, f"slopes m=1 {slopes[1]:.3f} in [-2.15,-1.85], m=2 {slopes[2]:.3f} in [-3.15,-2.85]")


def test_08_small_k_order_and_overlap(kink, verdict):
    init, _ = kink
    a1h, b1h = spectral.x_scalars(init)[3:5]
    G = core.gauge(init, 0.0)
    ks = [0.005, 0.01, 0.02, 0.04]
    rem = []
    for k in ks:
        s = spectral.spectral_ab(init, k, 1e-12)
        approx = G @ np.array([b1h * k, 1 + a1h * k])
        rem.append(float(np.abs(np.array([s["b"], s["a"]]) - approx).max()))
    slope = ex.fit_slope(ks, rem).slope
    overlap = 0.0
    for k in np.concatenate([np.linspace(0.5, 1.5, 6), -np.linspace(0.5, 1.5, 6)]):
        hat = spectral.spectral_ab(init, k, SOLVER_TOL, switch_radius=10.0)
        direct = spectral.spectral_ab(init, k, SOLVER_TOL, switch_radius=0.0)
        overlap = max(overlap, abs(hat["a"] - direct["a"]), abs(hat["b"] - direct["b"]))
    ok = 1.85 <= slope <= 2.15 and overlap <= 1e-6
    assert verdict("8", ok, f"small-k slope {slope:.3f} in [1.85,2.15], overlap {overlap:.2e} <= 1e-6")


def test_09a_global_relation(kink, verdict):
    res = cp.global_relation_residual(*kink, cp.default_d1_samples(), SOLVER_TOL)
    assert verdict("9a", res.sup_c <= 1e-5, f"sup|c| over 50 samples in closure(D1) {res.sup_c:.2e} <= 1e-5")


@pytest.mark.xfail(strict=True, reason="d(k) + 1 is first order in k with |d1_hat| = 2 sqrt(3) "
                   "for this kink, so |d(1e-3) + 1| is about 3.5e-3; see the decisions log")
def test_09b_d_at_small_k(kink, verdict):
    init, bdry = kink
    d = spectral.spectral_cd(init, bdry, 1e-3, 1e-10)["d"]
    target = (-1) ** (init.N_x - bdry.N_t)
    dev = abs(d - target)
    assert verdict("9b", dev <= 1e-4, f"|d(1e-3) - (-1)| {dev:.2e} <= 1e-4 (unattainable, first-order term)")


def test_09b_supplement_d_zero_limit(kink):
    """The limit d(0) = -1 itself holds: linear extrapolation removes the O(k) term."""
    init, bdry = kink
    scal = spectral.asymptotic_scalars(init, bdry)
    d_hat1 = scal.a1_hat + np.conj(scal.A1_hat)
    k = 1e-3
    d1 = spectral.spectral_cd(init, bdry, k, 1e-10)["d"]
    d2 = spectral.spectral_cd(init, bdry, 2 * k, 1e-10)["d"]
    assert abs(2 * d1 - d2 + 1) <= 1e-4
    # the deviation is the predicted first-order term -d_hat1 k
    assert abs((d1 + 1) - (-d_hat1 * k)) <= 1e-5


def test_10a_c_decay_for_order4_compatible_data(kink, verdict):
    # exact kink data: c vanishes identically, so decay is trivially faster than any power
    ks = [4, 8, 16, 32, 64]
    exact = max(abs(spectral.spectral_cd(*kink, k, 1e-12)["c"]) for k in ks)
    # generic data compatible to order 4 (g1 shifted by eps t^4 exp(-t^4)): measurable decay
    init, bdry = library.perturbed_kink_data(0.5, monomial=4)
    assert cp.compatibility_residuals(init, bdry, 4).passed
    cs = [abs(spectral.spectral_cd(init, bdry, k, 1e-12)["c"]) for k in ks]
    slope = ex.fit_slope(ks, cs).slope
    ok = exact <= 1e-9 and slope <= -3.8
    assert verdict("10a", ok, f"kink |c| <= {exact:.1e}; order-4-compatible data slope {slope:.3f} <= -3.8")


def test_10b_c_first_coefficient(verdict):
    eps = 1e-2
    init, bdry = library.perturbed_kink_data(eps)
    ks = np.geomspace(50, 400, 8)
    kc = np.array([k * spectral.spectral_cd(init, bdry, k, 1e-12)["c"] for k in ks])
    design = np.vstack([np.ones_like(ks), 1 / ks, 1 / ks ** 2]).T.astype(complex)
    c1_fit = np.linalg.lstsq(design, kc, rcond=None)[0][0]
    c1 = spectral.asymptotic_scalars(init, bdry).c[0]
    rel = abs(abs(c1_fit) - eps / 2) / (eps / 2)
    match = abs(c1_fit - c1) / abs(c1)
    ok = rel <= 0.02 and match <= 0.02
    assert verdict("10b", ok, f"|c1_fit| = {abs(c1_fit):.6g} vs eps/2 rel {rel:.1e}, vs b1-B1 rel {match:.1e} <= 2%")


def test_11_compatibility_checker(kink, verdict):
    rep = cp.compatibility_residuals(*kink, 4)
    worst = max(abs(r) for _, _, r in rep.residuals)
    init, bdry = library.perturbed_kink_data(1e-2)
    fails = [(label, order) for label, order, _ in cp.compatibility_residuals(init, bdry, 4).failures]
    ok = rep.passed and worst <= 1e-8 and fails == [("g1^(0)(0)", 1)]
    assert verdict("11", ok, f"kink max residual {worst:.1e}; perturbed failures {fails}")


def test_12_conservation_contour(kink, verdict):
    d1 = spectral.asymptotic_scalars(*kink).d1
    check = cp.conservation_contour_check(*kink)
    L = check.L
    bent = cp.conservation_contour_check(*kink, [(L, 0.0), (0.3 * L, 0.2 * L), (0.1 * L, 0.9 * L), (0.0, L)])
    dev = abs(d1 - check.l_shape)
    indep = max(check.residual, bent.residual)
    ok = dev <= 1e-6 and indep <= 1e-6
    assert verdict("12", ok, f"|d1 - int omega1| {dev:.1e}, contour dependence {indep:.1e} <= 1e-6")


def test_13_pde_oracle(verdict):
    rng = np.random.default_rng(13)
    sol = library.KinkSolution(2.0, 0.5, -1)
    x, t = rng.uniform(0, 10, 100), rng.uniform(0, 10, 100)
    r = float(np.abs(sol.pde_residual(x, t)).max())
    assert verdict("13", r <= 1e-10, f"max |u_tt - u_xx + sin u| {r:.1e} <= 1e-10")


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "sgnft.cli", *args], cwd=cwd,
                          capture_output=True, text=True)


def test_14_cli_determinism_and_errors(tmp_path, verdict):
    cfg = tmp_path / "verify.json"
    cfg.write_text(json.dumps({"version": 1, "data": {"family": "kink", "params": {"x0": 2, "v": 0.5}},
                               "k_grid": {"region": "real", "count": 20, "min": 0.1, "max": 20}}))
    runs = [_cli(["verify", "--config", str(cfg)], tmp_path) for _ in range(2)]
    scrub = lambda s: re.sub(r'"(started|finished)": "[^"]*"', "", s)
    same = all(r.returncode == 0 for r in runs) and scrub(runs[0].stdout) == scrub(runs[1].stdout)
    (tmp_path / "bad.csv").write_text("x,value\n0,0\n0.1,oops\n0.2,0\n0.3,0\n")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "initial": {"family": "csv", "params": {"field": "bad.csv"}}}))
    r_csv = _cli(["spectral", "--config", str(bad)], tmp_path)
    zero_k = tmp_path / "k0.json"
    zero_k.write_text(json.dumps({"version": 1, "data": {"family": "zero"}, "k_grid": {"values": [1, 0]}}))
    r_k0 = _cli(["spectral", "--config", str(zero_k)], tmp_path)
    ok = (same and r_csv.returncode == 2 and r_csv.stdout == ""
          and r_k0.returncode == 3 and "spectral parameter k = 0 excluded" in r_k0.stderr)
    assert verdict("14", ok, f"byte-identical reports {same}; malformed CSV exit {r_csv.returncode} (2); "
                             f"k = 0 exit {r_k0.returncode} (3)")
