"""Acceptance criteria: landmark reproductions and property suites.

Each test appends one PASS/FAIL line to the acceptance summary printed at the
end of the pytest run.  Several criteria take minutes; deselect them with
``-m "not slow"`` during development.
"""
import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from recycle_reactor import (
    Grid1D,
    IntegratorConfig,
    ReactorParams,
    ReactorState,
    bifurcation_diagram,
    convergence_distance,
    count_iterations,
    detect_attractor,
    detect_peaks,
    eigenvalue_curve,
    fb_window,
    integrate_pass,
    peak_poincare_section,
    profile_1d,
    recycle_map,
    tree_profile,
)
from recycle_reactor.cli import SUBCOMMANDS, replay_manifest, run
from recycle_reactor.config import parse_config

from conftest import ACCEPTANCE, SEED, base

slow = pytest.mark.slow


def record(name, ok, detail):
    ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


# -- shared sweeps (computed once, reused by the coherence criterion) ---------

_cache = {}


def eigen_sweep():
    if "c1" not in _cache:
        t0 = time.perf_counter()
        curve = eigenvalue_curve(base(-0.001), Grid1D(0.30, 0.55, 251), k_expected=1)
        _cache["c1"] = (curve, time.perf_counter() - t0)
    return _cache["c1"]


def two_periodic_window():
    if "c2" not in _cache:
        t0 = time.perf_counter()
        edges = fb_window(base(-0.002), 0.30, 0.55, k_from=1, tol=1e-4)
        _cache["c2"] = (edges, time.perf_counter() - t0)
    return _cache["c2"]


# -- 1 ------------------------------------------------------------------------

@slow
def test_criterion_1_eigenvalue_maximum():
    curve, elapsed = eigen_sweep()
    f_star = curve.f_axis.values[int(np.nanargmax(curve.leading))]
    ok = abs(f_star - 0.427) <= 0.01 and elapsed < 60 and not curve.flagged.any()
    record("1 eigenvalue landmark", ok,
           f"argmax |lambda| at f={f_star:.3f} (target 0.427 +- 0.01), {elapsed:.1f}s (< 60s)")


# -- 2 ------------------------------------------------------------------------

@slow
def test_criterion_2_two_periodic_window():
    (left, right), elapsed = two_periodic_window()
    mods = []
    for f in (left + 1e-4, right - 1e-4):
        att = detect_attractor(SEED, base(-0.002, f=f))
        assert att.period == 2
        mods.append(att.moduli[0])
    ok = (abs(left - 0.3795) <= 0.005 and abs(right - 0.4695) <= 0.005
          and all(abs(m - 1.0) <= 0.02 for m in mods) and elapsed < 120)
    record("2 two-periodic window", ok,
           f"edges {left:.4f}, {right:.4f} (targets 0.3795, 0.4695 +- 0.005); "
           f"period-2 |lambda| at edges {mods[0]:.4f}, {mods[1]:.4f} (1 +- 0.02); {elapsed:.1f}s (< 120s)")


# -- 3 ------------------------------------------------------------------------

@slow
def test_criterion_3_four_periodic_window():
    t0 = time.perf_counter()
    left, right = fb_window(base(-0.012), 0.35, 0.46, k_from=2, tol=1e-4)
    elapsed = time.perf_counter() - t0
    ok = abs(left - 0.381) <= 0.005 and abs(right - 0.430) <= 0.005 and elapsed < 120
    record("3 four-periodic window", ok,
           f"edges {left:.4f}, {right:.4f} (targets 0.381, 0.430 +- 0.005); {elapsed:.1f}s (< 120s)")


# -- 4 ------------------------------------------------------------------------

ALPHA_GRID = Grid1D(0.0, 1.0, 2000)


@slow
def test_criterion_4a_stationary_profile_minimum():
    t0 = time.perf_counter()
    prof = profile_1d(base(-0.001), ALPHA_GRID, theta0=0.2)
    elapsed = time.perf_counter() - t0
    a_min = ALPHA_GRID.values[int(np.argmin(prof.counts))]
    ok = abs(a_min - 0.559) <= 0.01 and elapsed < 600
    record("4a profile theta_H=-0.001", ok,
           f"global N-minimum at alpha0={a_min:.4f} (target 0.559 +- 0.01); {elapsed:.0f}s (< 600s)")


@slow
def test_criterion_4b_two_periodic_profile_extremes():
    t0 = time.perf_counter()
    prof = profile_1d(base(-0.002), ALPHA_GRID, theta0=0.2)
    elapsed = time.perf_counter() - t0
    a = ALPHA_GRID.values
    c = prof.counts
    a_max = a[int(np.argmax(c))]
    # sharp minimum: strict local minimum that is the lowest N among alpha0 < 0.3
    low = np.flatnonzero(a < 0.3)
    i_min = low[int(np.argmin(c[low]))]
    strict = 0 < i_min < len(c) - 1 and c[i_min] < c[i_min - 1] and c[i_min] < c[i_min + 1]
    ok = abs(a_max - 0.546) <= 0.01 and abs(a[i_min] - 0.048) <= 0.01 and strict and elapsed < 600
    record("4b profile theta_H=-0.002", ok,
           f"global N-maximum at alpha0={a_max:.4f} (target 0.546 +- 0.01); sharp minimum at "
           f"alpha0={a[i_min]:.4f} (target 0.048 +- 0.01, strict={strict}); {elapsed:.0f}s (< 600s)")


# -- 5 ------------------------------------------------------------------------

def _local_maxima(env):
    return [i for i in range(1, len(env) - 1) if env[i] > env[i - 1] and env[i] > env[i + 1]]


@slow
def test_criterion_5_tree_eigenvalue_coherence():
    curve, _ = eigen_sweep()
    f_star = curve.f_axis.values[int(np.nanargmax(curve.leading))]
    (left, right), _ = two_periodic_window()
    alpha = Grid1D(0.0, 1.0, 21)

    g1 = Grid1D(0.40, 0.45, 11)
    t1 = tree_profile(base(-0.001), g1, alpha, 0.2)
    env1 = t1.counts.max(axis=0)
    f_tree = g1.values[int(np.argmax(env1))]
    ok1 = abs(f_tree - f_star) <= g1.step + 1e-12

    g2 = Grid1D(0.35, 0.50, 31)
    t2 = tree_profile(base(-0.002), g2, alpha, 0.2)
    env2 = t2.counts.max(axis=0)
    peaks = sorted(_local_maxima(env2), key=lambda i: -env2[i])[:2]
    f_peaks = sorted(g2.values[peaks])
    ok2 = (len(f_peaks) == 2 and abs(f_peaks[0] - left) <= g2.step + 1e-12
           and abs(f_peaks[1] - right) <= g2.step + 1e-12)
    record("5 tree/eigenvalue coherence", ok1 and ok2,
           f"theta_H=-0.001 envelope max at f={f_tree:.3f} vs eigenvalue argmax {f_star:.3f} "
           f"(cell {g1.step:.3f}); theta_H=-0.002 envelope maxima at {np.round(f_peaks, 3).tolist()} "
           f"vs window edges {left:.4f}, {right:.4f} (cell {g2.step:.3f})")


# -- 6 ------------------------------------------------------------------------

WINDOW = Grid1D(0.40, 0.42, 2000)
# 4x refinement with every coarse sample kept: 4 * (2000 - 1) + 1 cells
WINDOW_FINE = Grid1D(0.40, 0.42, 7997)


def chaotic_profiles():
    if "c6" not in _cache:
        p = base(-0.012)
        att = detect_attractor(SEED, p)
        coarse = profile_1d(p, WINDOW, 0.2, attractor=att)
        fine = profile_1d(p, WINDOW_FINE, 0.2, attractor=att)
        _cache["c6"] = (coarse, fine)
    return _cache["c6"]


@slow
def test_criterion_6a_chaotic_window_peak_count():
    coarse, _ = chaotic_profiles()
    n = len(detect_peaks(coarse))
    record("6a chaotic window peaks", n >= 20, f"{n} strict peaks at 2000 cells (>= 20)")


@slow
def test_criterion_6b_chaotic_window_refinement():
    coarse, fine = chaotic_profiles()
    # the fine grid contains every coarse sample
    assert np.array_equal(fine.counts[::4], coarse.counts)
    d_coarse = float(np.mean(np.abs(np.diff(coarse.counts))))
    d_fine = float(np.mean(np.abs(np.diff(fine.counts))))
    record("6b chaotic window refinement", d_fine >= d_coarse,
           f"mean |dN| {d_coarse:.2f} at 2000 cells -> {d_fine:.2f} at 7997 cells (must not decrease)")


@slow
def test_criterion_6c_peak_section_disorder():
    coarse, _ = chaotic_profiles()
    pairs = np.array(peak_poincare_section(coarse))
    rho = spearmanr(pairs[:, 0], pairs[:, 1]).statistic
    record("6c peak Poincare section", abs(rho) < 0.5,
           f"Spearman rho of (N_j, N_j+1) over {len(pairs)} pairs = {rho:.3f} (|rho| < 0.5)")


# -- 7 ------------------------------------------------------------------------

def test_criterion_7a_monodromy_vs_finite_differences():
    rng = np.random.default_rng(2024)
    worst = 0.0
    h = 1e-6
    for _ in range(100):
        x = (rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.4))
        p = ReactorParams(f=rng.uniform(0.30, 0.50), theta_H=rng.uniform(-0.012, -0.001))
        _, jac = recycle_map(x, p, with_monodromy=True)
        fd = np.empty((2, 2))
        for j in range(2):
            up, dn = list(x), list(x)
            up[j] += h
            dn[j] -= h
            fd[:, j] = (np.array(recycle_map(up, p)[0]) - np.array(recycle_map(dn, p)[0])) / (2 * h)
        worst = max(worst, float(np.abs(jac - fd).max() / np.abs(jac).max()))
    record("7a monodromy vs FD", worst < 1e-4, f"worst relative error {worst:.2e} over 100 points (< 1e-4)")


def test_criterion_7b_relaxation_closed_form():
    p = ReactorParams(Da=0.0, f=0.427, delta=3.0, theta_H=-0.001)
    exit_theta = integrate_pass(ReactorState(0.0, 0.2), p, IntegratorConfig(1000)).exit.theta
    exact = p.theta_H + (0.2 - p.theta_H) * math.exp(-(1 - p.f) * p.delta)
    err = abs(exit_theta - exact)
    record("7b Da=0 closed form", err < 1e-8, f"|error| {err:.2e} at 1000 steps (< 1e-8)")


def test_criterion_7c_rk4_order():
    p = ReactorParams()
    inlet = ReactorState(0.42, 0.08)
    ref = np.array(integrate_pass(inlet, p, IntegratorConfig(4000)).exit)
    e1 = np.abs(np.array(integrate_pass(inlet, p, IntegratorConfig(200)).exit) - ref).max()
    e2 = np.abs(np.array(integrate_pass(inlet, p, IntegratorConfig(400)).exit) - ref).max()
    ratio = e1 / e2
    record("7c RK4 order", abs(ratio - 16) <= 3, f"error ratio under step halving {ratio:.2f} (16 +- 3)")


@slow
def test_criterion_7de_orbit_closure_and_zero_count():
    grid = Grid1D(0.30, 0.55, 11)
    worst, nonzero, total = 0.0, 0, 0
    for th in (-0.001, -0.002, -0.012):
        series = bifurcation_diagram(base(th), grid)
        for f, att in zip(grid.values, series.attractors):
            assert att is not None
            p = base(th, f=float(f))
            k = att.period
            for i, pt in enumerate(att.orbit):
                nxt, _ = recycle_map(pt, p)
                worst = max(worst, convergence_distance(nxt, att.orbit[(i + 1) % k]))
                nonzero += count_iterations(pt, att, p) != 0
                total += 1
    ok = worst < 1e-8 and nonzero == 0
    record("7d/7e orbit closure, N=0 on orbits", ok,
           f"worst closure {worst:.1e}% (< 1e-8%); {nonzero}/{total} orbit points with N != 0")


# -- 8 ------------------------------------------------------------------------

SMALL = {
    "transient": "1000", "continuation_transient": "200",
    "alpha0_count": "9", "theta0_count": "4",
    "f_start": "0.40", "f_stop": "0.44", "f_count": "3",
    "theta_H_start": "-0.002", "theta_H_stop": "-0.001", "theta_H_count": "2",
}
PER_COMMAND = {
    "eigenvalues": {"k_expected": "2", "theta_H": "-0.002"},
    "profile2d": {"theta_H": "-0.012"},
    "peaks": {"theta_H": "-0.012", "alpha0_start": "0.40", "alpha0_stop": "0.42", "alpha0_count": "120"},
    "poincare-peaks": {"theta_H": "-0.012", "alpha0_start": "0.40", "alpha0_stop": "0.42", "alpha0_count": "120"},
    "fb-window": {"theta_H": "-0.002", "tol": "0.01", "fb_scan": "5"},
}


@slow
def test_criterion_8_determinism(tmp_path):
    bad = []
    for cmd in SUBCOMMANDS:
        outputs = {}
        for tag, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            over = dict(SMALL, **PER_COMMAND.get(cmd, {}), workers=workers, out=str(tmp_path / f"{cmd}-{tag}"))
            paths = run(cmd, parse_config("", over))
            outputs[tag] = {p.suffix: p.read_bytes() for p in paths if not p.name.endswith(".manifest.txt")}
        if not (outputs["a"] == outputs["b"] == outputs["c"]):
            bad.append(f"{cmd}: outputs differ")
        if not replay_manifest(tmp_path / f"{cmd}-a.manifest.txt", str(tmp_path / f"{cmd}-replay")):
            bad.append(f"{cmd}: manifest replay checksum mismatch")
    record("8 determinism", not bad,
           f"{len(SUBCOMMANDS)} subcommands x (2 runs, workers 1/4, manifest replay): "
           + ("all byte-identical" if not bad else "; ".join(bad)))
