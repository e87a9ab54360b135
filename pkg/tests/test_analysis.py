import numpy as np
import pytest

from recycle_reactor import (
    Grid1D,
    ReactorParams,
    StoppingCriterion,
    bifurcation_diagram,
    classify_grid,
    count_iterations,
    detect_peaks,
    eigenvalue_curve,
    fb_window,
    peak_poincare_section,
    profile_1d,
    profile_2d,
    tree_profile,
)
from recycle_reactor.errors import InvariantViolation, TooFewPeaks, WindowNotBracketed

from conftest import base


def test_grid_values_include_endpoints():
    g = Grid1D(0.0, 1.0, 5)
    np.testing.assert_array_equal(g.values, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert g.step == 0.25
    assert list(Grid1D.point(0.3).values) == [0.3]


@pytest.mark.parametrize("args", [(1.0, 0.0, 3), (0.0, 1.0, 0), (0.0, 1.0, 1)])
def test_grid_invariants(args):
    with pytest.raises(InvariantViolation):
        Grid1D(*args)


@pytest.mark.parametrize(
    "counts, expected",
    [([1, 5, 1], [1]), ([3, 3, 3], []), ([1, 4, 4, 1], []), ([0, 2, 1, 3, 0], [1, 3])],
)
def test_detect_peaks_strict_maxima(counts, expected):
    assert detect_peaks(counts) == expected


def test_detect_peaks_prominence_filters_ripples():
    counts = [0, 2, 1, 30, 29, 31, 0]
    # indices 1 and 3 each rise only 1 above the saddle towards a higher peak
    assert detect_peaks(counts, prominence=1) == [1, 3, 5]
    assert detect_peaks(counts, prominence=2) == [5]
    assert detect_peaks(counts, prominence=31) == [5]
    assert detect_peaks(counts, prominence=32) == []


def test_detect_peaks_needs_three_cells():
    with pytest.raises(ValueError):
        detect_peaks([1, 2])


def test_peak_section_pairs():
    assert peak_poincare_section([0, 10, 0, 40, 0, 25, 0]) == [(10, 40), (40, 25)]


def test_peak_section_monotone_profile():
    with pytest.raises(TooFewPeaks):
        peak_poincare_section(list(range(10)))


def test_bifurcation_two_cell_sweep_matches_independent_detection():
    p = base(-0.002)
    series = bifurcation_diagram(p, Grid1D(0.30, 0.427, 2))
    assert list(series.periods) == [1, 2]
    assert len(series.branches[0]) == 1 and len(series.branches[1]) == 2


def test_eigenvalue_curve_without_reaction():
    p = ReactorParams(Da=0.0)
    curve = eigenvalue_curve(p, Grid1D(0.2, 0.6, 3), 1, transient=200, continuation_transient=50)
    for f, (m1, m2) in zip(curve.f_axis.values, curve.moduli):
        assert m1 == pytest.approx(f, rel=1e-9)
        assert m2 == pytest.approx(f * np.exp(-(1 - f) * p.delta), rel=1e-9)
    assert not curve.flagged.any()


def test_eigenvalue_curve_flags_period_mismatch():
    curve = eigenvalue_curve(base(-0.002), Grid1D(0.30, 0.427, 2), k_expected=2)
    assert list(curve.periods) == [1, 2]
    assert list(curve.flagged) == [True, False]
    # period-1 cell reports the squared multipliers of the 2-fold map
    single = eigenvalue_curve(base(-0.002), Grid1D.point(0.30), k_expected=1)
    assert curve.moduli[0, 0] == pytest.approx(single.moduli[0, 0] ** 2, rel=1e-9)


def test_fb_window_absent_in_stationary_regime():
    with pytest.raises(WindowNotBracketed):
        fb_window(base(-0.001), 0.30, 0.55, k_from=1, tol=1e-2, scan=9)


def test_profile_zero_at_attractor(stationary):
    p, att = stationary
    a = att.orbit[0].alpha1
    prof = profile_1d(p, Grid1D(a, 1.0, 2), theta0=att.orbit[0].theta1, attractor=att)
    assert prof.counts[0] == 0


def test_profile_1d_matches_pointwise_counts(stationary):
    p, att = stationary
    grid = Grid1D(0.0, 1.0, 5)
    prof = profile_1d(p, grid, 0.2)
    expected = [count_iterations((a, 0.2), att, p) for a in grid.values]
    assert list(prof.counts) == expected


def test_profile_2d_single_cell(two_periodic):
    p, att = two_periodic
    grid = profile_2d(p, Grid1D.point(0.3), Grid1D.point(0.1), attractor=att)
    assert grid.counts.shape == (1, 1)
    assert grid.counts[0, 0] == count_iterations((0.3, 0.1), att, p)


def test_profile_2d_zoom_consistency(two_periodic):
    p, att = two_periodic
    full = profile_2d(p, Grid1D(0.0, 1.0, 9), Grid1D(0.0, 0.4, 5), attractor=att)
    sub = profile_2d(p, Grid1D(0.25, 0.75, 5), Grid1D(0.1, 0.3, 3), attractor=att)
    fx, fy = full.x_axis.values, full.y_axis.values
    matched = 0
    for j, y in enumerate(sub.y_axis.values):
        for i, x in enumerate(sub.x_axis.values):
            jj, ii = np.flatnonzero(fy == y), np.flatnonzero(fx == x)
            if jj.size and ii.size:
                assert sub.counts[j, i] == full.counts[jj[0], ii[0]]
                matched += 1
    assert matched >= 9


def test_worker_count_invariance(four_periodic):
    p, att = four_periodic
    grid = Grid1D(0.0, 1.0, 70)
    one = profile_1d(p, grid, 0.2, attractor=att, workers=1)
    four = profile_1d(p, grid, 0.2, attractor=att, workers=4)
    assert np.array_equal(one.counts, four.counts)


def test_tree_columns_equal_profiles():
    p = base(-0.002)
    fg, ag = Grid1D(0.40, 0.44, 2), Grid1D(0.0, 1.0, 4)
    tree = tree_profile(p, fg, ag, 0.2)
    for i, f in enumerate(fg.values):
        col = profile_1d(p.with_(f=float(f)), ag, 0.2)
        assert np.array_equal(tree.counts[:, i], col.counts)
        assert tree.periods[i] == col.attractor.period


def test_tree_marks_failed_columns():
    crit = StoppingCriterion(n_max=50)
    # k_max = 2 cannot represent the four-periodic attractor at f = 0.40
    tree = tree_profile(base(-0.012), Grid1D(0.40, 0.41, 2), Grid1D(0.0, 1.0, 3), 0.2,
                        criterion=crit, transient=1000, k_max=2)
    assert list(tree.periods) == [0, 0]
    assert (tree.counts == crit.n_max).all()


def test_classify_rows():
    grid = classify_grid(Grid1D(-0.012, -0.001, 2), Grid1D(0.30, 0.427, 2))
    assert grid.periods.shape == (2, 2)
    assert list(grid.periods[1]) == [1, 1]
    assert grid.periods[0, 1] == 4
    assert grid.stable.all()
