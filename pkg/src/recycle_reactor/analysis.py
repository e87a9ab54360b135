"""Parameter sweeps and iteration-count profiles.

Everything here is a driver around :mod:`recycle_reactor.itermap`:
bifurcation diagrams and multiplier curves over the recycle coefficient,
flip-window bisection, 1-D/2-D iteration-count profiles, profile trees,
peak extraction and the peak return map.

Grid cells are independent once the attractor is known, so profile drivers
accept ``workers``; cells are processed in fixed-size chunks and assembled
in index order, which keeps results identical for any worker count.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import peak_prominences

from .errors import (
    InvariantViolation,
    NoPeriodicAttractor,
    ReactorError,
    TooFewPeaks,
    WindowNotBracketed,
)
from .itermap import (
    DEFAULT_CONFIG,
    DEFAULT_CRITERION,
    Attractor,
    StoppingCriterion,
    count_iterations_batch,
    detect_attractor,
    eigenvalues_2x2,
    map_power_jacobian,
)
from .reactor import IntegratorConfig, ReactorParams

log = logging.getLogger(__name__)

__all__ = [
    "Grid1D",
    "NGrid",
    "BifurcationSeries",
    "EigenvalueCurve",
    "ClassGrid",
    "bifurcation_diagram",
    "eigenvalue_curve",
    "fb_window",
    "profile_1d",
    "tree_profile",
    "profile_2d",
    "detect_peaks",
    "peak_poincare_section",
    "classify_grid",
]

DEFAULT_SEED = (0.5, 0.2)
# cells per work unit; fixed so that results never depend on the worker count
CHUNK = 32


@dataclass(frozen=True)
class Grid1D:
    """``count`` evenly spaced samples from ``start`` to ``stop`` inclusive.

    A single-sample grid (``count == 1``, ``start == stop``) is allowed.
    """

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise InvariantViolation(f"grid count must be a positive integer, got {self.count!r}")
        if self.count == 1:
            if self.start != self.stop:
                raise InvariantViolation("a single-sample grid needs start == stop")
        elif not self.start < self.stop:
            raise InvariantViolation(f"grid needs start < stop, got {self.start} >= {self.stop}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

    @property
    def step(self) -> float:
        return 0.0 if self.count == 1 else (self.stop - self.start) / (self.count - 1)

    @classmethod
    def point(cls, value: float) -> "Grid1D":
        return cls(value, value, 1)

    def __len__(self):
        return int(self.count)


@dataclass
class NGrid:
    """Iteration counts over one or two axes.

    ``counts`` has shape ``(len(x_axis),)`` for 1-D profiles and
    ``(len(y_axis), len(x_axis))`` otherwise, so ``counts[j, i]`` belongs
    to ``(x_i, y_j)``.  For trees ``periods[i]`` is the period detected in
    column ``i`` (0 where detection failed; that column is all ``n_max``).
    """

    x_axis: Grid1D
    counts: np.ndarray
    params: ReactorParams
    criterion: StoppingCriterion
    config: IntegratorConfig
    x_name: str = "alpha0"
    y_axis: Grid1D | None = None
    y_name: str | None = None
    attractor: Attractor | None = None
    periods: np.ndarray | None = None
    fixed: dict = field(default_factory=dict)

    @property
    def ndim(self) -> int:
        return 1 if self.y_axis is None else 2

    @property
    def n_max(self) -> int:
        return int(self.criterion.n_max)


@dataclass
class BifurcationSeries:
    f_axis: Grid1D
    branches: list[tuple[float, ...]]
    periods: np.ndarray
    stable: np.ndarray
    params: ReactorParams
    attractors: list[Attractor | None] = field(repr=False, default_factory=list)


@dataclass
class EigenvalueCurve:
    """Eigenvalue moduli of the ``k_expected``-fold map along an f sweep.

    ``flagged[i]`` marks cells whose detected period is not ``k_expected``.
    Where the detected period divides ``k_expected`` the moduli are still
    those of the ``k_expected``-fold map; otherwise (or on failure, where
    they are NaN) they belong to the detected period.
    """

    f_axis: Grid1D
    k_expected: int
    moduli: np.ndarray
    periods: np.ndarray
    flagged: np.ndarray
    params: ReactorParams

    @property
    def leading(self) -> np.ndarray:
        return self.moduli[:, 0]


@dataclass
class ClassGrid:
    """Attractor period and stability over a ``(theta_H, f)`` grid (period 0: failed)."""

    theta_H_axis: Grid1D
    f_axis: Grid1D
    periods: np.ndarray
    stable: np.ndarray
    params: ReactorParams


def _as_grid(grid) -> Grid1D:
    if isinstance(grid, Grid1D):
        return grid
    start, stop, count = grid
    return Grid1D(float(start), float(stop), int(count))


def _try_detect(seed, params, config, criterion, transient, k_max):
    try:
        return detect_attractor(seed, params, config, criterion, transient=transient, k_max=k_max)
    except ReactorError as exc:
        log.debug("no attractor at f=%g theta_H=%g: %s", params.f, params.theta_H, exc)
        return None


def _continuation(params_base, f_values, seed, config, criterion, transient, continuation_transient, k_max):
    """Detect attractors along ``f_values``, seeding each from the previous orbit."""
    out = []
    prev = None
    for f in f_values:
        params = params_base.with_(f=float(f))
        att = None
        if prev is not None:
            att = _try_detect(prev.orbit[0], params, config, criterion, continuation_transient, k_max)
        if att is None:
            att = _try_detect(seed, params, config, criterion, transient, k_max)
        out.append(att)
        prev = att if att is not None else prev
    return out


def bifurcation_diagram(
    params_base: ReactorParams,
    f_grid: Grid1D,
    seed: Sequence[float] = DEFAULT_SEED,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    transient: int = 5000,
    continuation_transient: int = 500,
    k_max: int = 64,
) -> BifurcationSeries:
    """Asymptotic outlet conversions against the recycle coefficient.

    A cell whose detection fails gets period 0 and an empty branch tuple.
    """
    f_grid = _as_grid(f_grid)
    atts = _continuation(params_base, f_grid.values, seed, config, criterion, transient, continuation_transient, k_max)
    branches = [tuple(p.alpha1 for p in a.orbit) if a else () for a in atts]
    periods = np.array([a.period if a else 0 for a in atts], dtype=np.int64)
    stable = np.array([bool(a and a.stable) for a in atts])
    return BifurcationSeries(f_grid, branches, periods, stable, params_base, atts)


def eigenvalue_curve(
    params_base: ReactorParams,
    f_grid: Grid1D,
    k_expected: int = 1,
    seed: Sequence[float] = DEFAULT_SEED,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    transient: int = 5000,
    continuation_transient: int = 500,
    k_max: int = 64,
) -> EigenvalueCurve:
    if k_expected < 1:
        raise ValueError("k_expected >= 1 required")
    f_grid = _as_grid(f_grid)
    atts = _continuation(params_base, f_grid.values, seed, config, criterion, transient, continuation_transient, k_max)
    moduli = np.full((len(atts), 2), np.nan)
    periods = np.zeros(len(atts), dtype=np.int64)
    for i, (f, att) in enumerate(zip(f_grid.values, atts)):
        if att is None:
            continue
        periods[i] = att.period
        if att.period == k_expected:
            ev = att.eigenvalues
        elif k_expected % att.period == 0:
            orbit = list(att.orbit) * (k_expected // att.period)
            ev = eigenvalues_2x2(map_power_jacobian(orbit, params_base.with_(f=float(f)), config))
        else:
            ev = att.eigenvalues
        moduli[i] = abs(ev[0]), abs(ev[1])
    return EigenvalueCurve(f_grid, k_expected, moduli, periods, periods != k_expected, params_base)


def fb_window(
    params_base: ReactorParams,
    f_lo: float,
    f_hi: float,
    k_from: int = 1,
    tol: float = 1e-4,
    seed: Sequence[float] = DEFAULT_SEED,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    transient: int = 5000,
    k_max: int = 64,
    scan: int = 25,
) -> tuple[float, float]:
    """Edges of the period-doubled window inside ``[f_lo, f_hi]``.

    The bracket ends must carry period ``k_from``; a coarse scan of ``scan``
    interior points locates a cell whose period is a multiple of
    ``2 * k_from`` and each edge is then bisected to within ``tol``.  The
    returned edges are midpoints of the final bisection intervals.
    """
    if not f_lo < f_hi:
        raise ValueError("f_lo < f_hi required")

    def doubled(f: float) -> bool:
        att = _try_detect(seed, params_base.with_(f=float(f)), config, criterion, transient, k_max)
        if att is None:
            raise WindowNotBracketed(f"attractor detection failed at f={f}")
        return att.period % (2 * k_from) == 0

    def period(f: float) -> int:
        att = _try_detect(seed, params_base.with_(f=float(f)), config, criterion, transient, k_max)
        return 0 if att is None else att.period

    for end in (f_lo, f_hi):
        if period(end) != k_from:
            raise WindowNotBracketed(f"period at bracket end f={end} is not {k_from}")
    inside = None
    for f in np.linspace(f_lo, f_hi, scan + 2)[1:-1]:
        if doubled(f):
            inside = float(f)
            break
    if inside is None:
        raise WindowNotBracketed(f"no period-{2 * k_from} cell found in [{f_lo}, {f_hi}]")

    def bisect(a: float, b: float, a_in: bool) -> float:
        # invariant: doubled(a) == a_in and doubled(b) != a_in
        while b - a > tol:
            m = 0.5 * (a + b)
            if doubled(m) == a_in:
                a = m
            else:
                b = m
        return 0.5 * (a + b)

    return bisect(f_lo, inside, False), bisect(inside, f_hi, True)


def _count_cells(starts, attractor, params, config, criterion, workers: int) -> np.ndarray:
    starts = np.ascontiguousarray(starts, dtype=float).reshape(-1, 2)
    chunks = [starts[i:i + CHUNK] for i in range(0, starts.shape[0], CHUNK)]

    def run(chunk):
        return count_iterations_batch(chunk, attractor, params, config, criterion)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    if not results:
        return np.empty(0, dtype=np.int64)
    counts = np.concatenate([r[0] for r in results])
    status = np.concatenate([r[1] for r in results])
    bad = status != 0
    if bad.any():
        log.warning("%d cells left the integrable domain; recorded as n_max", int(bad.sum()))
        counts[bad] = criterion.n_max
    return counts


def _stable_attractor(seed, params, config, criterion, transient, k_max) -> Attractor:
    att = detect_attractor(seed, params, config, criterion, transient=transient, k_max=k_max)
    if not att.stable:
        raise NoPeriodicAttractor(
            f"period-{att.period} orbit at f={params.f} theta_H={params.theta_H} is not stable"
        )
    return att


def profile_1d(
    params: ReactorParams,
    alpha0_grid: Grid1D,
    theta0: float = 0.2,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    seed: Sequence[float] = DEFAULT_SEED,
    transient: int = 5000,
    k_max: int = 64,
    workers: int = 1,
    attractor: Attractor | None = None,
) -> NGrid:
    """Iteration count against the initial outlet conversion at fixed ``theta0``.

    The attractor is detected once (unless supplied) and shared by all cells.
    """
    alpha0_grid = _as_grid(alpha0_grid)
    if attractor is None:
        attractor = _stable_attractor(seed, params, config, criterion, transient, k_max)
    a = alpha0_grid.values
    starts = np.column_stack([a, np.full_like(a, theta0)])
    counts = _count_cells(starts, attractor, params, config, criterion, workers)
    return NGrid(
        alpha0_grid, counts, params, criterion, config,
        x_name="alpha0", attractor=attractor, fixed={"theta0": float(theta0)},
    )


def tree_profile(
    params_base: ReactorParams,
    f_grid: Grid1D,
    alpha0_grid: Grid1D,
    theta0: float = 0.2,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    seed: Sequence[float] = DEFAULT_SEED,
    transient: int = 5000,
    k_max: int = 64,
    workers: int = 1,
) -> NGrid:
    """One :func:`profile_1d` column per recycle coefficient.

    Returns an :class:`NGrid` with ``x_axis = f`` and ``y_axis = alpha0``.
    """
    f_grid = _as_grid(f_grid)
    alpha0_grid = _as_grid(alpha0_grid)
    counts = np.full((len(alpha0_grid), len(f_grid)), criterion.n_max, dtype=np.int64)
    periods = np.zeros(len(f_grid), dtype=np.int64)
    for i, f in enumerate(f_grid.values):
        params = params_base.with_(f=float(f))
        try:
            col = profile_1d(params, alpha0_grid, theta0, config, criterion, seed, transient, k_max, workers)
        except ReactorError as exc:
            log.warning("tree column f=%g failed: %s", f, exc)
            continue
        counts[:, i] = col.counts
        periods[i] = col.attractor.period
    return NGrid(
        f_grid, counts, params_base, criterion, config,
        x_name="f", y_axis=alpha0_grid, y_name="alpha0", periods=periods,
        fixed={"theta0": float(theta0)},
    )


def profile_2d(
    params: ReactorParams,
    alpha0_grid: Grid1D,
    theta0_grid: Grid1D,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    seed: Sequence[float] = DEFAULT_SEED,
    transient: int = 5000,
    k_max: int = 64,
    workers: int = 1,
    attractor: Attractor | None = None,
) -> NGrid:
    """Iteration count over a rectangle of initial conditions ``(alpha0, theta0)``."""
    alpha0_grid = _as_grid(alpha0_grid)
    theta0_grid = _as_grid(theta0_grid)
    if attractor is None:
        attractor = _stable_attractor(seed, params, config, criterion, transient, k_max)
    aa, tt = np.meshgrid(alpha0_grid.values, theta0_grid.values)
    starts = np.column_stack([aa.ravel(), tt.ravel()])
    counts = _count_cells(starts, attractor, params, config, criterion, workers)
    return NGrid(
        alpha0_grid, counts.reshape(len(theta0_grid), len(alpha0_grid)), params, criterion, config,
        x_name="alpha0", y_axis=theta0_grid, y_name="theta0", attractor=attractor,
    )


def _counts_1d(profile) -> np.ndarray:
    counts = profile.counts if isinstance(profile, NGrid) else profile
    counts = np.asarray(counts)
    if counts.ndim != 1:
        raise ValueError("a one-dimensional profile is required")
    return counts


def detect_peaks(profile, prominence: int = 1) -> list[int]:
    """Indices of strict local maxima with topographic prominence >= ``prominence``.

    Plateaus are not peaks.  Accepts a 1-D :class:`NGrid` or a plain sequence.
    """
    counts = _counts_1d(profile)
    if counts.size < 3:
        raise ValueError("a profile needs at least 3 cells")
    if prominence < 1:
        raise ValueError("prominence >= 1 required")
    c = counts.astype(np.int64)
    strict = np.flatnonzero((c[1:-1] > c[:-2]) & (c[1:-1] > c[2:])) + 1
    if strict.size == 0:
        return []
    prom = peak_prominences(c, strict)[0]
    return [int(i) for i in strict[prom >= prominence]]


def peak_poincare_section(profile, prominence: int = 1) -> list[tuple[int, int]]:
    """Consecutive peak heights ``(N_j, N_j+1)`` of a profile."""
    counts = _counts_1d(profile)
    peaks = detect_peaks(counts, prominence)
    if len(peaks) < 2:
        raise TooFewPeaks(f"{len(peaks)} peak(s) found, at least 2 needed")
    heights = [int(counts[i]) for i in peaks]
    return list(zip(heights[:-1], heights[1:]))


def classify_grid(
    theta_H_grid: Grid1D,
    f_grid: Grid1D,
    seed: Sequence[float] = DEFAULT_SEED,
    config: IntegratorConfig = DEFAULT_CONFIG,
    params_base: ReactorParams = ReactorParams(),
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    transient: int = 5000,
    continuation_transient: int = 500,
    k_max: int = 64,
) -> ClassGrid:
    """Period and stability of the attractor at every ``(theta_H, f)`` cell.

    Boundaries between period-k and period-2k cells trace the flip
    bifurcation locus.  Rows are continued along f.
    """
    theta_H_grid = _as_grid(theta_H_grid)
    f_grid = _as_grid(f_grid)
    periods = np.zeros((len(theta_H_grid), len(f_grid)), dtype=np.int64)
    stable = np.zeros(periods.shape, dtype=bool)
    for j, th in enumerate(theta_H_grid.values):
        row = bifurcation_diagram(
            params_base.with_(theta_H=float(th)), f_grid, seed, config, criterion,
            transient, continuation_transient, k_max,
        )
        periods[j] = row.periods
        stable[j] = row.stable
    return ClassGrid(theta_H_grid, f_grid, periods, stable, params_base)
