"""The recycle iteration map and its periodic attractors.

One application of the map feeds ``f`` times the outlet state back to the
inlet and integrates one pass.  A period-k attractor is refined by Newton
shooting on ``P^k(x) - x``; its stability follows from the eigenvalues of
``f^k M_k ... M_1``, the Jacobian of the k-fold map.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import NewtonDivergence, NoPeriodicAttractor, ReactorError
from .reactor import (
    OK,
    IntegratorConfig,
    ReactorParams,
    _integrate_full,
    _integrate_state,
    raise_for_status,
)

__all__ = [
    "ExitState",
    "Attractor",
    "StoppingCriterion",
    "recycle_map",
    "map_power_jacobian",
    "eigenvalues_2x2",
    "convergence_distance",
    "detect_attractor",
    "count_iterations",
    "count_iterations_batch",
]

log = logging.getLogger(__name__)

DEFAULT_CONFIG = IntegratorConfig()

# recurrence tolerance (percent) used to guess the period before refinement
RECURRENCE_PERCENT = 0.01
# two refined orbit points closer than this (percent) are the same point
COINCIDENCE_PERCENT = 1e-6
NEWTON_TOL = 1e-12
NEWTON_MAX_STEPS = 50
# offsets along the flip eigenvector tried when switching to a doubled orbit
BRANCH_OFFSETS = (3e-2, 1e-2, 3e-3, 1e-3, 3e-4)


class ExitState(NamedTuple):
    """Outlet state ``(alpha(1), theta(1))`` of one pass."""

    alpha1: float
    theta1: float


@dataclass(frozen=True)
class StoppingCriterion:
    epsilon_percent: float = 0.001
    n_max: int = 100_000
    denom_floor: float = 1e-9

    def __post_init__(self):
        from .errors import InvariantViolation

        if not self.epsilon_percent > 0:
            raise InvariantViolation(f"epsilon_percent > 0 required, got {self.epsilon_percent}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvariantViolation(f"n_max must be an integer >= 1, got {self.n_max}")
        if not self.denom_floor > 0:
            raise InvariantViolation(f"denom_floor > 0 required, got {self.denom_floor}")


DEFAULT_CRITERION = StoppingCriterion()


@dataclass(frozen=True)
class Attractor:
    """A periodic attractor of the recycle map.

    ``orbit[0]`` is the refined fixed point of the k-fold map and
    ``orbit[i]`` its i-th image.  ``eigenvalues`` are those of the k-fold map
    Jacobian, sorted by descending modulus.
    """

    period: int
    orbit: tuple[ExitState, ...]
    eigenvalues: tuple[complex, complex]
    stable: bool

    @property
    def orbit_array(self) -> np.ndarray:
        return np.array(self.orbit, dtype=float).reshape(-1, 2)

    @property
    def moduli(self) -> tuple[float, float]:
        return abs(self.eigenvalues[0]), abs(self.eigenvalues[1])


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True, nogil=True)
def _distance(a, t, sa, st, floor):
    return (abs(a - sa) / max(abs(sa), floor) + abs(t - st) / max(abs(st), floor)) * 100.0


@njit(cache=True, nogil=True)
def _nearest_distance(a, t, orbit, floor):
    best = np.inf
    for i in range(orbit.shape[0]):
        d = _distance(a, t, orbit[i, 0], orbit[i, 1], floor)
        if d < best:
            best = d
    return best


@njit(cache=True, nogil=True)
def _iterate(a, t, p, steps, count):
    f = p[6]
    for _ in range(count):
        st, a, t = _integrate_state(f * a, f * t, p, steps)
        if st != OK:
            return st, a, t
    return OK, a, t


@njit(cache=True, nogil=True)
def _trajectory(a, t, p, steps, count, out):
    """Fill ``out[0..count]`` with the state and its ``count`` images."""
    f = p[6]
    out[0, 0] = a
    out[0, 1] = t
    for i in range(count):
        st, a, t = _integrate_state(f * a, f * t, p, steps)
        if st != OK:
            return st
        out[i + 1, 0] = a
        out[i + 1, 1] = t
    return OK


@njit(cache=True, nogil=True)
def _count(a, t, orbit, p, steps, eps, floor, n_max):
    f = p[6]
    for n in range(n_max):
        if _nearest_distance(a, t, orbit, floor) < eps:
            return OK, n
        st, a, t = _integrate_state(f * a, f * t, p, steps)
        if st != OK:
            return st, n
    return OK, n_max


@njit(cache=True, nogil=True)
def _count_batch(starts, orbit, p, steps, eps, floor, n_max, counts, status):
    for i in range(starts.shape[0]):
        st, n = _count(starts[i, 0], starts[i, 1], orbit, p, steps, eps, floor, n_max)
        counts[i] = n
        status[i] = st


# ---------------------------------------------------------------------------
# map and linearization


def recycle_map(
    x: Sequence[float],
    params: ReactorParams,
    config: IntegratorConfig = DEFAULT_CONFIG,
    with_monodromy: bool = False,
) -> tuple[ExitState, np.ndarray | None]:
    """Apply the recycle boundary condition and integrate one pass.

    The optional matrix is ``f * M``: the Jacobian of the one-pass map,
    recycle scaling included.
    """
    p = params.as_tuple()
    f = params.f
    a, t = f * float(x[0]), f * float(x[1])
    if with_monodromy:
        y = np.empty(6)
        raise_for_status(_integrate_full(a, t, p, int(config.steps), y), "recycle_map")
        return ExitState(float(y[0]), float(y[1])), f * y[2:].reshape(2, 2)
    st, a, t = _integrate_state(a, t, p, int(config.steps))
    raise_for_status(st, "recycle_map")
    return ExitState(float(a), float(t)), None


def _orbit_and_jacobian(x, k: int, params: ReactorParams, config: IntegratorConfig):
    """Return the k+1 states ``x, P(x), ..., P^k(x)`` and the k-fold Jacobian."""
    states = [ExitState(float(x[0]), float(x[1]))]
    jac = np.eye(2)
    for _ in range(k):
        nxt, m = recycle_map(states[-1], params, config, with_monodromy=True)
        jac = m @ jac
        states.append(nxt)
    return states, jac


def map_power_jacobian(
    orbit: Sequence[Sequence[float]],
    params: ReactorParams,
    config: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Jacobian ``f^k M_k ... M_1`` of the k-fold map along ``orbit``.

    Pass j is started from the inlet ``f * orbit[j-1]``; ``k = len(orbit)``.
    """
    jac = np.eye(2)
    for x in orbit:
        _, m = recycle_map(x, params, config, with_monodromy=True)
        jac = m @ jac
    return jac


def eigenvalues_2x2(m) -> tuple[complex, complex]:
    """Eigenvalues of a real 2x2 matrix, by descending modulus then real part."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    half = 0.5 * tr
    disc = half * half - det
    if disc >= 0.0:
        # avoid cancellation: take the larger-magnitude root first
        r1 = half + math.copysign(math.sqrt(disc), half)
        r2 = det / r1 if r1 != 0.0 else 0.0
        roots = [complex(r1), complex(r2)]
    else:
        im = math.sqrt(-disc)
        roots = [complex(half, im), complex(half, -im)]
    roots.sort(key=lambda z: (-abs(z), -z.real, -z.imag))
    return roots[0], roots[1]


def convergence_distance(x, target, denom_floor: float = DEFAULT_CRITERION.denom_floor) -> float:
    """Relative distance in percent between ``x`` and the reference ``target``."""
    return float(_distance(float(x[0]), float(x[1]), float(target[0]), float(target[1]), denom_floor))


# ---------------------------------------------------------------------------
# attractors


def _newton(x0, k: int, params: ReactorParams, config: IntegratorConfig):
    x = np.array(x0, dtype=float)
    eye = np.eye(2)
    for _ in range(NEWTON_MAX_STEPS + 1):
        try:
            states, jac = _orbit_and_jacobian(x, k, params, config)
        except ReactorError as exc:
            raise NewtonDivergence(f"period-{k} Newton left the domain: {exc}") from exc
        residual = np.array(states[-1]) - x
        if np.linalg.norm(residual) < NEWTON_TOL:
            return states[:-1], jac
        try:
            x = x - np.linalg.solve(jac - eye, residual)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular period-{k} Newton matrix") from exc
        if not np.all(np.isfinite(x)):
            raise NewtonDivergence(f"period-{k} Newton produced a non-finite iterate")
    raise NewtonDivergence(
        f"period-{k} Newton did not reach residual {NEWTON_TOL:g} in {NEWTON_MAX_STEPS} steps"
    )


def _minimal_period(orbit, floor: float) -> int:
    k = len(orbit)
    for d in range(1, k):
        if k % d == 0 and _distance(orbit[d][0], orbit[d][1], orbit[0][0], orbit[0][1], floor) < COINCIDENCE_PERCENT:
            return d
    return k


def _refine(x, k: int, params, config, floor: float) -> Attractor:
    orbit, jac = _newton(x, k, params, config)
    d = _minimal_period(orbit, floor)
    if d < k:
        orbit, jac = _newton(orbit[0], d, params, config)
        k = d
    ev = eigenvalues_2x2(jac)
    return Attractor(k, tuple(orbit), ev, bool(abs(ev[0]) < 1.0 and abs(ev[1]) < 1.0))


def _recurrence_period(x, params, config, k_max: int, floor: float) -> int:
    traj = np.empty((k_max + 1, 2))
    raise_for_status(_trajectory(x[0], x[1], params.as_tuple(), int(config.steps), k_max, traj), "detect_attractor")
    for k in range(1, k_max + 1):
        if _distance(traj[k, 0], traj[k, 1], traj[0, 0], traj[0, 1], floor) < RECURRENCE_PERCENT:
            return k
    raise NoPeriodicAttractor(f"no period <= {k_max} recurs within {RECURRENCE_PERCENT}%")


def _advance(x, params, config, count: int):
    st, a, t = _iterate(float(x[0]), float(x[1]), params.as_tuple(), int(config.steps), int(count))
    raise_for_status(st, "detect_attractor transient")
    return a, t


def _switch_branch(att: Attractor, params, config, floor: float, k_max: int) -> Attractor | None:
    """Look for the period-doubled orbit born at a flip of ``att``.

    Close to a flip the doubled orbit attracts too weakly to be reached by
    iteration; Newton on the 2k-fold map seeded just outside it along the
    flip eigenvector converges to it instead of the unstable orbit.
    """
    lead = att.eigenvalues[0]
    k2 = 2 * att.period
    if k2 > k_max or lead.imag != 0.0 or lead.real > -1.0:
        return None
    jac = map_power_jacobian(att.orbit, params, config)
    w, v = np.linalg.eig(jac)
    vec = np.real(v[:, int(np.argmin(np.abs(w - lead.real)))])
    base = np.array(att.orbit[0])
    for offset in BRANCH_OFFSETS:
        try:
            cand = _refine(base + offset * vec, k2, params, config, floor)
        except NewtonDivergence:
            continue
        if cand.period == k2 and cand.stable:
            return cand
    return None


def detect_attractor(
    seed: Sequence[float],
    params: ReactorParams,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
    transient: int = 5000,
    k_max: int = 64,
) -> Attractor:
    """Find the periodic attractor reached from ``seed``.

    The map is iterated ``transient`` times, the smallest recurring period
    ``k <= k_max`` is read off under a loose 0.01 % tolerance and the orbit is
    then refined by Newton shooting.  An unstable refined orbit that has just
    lost stability through a flip is traded for the period-doubled orbit.
    Otherwise, if refinement diverges or stays unstable, the transient is
    extended tenfold (from a slightly perturbed state) and detection retried
    once.

    Raises
    ------
    NoPeriodicAttractor
        No period up to ``k_max`` recurs.
    NewtonDivergence
        Refinement failed on both attempts.
    """
    if transient < 0 or k_max < 1:
        raise ValueError("transient >= 0 and k_max >= 1 required")
    floor = criterion.denom_floor
    x = _advance(seed, params, config, transient)
    last: Attractor | None = None
    for attempt in range(2):
        k = _recurrence_period(x, params, config, k_max, floor)
        try:
            att = _refine(x, k, params, config, floor)
            if not att.stable:
                doubled = _switch_branch(att, params, config, floor, k_max)
                if doubled is not None:
                    att = doubled
            if att.stable:
                return att
            last = att
        except NewtonDivergence:
            if attempt == 1:
                raise
        log.debug("attractor refinement retry at f=%g theta_H=%g", params.f, params.theta_H)
        # nudge off a possibly unstable orbit before the longer transient
        x = _advance((x[0] * (1.0 - 1e-7), x[1] * (1.0 + 1e-7)), params, config, max(10 * transient, 1000))
    return last


def count_iterations(
    start: Sequence[float],
    attractor: Attractor,
    params: ReactorParams,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
) -> int:
    """Number of map applications until ``start`` is within epsilon of the attractor.

    The distance is measured to the nearest orbit point.  Returns
    ``criterion.n_max`` when the criterion is never met.
    """
    if not attractor.stable:
        raise ValueError("count_iterations requires a stable attractor")
    st, n = _count(
        float(start[0]),
        float(start[1]),
        attractor.orbit_array,
        params.as_tuple(),
        int(config.steps),
        float(criterion.epsilon_percent),
        float(criterion.denom_floor),
        int(criterion.n_max),
    )
    raise_for_status(st, "count_iterations")
    return int(n)


def count_iterations_batch(
    starts: np.ndarray,
    attractor: Attractor,
    params: ReactorParams,
    config: IntegratorConfig = DEFAULT_CONFIG,
    criterion: StoppingCriterion = DEFAULT_CRITERION,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`count_iterations` over an ``(m, 2)`` array of starts.

    Returns ``(counts, status)``; a nonzero status marks a cell whose
    trajectory left the integrable domain (its count is where it stopped).
    Runs without the GIL.
    """
    starts = np.ascontiguousarray(starts, dtype=float).reshape(-1, 2)
    counts = np.empty(starts.shape[0], dtype=np.int64)
    status = np.empty(starts.shape[0], dtype=np.int64)
    _count_batch(
        starts,
        attractor.orbit_array,
        params.as_tuple(),
        int(config.steps),
        float(criterion.epsilon_percent),
        float(criterion.denom_floor),
        int(criterion.n_max),
        counts,
        status,
    )
    return counts, status
