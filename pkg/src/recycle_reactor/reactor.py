"""Tubular reactor model: rate law, right-hand sides, Jacobian and one pass.

A pass integrates the axial balances over the dimensionless length
``xi in [0, 1]`` with fixed-step classical RK4.  Optionally the variational
equation ``dM/dxi = J M`` with ``M(0) = I`` is integrated alongside, with the
Jacobian evaluated at every RK4 stage.

The hot loop is compiled with numba (``nogil=True`` so sweeps may run it from
several threads).  Parameters travel into compiled code as the 7-tuple
``(Da, n, gamma, beta, delta, theta_H, f)``.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, replace
from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import DomainError, IntegrationDomainError, InvariantViolation, NonFiniteError

__all__ = [
    "ReactorParams",
    "ReactorState",
    "IntegratorConfig",
    "PassResult",
    "reaction_rate",
    "rhs",
    "rhs_jacobian",
    "integrate_pass",
]

# largest admissible Arrhenius exponent; exp(700) is still finite in float64
MAX_EXPONENT = 700.0

# kernel status codes
OK = 0
OUT_OF_DOMAIN = 1
EXPONENT_OVERFLOW = 2
NON_FINITE = 3


@dataclass(frozen=True)
class ReactorParams:
    """Model constants.  Defaults are the base case of the model study."""

    Da: float = 0.15
    n: float = 1.5
    gamma: float = 15.0
    beta: float = 2.0
    delta: float = 3.0
    theta_H: float = -0.001
    f: float = 0.427

    def __post_init__(self):
        for name, value in zip(("Da", "n", "gamma", "beta", "delta", "theta_H", "f"), astuple(self)):
            if not math.isfinite(value):
                raise InvariantViolation(f"{name} must be finite, got {value!r}")
        if self.Da < 0:
            raise InvariantViolation(f"Da >= 0 required, got {self.Da}")
        if self.n <= 0:
            raise InvariantViolation(f"n > 0 required, got {self.n}")
        if self.beta <= 0:
            raise InvariantViolation(f"beta > 0 required, got {self.beta}")
        if self.delta < 0:
            raise InvariantViolation(f"delta >= 0 required, got {self.delta}")
        if not 0.0 <= self.f < 1.0:
            raise InvariantViolation(f"0 <= f < 1 required, got {self.f}")

    def with_(self, **changes) -> "ReactorParams":
        return replace(self, **changes)

    def as_tuple(self) -> tuple:
        return tuple(float(v) for v in astuple(self))


class ReactorState(NamedTuple):
    alpha: float
    theta: float


@dataclass(frozen=True)
class IntegratorConfig:
    steps: int = 1000
    method: str = "rk4_fixed"

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvariantViolation(f"steps must be a positive integer, got {self.steps!r}")
        if self.method != "rk4_fixed":
            raise InvariantViolation(f"unsupported integrator method {self.method!r}")


@dataclass(frozen=True)
class PassResult:
    exit: ReactorState
    monodromy: np.ndarray | None = None


# ---------------------------------------------------------------------------
# compiled scalar kernels


@njit(cache=True, nogil=True)
def _power(base, expo):
    # sqrt is several times cheaper than pow for the common half-integer order
    if expo == 1.5:
        return base * math.sqrt(base)
    if expo == 0.5:
        return math.sqrt(base)
    if expo == 1.0:
        return base
    if expo == 2.0:
        return base * base
    if expo == 0.0:
        return 1.0
    return base ** expo


@njit(cache=True, nogil=True)
def _check(alpha, theta, p):
    """Status of a state with respect to the rate-law domain."""
    if not (math.isfinite(alpha) and math.isfinite(theta)):
        return NON_FINITE
    if 1.0 - alpha < 0.0 or 1.0 + p[3] * theta <= 0.0:
        return OUT_OF_DOMAIN
    if p[2] * p[3] * theta / (1.0 + p[3] * theta) > MAX_EXPONENT:
        return EXPONENT_OVERFLOW
    return OK


@njit(cache=True, nogil=True)
def _rate(alpha, theta, p):
    Da, n, gamma, beta = p[0], p[1], p[2], p[3]
    return Da * _power(1.0 - alpha, n) * math.exp(gamma * beta * theta / (1.0 + beta * theta))


@njit(cache=True, nogil=True)
def _rhs(alpha, theta, p):
    s = 1.0 - p[6]
    phi = _rate(alpha, theta, p)
    return s * phi, s * (phi + p[4] * (p[5] - theta))


@njit(cache=True, nogil=True)
def _jac(alpha, theta, p):
    """Jacobian entries (j11, j12, j21, j22) of the right-hand sides.

    d(phi)/d(alpha) is taken as -n Da (1-alpha)^(n-1) exp(.) so that it stays
    finite (and tends to 0) at alpha -> 1 whenever n > 1.
    """
    Da, n, gamma, beta, delta = p[0], p[1], p[2], p[3], p[4]
    s = 1.0 - p[6]
    om = 1.0 - alpha
    denom = 1.0 + beta * theta
    ex = math.exp(gamma * beta * theta / denom)
    phi = Da * _power(om, n) * ex
    d_alpha = -n * Da * _power(om, n - 1.0) * ex
    d_theta = phi * gamma * beta / (denom * denom)
    return s * d_alpha, s * d_theta, s * d_alpha, s * (d_theta - delta)


@njit(cache=True, nogil=True)
def _state_stage(a, t, p):
    st = _check(a, t, p)
    if st != OK:
        return st, 0.0, 0.0
    da, dt = _rhs(a, t, p)
    return OK, da, dt


@njit(cache=True, nogil=True)
def _integrate_state(a, t, p, steps):
    """One pass without the variational equation; returns (status, alpha, theta)."""
    h = 1.0 / steps
    for _ in range(steps):
        st, k1a, k1t = _state_stage(a, t, p)
        if st != OK:
            return st, a, t
        st, k2a, k2t = _state_stage(a + 0.5 * h * k1a, t + 0.5 * h * k1t, p)
        if st != OK:
            return st, a, t
        st, k3a, k3t = _state_stage(a + 0.5 * h * k2a, t + 0.5 * h * k2t, p)
        if st != OK:
            return st, a, t
        st, k4a, k4t = _state_stage(a + h * k3a, t + h * k3t, p)
        if st != OK:
            return st, a, t
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        t += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    st = _check(a, t, p)
    if st == EXPONENT_OVERFLOW:
        st = OK  # only stages evaluate the exponential
    return st, a, t


@njit(cache=True, nogil=True)
def _full_stage(y, p, out):
    a, t = y[0], y[1]
    st = _check(a, t, p)
    if st != OK:
        return st
    out[0], out[1] = _rhs(a, t, p)
    j11, j12, j21, j22 = _jac(a, t, p)
    out[2] = j11 * y[2] + j12 * y[4]
    out[3] = j11 * y[3] + j12 * y[5]
    out[4] = j21 * y[2] + j22 * y[4]
    out[5] = j21 * y[3] + j22 * y[5]
    return OK


@njit(cache=True, nogil=True)
def _integrate_full(a, t, p, steps, y):
    """One pass with the variational equation.

    ``y`` (length 6) receives ``(alpha, theta, m11, m12, m21, m22)``.
    Returns a status code.
    """
    h = 1.0 / steps
    y[0] = a
    y[1] = t
    y[2] = 1.0
    y[3] = 0.0
    y[4] = 0.0
    y[5] = 1.0
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    tmp = np.empty(6)
    for _ in range(steps):
        st = _full_stage(y, p, k1)
        if st != OK:
            return st
        for j in range(6):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        st = _full_stage(tmp, p, k2)
        if st != OK:
            return st
        for j in range(6):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        st = _full_stage(tmp, p, k3)
        if st != OK:
            return st
        for j in range(6):
            tmp[j] = y[j] + h * k3[j]
        st = _full_stage(tmp, p, k4)
        if st != OK:
            return st
        for j in range(6):
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    for j in range(6):
        if not math.isfinite(y[j]):
            return NON_FINITE
    if 1.0 - y[0] < 0.0 or 1.0 + p[3] * y[1] <= 0.0:
        return OUT_OF_DOMAIN
    return OK


def raise_for_status(status: int, where: str = "integration") -> None:
    if status == OK:
        return
    if status == NON_FINITE:
        raise NonFiniteError(f"{where}: state became non-finite")
    if status == EXPONENT_OVERFLOW:
        raise IntegrationDomainError(f"{where}: Arrhenius exponent exceeded {MAX_EXPONENT}")
    raise IntegrationDomainError(f"{where}: state left the domain alpha <= 1, 1 + beta*theta > 0")


# ---------------------------------------------------------------------------
# public API


def _validate_state(state, params: ReactorParams) -> None:
    alpha, theta = state
    if not (math.isfinite(alpha) and math.isfinite(theta)):
        raise DomainError(f"non-finite state {tuple(state)}")
    if 1.0 - alpha < 0.0:
        raise DomainError(f"alpha must not exceed 1, got {alpha}")
    if 1.0 + params.beta * theta <= 0.0:
        raise DomainError(f"1 + beta*theta must be positive, got {1.0 + params.beta * theta}")
    if params.gamma * params.beta * theta / (1.0 + params.beta * theta) > MAX_EXPONENT:
        raise DomainError("Arrhenius exponent overflow")


def reaction_rate(state: ReactorState, params: ReactorParams) -> float:
    """Rate law ``Da (1 - alpha)^n exp(gamma beta theta / (1 + beta theta))``."""
    _validate_state(state, params)
    return float(_rate(float(state[0]), float(state[1]), params.as_tuple()))


def rhs(state: ReactorState, params: ReactorParams) -> tuple[float, float]:
    """Axial derivatives ``(d alpha/d xi, d theta/d xi)``."""
    _validate_state(state, params)
    da, dt = _rhs(float(state[0]), float(state[1]), params.as_tuple())
    return float(da), float(dt)


def rhs_jacobian(state: ReactorState, params: ReactorParams) -> np.ndarray:
    """2x2 Jacobian of :func:`rhs` with respect to ``(alpha, theta)``.

    Requires ``alpha < 1``; at complete conversion the alpha-derivative of
    the rate law is singular for n < 1 and an indeterminate form otherwise.
    """
    _validate_state(state, params)
    if state[0] >= 1.0:
        raise DomainError("rhs_jacobian requires alpha < 1")
    j = _jac(float(state[0]), float(state[1]), params.as_tuple())
    out = np.array(j, dtype=float).reshape(2, 2)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"non-finite Jacobian at {tuple(state)}")
    return out


def integrate_pass(
    inlet: ReactorState,
    params: ReactorParams,
    config: IntegratorConfig = IntegratorConfig(),
    with_monodromy: bool = False,
) -> PassResult:
    """Integrate one pass over ``xi in [0, 1]`` from ``inlet``.

    With ``with_monodromy`` the result carries the 2x2 solution of the
    variational equation started from the identity.
    """
    _validate_state(inlet, params)
    p = params.as_tuple()
    a0, t0 = float(inlet[0]), float(inlet[1])
    if with_monodromy:
        y = np.empty(6)
        raise_for_status(_integrate_full(a0, t0, p, int(config.steps), y))
        return PassResult(ReactorState(float(y[0]), float(y[1])), y[2:].reshape(2, 2).copy())
    status, a, t = _integrate_state(a0, t0, p, int(config.steps))
    raise_for_status(status)
    return PassResult(ReactorState(float(a), float(t)))
