"""Run configuration: ``key = value`` files plus ``--key value`` overrides."""
from __future__ import annotations

import re
from dataclasses import MISSING, asdict, dataclass, fields
from typing import Iterable, Mapping

from .analysis import Grid1D
from .errors import InvariantViolation, ParseError, UnknownKey
from .itermap import StoppingCriterion
from .reactor import IntegratorConfig, ReactorParams

_INT = re.compile(r"[+-]?\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run.  Defaults reproduce the base case of the model study."""

    # model
    Da: float = 0.15
    n: float = 1.5
    gamma: float = 15.0
    beta: float = 2.0
    delta: float = 3.0
    theta_H: float = -0.001
    f: float = 0.427
    # integrator
    steps: int = 1000
    method: str = "rk4_fixed"
    # stopping criterion
    epsilon: float = 0.001
    n_max: int = 100_000
    denom_floor: float = 1e-9
    # attractor detection
    seed_alpha: float = 0.5
    seed_theta: float = 0.2
    transient: int = 5000
    continuation_transient: int = 500
    k_max: int = 64
    # initial conditions of 1-D profiles and trees
    theta0: float = 0.2
    # sweep axes
    f_start: float = 0.30
    f_stop: float = 0.55
    f_count: int = 251
    alpha0_start: float = 0.0
    alpha0_stop: float = 1.0
    alpha0_count: int = 201
    theta0_start: float = 0.0
    theta0_stop: float = 0.4
    theta0_count: int = 64
    theta_H_start: float = -0.012
    theta_H_stop: float = -0.001
    theta_H_count: int = 12
    # subcommand options
    k_expected: int = 1
    k_from: int = 1
    f_lo: float = 0.30
    f_hi: float = 0.55
    tol: float = 1e-4
    fb_scan: int = 25
    prominence: int = 1
    # output
    out: str = "run"
    workers: int = 1

    def __post_init__(self):
        # constructing the component objects runs their invariant checks
        self.params
        self.integrator
        self.criterion
        for axis in ("f", "alpha0", "theta0", "theta_H"):
            self.grid(axis)
        checks = [
            (self.transient >= 0, "transient >= 0"),
            (self.continuation_transient >= 0, "continuation_transient >= 0"),
            (self.k_max >= 1, "k_max >= 1"),
            (self.k_expected >= 1, "k_expected >= 1"),
            (self.k_from >= 1, "k_from >= 1"),
            (0.0 <= self.f_lo < self.f_hi < 1.0, "0 <= f_lo < f_hi < 1"),
            (self.tol > 0, "tol > 0"),
            (self.fb_scan >= 1, "fb_scan >= 1"),
            (self.prominence >= 1, "prominence >= 1"),
            (self.workers >= 1, "workers >= 1"),
            (bool(self.out), "out must be non-empty"),
            (0.0 <= self.alpha0_start and self.alpha0_stop <= 1.0, "0 <= alpha0 <= 1"),
        ]
        for ok, what in checks:
            if not ok:
                raise InvariantViolation(what)

    @property
    def params(self) -> ReactorParams:
        return ReactorParams(self.Da, self.n, self.gamma, self.beta, self.delta, self.theta_H, self.f)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.steps, self.method)

    @property
    def criterion(self) -> StoppingCriterion:
        return StoppingCriterion(self.epsilon, self.n_max, self.denom_floor)

    @property
    def seed(self) -> tuple[float, float]:
        return self.seed_alpha, self.seed_theta

    def grid(self, axis: str) -> Grid1D:
        return Grid1D(getattr(self, f"{axis}_start"), getattr(self, f"{axis}_stop"), getattr(self, f"{axis}_count"))

    def to_text(self) -> str:
        """Serialize as a config file that parses back to an equal RunConfig."""
        lines = []
        for key, value in asdict(self).items():
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


FIELD_TYPES = {fl.name: fl.type for fl in fields(RunConfig)}
DEFAULTS = {fl.name: fl.default for fl in fields(RunConfig) if fl.default is not MISSING}


def _convert(key: str, raw: str, line: int | None):
    kind = FIELD_TYPES[key]
    if kind == "str":
        return raw
    if kind == "int":
        if not _INT.match(raw):
            raise ParseError(f"{key}: expected a decimal integer, got {raw!r}", line)
        return int(raw)
    if not _FLOAT.match(raw):
        raise ParseError(f"{key}: expected a decimal number, got {raw!r}", line)
    return float(raw)


def _check_key(key: str, line: int | None = None):
    if key not in FIELD_TYPES:
        where = f" (line {line})" if line is not None else ""
        raise UnknownKey(f"unknown configuration key {key!r}{where}")


def parse_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if not key or not raw:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        _check_key(key, lineno)
        values[key] = _convert(key, raw, lineno)
    return values


def parse_overrides(args: Iterable[str] | Mapping[str, str]) -> dict:
    """Turn ``["--key", "value", ...]`` (or a mapping) into typed values."""
    if isinstance(args, Mapping):
        pairs = list(args.items())
    else:
        args = list(args)
        pairs = []
        i = 0
        while i < len(args):
            tok = args[i]
            if not tok.startswith("--"):
                raise ParseError(f"expected --key, got {tok!r}")
            if "=" in tok:
                key, raw = tok[2:].split("=", 1)
                i += 1
            else:
                if i + 1 >= len(args):
                    raise ParseError(f"missing value for {tok}")
                key, raw = tok[2:], args[i + 1]
                i += 2
            pairs.append((key, raw))
    values = {}
    for key, raw in pairs:
        _check_key(key)
        values[key] = _convert(key, str(raw).strip(), None)
    return values


def parse_config(text: str = "", overrides=()) -> RunConfig:
    """Resolve a RunConfig: overrides beat file values beat defaults."""
    values = dict(DEFAULTS)
    values.update(parse_text(text))
    values.update(parse_overrides(overrides))
    return RunConfig(**values)
