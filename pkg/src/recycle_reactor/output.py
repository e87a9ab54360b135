"""CSV and PGM writers plus run manifests."""
from __future__ import annotations

import hashlib
import math
import warnings
from functools import singledispatch
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .analysis import BifurcationSeries, ClassGrid, EigenvalueCurve, NGrid
from .errors import DegenerateRangeWarning
from .itermap import Attractor


class Table(NamedTuple):
    header: Sequence[str]
    rows: Sequence[Sequence]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


@singledispatch
def to_table(dataset) -> Table:
    raise TypeError(f"no CSV layout for {type(dataset).__name__}")


@to_table.register
def _(dataset: Table) -> Table:
    return dataset


@to_table.register
def _(att: Attractor) -> Table:
    (l1, l2) = att.eigenvalues
    header = ["index", "alpha1", "theta1", "period", "stable",
              "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "lambda1_mod", "lambda2_mod"]
    rows = [
        [i, p.alpha1, p.theta1, att.period, att.stable, l1.real, l1.imag, l2.real, l2.imag, abs(l1), abs(l2)]
        for i, p in enumerate(att.orbit)
    ]
    return Table(header, rows)


@to_table.register
def _(series: BifurcationSeries) -> Table:
    rows = []
    for f, period, stable, branch in zip(series.f_axis.values, series.periods, series.stable, series.branches):
        if not branch:
            rows.append([f, 0, False, float("nan")])
        for alpha in branch:
            rows.append([f, period, stable, alpha])
    return Table(["f", "period", "stable", "alpha1"], rows)


@to_table.register
def _(curve: EigenvalueCurve) -> Table:
    rows = [
        [f, p, flag, m[0], m[1]]
        for f, p, flag, m in zip(curve.f_axis.values, curve.periods, curve.flagged, curve.moduli)
    ]
    return Table(["f", "period", "flagged", "lambda1_mod", "lambda2_mod"], rows)


@to_table.register
def _(grid: NGrid) -> Table:
    if grid.y_axis is None:
        theta0 = grid.fixed.get("theta0", float("nan"))
        rows = [[x, theta0, n] for x, n in zip(grid.x_axis.values, grid.counts)]
        return Table([grid.x_name, "theta0", "N"], rows)
    xs, ys = grid.x_axis.values, grid.y_axis.values
    if grid.x_name == "f":
        # trees: one block per f column
        theta0 = grid.fixed.get("theta0", float("nan"))
        rows = [
            [x, grid.periods[i], y, theta0, grid.counts[j, i]]
            for i, x in enumerate(xs)
            for j, y in enumerate(ys)
        ]
        return Table(["f", "period", grid.y_name, "theta0", "N"], rows)
    rows = [[x, y, grid.counts[j, i]] for j, y in enumerate(ys) for i, x in enumerate(xs)]
    return Table([grid.x_name, grid.y_name, "N"], rows)


@to_table.register
def _(grid: ClassGrid) -> Table:
    rows = [
        [th, f, grid.periods[j, i], grid.stable[j, i]]
        for j, th in enumerate(grid.theta_H_axis.values)
        for i, f in enumerate(grid.f_axis.values)
    ]
    return Table(["theta_H", "f", "period", "stable"], rows)


def csv_text(dataset) -> str:
    table = to_table(dataset)
    lines = [",".join(table.header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def emit_csv(dataset, path) -> Path:
    """Write ``dataset`` as CSV (17 significant digits, LF line ends)."""
    path = Path(path)
    path.write_bytes(csv_text(dataset).encode("utf-8"))
    return path


def pgm_pixels(grid) -> np.ndarray:
    """Grayscale pixels (uint8, image rows top to bottom) for a 2-D grid.

    Counts are scaled by the per-image min/max of non-sentinel cells with
    round-half-up; ``n_max`` sentinel cells are white.  A degenerate range
    gives uniform mid-gray and a :class:`DegenerateRangeWarning`.
    """
    if isinstance(grid, ClassGrid):
        values, sentinel = np.asarray(grid.periods, dtype=np.int64), None
    else:
        if grid.y_axis is None:
            raise ValueError("emit_pgm needs a two-dimensional grid")
        values, sentinel = np.asarray(grid.counts, dtype=np.int64), grid.n_max
    hit = values == sentinel if sentinel is not None else np.zeros(values.shape, dtype=bool)
    live = values[~hit]
    lo = int(live.min()) if live.size else 0
    hi = int(live.max()) if live.size else 0
    if hi == lo:
        warnings.warn("degenerate count range; emitting uniform mid-gray", DegenerateRangeWarning, stacklevel=3)
        pixels = np.full(values.shape, 128, dtype=np.int64)
    else:
        span = hi - lo
        # exact integer round-half-up of 255 * (N - lo) / span
        pixels = (510 * (values - lo) + span) // (2 * span)
    pixels[hit] = 255
    return np.clip(pixels, 0, 255).astype(np.uint8)[::-1]


def emit_pgm(grid, path) -> Path:
    """Write a binary (P5) PGM; the top image row is the largest y value."""
    pixels = pgm_pixels(grid)
    height, width = pixels.shape
    path = Path(path)
    path.write_bytes(b"P5\n%d %d\n255\n" % (width, height) + pixels.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM supported")
    return np.frombuffer(data[-width * height:], dtype=np.uint8).reshape(height, width)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, subcommand: str, config, outputs: Sequence, duration: float, version: str) -> Path:
    """Write a manifest that doubles as a config file for replaying the run.

    Metadata lives in ``#`` comment lines; checksums are keyed by file suffix.
    """
    lines = [
        "# recycle_reactor run manifest",
        f"# subcommand: {subcommand}",
        f"# version: {version}",
        f"# duration_s: {duration:.3f}",
        "# pgm_normalization: per-image min/max of non-sentinel cells",
    ]
    for out in outputs:
        lines.append(f"# sha256 {Path(out).suffix}: {sha256_file(out)}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n" + config.to_text(), encoding="utf-8")
    return path


def read_manifest(path) -> tuple[str, dict, str]:
    """Return ``(subcommand, {suffix: sha256}, config_text)`` from a manifest."""
    text = Path(path).read_text(encoding="utf-8")
    subcommand, sums = None, {}
    for line in text.splitlines():
        if line.startswith("# subcommand:"):
            subcommand = line.split(":", 1)[1].strip()
        elif line.startswith("# sha256 "):
            suffix, digest = line[len("# sha256 "):].split(":", 1)
            sums[suffix.strip()] = digest.strip()
    if subcommand is None:
        raise ValueError(f"{path} is not a run manifest")
    return subcommand, sums, text
