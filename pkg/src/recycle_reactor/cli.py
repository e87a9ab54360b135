"""Command-line front end.

    recycle-reactor <subcommand> [--config path] [--key value ...] [--out prefix] [--workers n]

Each run writes ``<prefix>.csv``, ``<prefix>.pgm`` for gridded outputs and
``<prefix>.manifest.txt``.  Exit status: 0 success, 1 configuration error,
2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import (
    Grid1D,
    bifurcation_diagram,
    classify_grid,
    detect_peaks,
    eigenvalue_curve,
    fb_window,
    peak_poincare_section,
    profile_1d,
    profile_2d,
    tree_profile,
)
from .config import RunConfig, parse_config
from .errors import ConfigError, ReactorError
from .itermap import detect_attractor
from .output import Table, emit_csv, emit_pgm, read_manifest, sha256_file, write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _profile(cfg: RunConfig):
    return profile_1d(
        cfg.params, cfg.grid("alpha0"), cfg.theta0, cfg.integrator, cfg.criterion,
        cfg.seed, cfg.transient, cfg.k_max, cfg.workers,
    )


def _attractor(cfg):
    return detect_attractor(cfg.seed, cfg.params, cfg.integrator, cfg.criterion, cfg.transient, cfg.k_max), None


def _eigenvalues(cfg):
    curve = eigenvalue_curve(
        cfg.params, cfg.grid("f"), cfg.k_expected, cfg.seed, cfg.integrator, cfg.criterion,
        cfg.transient, cfg.continuation_transient, cfg.k_max,
    )
    return curve, None


def _bifurcation(cfg):
    series = bifurcation_diagram(
        cfg.params, cfg.grid("f"), cfg.seed, cfg.integrator, cfg.criterion,
        cfg.transient, cfg.continuation_transient, cfg.k_max,
    )
    return series, None


def _profile1d(cfg):
    return _profile(cfg), None


def _tree(cfg):
    grid = tree_profile(
        cfg.params, cfg.grid("f"), cfg.grid("alpha0"), cfg.theta0, cfg.integrator, cfg.criterion,
        cfg.seed, cfg.transient, cfg.k_max, cfg.workers,
    )
    return grid, grid


def _profile2d(cfg):
    grid = profile_2d(
        cfg.params, cfg.grid("alpha0"), cfg.grid("theta0"), cfg.integrator, cfg.criterion,
        cfg.seed, cfg.transient, cfg.k_max, cfg.workers,
    )
    return grid, grid


def _peaks(cfg):
    prof = _profile(cfg)
    alphas = prof.x_axis.values
    rows = [[i, alphas[i], prof.counts[i]] for i in detect_peaks(prof, cfg.prominence)]
    return Table(["index", "alpha0", "N"], rows), None


def _poincare_peaks(cfg):
    pairs = peak_poincare_section(_profile(cfg), cfg.prominence)
    return Table(["j", "N_j", "N_j1"], [[j, a, b] for j, (a, b) in enumerate(pairs)]), None


def _fb_window(cfg):
    left, right = fb_window(
        cfg.params, cfg.f_lo, cfg.f_hi, cfg.k_from, cfg.tol, cfg.seed, cfg.integrator, cfg.criterion,
        cfg.transient, cfg.k_max, cfg.fb_scan,
    )
    rows = []
    # multipliers of the doubled orbit just inside each edge
    for name, f in (("left", left + cfg.tol), ("right", right - cfg.tol)):
        att = detect_attractor(cfg.seed, cfg.params.with_(f=f), cfg.integrator, cfg.criterion, cfg.transient, cfg.k_max)
        rows.append([name, left if name == "left" else right, f, att.period, att.moduli[0]])
    return Table(["edge", "f", "f_inside", "period_inside", "lambda1_mod"], rows), None


def _classify(cfg):
    grid = classify_grid(
        cfg.grid("theta_H"), cfg.grid("f"), cfg.seed, cfg.integrator, cfg.params, cfg.criterion,
        cfg.transient, cfg.continuation_transient, cfg.k_max,
    )
    return grid, grid


SUBCOMMANDS = {
    "attractor": _attractor,
    "eigenvalues": _eigenvalues,
    "bifurcation": _bifurcation,
    "profile1d": _profile1d,
    "tree": _tree,
    "profile2d": _profile2d,
    "peaks": _peaks,
    "poincare-peaks": _poincare_peaks,
    "fb-window": _fb_window,
    "classify": _classify,
}


def run(subcommand: str, cfg: RunConfig) -> list[Path]:
    """Run one subcommand and write its outputs; returns the written paths."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    t0 = time.perf_counter()
    dataset, image = SUBCOMMANDS[subcommand](cfg)
    prefix = cfg.out
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    outputs = [emit_csv(dataset, f"{prefix}.csv")]
    if image is not None:
        outputs.append(emit_pgm(image, f"{prefix}.pgm"))
    manifest = write_manifest(
        f"{prefix}.manifest.txt", subcommand, cfg, outputs, time.perf_counter() - t0, __version__
    )
    return outputs + [manifest]


def dispatch(subcommand: str, cfg: RunConfig) -> int:
    """Run ``subcommand`` and map failures to exit statuses."""
    try:
        run(subcommand, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReactorError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def replay_manifest(manifest_path, out: str) -> bool:
    """Re-run the run recorded in a manifest under a new prefix; True if checksums match."""
    subcommand, sums, text = read_manifest(manifest_path)
    cfg = parse_config(text, {"out": out})
    outputs = run(subcommand, cfg)
    got = {p.suffix: sha256_file(p) for p in outputs if not p.name.endswith(".manifest.txt")}
    return got == sums


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recycle-reactor",
        description="Attractors and iteration-count profiles of a tubular reactor with recycle.",
        epilog="Any configuration key may be overridden with --key value.",
    )
    parser.add_argument("subcommand", help=", ".join(SUBCOMMANDS))
    parser.add_argument("--config", help="key = value configuration file")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        ns, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if ns.subcommand not in SUBCOMMANDS:
        print(f"configuration error: unknown subcommand {ns.subcommand!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = Path(ns.config).read_text(encoding="utf-8") if ns.config else ""
        cfg = parse_config(text, extra)
    except OSError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return dispatch(ns.subcommand, cfg)


if __name__ == "__main__":
    sys.exit(main())
