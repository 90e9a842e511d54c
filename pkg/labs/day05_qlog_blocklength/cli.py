#!/usr/bin/env python3
"""
Command-line front end for the q-logarithm blocklength lab.

Usage:
    python -m labs.day05_qlog_blocklength.cli stats
    python -m labs.day05_qlog_blocklength.cli sweep --n-min 20 --n-max 50 --out data/sweep.csv
    python -m labs.day05_qlog_blocklength.cli exact --n-min 2 --n-max 2
    python -m labs.day05_qlog_blocklength.cli verify --samples 100000
    python -m labs.day05_qlog_blocklength.cli resonance --config runs/canonical.cfg

Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
3 computational cap exceeded.
"""

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

import polars as pl
from rich.panel import Panel
from rich.table import Table

from .asymptotic_bounds import BoundRow, bound_sweep
from .checks import FAIL, PASS, SKIP, CheckResult, any_failed, run_checks
from .config import (
    RESONANCE_GRID,
    RESONANCE_MAX_K,
    RunConfig,
    console,
    format_number,
    resolve_run_config,
    setup_logging,
)
from .errors import BlocklengthError, CapExceededError, ConfigError, DegenerateSourceError
from .exact_limit import locate_quantile, source_spectrum
from .monte_carlo import McConfig, estimate_term_scaling
from .numerics import nats_to_bits
from .performance_monitor import format_time
from .q_algebra import ScalingLaw, optimal_alpha, scaling_q
from .source_model import info_moments

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

SWEEP_COLUMNS = ("n", "shannon", "normal", "edgeworth", "qbound", "exact")
STATUS_STYLE = {PASS: "green", FAIL: "red", SKIP: "yellow"}


def _to_units(value: float, units: str, power: int = 1) -> float:
    return nats_to_bits(value, power) if units == "bits" else value


def _fmt(value: float | None, units: str, power: int = 1) -> str | None:
    return None if value is None else format_number(_to_units(value, units, power))


def _emit(text: str, output_path: str | None) -> None:
    """Write exactly `text` (UTF-8, LF) to the output path or stdout."""
    if output_path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        logger.info(f"wrote {path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# ---- commands ----


def cmd_stats(cfg: RunConfig) -> int:
    pmf = cfg.pmf()
    moments = info_moments(pmf)
    units = cfg.units

    lines = [
        ("units", units),
        ("h1", _fmt(moments.h1, units)),
        ("varentropy", _fmt(moments.varentropy, units, 2)),
        ("third_central", _fmt(moments.third_central, units, 3)),
    ]
    lines += [
        (f"central_moment_{j}", _fmt(moments.central_moments[j], units, j)) for j in range(2, 7)
    ]

    try:
        law = (
            ScalingLaw(cfg.alpha_override)
            if cfg.alpha_override is not None
            else optimal_alpha(moments)
        )
    except DegenerateSourceError:
        lines.append(("alpha", "undefined (degenerate source, V = 0)"))
    else:
        # alpha and q_n act on nats; they are reported unconverted.
        lines.append(("alpha_per_nat", format_number(law.alpha)))
        for n in sorted({cfg.n_min, cfg.n_max}):
            lines.append((f"q_n(n={n})", format_number(scaling_q(law, n).q)))

    for key, value in lines:
        console.print(f"{key}: {value}", markup=False, highlight=False)
    return EXIT_OK


def sweep_frame(rows: list[BoundRow], units: str) -> pl.DataFrame:
    """Rows rendered as CSV-ready text columns; missing values stay null."""
    return pl.DataFrame(
        {
            "n": [str(r.n) for r in rows],
            "shannon": [_fmt(r.shannon, units) for r in rows],
            "normal": [_fmt(r.normal, units) for r in rows],
            "edgeworth": [_fmt(r.edgeworth, units) for r in rows],
            "qbound": [_fmt(r.q_bound, units) for r in rows],
            "exact": [_fmt(r.exact, units) for r in rows],
        },
        schema={c: pl.Utf8 for c in SWEEP_COLUMNS},
    )


def cmd_sweep(cfg: RunConfig) -> int:
    rows = bound_sweep(cfg.pmf(), cfg.eps, cfg.n_values(), True, cfg.alpha_override)
    capped = [r.n for r in rows if r.exact_capped]
    if capped:
        logger.warning(f"exact column empty for n in {capped[0]}..{capped[-1]} (cap exceeded)")
    _emit(sweep_frame(rows, cfg.units).write_csv(), cfg.output_path)
    return EXIT_OK


def cmd_exact(cfg: RunConfig) -> int:
    if cfg.n_min != cfg.n_max:
        raise ConfigError(
            f"exact needs a single blocklength (n-min = n-max), got {cfg.n_min}..{cfg.n_max}"
        )
    spec = source_spectrum(cfg.pmf(), cfg.n_min)
    hit = locate_quantile(spec, cfg.eps)
    lines = [
        ("n", str(cfg.n_min)),
        ("eps", format_number(cfg.eps)),
        ("units", cfg.units),
        ("exact_limit", _fmt(hit.value, cfg.units)),
        ("atom_index", str(hit.index)),
        ("atoms", str(len(spec))),
        ("cumulative", format_number(hit.cumulative)),
    ]
    for key, value in lines:
        console.print(f"{key}: {value}", markup=False, highlight=False)
    return EXIT_OK


def _print_check_table(results: list[CheckResult]) -> None:
    table = Table(title="Verification Summary")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Time", style="dim")
    table.add_column("Memory", style="dim")
    table.add_column("Measured")
    for r in results:
        style = STATUS_STYLE[r.status]
        elapsed = format_time(r.metrics.execution_time_s) if r.metrics else "N/A"
        memory = r.metrics.memory_label() if r.metrics else "N/A"
        table.add_row(r.name, f"[{style}]{r.status}[/{style}]", elapsed, memory, r.detail)
    console.print(table)


def cmd_verify(cfg: RunConfig) -> int:
    console.print(
        Panel.fit(
            "[bold magenta]q-Algebraic Blocklength Verification[/bold magenta]\n"
            f"[dim]pmf {cfg.pmf_spec} | eps {cfg.eps} | "
            f"samples {cfg.samples:,} | seed {cfg.seed}[/dim]",
            border_style="magenta",
        )
    )
    results = run_checks(cfg)
    for r in results:
        console.print(f"{r.status} {r.name}: {r.detail}", markup=False, highlight=False)
    _print_check_table(results)
    counts = Counter(r.status for r in results)
    console.print(", ".join(f"{counts[s]} {s.lower()}" for s in (PASS, FAIL, SKIP)), style="dim")

    if any_failed(results):
        console.print("\n[bold red]✗ Verification failed[/bold red]")
        return EXIT_FAIL
    console.print("\n[bold green]✓ All checks passed or skipped[/bold green]")
    return EXIT_OK


def cmd_resonance(cfg: RunConfig) -> int:
    pmf = cfg.pmf()
    alpha = (
        cfg.alpha_override
        if cfg.alpha_override is not None
        else optimal_alpha(info_moments(pmf)).alpha
    )
    mc = McConfig(
        samples=cfg.samples,
        seed=cfg.seed,
        n_grid=RESONANCE_GRID,
        max_k=RESONANCE_MAX_K,
        alpha=alpha,
        workers=cfg.workers,
    )
    estimates = estimate_term_scaling(pmf, mc)
    frame = pl.DataFrame(
        {
            "k": [str(e.k) for e in estimates],
            "slope": [format_number(e.slope) for e in estimates],
            "stderr": [format_number(e.stderr) for e in estimates],
            "expected": [format_number(e.expected) for e in estimates],
        }
    )
    _emit(frame.write_csv(), cfg.output_path)
    return EXIT_OK


COMMANDS = {
    "stats": (cmd_stats, "Entropy, varentropy, skewness and the scaling constant"),
    "sweep": (cmd_sweep, "CSV of Shannon / normal / Edgeworth / q-bound / exact limits"),
    "exact": (cmd_exact, "Exact limit L*(n, eps) at a single blocklength"),
    "verify": (cmd_verify, "Run the verification checks (exit 1 on any FAIL)"),
    "resonance": (cmd_resonance, "CSV of fitted term-scaling slopes"),
}


# ---- argument parsing ----


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pmf", dest="pmf_spec", help="Comma-separated probabilities")
    common.add_argument("--eps", type=float, help="Target error probability in (0, 1)")
    common.add_argument("--n-min", dest="n_min", type=int, help="Smallest blocklength")
    common.add_argument("--n-max", dest="n_max", type=int, help="Largest blocklength")
    common.add_argument("--n-step", dest="n_step", type=int, help="Blocklength step")
    common.add_argument(
        "--alpha", dest="alpha_override", type=float, help="Override alpha = T/(3V^2)"
    )
    common.add_argument("--seed", type=int, help="64-bit unsigned Monte Carlo seed")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--workers", type=int, help="Processes for Monte Carlo sampling")
    common.add_argument("--units", choices=["nats", "bits"], help="Output units")
    common.add_argument("--out", dest="output_path", help="Write CSV output to this path")
    common.add_argument("--config", help="key=value config file (flags take precedence)")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    common.add_argument("--quiet", "-q", action="store_true", help="Warnings only")

    parser = argparse.ArgumentParser(
        description="Finite-blocklength source-coding limits with the q-logarithm"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(verbose=args.verbose, quiet=args.quiet)

    try:
        cfg = resolve_run_config(vars(args), args.config)
        run_func, _ = COMMANDS[args.command]
        return run_func(cfg)
    except CapExceededError as e:
        logger.error(str(e))
        return EXIT_CAP
    except (ConfigError, BlocklengthError) as e:
        # Domain errors here can only come from user-supplied parameters.
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
