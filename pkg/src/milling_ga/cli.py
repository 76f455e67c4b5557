"""Command-line front end.

Each subcommand resolves configuration, runs one operation and writes its
tables as CSV: to stdout by default, or into --out together with summary.txt
and manifest.json.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any

import pandas as pd

from . import __version__
from .analysis import dt_sweep, estimate_plan, sensitivity_sweep
from .config import load_config
from .constants import (
    DEFAULT_GA_ANALYSIS_RUNS,
    DEFAULT_RUNS_PER_POINT,
    DEPTH_GRID_PRESETS,
    ESTIMATE_F_S,
    ESTIMATE_V_R,
    ESTIMATE_V_S,
    EXIT_IO,
    EXIT_OK,
    POPSIZE_LINEAR_STEP,
    POPSIZE_MAX_MU,
    SUCCESS_TOLERANCE,
)
from .cutting_model import CuttingModel
from .ga import GeneticAlgorithm
from .lookup import enumerate_pairs
from .models import GaConfig, InvalidInputError, MillingError, ProblemData, RunManifest, RunResult
from .oracle import METHODS, Oracle
from .population_sizing import gain_curve, recommend_population
from .report import (
    FLOAT_FORMAT,
    derive_frame,
    emit_report,
    estimate_frame,
    history_frame,
    optimize_frame,
    optimum_summary,
    oracle_frame,
    popsize_frame,
    sensitivity_frame,
    success_frame,
    sweep_frame,
    table_frame,
)
from .utils import float_range, format_cost, format_pct, relative_gap

logger = logging.getLogger("milling-ga")

# (tables, summary lines, seeds used)
Outcome = tuple[dict[str, pd.DataFrame], list[str], list[int]]


# ==================== Multi-run orchestration ====================


def run_seeds(
    problem: ProblemData,
    d_t: float,
    config: GaConfig,
    seeds: Sequence[int],
    workers: int = 1,
) -> list[RunResult]:
    """Independent GA runs, one per seed, returned in seed order."""
    model = CuttingModel(problem, log_findings=False)

    def one(seed: int) -> RunResult:
        return GeneticAlgorithm(problem, config, model=model).run(d_t, seed=seed)

    if workers <= 1:
        return [one(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))


def run_success_rate(
    d_t: float,
    pm_grid: Sequence[float],
    runs_per_point: int,
    config: GaConfig,
    problem: ProblemData,
    workers: int = 1,
) -> list[tuple[float, float, int]]:
    """Percentage of seeded runs per mutation probability that end near the oracle optimum.

    A run succeeds when its best plan is feasible and within SUCCESS_TOLERANCE
    (relative) of the global optimum. Seeds are config.seed, config.seed + 1, ...
    """
    if runs_per_point < 1:
        raise InvalidInputError("runs_per_point", f"must be at least 1, got {runs_per_point}")
    target = Oracle(problem).global_optimum(d_t).UC
    seeds = [config.seed + i for i in range(runs_per_point)]
    rates = []
    for p_m in pm_grid:
        results = run_seeds(problem, d_t, replace(config, p_m=p_m), seeds, workers)
        hits = sum(
            1
            for r in results
            if r.best.feasible and relative_gap(r.best.unit_cost, target) <= SUCCESS_TOLERANCE
        )
        pct = 100.0 * hits / runs_per_point
        logger.info("p_m=%g: %d/%d runs reached the optimum (%s)", p_m, hits, runs_per_point, format_pct(pct))
        rates.append((p_m, pct, runs_per_point))
    return rates


# ==================== Subcommands ====================


def cmd_derive(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    model = CuttingModel(problem)
    k = model.coefficients
    summary = [f"coefficients: {problem.coefficients}, L_ts = {k.L_ts:g} mm, L_tr = {k.L_tr:g} mm"]
    summary += [f"{f.name}: {f.message}" for f in model.derived.warnings if f.message]
    return {"derive": derive_frame(model.derived)}, summary, []


def cmd_table(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    table = enumerate_pairs(args.dt, problem)
    return {"table": table_frame(table)}, [f"d_t = {args.dt:g} mm: {len(table)} pairs"], []


def cmd_optimize(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    seeds = [config.seed + i for i in range(args.runs)]
    results = run_seeds(problem, args.dt, config, seeds, args.workers)
    model = CuttingModel(problem, log_findings=False)
    best = min(results, key=lambda r: (not r.best.feasible, r.best.unit_cost))
    summary = optimum_summary(args.dt, best.best.unit_cost, "GA best")
    if best.converged_at is not None:
        summary.append(f"  population gap below threshold from generation {best.converged_at}")
    tables = {"optimize": optimize_frame(results, model), "history": history_frame(results[0])}
    return tables, summary, seeds


def cmd_oracle(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    rows = Oracle(problem, method=args.method).enumerate_local_optima(args.dt)
    best = min(rows, key=lambda r: (r.UC, r.index))
    summary = optimum_summary(args.dt, best.UC, "global optimum")
    summary.append(f"  pair {best.index}: d_s = {best.d_s:g}, d_r = {best.d_r:g}, n = {best.n}")
    return {"oracle": oracle_frame(rows)}, summary, []


def _analysis_seeds(args: argparse.Namespace, config: GaConfig) -> list[int]:
    if args.engine != "ga":
        return []
    return [config.seed + i for i in range(args.ga_runs)]


def cmd_sweep(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    result = dt_sweep(args.start, args.stop, args.step, problem, args.engine, config, args.ga_runs)
    summary = [f"{len(result.rows)} depths solved with the {args.engine} engine"]
    if result.skipped:
        summary.append("skipped (no feasible allocation): " + ", ".join(f"{d:g}" for d in result.skipped))
    return {"sweep": sweep_frame(result)}, summary, _analysis_seeds(args, config)


def cmd_sensitivity(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    multipliers = float_range(args.start, args.stop, args.step)
    result = sensitivity_sweep(
        args.dt, args.kind, multipliers, problem, args.engine, config, args.ga_runs
    )
    summary = [f"slope {kind}: {slope:.6g} $/piece per unit multiplier" for kind, slope in result.slopes.items()]
    return {"sensitivity": sensitivity_frame(result)}, summary, _analysis_seeds(args, config)


def cmd_estimate(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    estimate = estimate_plan(
        args.dt, problem, f_s=args.fs, V_s=args.vs, V_r=args.vr, allow_next_n=args.allow_next_n
    )
    summary = [f"d_t = {args.dt:g} mm: estimated unit cost {format_cost(estimate.unit_cost)} per piece"]
    summary += [f"  {name}: {rule}" for name, rule in estimate.provenance.items()]
    return {"estimate": estimate_frame(estimate)}, summary, []


def cmd_popsize(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    curve = gain_curve(args.length, args.max_mu, args.step)
    recommended = recommend_population(args.length, args.max_mu, step=args.step)
    g_max = max(g for _, g in curve)
    summary = [f"l = {args.length}: G_max = {g_max:.6g}, recommended population {recommended}"]
    return {"popsize": popsize_frame(curve)}, summary, []


def cmd_success_rate(args: argparse.Namespace, problem: ProblemData, config: GaConfig) -> Outcome:
    pm_grid = [float(v) for v in args.pm_grid.split(",") if v.strip()]
    rates = run_success_rate(args.dt, pm_grid, args.runs_per_point, config, problem, args.workers)
    summary = [f"p_m = {pm:g}: {format_pct(pct)} of {runs} runs" for pm, pct, runs in rates]
    seeds = [config.seed + i for i in range(args.runs_per_point)]
    return {"success_rate": success_frame(rates)}, summary, seeds


COMMANDS: dict[str, Callable[[argparse.Namespace, ProblemData, GaConfig], Outcome]] = {
    "derive": cmd_derive,
    "table": cmd_table,
    "optimize": cmd_optimize,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "sensitivity": cmd_sensitivity,
    "estimate": cmd_estimate,
    "popsize": cmd_popsize,
    "success-rate": cmd_success_rate,
}


# ==================== Parser ====================


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory (default: CSV to stdout)")
    common.add_argument("--seed", type=int, help="random seed (first seed for multi-run commands)")
    common.add_argument("--depth-grid", choices=sorted(DEPTH_GRID_PRESETS), help="depth grid preset")
    common.add_argument("--coefficients", choices=["derived", "printed"], help="coefficient mode")
    common.add_argument(
        "--recompute-travel",
        action="store_true",
        default=None,
        help="recompute travel lengths from the cutter geometry",
    )
    common.add_argument("--workers", type=int, default=1, help="parallel GA runs")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
    verbosity.add_argument("--verbose", action="store_true", help="per-generation progress")
    return common


def _ga_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pop", dest="population", type=int, help="population size")
    parser.add_argument("--gens", dest="generations", type=int, help="generations")
    parser.add_argument("--pc", dest="p_c", type=float, help="crossover probability")
    parser.add_argument("--pm", dest="p_m", type=float, help="mutation probability")
    parser.add_argument("--bits", type=int, help="bits per continuous variable")
    parser.add_argument("--index-bits", dest="index_bits", type=int, help="bits of the table index")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="milling-ga",
        description="Cost-optimal multi-pass face milling by an elitist binary-coded GA.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("derive", parents=[common], help="derived model constants and consistency report")

    p = sub.add_parser("table", parents=[common], help="lookup table of depth allocations")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")

    p = sub.add_parser("optimize", parents=[common], help="run the GA")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")
    p.add_argument("--runs", type=int, default=1, help="independent seeded runs")
    _ga_options(p)

    p = sub.add_parser("oracle", parents=[common], help="local optima of every depth pair")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")
    p.add_argument("--method", choices=METHODS, default="candidates")

    p = sub.add_parser("sweep", parents=[common], help="optimum over a range of total depths")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--engine", choices=["oracle", "ga"], default="oracle")
    p.add_argument(
        "--ga-runs", type=int, default=DEFAULT_GA_ANALYSIS_RUNS, help="seeded GA runs per point (best kept)"
    )
    _ga_options(p)

    p = sub.add_parser("sensitivity", parents=[common], help="optimum cost against scaled force/power limits")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")
    p.add_argument("--kind", choices=["force", "power", "both"], default="both")
    p.add_argument("--from", dest="start", type=float, default=0.8)
    p.add_argument("--to", dest="stop", type=float, default=1.3)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--engine", choices=["oracle", "ga"], default="oracle")
    p.add_argument(
        "--ga-runs", type=int, default=DEFAULT_GA_ANALYSIS_RUNS, help="seeded GA runs per point (best kept)"
    )
    _ga_options(p)

    p = sub.add_parser("estimate", parents=[common], help="closed-form estimate of the optimum plan")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")
    p.add_argument("--fs", type=float, default=ESTIMATE_F_S, help="fixed finish feed (mm/tooth)")
    p.add_argument("--vs", type=float, default=ESTIMATE_V_S, help="fixed finish speed (m/min)")
    p.add_argument("--vr", type=float, default=ESTIMATE_V_R, help="fixed rough speed (m/min)")
    p.add_argument("--allow-next-n", action="store_true", help="fall back to n + 1 rough passes")

    p = sub.add_parser("popsize", parents=[common], help="schema gain against population size")
    p.add_argument(
        "--length", "--bits", "--string-bits", dest="length", type=int, default=65, help="genome length (bits)"
    )
    p.add_argument("--max-mu", type=int, default=POPSIZE_MAX_MU)
    p.add_argument("--step", type=int, default=POPSIZE_LINEAR_STEP)

    p = sub.add_parser("success-rate", parents=[common], help="GA success rate against p_m")
    p.add_argument("--dt", type=float, required=True, help="total depth of cut (mm)")
    p.add_argument("--pm-grid", default="0.01,0.02,0.03,0.04,0.05,0.06,0.08,0.1")
    p.add_argument("--runs-per-point", type=int, default=DEFAULT_RUNS_PER_POINT)
    _ga_options(p)

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = ("seed", "coefficients", "recompute_travel", "population", "generations", "p_c", "p_m", "bits", "index_bits")
    overrides = {key: getattr(args, key, None) for key in keys}
    overrides["depth_grid"] = args.depth_grid
    return {k: v for k, v in overrides.items() if v is not None}


def _write_stdout(tables: dict[str, pd.DataFrame]) -> None:
    for i, table in enumerate(tables.values()):
        if i:
            sys.stdout.write("\n")
        table.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the milling-ga command."""
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logger.setLevel(level)

    try:
        problem, config = load_config(args.config, _overrides(args))
        tables, summary, seeds = COMMANDS[args.command](args, problem, config)
        for line in summary:
            logger.info(line)
        if args.out:
            options = {k: v for k, v in sorted(vars(args).items()) if k not in ("quiet", "verbose", "out")}
            manifest = RunManifest(args.command, problem, config, seeds, options)
            emit_report(args.out, tables, manifest, summary)
        else:
            _write_stdout(tables)
    except MillingError as e:
        logger.error(e.message)
        return e.exit_code
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
