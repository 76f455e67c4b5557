"""Post-optimality analysis: constraint sensitivity, total-depth sweeps and the closed-form estimate."""

import logging
import math
from collections.abc import Sequence
from dataclasses import replace

import numpy as np

from .constants import DEFAULT_GA_ANALYSIS_RUNS, ESTIMATE_F_S, ESTIMATE_V_R, ESTIMATE_V_S
from .cutting_model import CuttingModel
from .ga import GeneticAlgorithm, best_run
from .lookup import enumerate_pairs
from .models import (
    Estimate,
    EstimationError,
    GaConfig,
    InfeasiblePassError,
    InvalidInputError,
    NoFeasibleAllocationError,
    PassKind,
    Plan,
    ProblemData,
    SensitivityPoint,
    SensitivityResult,
    SweepResult,
    SweepRow,
)
from .oracle import Oracle
from .utils import depth_range, to_quanta

logger = logging.getLogger("milling-ga")

ENGINES = ("oracle", "ga")
SENSITIVITY_KINDS = {"force": "F_max", "power": "P_max"}


def _check_engine(engine: str, ga_runs: int) -> None:
    if engine not in ENGINES:
        raise InvalidInputError("engine", f"expected one of {ENGINES}, got {engine!r}")
    if ga_runs < 1:
        raise InvalidInputError("ga_runs", f"must be at least 1, got {ga_runs}")


def _optimum(
    problem: ProblemData,
    d_t: float,
    engine: str,
    ga_config: GaConfig | None,
    ga_runs: int = DEFAULT_GA_ANALYSIS_RUNS,
) -> tuple[Plan, float, float]:
    """(plan, unit cost, CV) of the optimum found by the chosen engine.

    The GA engine keeps the best of ga_runs runs seeded config.seed, config.seed + 1, ...
    """
    model = CuttingModel(problem, log_findings=False)
    if engine == "ga":
        config = ga_config or GaConfig()
        ga = GeneticAlgorithm(problem, config, model=model)
        results = [ga.run(d_t, seed=config.seed + i) for i in range(ga_runs)]
        best = best_run(results).best
        return best.plan, best.unit_cost, best.cv
    row = Oracle(problem, model=model).global_optimum(d_t)
    return row.plan, row.UC, 0.0


# ==================== Constraint sensitivity ====================


def sensitivity_sweep(
    d_t: float,
    kind: str,
    multipliers: Sequence[float],
    problem: ProblemData,
    engine: str = "oracle",
    ga_config: GaConfig | None = None,
    ga_runs: int = DEFAULT_GA_ANALYSIS_RUNS,
) -> SensitivityResult:
    """Optimal unit cost with F_max and/or P_max scaled by each multiplier.

    kind is "force", "power" or "both". Infeasible points are recorded without
    a cost and the sweep continues. Slopes are least-squares fits of cost
    against multiplier over the feasible points of each kind.
    """
    _check_engine(engine, ga_runs)
    kinds = list(SENSITIVITY_KINDS) if kind == "both" else [kind]
    for k in kinds:
        if k not in SENSITIVITY_KINDS:
            raise InvalidInputError("kind", f"expected force, power or both, got {kind!r}")
    values = [float(m) for m in multipliers]
    if not values or any(m <= 0 for m in values):
        raise InvalidInputError("multipliers", "must be a non-empty list of positive factors")
    if values != sorted(values):
        raise InvalidInputError("multipliers", "must be sorted ascending")

    points: list[SensitivityPoint] = []
    slopes: dict[str, float] = {}
    for k in kinds:
        limit = SENSITIVITY_KINDS[k]
        series: list[tuple[float, float]] = []
        for m in values:
            scaled = replace(problem, **{limit: getattr(problem, limit) * m})
            try:
                _, cost, cv = _optimum(scaled, d_t, engine, ga_config, ga_runs)
            except (NoFeasibleAllocationError, InfeasiblePassError) as e:
                points.append(SensitivityPoint(k, m, None, e.message))
                logger.warning("Sensitivity %s x%g infeasible: %s", k, m, e.message)
                continue
            if cv > 0:
                points.append(SensitivityPoint(k, m, None, f"best plan violates limits (CV={cv:.3g})"))
                continue
            points.append(SensitivityPoint(k, m, cost))
            series.append((m, cost))
        if len(series) >= 2:
            xs, ys = zip(*series, strict=True)
            slopes[k] = float(np.polyfit(xs, ys, 1)[0])
        else:
            slopes[k] = math.nan
        logger.info("Sensitivity %s: slope %.6g $/piece per unit multiplier", k, slopes[k])
    return SensitivityResult(points=points, slopes=slopes)


# ==================== Total-depth sweep ====================


def dt_sweep(
    start: float,
    stop: float,
    step: float,
    problem: ProblemData,
    engine: str = "oracle",
    ga_config: GaConfig | None = None,
    ga_runs: int = DEFAULT_GA_ANALYSIS_RUNS,
) -> SweepResult:
    """Optimum plan, cost and tool lives for every d_t from start to stop.

    Depths with no feasible allocation are logged and listed as skipped. With
    the GA engine each depth keeps the best of ga_runs seeded runs.
    """
    _check_engine(engine, ga_runs)
    model = CuttingModel(problem, log_findings=False)
    rows: list[SweepRow] = []
    skipped: list[float] = []
    for d_t in depth_range(start, stop, step):
        try:
            plan, cost, cv = _optimum(problem, d_t, engine, ga_config, ga_runs)
        except (NoFeasibleAllocationError, InfeasiblePassError) as e:
            logger.warning("Sweep: skipping d_t=%g mm (%s)", d_t, e.message)
            skipped.append(d_t)
            continue
        T_s, T_r = model.tool_lives(plan)
        rows.append(SweepRow(d_t=d_t, plan=plan, unit_cost=cost, T_s=T_s, T_r=T_r, cv=cv))
    return SweepResult(rows=rows, skipped=skipped)


# ==================== Estimation strategy ====================


def estimate_plan(
    d_t: float,
    problem: ProblemData,
    f_s: float = ESTIMATE_F_S,
    V_s: float = ESTIMATE_V_S,
    V_r: float = ESTIMATE_V_R,
    allow_next_n: bool = False,
) -> Estimate:
    """Estimate the optimum plan without search.

    The pass count is the smallest n with d_s_max + n d_r_max >= d_t. Among
    pairs with that n the shallowest rough depth is taken. The rough feed is
    the largest the force and surface limits allow; the remaining speeds and
    finish feed are fixed observed values, pulled back onto the power limit
    when they would exceed it.
    """
    model = CuttingModel(problem, log_findings=False)
    table = enumerate_pairs(d_t, problem)
    dt_q = to_quanta(d_t, "d_t")
    ds_max_q = to_quanta(problem.d_s_max, "d_s_max")
    dr_max_q = to_quanta(problem.d_r_max, "d_r_max")
    n = max(1, -(-(dt_q - ds_max_q) // dr_max_q))
    provenance = {"n": f"ceil((d_t - d_s_max) / d_r_max) = {n}"}

    matches = [e for e in table if e.n == n]
    if not matches and allow_next_n:
        matches = [e for e in table if e.n == n + 1]
        if matches:
            provenance["n"] += f", no pair with n = {n}; using n = {n + 1}"
            n += 1
    if not matches:
        raise EstimationError(f"no depth pair with n = {n} rough passes for d_t = {d_t:g} mm")
    entry = min(matches, key=lambda e: e.dr_q)
    provenance["d_r"] = "shallowest rough depth with that pass count"
    provenance["d_s"] = "d_t - n d_r"

    rough_caps = {
        "f_r_max": problem.f_r_max,
        "surface-finish cap": model.feed_upper_bound(PassKind.ROUGH),
        "force cap": model.force_feed_cap(entry.d_r),
    }
    f_r_rule = min(rough_caps, key=lambda name: rough_caps[name])
    f_r = rough_caps[f_r_rule]
    provenance["f_r"] = f"largest feed allowed, set by the {f_r_rule}"

    finish_cap = min(model.feed_upper_bound(PassKind.FINISH), model.force_feed_cap(entry.d_s))
    if f_s > finish_cap:
        provenance["f_s"] = f"fixed {f_s:g} exceeds the finish feed cap; using {finish_cap:.6g}"
        f_s = finish_cap
    else:
        provenance["f_s"] = f"fixed observed value {f_s:g}"

    if f_r < problem.f_r_min or f_s < problem.f_s_min:
        raise EstimationError(f"feed caps fall below the minimum feed at d_t = {d_t:g} mm")

    speeds = {}
    for name, value, depth, feed, (v_min, v_max) in (
        ("V_s", V_s, entry.d_s, f_s, problem.speed_bounds(PassKind.FINISH)),
        ("V_r", V_r, entry.d_r, f_r, problem.speed_bounds(PassKind.ROUGH)),
    ):
        cap = min(v_max, float(model.power_speed_cap(depth, feed)))
        if cap < v_min:
            raise EstimationError(f"power limit leaves no speed for {name} at d_t = {d_t:g} mm")
        if value > cap:
            speeds[name] = cap
            provenance[name] = f"fixed {value:g} exceeds the power limit; clamped to {cap:.6g}"
        else:
            speeds[name] = max(value, v_min)
            provenance[name] = f"fixed observed value {value:g}"

    plan = Plan(
        V_s=speeds["V_s"],
        f_s=f_s,
        d_s=entry.d_s,
        V_r=speeds["V_r"],
        f_r=f_r,
        d_r=entry.d_r,
        n=entry.n,
    )
    report = model.constraint_report(plan, d_t)
    if not report.feasible:
        raise EstimationError(
            f"estimated plan violates {', '.join(report.violated())} at d_t = {d_t:g} mm"
        )
    return Estimate(
        d_t=d_t,
        plan=plan,
        unit_cost=model.unit_cost(plan),
        cv=report.cv,
        provenance=provenance,
    )
