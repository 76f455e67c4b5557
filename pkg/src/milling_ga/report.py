"""CSV tables, the human-readable summary and the run manifest."""

import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import pandas as pd

from .constants import (
    DERIVE_COLUMNS,
    ESTIMATE_COLUMNS,
    HISTORY_COLUMNS,
    LITERATURE_UNIT_COST,
    OPTIMIZE_COLUMNS,
    ORACLE_COLUMNS,
    POPSIZE_COLUMNS,
    SENSITIVITY_COLUMNS,
    SUCCESS_COLUMNS,
    SWEEP_COLUMNS,
    TABLE_COLUMNS,
)
from .cutting_model import CuttingModel
from .models import (
    DerivedCoefficients,
    Estimate,
    OracleRow,
    PairTable,
    RunManifest,
    RunResult,
    SensitivityResult,
    SweepResult,
)
from .utils import format_cost, format_pct, improvement_pct

logger = logging.getLogger("milling-ga")

FLOAT_FORMAT = "%.6g"


def frame(rows: Iterable[Sequence[object]], columns: list[str]) -> pd.DataFrame:
    """DataFrame with fixed columns; no rows gives a header-only frame."""
    return pd.DataFrame(list(rows), columns=columns)


def derive_frame(derived: DerivedCoefficients) -> pd.DataFrame:
    return frame(
        ((f.name, f.derived, f.printed, f.rel_diff, f.status) for f in derived.consistency),
        DERIVE_COLUMNS,
    )


def table_frame(table: PairTable) -> pd.DataFrame:
    return frame(((e.index, e.d_s, e.d_r, e.n) for e in table), TABLE_COLUMNS)


def optimize_frame(results: Sequence[RunResult], model: CuttingModel) -> pd.DataFrame:
    rows = []
    for result in results:
        plan = result.best.plan
        T_s, T_r = model.tool_lives(plan)
        rows.append(
            (
                result.d_t,
                plan.V_s,
                plan.V_r,
                plan.f_s,
                plan.f_r,
                plan.d_s,
                plan.d_r,
                plan.n,
                result.best.cv,
                result.best.unit_cost,
                T_s,
                T_r,
            )
        )
    return frame(rows, OPTIMIZE_COLUMNS)


def history_frame(result: RunResult) -> pd.DataFrame:
    return frame(((s.generation, s.best, s.average, s.gap) for s in result.history), HISTORY_COLUMNS)


def oracle_frame(rows: Sequence[OracleRow]) -> pd.DataFrame:
    if not rows:
        return frame([], ORACLE_COLUMNS)
    best = min(rows, key=lambda r: (r.UC, r.index))
    return frame(
        ((r.d_s, r.d_r, r.n, r.UC_s, r.UC_r, r.UC, "*" if r is best else "") for r in rows),
        ORACLE_COLUMNS,
    )


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    return frame(
        (
            (
                row.d_t,
                row.plan.n,
                row.plan.d_s,
                row.plan.d_r,
                row.plan.f_r,
                row.plan.V_s,
                row.plan.V_r,
                row.plan.f_s,
                row.unit_cost,
                row.T_s,
                row.T_r,
            )
            for row in result.rows
        ),
        SWEEP_COLUMNS,
    )


def sensitivity_frame(result: SensitivityResult) -> pd.DataFrame:
    return frame(
        ((p.kind, p.multiplier, p.unit_cost, int(p.feasible)) for p in result.points),
        SENSITIVITY_COLUMNS,
    )


def estimate_frame(estimate: Estimate) -> pd.DataFrame:
    plan = estimate.plan
    return frame(
        [
            (
                estimate.d_t,
                plan.n,
                plan.d_s,
                plan.d_r,
                plan.f_s,
                plan.f_r,
                plan.V_s,
                plan.V_r,
                estimate.unit_cost,
            )
        ],
        ESTIMATE_COLUMNS,
    )


def popsize_frame(curve: Sequence[tuple[int, float]]) -> pd.DataFrame:
    return frame(curve, POPSIZE_COLUMNS)


def success_frame(rates: Sequence[tuple[float, float, int]]) -> pd.DataFrame:
    return frame(rates, SUCCESS_COLUMNS)


def literature_comparison(d_t: float, unit_cost: float) -> list[str]:
    """Lines comparing a unit cost with published two-stage results at the same d_t.

    Improvement is relative to the obtained cost. Published numbers are
    reference constants only.
    """
    lines = []
    for source, reference in LITERATURE_UNIT_COST.get(round(d_t, 1), {}).items():
        gain = improvement_pct(reference, unit_cost)
        verdict = "better" if gain >= 0 else "worse"
        lines.append(
            f"{format_pct(abs(gain))} {verdict} than {source} "
            f"({format_cost(reference)} per piece, published)"
        )
    return lines


def optimum_summary(d_t: float, unit_cost: float, label: str) -> list[str]:
    lines = [f"d_t = {d_t:g} mm: {label} unit cost {format_cost(unit_cost)} per piece"]
    lines += [f"  {line}" for line in literature_comparison(d_t, unit_cost)]
    return lines


def emit_report(
    out_dir: str | Path,
    tables: dict[str, pd.DataFrame],
    manifest: RunManifest,
    summary: Sequence[str] = (),
) -> list[Path]:
    """Write each table as <name>.csv, an optional summary.txt and manifest.json.

    Output is a pure function of the inputs so repeated runs are byte-identical.
    Raises OSError when the directory cannot be written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name, table in tables.items():
        path = out / f"{name}.csv"
        table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        written.append(path)
    if summary:
        path = out / "summary.txt"
        path.write_text("\n".join(summary) + "\n", encoding="utf-8")
        written.append(path)

    manifest.outputs = [p.name for p in written]
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    logger.info("Wrote %d files to %s", len(written), out)
    return written
