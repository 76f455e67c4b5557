"""Post-optimality analysis MCP tools."""

import asyncio
import logging
from collections.abc import Callable

from mcp.server.fastmcp import FastMCP

from ..analysis import dt_sweep, estimate_plan, sensitivity_sweep
from ..models import GaConfig, MillingError, ProblemData
from ..utils import float_range, format_cost

logger = logging.getLogger("milling-ga")


def register_analysis_tools(
    mcp: FastMCP, get_settings: Callable[[], tuple[ProblemData, GaConfig]]
) -> None:
    """Register analysis tools with the MCP server."""

    @mcp.tool()
    async def constraint_sensitivity(
        d_t: float, kind: str = "both", start: float = 0.8, stop: float = 1.3, step: float = 0.05
    ) -> str:
        """Optimal unit cost as the force and/or power limit is scaled.

        Args:
            d_t: Total depth of cut in mm
            kind: "force", "power" or "both"
            start: Smallest multiplier on the limit
            stop: Largest multiplier on the limit
            step: Multiplier increment
        """
        try:
            problem, _ = get_settings()
            multipliers = float_range(start, stop, step)
            result = await asyncio.to_thread(sensitivity_sweep, d_t, kind, multipliers, problem)
            lines = []
            for p in result.points:
                cost = format_cost(p.unit_cost) if p.unit_cost is not None else f"infeasible ({p.message})"
                lines.append(f"{p.kind} x{p.multiplier:g}: {cost}")
            for k, slope in result.slopes.items():
                lines.append(f"Slope ({k}): {slope:.5g} $/piece per unit multiplier")
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error running sensitivity sweep")
            return f"Error: {str(e)}"

    @mcp.tool()
    async def depth_sweep(start: float, stop: float, step: float = 1.0) -> str:
        """Optimum plan and tool lives over a range of total depths of cut.

        Args:
            start: First total depth (mm)
            stop: Last total depth (mm)
            step: Increment (mm, multiple of 0.1)
        """
        try:
            problem, _ = get_settings()
            result = await asyncio.to_thread(dt_sweep, start, stop, step, problem)
            lines = []
            for row in result.rows:
                p = row.plan
                lines.append(
                    f"d_t = {row.d_t:g}: n = {p.n}, d_s = {p.d_s:g}, d_r = {p.d_r:g}, "
                    f"f_r = {p.f_r:.4f}, UC = {format_cost(row.unit_cost)}, "
                    f"T_s = {row.T_s:.0f}, T_r = {row.T_r:.0f}"
                )
            if result.skipped:
                lines.append("Skipped: " + ", ".join(f"{d:g}" for d in result.skipped))
            return "\n".join(lines) if lines else "No feasible depths in range."
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error running depth sweep")
            return f"Error: {str(e)}"

    @mcp.tool()
    async def estimate(d_t: float, allow_next_n: bool = False) -> str:
        """Estimate the optimum plan for a total depth without running the GA.

        Args:
            d_t: Total depth of cut in mm
            allow_next_n: Use one more rough pass if no pair has the computed count
        """
        try:
            problem, _ = get_settings()
            result = estimate_plan(d_t, problem, allow_next_n=allow_next_n)
            p = result.plan
            lines = [
                f"Estimated unit cost: {format_cost(result.unit_cost)}/piece",
                f"n = {p.n}, d_s = {p.d_s:g} mm, d_r = {p.d_r:g} mm",
                f"f_s = {p.f_s:.4f}, f_r = {p.f_r:.4f} mm/tooth; V_s = {p.V_s:.2f}, V_r = {p.V_r:.2f} m/min",
            ]
            lines += [f"- {name}: {rule}" for name, rule in result.provenance.items()]
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error estimating plan")
            return f"Error: {str(e)}"
