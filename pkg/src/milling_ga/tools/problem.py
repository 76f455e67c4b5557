"""Model and lookup-table MCP tools."""

import logging
from collections.abc import Callable

from mcp.server.fastmcp import FastMCP

from ..cutting_model import CuttingModel
from ..lookup import enumerate_pairs
from ..models import GaConfig, MillingError, Plan, ProblemData

logger = logging.getLogger("milling-ga")


def register_problem_tools(
    mcp: FastMCP, get_settings: Callable[[], tuple[ProblemData, GaConfig]]
) -> None:
    """Register model and lookup tools with the MCP server."""

    @mcp.tool()
    async def derive_coefficients() -> str:
        """Show the derived model constants and how they compare with the printed ones."""
        try:
            problem, _ = get_settings()
            model = CuttingModel(problem, log_findings=False)
            lines = [f"Coefficient mode: {problem.coefficients}"]
            for f in model.derived.consistency:
                flag = "" if f.status == "ok" else f"  [{f.status}]"
                lines.append(f"- {f.name}: derived {f.derived:.6g}, printed {f.printed:.6g}{flag}")
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error deriving coefficients")
            return f"Error: {str(e)}"

    @mcp.tool()
    async def lookup_table(d_t: float) -> str:
        """List every (d_s, d_r, n) allocation that removes a total depth of cut.

        Args:
            d_t: Total depth of cut in mm, on the 0.1 mm grid
        """
        try:
            problem, _ = get_settings()
            table = enumerate_pairs(d_t, problem)
            lines = [f"{len(table)} pairs for d_t = {d_t:g} mm:"]
            for e in table:
                lines.append(f"{e.index:>3}. d_s = {e.d_s:g} mm, d_r = {e.d_r:g} mm, n = {e.n}")
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error building lookup table")
            return f"Error: {str(e)}"

    @mcp.tool()
    async def evaluate_plan(
        V_s: float, f_s: float, d_s: float, V_r: float, f_r: float, d_r: float, n: int
    ) -> str:
        """Unit cost, cost breakdown, tool lives and constraint slacks of a cutting plan.

        Args:
            V_s: Finish cutting speed (m/min)
            f_s: Finish feed (mm/tooth)
            d_s: Finish depth of cut (mm)
            V_r: Rough cutting speed (m/min)
            f_r: Rough feed (mm/tooth)
            d_r: Rough depth of cut (mm)
            n: Number of rough passes
        """
        try:
            problem, _ = get_settings()
            model = CuttingModel(problem, log_findings=False)
            plan = Plan(V_s, f_s, d_s, V_r, f_r, d_r, n)
            cost = model.unit_cost(plan)
            parts = model.cost_breakdown(plan)
            T_s, T_r = model.tool_lives(plan)
            report = model.constraint_report(plan)
            lines = [
                f"Unit cost: ${cost:.4f}/piece",
                f"CM ${parts.CM:.4f}, CI ${parts.CI:.4f}, CR ${parts.CR:.4f}, CT ${parts.CT:.4f}",
                f"Tool life: T_s = {T_s:.1f} min, T_r = {T_r:.1f} min",
                f"CV = {report.cv:.4g} ({'feasible' if report.feasible else 'infeasible'})",
            ]
            violated = report.violated()
            if violated:
                lines.append("Violated: " + ", ".join(violated))
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error evaluating plan")
            return f"Error: {str(e)}"
