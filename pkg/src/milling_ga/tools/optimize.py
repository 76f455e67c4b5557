"""GA optimization MCP tools."""

import asyncio
import logging
from collections.abc import Callable
from dataclasses import replace

from mcp.server.fastmcp import FastMCP

from ..cutting_model import CuttingModel
from ..ga import GeneticAlgorithm
from ..models import GaConfig, MillingError, ProblemData
from ..report import literature_comparison
from ..utils import format_cost

logger = logging.getLogger("milling-ga")


def register_optimize_tools(
    mcp: FastMCP, get_settings: Callable[[], tuple[ProblemData, GaConfig]]
) -> None:
    """Register GA tools with the MCP server."""

    @mcp.tool()
    async def optimize(
        d_t: float,
        seed: int | None = None,
        population: int | None = None,
        generations: int | None = None,
    ) -> str:
        """Run the genetic algorithm for a total depth of cut.

        Args:
            d_t: Total depth of cut in mm
            seed: Random seed (defaults to the configured seed)
            population: Population size (even, defaults to 750)
            generations: Number of generations (defaults to 100)
        """
        try:
            problem, config = get_settings()
            changes = {
                k: v
                for k, v in (("population", population), ("generations", generations))
                if v is not None
            }
            config = replace(config, **changes)
            model = CuttingModel(problem, log_findings=False)
            engine = GeneticAlgorithm(problem, config, model=model)
            result = await asyncio.to_thread(engine.run, d_t, seed)

            plan = result.best.plan
            T_s, T_r = model.tool_lives(plan)
            lines = [
                f"Best unit cost: {format_cost(result.best.unit_cost)}/piece (CV = {result.best.cv:.3g})",
                f"Finish: V_s = {plan.V_s:.2f} m/min, f_s = {plan.f_s:.4f} mm/tooth, d_s = {plan.d_s:g} mm",
                f"Rough:  V_r = {plan.V_r:.2f} m/min, f_r = {plan.f_r:.4f} mm/tooth, d_r = {plan.d_r:g} mm x {plan.n}",
                f"Tool life: T_s = {T_s:.1f} min, T_r = {T_r:.1f} min",
                f"Seed {result.seed}, {result.evaluations} evaluations",
            ]
            if result.converged_at is not None:
                lines.append(f"Population gap below threshold from generation {result.converged_at}")
            lines += literature_comparison(d_t, result.best.unit_cost)
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error running GA")
            return f"Error: {str(e)}"
