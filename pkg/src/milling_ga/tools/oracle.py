"""Global-optimum oracle MCP tools."""

import asyncio
import logging
from collections.abc import Callable

from mcp.server.fastmcp import FastMCP

from ..models import GaConfig, MillingError, ProblemData
from ..oracle import Oracle

logger = logging.getLogger("milling-ga")


def register_oracle_tools(
    mcp: FastMCP, get_settings: Callable[[], tuple[ProblemData, GaConfig]]
) -> None:
    """Register oracle tools with the MCP server."""

    @mcp.tool()
    async def local_optima(d_t: float) -> str:
        """Constrained optimum of every depth allocation for a total depth of cut.

        The cheapest row (marked *) is the global optimum.

        Args:
            d_t: Total depth of cut in mm
        """
        try:
            problem, _ = get_settings()
            rows = await asyncio.to_thread(Oracle(problem).enumerate_local_optima, d_t)
            best = min(rows, key=lambda r: (r.UC, r.index))
            lines = ["d_s   d_r   n   UC_s     UC_r     UC"]
            for r in rows:
                mark = " *" if r is best else ""
                lines.append(
                    f"{r.d_s:<5g} {r.d_r:<5g} {r.n:<3} {r.UC_s:.5f}  {r.UC_r:.5f}  {r.UC:.4f}{mark}"
                )
            return "\n".join(lines)
        except MillingError as e:
            return f"Error: {e.message}"
        except Exception as e:
            logger.exception("Error enumerating local optima")
            return f"Error: {str(e)}"
