"""MCP tools for milling-ga.

This module provides the registration functions for all milling-ga MCP tools.
"""

from collections.abc import Callable

from mcp.server.fastmcp import FastMCP

from ..models import GaConfig, ProblemData
from .analysis import register_analysis_tools
from .optimize import register_optimize_tools
from .oracle import register_oracle_tools
from .problem import register_problem_tools


def register_all_tools(
    mcp: FastMCP, get_settings: Callable[[], tuple[ProblemData, GaConfig]]
) -> None:
    """Register all milling-ga tools with the MCP server.

    Args:
        mcp: The FastMCP server instance
        get_settings: A callable that returns the resolved (ProblemData, GaConfig)
    """
    register_problem_tools(mcp, get_settings)
    register_optimize_tools(mcp, get_settings)
    register_oracle_tools(mcp, get_settings)
    register_analysis_tools(mcp, get_settings)


__all__ = [
    "register_all_tools",
    "register_problem_tools",
    "register_optimize_tools",
    "register_oracle_tools",
    "register_analysis_tools",
]
