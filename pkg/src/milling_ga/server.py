"""milling-ga MCP server - the optimizer's operations as local stdio tools."""

import logging
import sys

from mcp.server.fastmcp import FastMCP

from .config import load_config
from .models import GaConfig, ProblemData
from .tools import register_all_tools

logger = logging.getLogger("milling-ga")

# Initialize FastMCP server
mcp = FastMCP("milling-ga")

# Lazy-resolved configuration (loaded on first tool call)
_settings: tuple[ProblemData, GaConfig] | None = None


def get_settings() -> tuple[ProblemData, GaConfig]:
    """Get or load the problem data and GA configuration."""
    global _settings
    if _settings is None:
        _settings = load_config()
    return _settings


# Register all tools with the MCP server
register_all_tools(mcp, get_settings)


def main() -> None:
    """Run the milling-ga MCP server."""
    # Log to stderr (stdout carries the MCP protocol)
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logger.info("Starting milling-ga MCP server")
    mcp.run(transport="stdio")


if __name__ == "__main__":
    main()
