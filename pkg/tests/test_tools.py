"""Tests for the MCP tool layer."""

from collections.abc import Awaitable, Callable
from dataclasses import replace
from typing import Any

import pytest

from milling_ga.constants import DEPTH_GRID_PRESETS
from milling_ga.models import GaConfig, ProblemData
from milling_ga.tools import register_all_tools

ToolFn = Callable[..., Awaitable[str]]


class RecordingMCP:
    """Stand-in server that keeps registered tool functions by name."""

    def __init__(self) -> None:
        self.tools: dict[str, ToolFn] = {}

    def tool(self) -> Callable[[ToolFn], ToolFn]:
        def register(fn: ToolFn) -> ToolFn:
            self.tools[fn.__name__] = fn
            return fn

        return register


@pytest.fixture
def tools() -> dict[str, ToolFn]:
    problem = ProblemData(**DEPTH_GRID_PRESETS["coarse"])
    config = GaConfig(population=20, generations=3)
    server = RecordingMCP()
    register_all_tools(server, lambda: (problem, config))  # type: ignore[arg-type]
    return server.tools


class TestRegistration:
    """Tests for tool registration."""

    def test_all_tools_registered(self, tools: dict[str, ToolFn]) -> None:
        assert sorted(tools) == [
            "constraint_sensitivity",
            "depth_sweep",
            "derive_coefficients",
            "estimate",
            "evaluate_plan",
            "local_optima",
            "lookup_table",
            "optimize",
        ]

    async def test_server_lists_tools(self) -> None:
        from milling_ga.server import mcp

        names = {tool.name for tool in await mcp.list_tools()}
        assert {"optimize", "local_optima", "lookup_table"} <= names


class TestToolCalls:
    """Tests for calling tools."""

    async def test_lookup_table(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["lookup_table"](d_t=6.0)
        assert result.startswith("9 pairs for d_t = 6 mm:")
        assert "d_s = 2 mm, d_r = 4 mm, n = 1" in result

    async def test_lookup_table_error(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["lookup_table"](d_t=0.5)
        assert result.startswith("Error: No feasible depth allocation")

    async def test_derive_coefficients(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["derive_coefficients"]()
        assert "[swapped]" in result

    async def test_evaluate_plan(self, tools: dict[str, ToolFn]) -> None:
        plan: dict[str, Any] = {
            "V_s": 122.23, "f_s": 0.279, "d_s": 2.0, "V_r": 60.12, "f_r": 0.3187, "d_r": 4.0, "n": 1
        }
        result = await tools["evaluate_plan"](**plan)
        assert "Unit cost: $1.41" in result
        assert "(feasible)" in result
        result = await tools["evaluate_plan"](**{**plan, "f_r": 0.35})
        assert "force_rough" in result

    async def test_local_optima(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["local_optima"](d_t=6.0)
        lines = result.splitlines()
        assert len(lines) == 10
        assert lines[-1].endswith("*")

    async def test_optimize(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["optimize"](d_t=6.0, seed=1)
        assert result.startswith("Best unit cost: $")
        assert "Seed 1, 80 evaluations" in result

    async def test_estimate(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["estimate"](d_t=6.0)
        assert "n = 1, d_s = 2 mm, d_r = 4 mm" in result

    async def test_estimate_error(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["estimate"](d_t=6.05)
        assert result.startswith("Error: Invalid d_t")

    async def test_constraint_sensitivity(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["constraint_sensitivity"](d_t=6.0, kind="power", start=1.0, stop=1.1, step=0.1)
        assert "power x1:" in result
        assert "Slope (power)" in result

    async def test_depth_sweep(self, tools: dict[str, ToolFn]) -> None:
        result = await tools["depth_sweep"](start=6.0, stop=7.0)
        assert result.splitlines()[0].startswith("d_t = 6: n = 1")


def test_settings_are_resolved_once(monkeypatch: pytest.MonkeyPatch) -> None:
    from milling_ga import server

    calls = []

    def fake_load() -> tuple[ProblemData, GaConfig]:
        calls.append(1)
        return replace(ProblemData(), P_max=11.0), GaConfig()

    monkeypatch.setattr(server, "_settings", None)
    monkeypatch.setattr(server, "load_config", fake_load)
    assert server.get_settings()[0].P_max == 11.0
    server.get_settings()
    assert len(calls) == 1
