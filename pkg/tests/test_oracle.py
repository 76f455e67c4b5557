"""Tests for the global-optimum oracle."""

import logging
from dataclasses import replace

import pytest

from milling_ga.models import (
    InfeasiblePassError,
    InvalidInputError,
    NoFeasibleAllocationError,
    PassKind,
    ProblemData,
)
from milling_ga.oracle import Oracle, global_optimum

# (d_s, d_r, n) -> published local optimum on the coarse grid, rough depth >= 1 mm
PUBLISHED_LOCAL_OPTIMA = {
    (1.0, 1.0, 5): 2.6413,
    (1.0, 2.5, 2): 1.6741,
    (1.5, 1.5, 3): 1.9762,
    (2.0, 1.0, 4): 2.3297,
    (2.0, 2.0, 2): 1.6675,
    (2.0, 4.0, 1): 1.4102,
}


class TestOptimizePass:
    """Tests for single-pass optimization."""

    def test_rough_pass_on_force_and_power_limits(self, oracle: Oracle) -> None:
        result = oracle.optimize_pass(PassKind.ROUGH, 4.0)
        assert result.f == pytest.approx(0.31951, rel=1e-3)
        assert result.V == pytest.approx(60.0169, rel=1e-3)
        assert result.cost == pytest.approx(0.471992, rel=1e-4)
        assert "force" in result.active
        assert "power" in result.active

    def test_finish_pass_on_roughness_limit(self, oracle: Oracle) -> None:
        result = oracle.optimize_pass(PassKind.FINISH, 2.0)
        assert result.f == pytest.approx(0.2790728, rel=1e-6)
        assert result.cost == pytest.approx(0.563553, rel=1e-4)
        assert "roughness" in result.active

    def test_finish_pass_at_one_millimetre(self, oracle: Oracle) -> None:
        assert oracle.optimize_pass(PassKind.FINISH, 1.0).cost == pytest.approx(0.53660, rel=1e-3)

    def test_cached(self, oracle: Oracle) -> None:
        assert oracle.optimize_pass(PassKind.ROUGH, 2.5) is oracle.optimize_pass(PassKind.ROUGH, 2.5)

    @pytest.mark.parametrize(
        ("kind", "depth"),
        [
            (PassKind.FINISH, 1.0),
            (PassKind.FINISH, 1.5),
            (PassKind.ROUGH, 1.0),
            (PassKind.ROUGH, 2.0),
            (PassKind.ROUGH, 4.0),
        ],
    )
    def test_grid_method_agrees(self, problem: ProblemData, kind: PassKind, depth: float) -> None:
        """Test that the dense-grid solver confirms the candidate solver."""
        candidates = Oracle(problem).optimize_pass(kind, depth)
        grid = Oracle(problem, method="grid").optimize_pass(kind, depth)
        assert grid.cost == pytest.approx(candidates.cost, rel=1e-4)
        assert grid.cost >= candidates.cost * (1 - 1e-9)

    def test_force_limit_too_tight(self, problem: ProblemData) -> None:
        with pytest.raises(InfeasiblePassError) as exc:
            Oracle(replace(problem, F_max=50.0)).optimize_pass(PassKind.ROUGH, 4.0)
        assert exc.value.constraint == "force"

    def test_power_limit_too_tight(self, problem: ProblemData) -> None:
        with pytest.raises(InfeasiblePassError) as exc:
            Oracle(replace(problem, P_max=0.5)).optimize_pass(PassKind.ROUGH, 4.0)
        assert exc.value.constraint == "power"

    def test_depth_outside_bounds(self, oracle: Oracle) -> None:
        with pytest.raises(InvalidInputError):
            oracle.optimize_pass(PassKind.FINISH, 3.0)

    def test_unknown_method(self, problem: ProblemData) -> None:
        with pytest.raises(InvalidInputError):
            Oracle(problem, method="simplex")


class TestLocalOptima:
    """Tests for enumerate_local_optima and global_optimum."""

    def test_one_row_per_pair(self, coarse_problem: ProblemData) -> None:
        rows = Oracle(coarse_problem).enumerate_local_optima(6.0)
        assert len(rows) == 9
        assert [r.index for r in rows] == list(range(1, 10))
        for r in rows:
            assert r.UC == pytest.approx(r.UC_s + r.n * r.UC_r + 0.375, rel=1e-12)

    def test_shared_rough_depth_shares_cost(self, coarse_problem: ProblemData) -> None:
        rows = Oracle(coarse_problem).enumerate_local_optima(6.0)
        by_depth: dict[float, set[float]] = {}
        for r in rows:
            by_depth.setdefault(r.d_r, set()).add(r.UC_r)
        assert all(len(costs) == 1 for costs in by_depth.values())

    def test_close_to_published_local_optima(self, coarse_problem: ProblemData) -> None:
        rows = Oracle(coarse_problem).enumerate_local_optima(6.0)
        found = {(r.d_s, r.d_r, r.n): r.UC for r in rows}
        for key, published in PUBLISHED_LOCAL_OPTIMA.items():
            assert found[key] == pytest.approx(published, rel=0.02)

    def test_global_optimum_at_six(self, oracle: Oracle) -> None:
        best = oracle.global_optimum(6.0)
        assert (best.d_s, best.d_r, best.n) == (2.0, 4.0, 1)
        assert best.UC == pytest.approx(1.410545, rel=1e-5)
        assert best.UC == pytest.approx(1.4102, rel=5e-4)

    def test_published_sweep(
        self, problem: ProblemData, published_optima: dict[float, float]
    ) -> None:
        """Test the oracle against the published optimum over d_t = 6..16 mm."""
        oracle = Oracle(problem)
        passes = []
        for d_t, published in published_optima.items():
            best = oracle.global_optimum(d_t)
            tolerance = 0.01 if d_t == 9.0 else 0.005
            assert best.UC == pytest.approx(published, rel=tolerance)
            passes.append(best.n)
        assert passes == [1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4]

    def test_skips_pairs_with_infeasible_pass(self, coarse_problem: ProblemData) -> None:
        """Test that a pair is dropped when its rough depth cannot meet the force limit."""
        tight = replace(coarse_problem, F_max=300.0)
        rows = Oracle(tight).enumerate_local_optima(6.0)
        assert 0 < len(rows) < 9
        assert all(r.d_r < 4.0 for r in rows)

    def test_no_feasible_pair(self, problem: ProblemData) -> None:
        with pytest.raises(NoFeasibleAllocationError):
            global_optimum(6.0, replace(problem, P_max=0.1))

    def test_strict_mode_raises_on_infeasible_pass(self, coarse_problem: ProblemData) -> None:
        tight = replace(coarse_problem, F_max=300.0)
        with pytest.raises(InfeasiblePassError) as exc:
            Oracle(tight).enumerate_local_optima(6.0, strict=True)
        assert exc.value.constraint == "force"

    def test_skipped_pairs_are_warned(
        self, coarse_problem: ProblemData, caplog: pytest.LogCaptureFixture
    ) -> None:
        tight = replace(coarse_problem, F_max=300.0)
        with caplog.at_level(logging.WARNING, logger="milling-ga"):
            rows = Oracle(tight).enumerate_local_optima(6.0)
        skipped = [r for r in caplog.records if "skipping pair" in r.getMessage()]
        assert len(skipped) == 9 - len(rows)
        assert all(r.levelno == logging.WARNING for r in skipped)
