"""Tests for CSV tables, literature comparison and report output."""

import json
from pathlib import Path

import pytest

from milling_ga.constants import ORACLE_COLUMNS, TABLE_COLUMNS
from milling_ga.lookup import enumerate_pairs
from milling_ga.models import GaConfig, ProblemData, RunManifest
from milling_ga.oracle import Oracle
from milling_ga.report import (
    emit_report,
    frame,
    literature_comparison,
    optimum_summary,
    oracle_frame,
    table_frame,
)


class TestFrames:
    """Tests for table builders."""

    def test_empty_frame_has_header(self) -> None:
        table = frame([], TABLE_COLUMNS)
        assert list(table.columns) == TABLE_COLUMNS
        assert table.empty

    def test_table_frame(self, coarse_problem: ProblemData) -> None:
        table = table_frame(enumerate_pairs(6.0, coarse_problem))
        assert len(table) == 9
        assert table.iloc[-1].tolist() == [9, 2.0, 4.0, 1]

    def test_oracle_frame_marks_global(self, coarse_problem: ProblemData) -> None:
        rows = Oracle(coarse_problem).enumerate_local_optima(6.0)
        table = oracle_frame(rows)
        assert list(table.columns) == ORACLE_COLUMNS
        marked = table[table["global"] == "*"]
        assert len(marked) == 1
        assert marked.iloc[0]["dr"] == 4.0


class TestLiteratureComparison:
    """Tests for literature_comparison and optimum_summary."""

    def test_two_references_at_eight(self) -> None:
        lines = literature_comparison(8.0, 1.7615)
        assert lines[0].startswith("5.2% better than An & Chen (2003)")
        assert lines[1].startswith("14.0% better than Shunmugam et al. (2000)")

    def test_no_reference(self) -> None:
        assert literature_comparison(7.0, 1.69) == []

    def test_worse_result(self) -> None:
        assert "worse" in literature_comparison(6.0, 1.5)[0]

    def test_summary_lines(self) -> None:
        lines = optimum_summary(6.0, 1.410545, "global optimum")
        assert lines[0] == "d_t = 6 mm: global optimum unit cost $1.4105 per piece"
        assert len(lines) == 2


class TestEmitReport:
    """Tests for emit_report."""

    def _emit(self, out: Path, coarse_problem: ProblemData) -> list[Path]:
        tables = {"table": table_frame(enumerate_pairs(6.0, coarse_problem))}
        manifest = RunManifest("table", coarse_problem, GaConfig(), [], {"dt": 6.0})
        return emit_report(out, tables, manifest, ["d_t = 6 mm: 9 pairs"])

    def test_writes_tables_summary_and_manifest(
        self, tmp_path: Path, coarse_problem: ProblemData
    ) -> None:
        written = self._emit(tmp_path / "out", coarse_problem)
        assert [p.name for p in written] == ["table.csv", "summary.txt", "manifest.json"]
        csv = (tmp_path / "out" / "table.csv").read_text(encoding="utf-8")
        assert csv.splitlines()[0] == "pair,ds_mm,dr_mm,n"
        assert csv.splitlines()[-1] == "9,2,4,1"
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "table"
        assert manifest["problem"]["d_s_step"] == 0.5
        assert manifest["outputs"] == ["table.csv", "summary.txt"]

    def test_repeatable_output(self, tmp_path: Path, coarse_problem: ProblemData) -> None:
        first = self._emit(tmp_path / "a", coarse_problem)
        second = self._emit(tmp_path / "b", coarse_problem)
        for a, b in zip(first, second, strict=True):
            assert a.read_bytes() == b.read_bytes()

    def test_unwritable_directory(self, tmp_path: Path, coarse_problem: ProblemData) -> None:
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(OSError):
            self._emit(blocker / "out", coarse_problem)
