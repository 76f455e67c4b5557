"""Tests for configuration loading."""

import logging
from pathlib import Path

import pytest

from milling_ga.config import CONFIG_ENV, SEED_ENV, load_config, read_config_file
from milling_ga.constants import DEFAULT_SEED
from milling_ga.models import ConfigError, GaConfig, ProblemData


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Isolate tests from the caller's environment and any local .env file."""
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    monkeypatch.delenv(SEED_ENV, raising=False)
    monkeypatch.chdir(tmp_path)


def _write(tmp_path: Path, text: str, name: str = "run.cfg") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadConfig:
    """Tests for load_config."""

    def test_defaults(self) -> None:
        problem, ga = load_config()
        assert problem == ProblemData()
        assert ga == GaConfig()
        assert ga.seed == DEFAULT_SEED

    def test_file_overrides_one_key(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "# stronger spindle\nP_max = 12\npopulation = 100\n")
        problem, ga = load_config(path)
        assert problem.P_max == 12.0
        assert problem.F_max == ProblemData().F_max
        assert ga.population == 100

    def test_overrides_win_over_file(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "P_max = 12\nseed = 5\n")
        problem, ga = load_config(path, {"P_max": 11.0, "seed": 9})
        assert problem.P_max == 11.0
        assert ga.seed == 9

    def test_depth_grid_preset(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "depth_grid = coarse\nd_r_min = 1.0\n")
        problem, _ = load_config(path)
        assert problem.d_s_step == 0.5
        assert problem.d_r_step == 0.5
        assert problem.d_r_min == 1.0

    def test_shipped_coarse_config(self) -> None:
        path = Path(__file__).resolve().parents[1] / "configs" / "coarse_depth_grid.cfg"
        problem, ga = load_config(path)
        assert problem.d_r_min == 0.5
        assert ga.population == 750

    def test_boolean_and_optional_values(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "recompute_travel = yes\nindex_bits = auto\ncoefficients = printed\n")
        problem, ga = load_config(path)
        assert problem.recompute_travel is True
        assert problem.coefficients == "printed"
        assert ga.index_bits is None

    def test_seed_from_environment(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        monkeypatch.setenv(SEED_ENV, "321")
        _, ga = load_config()
        assert ga.seed == 321
        path = _write(tmp_path, "seed = 4\n")
        _, ga = load_config(path)
        assert ga.seed == 4

    def test_file_from_environment(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        path = _write(tmp_path, "F_max = 900\n")
        monkeypatch.setenv(CONFIG_ENV, str(path))
        problem, _ = load_config()
        assert problem.F_max == 900.0

    def test_non_positive_step_rejected(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "d_s_step = 0\n")
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert exc.value.key == "d_s_step"

    def test_unknown_key_rejected(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "spindle_colour = red\n")
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert exc.value.key == "spindle_colour"

    def test_unparsable_value_rejected(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "population = many\n")
        with pytest.raises(ConfigError) as exc:
            load_config(path)
        assert exc.value.key == "population"

    def test_unknown_preset_rejected(self) -> None:
        with pytest.raises(ConfigError) as exc:
            load_config(overrides={"depth_grid": "metric"})
        assert exc.value.key == "depth_grid"

    def test_odd_population_rejected(self) -> None:
        with pytest.raises(ConfigError) as exc:
            load_config(overrides={"population": 75})
        assert exc.value.key == "population"


class TestReadConfigFile:
    """Tests for read_config_file."""

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "absent.cfg")

    def test_key_without_value(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "P_max\n")
        with pytest.raises(ConfigError) as exc:
            read_config_file(path)
        assert exc.value.key == "P_max"


class TestEffectiveConfigEcho:
    """Tests for the effective-configuration log lines."""

    def test_echo_lists_every_resolved_key(
        self, tmp_path: Path, caplog: pytest.LogCaptureFixture
    ) -> None:
        path = _write(tmp_path, "P_max = 12\n")
        with caplog.at_level(logging.INFO, logger="milling-ga"):
            problem, ga = load_config(path)
        echo = next(r.getMessage() for r in caplog.records if r.getMessage().startswith("Effective"))
        for key, value in {**problem.to_dict(), **ga.to_dict()}.items():
            assert f"{key}={value}" in echo
        assert "P_max=12.0" in echo
        assert "population=750" in echo
        keys = next(r.getMessage() for r in caplog.records if r.getMessage().startswith("Keys set"))
        assert keys.endswith("P_max")

    def test_echo_with_defaults_only(self, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level(logging.INFO, logger="milling-ga"):
            load_config()
        messages = [r.getMessage() for r in caplog.records]
        assert any(m.startswith("Effective configuration: B=100.0") for m in messages)
        assert "Keys set by file, environment or flags: none" in messages
