"""Configuration loading.

Values are layered: embedded defaults, then a flat ``key = value`` file, then
explicit overrides (command-line flags). Files are read with python-dotenv so
comments, quoting and blank lines follow the usual .env rules.
"""

import logging
import os
import types
from dataclasses import fields
from pathlib import Path
from typing import Any

from dotenv import dotenv_values, load_dotenv

from .constants import DEPTH_GRID_PRESETS
from .models import ConfigError, GaConfig, InvalidInputError, ProblemData

logger = logging.getLogger("milling-ga")

CONFIG_ENV = "MILLING_GA_CONFIG"
SEED_ENV = "MILLING_GA_SEED"
PRESET_KEY = "depth_grid"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _field_types(cls: type) -> dict[str, Any]:
    return {f.name: f.type for f in fields(cls)}


PROBLEM_KEYS = ProblemData.field_types()
GA_KEYS = _field_types(GaConfig)


def _parse(key: str, raw: Any, target: Any) -> Any:
    """Convert a raw value to the declared type of key."""
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(target, types.UnionType):  # int | None
            if text.lower() in ("", "none", "auto"):
                return None
            return int(text)
        if target is bool:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(f"expected a boolean, got {text!r}")
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        return text
    except ValueError as e:
        raise ConfigError(key, f"cannot parse {text!r}: {e}") from e


def _expand_preset(name: Any) -> dict[str, float]:
    if name not in DEPTH_GRID_PRESETS:
        raise ConfigError(
            PRESET_KEY, f"unknown depth grid {name!r}; expected one of {sorted(DEPTH_GRID_PRESETS)}"
        )
    return dict(DEPTH_GRID_PRESETS[name])


def _apply(layer: dict[str, Any], problem: dict[str, Any], ga: dict[str, Any], source: str) -> None:
    if PRESET_KEY in layer and layer[PRESET_KEY] is not None:
        problem.update(_expand_preset(layer[PRESET_KEY]))
    for key, raw in layer.items():
        if key == PRESET_KEY or raw is None:
            continue
        if key in PROBLEM_KEYS:
            problem[key] = _parse(key, raw, PROBLEM_KEYS[key])
        elif key in GA_KEYS:
            ga[key] = _parse(key, raw, GA_KEYS[key])
        else:
            raise ConfigError(key, f"unknown key in {source}")


def read_config_file(path: str | Path) -> dict[str, str | None]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    values = dotenv_values(path)
    for key, value in values.items():
        if value is None:
            raise ConfigError(key, f"missing value in {path}")
    return dict(values)


def load_config(
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> tuple[ProblemData, GaConfig]:
    """Resolve ProblemData and GaConfig from defaults, a config file and overrides.

    Without an explicit path, MILLING_GA_CONFIG names the file if set.
    MILLING_GA_SEED supplies a default seed below the file layer.
    """
    load_dotenv()
    problem_values: dict[str, Any] = {}
    ga_values: dict[str, Any] = {}

    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        ga_values["seed"] = _parse("seed", env_seed, int)

    path = path or os.environ.get(CONFIG_ENV) or None
    if path is not None:
        _apply(read_config_file(path), problem_values, ga_values, str(path))
    if overrides:
        _apply(overrides, problem_values, ga_values, "overrides")

    try:
        problem = ProblemData(**problem_values)
        problem.validate()
        ga = GaConfig(**ga_values)
        ga.validate()
    except InvalidInputError as e:
        raise ConfigError(e.field, e.message) from e

    overridden = sorted({**problem_values, **ga_values})
    effective = {**problem.to_dict(), **ga.to_dict()}
    logger.info(
        "Effective configuration: %s",
        ", ".join(f"{k}={effective[k]}" for k in sorted(effective)),
    )
    logger.info(
        "Keys set by file, environment or flags: %s", ", ".join(overridden) if overridden else "none"
    )
    return problem, ga
