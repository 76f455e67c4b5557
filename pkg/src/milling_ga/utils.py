"""Shared utility functions for milling-ga."""

import math

import numpy as np

from .constants import DEPTH_QUANTUM_MM
from .models import InvalidInputError


def format_cost(amount: float) -> str:
    """Format a unit cost in $/piece."""
    return f"${amount:.4f}"


def format_pct(value: float) -> str:
    """Format a percentage with one decimal."""
    return f"{value:.1f}%"


def to_quanta(value_mm: float, name: str = "depth") -> int:
    """Convert a depth in mm to an integer count of 0.1 mm quanta.

    Raises InvalidInputError when the value does not sit on the quantum grid.
    """
    if not math.isfinite(value_mm):
        raise InvalidInputError(name, f"{value_mm} is not a finite number")
    quanta = round(value_mm / DEPTH_QUANTUM_MM)
    if abs(quanta * DEPTH_QUANTUM_MM - value_mm) > 1e-9:
        raise InvalidInputError(name, f"{value_mm} mm is not a multiple of {DEPTH_QUANTUM_MM} mm")
    return int(quanta)


def from_quanta(quanta: int) -> float:
    """Convert a count of 0.1 mm quanta back to mm."""
    return round(quanta * DEPTH_QUANTUM_MM, 10)


def depth_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive range of depths on the 0.1 mm grid, computed in quanta."""
    lo = to_quanta(start, "from")
    hi = to_quanta(stop, "to")
    q_step = to_quanta(step, "step")
    if q_step <= 0:
        raise InvalidInputError("step", f"must be positive, got {step}")
    if hi < lo:
        raise InvalidInputError("to", f"{stop} is below the start {start}")
    return [from_quanta(q) for q in range(lo, hi + 1, q_step)]


def float_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive float range that does not drift (used for multiplier grids)."""
    if step <= 0:
        raise InvalidInputError("step", f"must be positive, got {step}")
    if stop < start:
        raise InvalidInputError("to", f"{stop} is below the start {start}")
    count = int(round((stop - start) / step)) + 1
    values = np.linspace(start, start + (count - 1) * step, count)
    return [round(float(v), 10) for v in values]


def relative_gap(value: float, reference: float) -> float:
    """Signed relative distance of value from reference."""
    return (value - reference) / reference


def improvement_pct(reference: float, obtained: float) -> float:
    """Percentage by which a published cost exceeds the obtained one, relative to the obtained."""
    return 100.0 * (reference - obtained) / obtained
