"""Schema-theoretic population sizing.

A population of mu random strings of length l represents S(mu, l) schemata.
The gain G = (S - 2^l)/mu measures how many schemata each member adds beyond
the fully specified ones; the recommended population is the smallest mu that
reaches a fixed fraction of the best gain on the scan grid.
"""

import logging
import math
from decimal import Decimal, localcontext

from .constants import POPSIZE_GAIN_FRACTION, POPSIZE_LINEAR_STEP, POPSIZE_MAX_MU
from .models import InvalidInputError

logger = logging.getLogger("milling-ga")

# 3^l needs about 0.48 l digits; the 1 - 2^-i terms need l * 0.3 more
_PRECISION = 80


def _check(mu: int, l: int) -> None:
    if mu < 1:
        raise InvalidInputError("mu", f"population size must be at least 1, got {mu}")
    if l < 1:
        raise InvalidInputError("l", f"string length must be at least 1, got {l}")


def schema_count(mu: int, l: int) -> Decimal:
    """Expected number of schemata represented by mu random strings of length l."""
    _check(mu, l)
    with localcontext() as ctx:
        ctx.prec = _PRECISION
        total = Decimal(0)
        for i in range(l + 1):
            miss = (Decimal(1) - Decimal(1) / (Decimal(2) ** i)) ** mu
            total += math.comb(l, i) * (Decimal(2) ** i) * (Decimal(1) - miss)
        return +total


def population_gain(mu: int, l: int) -> float:
    """G = (S(mu, l) - 2^l) / mu."""
    with localcontext() as ctx:
        ctx.prec = _PRECISION
        return float((schema_count(mu, l) - Decimal(2) ** l) / mu)


def scan_grid(max_mu: int = POPSIZE_MAX_MU, step: int = POPSIZE_LINEAR_STEP) -> list[int]:
    """Doubling from 1 up to the linear step, then linear in that step up to max_mu."""
    grid = []
    mu = 1
    while mu < min(step, max_mu):
        grid.append(mu)
        mu *= 2
    grid.extend(range(step, max_mu + 1, step))
    if grid[-1] != max_mu:
        grid.append(max_mu)
    return grid


def gain_curve(
    l: int, max_mu: int = POPSIZE_MAX_MU, step: int = POPSIZE_LINEAR_STEP
) -> list[tuple[int, float]]:
    return [(mu, population_gain(mu, l)) for mu in scan_grid(max_mu, step)]


def recommend_population(
    l: int,
    max_mu: int = POPSIZE_MAX_MU,
    fraction: float = POPSIZE_GAIN_FRACTION,
    step: int = POPSIZE_LINEAR_STEP,
) -> int:
    """Smallest mu on the scan grid whose gain reaches fraction of the largest gain seen."""
    curve = gain_curve(l, max_mu, step)
    best = max(g for _, g in curve)
    chosen = next(mu for mu, g in curve if g >= fraction * best)
    logger.info(
        "Population sizing: l=%d, G_max=%.6g, recommended N=%d (%.1f%% of G_max)",
        l,
        best,
        chosen,
        100 * fraction,
    )
    return chosen
