"""Lookup table of feasible (d_s, d_r, n) depth allocations for a total depth."""

import logging

from .models import NoFeasibleAllocationError, PairEntry, PairTable, PassKind, ProblemData
from .utils import to_quanta

logger = logging.getLogger("milling-ga")


def _grid(problem: ProblemData, kind: PassKind) -> range:
    lo, hi, step = problem.depth_bounds(kind)
    name = "d_s" if kind is PassKind.FINISH else "d_r"
    q_lo = to_quanta(lo, f"{name}_min")
    q_hi = to_quanta(hi, f"{name}_max")
    q_step = to_quanta(step, f"{name}_step")
    return range(q_lo, q_hi + 1, q_step)


def enumerate_pairs(d_t: float, problem: ProblemData) -> PairTable:
    """Build the ordered table of grid pairs for which (d_t - d_s)/d_r is a positive integer.

    Depths are compared as integer counts of 0.1 mm so the divisibility test is exact.
    Entries are sorted by (d_s, d_r) and numbered from 1.
    """
    dt_q = to_quanta(d_t, "d_t")
    if dt_q <= 0:
        raise NoFeasibleAllocationError(d_t, "total depth must be positive")

    entries: list[PairEntry] = []
    for ds_q in _grid(problem, PassKind.FINISH):
        remaining = dt_q - ds_q
        if remaining <= 0:
            continue
        for dr_q in _grid(problem, PassKind.ROUGH):
            n, rest = divmod(remaining, dr_q)
            if rest == 0 and n >= 1:
                entries.append(PairEntry(index=len(entries) + 1, ds_q=ds_q, dr_q=dr_q, n=n))

    if not entries:
        raise NoFeasibleAllocationError(
            d_t, "no finish/rough depth pair on the depth grid divides the remaining depth"
        )
    logger.debug("Lookup table for d_t = %g mm has %d pairs", d_t, len(entries))
    return PairTable(dt_q=dt_q, entries=tuple(entries))


def pair_at(table: PairTable, index: int) -> PairEntry:
    """Return the entry at a 1-based position."""
    if not 1 <= index <= len(table):
        raise IndexError(f"pair index {index} outside 1..{len(table)}")
    return table.entries[index - 1]
