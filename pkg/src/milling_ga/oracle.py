"""Global-optimum oracle.

For every lookup-table pair the finish and rough passes are minimized
separately over (V, f) under the force, power and surface-finish limits, and
the pair costs are assembled into per-pair local optima. The cheapest pair is
the global optimum the GA is measured against.

Two solvers are available. "candidates" (default) reduces each pass to a
one-dimensional problem in f: for fixed f the cost is convex in V, so the best
V is the unconstrained stationary speed clamped into the feasible speed range.
The reduced cost is piecewise made of power terms in f, so its minimum lies at
a piece boundary or at a stationary point of a two-term piece; all of them are
enumerated. "grid" scans a dense (V, f) grid and refines the best cell with
nested bounded scalar minimization.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import optimize

from .constants import FEASIBILITY_TOL, ORACLE_GRID_POINTS
from .cutting_model import CuttingModel
from .lookup import enumerate_pairs
from .models import (
    InfeasiblePassError,
    InvalidInputError,
    NoFeasibleAllocationError,
    OracleRow,
    PassKind,
    PassOptimum,
    ProblemData,
)
from .utils import to_quanta

logger = logging.getLogger("milling-ga")

METHODS = ("candidates", "grid")
_ACTIVE_RTOL = 1e-7
_GRID_CHUNK = 100


@dataclass(frozen=True)
class _PassBox:
    """Feasible region of one pass at a fixed depth, reduced to bounds in f and V(f)."""

    kind: PassKind
    depth: float
    a: float
    b_d: float  # b * d^n2
    c: float
    n1: float
    n3: float
    n5: float
    V_min: float
    V_max: float
    f_min: float
    f_max: float
    f_roughness: float
    f_force: float
    power_coef: float  # V_P(f) = power_coef * f^-n5
    f_hi: float

    def speed_cap(self, f: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return np.minimum(self.V_max, self.power_coef * np.asarray(f, float) ** -self.n5)

    def cost(self, V: npt.ArrayLike, f: npt.ArrayLike) -> npt.NDArray[np.float64]:
        V, f = np.asarray(V, float), np.asarray(f, float)
        return np.asarray(self.a / (V * f) + self.b_d * V ** (self.n1 - 1) * f ** (self.n3 - 1) + self.c)

    def best_speed(self, f: npt.ArrayLike) -> npt.NDArray[np.float64]:
        f = np.asarray(f, float)
        upper = self.speed_cap(f)
        if self.n1 <= 1 or self.b_d <= 0:
            return upper
        stationary = (self.a / ((self.n1 - 1) * self.b_d * f**self.n3)) ** (1 / self.n1)
        return np.clip(stationary, self.V_min, upper)


def _two_term_stationary(A: float, p: float, B: float, q: float) -> float | None:
    """Stationary point of A f^p + B f^q for f > 0, if one exists."""
    if p == q or A == 0 or p == 0:
        return None
    ratio = -q * B / (p * A)
    if ratio <= 0:
        return None
    return float(ratio ** (1 / (p - q)))


class Oracle:
    """Per-pass constrained optimizer with per-depth caching."""

    def __init__(
        self,
        problem: ProblemData,
        model: CuttingModel | None = None,
        method: str = "candidates",
        grid_points: int = ORACLE_GRID_POINTS,
    ):
        if method not in METHODS:
            raise InvalidInputError("method", f"expected one of {METHODS}, got {method!r}")
        self.problem = problem
        self.model = model or CuttingModel(problem)
        self.method = method
        self.grid_points = grid_points
        self._cache: dict[tuple[PassKind, int], PassOptimum] = {}

    # ---------- single pass ----------

    def _box(self, kind: PassKind, d: float) -> _PassBox:
        p = self.problem
        k = self.model.coefficients
        d_min, d_max, _ = p.depth_bounds(kind)
        if not d_min - 1e-9 <= d <= d_max + 1e-9:
            raise InvalidInputError("d", f"{kind} depth {d} outside [{d_min}, {d_max}]")

        a, b, c = k.pass_coefficients(kind)
        V_min, V_max = p.speed_bounds(kind)
        f_min, f_max = p.feed_bounds(kind)
        f_roughness = self.model.feed_upper_bound(kind)
        f_force = self.model.force_feed_cap(d)
        power_coef = p.P_max / (k.C2 * d**k.n4)
        f_power = (power_coef / V_min) ** (1 / k.n5)

        floor = f_min * (1 - FEASIBILITY_TOL)
        if f_roughness < floor:
            raise InfeasiblePassError(kind, d, "roughness")
        if f_force < floor:
            raise InfeasiblePassError(kind, d, "force")
        if f_power < floor:
            raise InfeasiblePassError(kind, d, "power")

        return _PassBox(
            kind=kind,
            depth=d,
            a=a,
            b_d=b * d**k.n2,
            c=c,
            n1=k.n1,
            n3=k.n3,
            n5=k.n5,
            V_min=V_min,
            V_max=V_max,
            f_min=f_min,
            f_max=f_max,
            f_roughness=f_roughness,
            f_force=f_force,
            power_coef=power_coef,
            f_hi=max(f_min, min(f_roughness, f_force, f_power)),
        )

    def _candidate_feeds(self, box: _PassBox) -> list[float]:
        feeds = [box.f_min, box.f_hi]
        n1, n3, n5 = box.n1, box.n3, box.n5

        # boundaries where the clamped speed switches regime
        feeds.append((box.power_coef / box.V_max) ** (1 / n5))
        if n1 > 1 and box.b_d > 0 and n3 != 0:
            K = (box.a / ((n1 - 1) * box.b_d)) ** (1 / n1)
            if K > 0:
                for V in (box.V_min, box.V_max):
                    feeds.append((K / V) ** (n1 / n3))
                exponent = n5 - n3 / n1
                if exponent != 0:
                    feeds.append((box.power_coef / K) ** (1 / exponent))

        # stationary points of the constant-speed and power-limited pieces
        for V in (box.V_min, box.V_max):
            f = _two_term_stationary(box.a / V, -1.0, box.b_d * V ** (n1 - 1), n3 - 1)
            if f is not None:
                feeds.append(f)
        f = _two_term_stationary(
            box.a / box.power_coef,
            n5 - 1,
            box.b_d * box.power_coef ** (n1 - 1),
            -n5 * (n1 - 1) + n3 - 1,
        )
        if f is not None:
            feeds.append(f)

        return [f for f in feeds if np.isfinite(f) and box.f_min <= f <= box.f_hi]

    def _solve_candidates(self, box: _PassBox) -> tuple[float, float, float]:
        feeds = np.array(sorted(set(self._candidate_feeds(box))))
        speeds = box.best_speed(feeds)
        costs = box.cost(speeds, feeds)
        best = int(np.argmin(costs))
        return float(speeds[best]), float(feeds[best]), float(costs[best])

    def _solve_grid(self, box: _PassBox) -> tuple[float, float, float]:
        points = self.grid_points
        speeds = np.linspace(box.V_min, box.V_max, points)
        feeds = np.linspace(box.f_min, box.f_hi, points)
        best = (np.inf, box.V_min, box.f_min)
        for start in range(0, points, _GRID_CHUNK):
            f = feeds[start : start + _GRID_CHUNK, None]
            cost = box.cost(speeds[None, :], f)
            cost = np.where(speeds[None, :] <= box.speed_cap(f) * (1 + 1e-12), cost, np.inf)
            row, col = np.unravel_index(int(np.argmin(cost)), cost.shape)
            if cost[row, col] < best[0]:
                best = (float(cost[row, col]), float(speeds[col]), float(f[row, 0]))

        def inner(f: float) -> tuple[float, float]:
            upper = float(box.speed_cap(f))
            if upper - box.V_min <= 1e-12:
                return float(box.cost(box.V_min, f)), box.V_min
            res = optimize.minimize_scalar(
                lambda V: float(box.cost(V, f)),
                bounds=(box.V_min, upper),
                method="bounded",
                options={"xatol": 1e-9},
            )
            # the bounded solver never lands exactly on a bound
            edge = min((box.V_min, upper), key=lambda V: float(box.cost(V, f)))
            if float(box.cost(edge, f)) <= res.fun:
                return float(box.cost(edge, f)), edge
            return float(res.fun), float(res.x)

        step = (box.f_hi - box.f_min) / max(points - 1, 1)
        lo = max(box.f_min, best[2] - 2 * step)
        hi = min(box.f_hi, best[2] + 2 * step)
        trials = [lo, hi]
        if hi > lo:
            res = optimize.minimize_scalar(
                lambda f: inner(f)[0], bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
            )
            trials.append(float(res.x))
        for f in trials:
            cost, V = inner(f)
            if cost < best[0]:
                best = (cost, V, f)
        return best[1], best[2], best[0]

    def _active(self, box: _PassBox, V: float, f: float) -> tuple[str, ...]:
        def near(x: float, y: float) -> bool:
            return abs(x - y) <= _ACTIVE_RTOL * max(abs(y), 1.0)

        active = []
        if near(f, box.f_force):
            active.append("force")
        if near(V, box.power_coef * f**-box.n5):
            active.append("power")
        if box.f_roughness < box.f_max and near(f, box.f_roughness):
            active.append("roughness")
        for name, value, bound in (
            ("f_min", f, box.f_min),
            ("f_max", f, box.f_max),
            ("V_min", V, box.V_min),
            ("V_max", V, box.V_max),
        ):
            if near(value, bound):
                active.append(name)
        return tuple(active)

    def optimize_pass(self, kind: PassKind, d: float) -> PassOptimum:
        """Minimum cost of one pass at depth d, with the limits active at the optimum."""
        key = (kind, to_quanta(d, "d"))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        box = self._box(kind, d)
        solve: Callable[[_PassBox], tuple[float, float, float]] = (
            self._solve_grid if self.method == "grid" else self._solve_candidates
        )
        V, f, cost = solve(box)
        result = PassOptimum(kind=kind, depth=d, V=V, f=f, cost=cost, active=self._active(box, V, f))
        self._cache[key] = result
        logger.debug(
            "%s pass d=%g: V=%.4f f=%.5f UC=%.6f active=%s", kind, d, V, f, cost, result.active
        )
        return result

    # ---------- whole table ----------

    def enumerate_local_optima(self, d_t: float, strict: bool = False) -> list[OracleRow]:
        """One row per feasible lookup pair, in table order.

        A pair with a pass that cannot meet its limits at any speed and feed
        raises InfeasiblePassError when strict is set. Otherwise the pair is left
        out with a warning, and NoFeasibleAllocationError is raised if that
        removes every pair.
        """
        table = enumerate_pairs(d_t, self.problem)
        preparation = self.model.coefficients.preparation_cost
        rows = []
        failures = []
        for entry in table:
            try:
                finish = self.optimize_pass(PassKind.FINISH, entry.d_s)
                rough = self.optimize_pass(PassKind.ROUGH, entry.d_r)
            except InfeasiblePassError as e:
                if strict:
                    raise
                logger.warning("d_t=%g: skipping pair %d (%s)", d_t, entry.index, e.message)
                failures.append(e.message)
                continue
            rows.append(
                OracleRow(
                    index=entry.index,
                    d_s=entry.d_s,
                    d_r=entry.d_r,
                    n=entry.n,
                    V_s=finish.V,
                    f_s=finish.f,
                    V_r=rough.V,
                    f_r=rough.f,
                    UC_s=finish.cost,
                    UC_r=rough.cost,
                    UC=finish.cost + entry.n * rough.cost + preparation,
                )
            )
        if not rows:
            raise NoFeasibleAllocationError(d_t, failures[0] if failures else "")
        return rows

    def global_optimum(self, d_t: float) -> OracleRow:
        """Cheapest local optimum; ties go to the smallest pair index."""
        rows = self.enumerate_local_optima(d_t)
        return min(rows, key=lambda row: (row.UC, row.index))


def optimize_pass(
    kind: PassKind, d: float, problem: ProblemData, method: str = "candidates"
) -> PassOptimum:
    return Oracle(problem, method=method).optimize_pass(kind, d)


def enumerate_local_optima(
    d_t: float, problem: ProblemData, strict: bool = False
) -> list[OracleRow]:
    return Oracle(problem).enumerate_local_optima(d_t, strict=strict)


def global_optimum(d_t: float, problem: ProblemData) -> OracleRow:
    return Oracle(problem).global_optimum(d_t)
