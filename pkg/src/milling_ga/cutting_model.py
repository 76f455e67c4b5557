"""Face-milling process physics and economics.

Tool life, cutting force, spindle power, surface-finish feed caps, per-pass and
total unit cost, the cost breakdown and constraint evaluation. All evaluators
accept scalars or numpy arrays so the GA can score a whole population at once.
"""

import logging
import math
from dataclasses import replace

import numpy as np
import numpy.typing as npt

from .constants import (
    CONSISTENCY_RTOL,
    FEASIBILITY_TOL,
    POWER_DIVISOR,
    SURFACE_FINISH_COEFF,
)
from .models import (
    ConsistencyFinding,
    ConstraintReport,
    CostBreakdown,
    DerivedCoefficients,
    InvalidInputError,
    PassKind,
    Plan,
    ProblemData,
)

logger = logging.getLogger("milling-ga")

ArrayLike = float | npt.NDArray[np.float64]

# Slack names in report order
CONSTRAINT_NAMES = (
    "force_finish",
    "force_rough",
    "power_finish",
    "power_rough",
    "roughness_finish",
    "roughness_rough",
    "V_s_min",
    "V_s_max",
    "V_r_min",
    "V_r_max",
    "f_s_min",
    "f_s_max",
    "f_r_min",
    "f_r_max",
    "d_s_min",
    "d_s_max",
    "d_r_min",
    "d_r_max",
)


def travel_lengths(problem: ProblemData) -> tuple[float, float]:
    """Return (L_ts, L_tr), recomputed from the cutter geometry when requested.

    The rough pass only needs the approach a_p before the cutter centre clears
    the workpiece; the finish pass travels a full diameter past it.
    """
    if not problem.recompute_travel:
        return problem.L_ts, problem.L_tr
    radius = problem.D / 2
    approach = radius - math.sqrt(radius**2 - (problem.B / 2) ** 2)
    return problem.L + problem.D + problem.e_s, problem.L + approach + problem.e_r


def _compare(name: str, derived: float, printed: float) -> ConsistencyFinding:
    rel = abs(derived - printed) / abs(printed) if printed else abs(derived)
    status = "ok" if rel <= CONSISTENCY_RTOL else "mismatch"
    return ConsistencyFinding(name, derived, printed, rel, status)


def derive_coefficients(problem: ProblemData, log_findings: bool = True) -> DerivedCoefficients:
    """Derive every model constant from the raw problem data.

    The result carries a consistency report comparing each derived value with
    the printed constant of the same name. A pair of b coefficients that only
    agree with each other's printed labels is reported once, as a swap.
    """
    problem.validate()
    p = problem
    L_ts, L_tr = travel_lengths(p)

    n1 = 1.0 / p.l
    n2 = p.x_v / p.l
    n3 = p.y_v / p.l
    C0 = (p.C_v * p.K_v * p.D**p.q_v / (p.B**p.s_v * p.Z**p.p_v)) ** n1
    C1 = p.C_f * p.K_f * p.B**p.s_f * p.Z**p.p_f / p.D**p.q_f
    C2 = C1 / (POWER_DIVISOR * p.eta)

    # t_m = pi D L / (1000 V f Z): machining and tool-change terms share this factor
    travel_factor = math.pi * p.D / (1000.0 * p.Z)
    edge_cost = (p.k0 * p.t_e + p.k_t) * p.Z
    a_s = p.k0 * travel_factor * L_ts
    a_r = p.k0 * travel_factor * L_tr
    b_s = edge_cost * travel_factor * L_ts / C0
    b_r = edge_cost * travel_factor * L_tr / C0
    c_s = p.k0 * (p.h1 * L_ts + p.h2)
    c_r = p.k0 * (p.h1 * L_tr + p.h2)

    findings = [
        _compare("C0", C0, p.C0),
        _compare("C1", C1, p.C1),
        _compare("C2", C2, p.C2),
        _compare("n1", n1, p.n1),
        _compare("n2", n2, p.n2),
        _compare("n3", n3, p.n3),
        _compare("a_s", a_s, p.a_s),
        _compare("a_r", a_r, p.a_r),
    ]

    b_s_finding = _compare("b_s", b_s, p.b_s)
    b_r_finding = _compare("b_r", b_r, p.b_r)
    swapped = (
        b_s_finding.status == "mismatch"
        and b_r_finding.status == "mismatch"
        and _compare("b_s", b_s, p.b_r).status == "ok"
        and _compare("b_r", b_r, p.b_s).status == "ok"
    )
    if swapped:
        message = (
            f"printed b_s = {p.b_s:.6e} and b_r = {p.b_r:.6e} match the derived "
            f"rough and finish values respectively; labels appear swapped"
        )
        b_s_finding = replace(b_s_finding, status="swapped", message=message)
        b_r_finding = replace(b_r_finding, status="swapped", message=message)
        if log_findings:
            logger.warning("Coefficient consistency: %s", message)
    findings += [
        b_s_finding,
        b_r_finding,
        _compare("c_s", c_s, p.c_s),
        _compare("c_r", c_r, p.c_r),
    ]

    for finding in findings:
        if log_findings and finding.status == "mismatch":
            logger.warning(
                "Coefficient consistency: derived %s = %.6g differs from printed %.6g (%.2e relative)",
                finding.name,
                finding.derived,
                finding.printed,
                finding.rel_diff,
            )

    return DerivedCoefficients(
        C0=C0,
        C1=C1,
        C2=C2,
        n1=n1,
        n2=n2,
        n3=n3,
        n4=p.n4,
        n5=p.n5,
        a_s=a_s,
        b_s=b_s,
        c_s=c_s,
        a_r=a_r,
        b_r=b_r,
        c_r=c_r,
        preparation_cost=p.k0 * p.t_p,
        L_ts=L_ts,
        L_tr=L_tr,
        consistency=tuple(findings),
    )


def printed_coefficients(problem: ProblemData, derived: DerivedCoefficients) -> DerivedCoefficients:
    """Model constants exactly as printed, labels taken at face value."""
    return replace(
        derived,
        C0=problem.C0,
        C1=problem.C1,
        C2=problem.C2,
        n1=problem.n1,
        n2=problem.n2,
        n3=problem.n3,
        a_s=problem.a_s,
        b_s=problem.b_s,
        c_s=problem.c_s,
        a_r=problem.a_r,
        b_r=problem.b_r,
        c_r=problem.c_r,
    )


def feed_upper_bound(problem: ProblemData, kind: PassKind) -> float:
    """Tighter of the feed bound and the surface-finish feed cap."""
    _, f_max = problem.feed_bounds(kind)
    cap = math.sqrt(problem.roughness_limit(kind) * problem.r_e / SURFACE_FINISH_COEFF)
    return min(f_max, cap)


def _require_positive(**values: ArrayLike) -> None:
    for name, value in values.items():
        if not np.all(np.asarray(value) > 0):
            raise InvalidInputError(name, f"must be positive, got {value}")


def _as_result(value: npt.NDArray[np.float64]) -> ArrayLike:
    return float(value) if value.ndim == 0 else value


class CuttingModel:
    """Evaluates the process model for one problem instance.

    Pure after construction and safe to share between threads.
    """

    def __init__(self, problem: ProblemData, log_findings: bool = True):
        self.problem = problem
        self.derived = derive_coefficients(problem, log_findings)
        if problem.coefficients == "printed":
            self.coefficients = printed_coefficients(problem, self.derived)
        else:
            self.coefficients = self.derived

    # ---------- physics ----------

    def tool_life(self, kind: PassKind, V: ArrayLike, f: ArrayLike, d: ArrayLike) -> ArrayLike:
        """Extended Taylor tool life in minutes. Same constants for both pass kinds."""
        del kind
        _require_positive(V=V, f=f, d=d)
        k = self.coefficients
        V, f, d = np.asarray(V, float), np.asarray(f, float), np.asarray(d, float)
        return _as_result(k.C0 / (V**k.n1 * d**k.n2 * f**k.n3))

    def cutting_force(self, d: ArrayLike, f: ArrayLike) -> ArrayLike:
        """Cutting force in kgf."""
        _require_positive(d=d, f=f)
        k = self.coefficients
        d, f = np.asarray(d, float), np.asarray(f, float)
        return _as_result(k.C1 * d**k.n4 * f**k.n5)

    def cutting_power(self, V: ArrayLike, d: ArrayLike, f: ArrayLike) -> ArrayLike:
        """Spindle power in kW."""
        _require_positive(V=V, d=d, f=f)
        k = self.coefficients
        V, d, f = np.asarray(V, float), np.asarray(d, float), np.asarray(f, float)
        return _as_result(k.C2 * V * d**k.n4 * f**k.n5)

    def surface_roughness(self, f: ArrayLike) -> ArrayLike:
        f = np.asarray(f, float)
        return _as_result(SURFACE_FINISH_COEFF * f**2 / self.problem.r_e)

    def feed_upper_bound(self, kind: PassKind) -> float:
        return feed_upper_bound(self.problem, kind)

    def force_feed_cap(self, d: float) -> float:
        """Largest feed keeping the cutting force at or below F_max for depth d."""
        _require_positive(d=d)
        k = self.coefficients
        return float((self.problem.F_max / (k.C1 * d**k.n4)) ** (1.0 / k.n5))

    def power_speed_cap(self, d: ArrayLike, f: ArrayLike) -> ArrayLike:
        """Largest cutting speed keeping spindle power at or below P_max."""
        _require_positive(d=d, f=f)
        k = self.coefficients
        d, f = np.asarray(d, float), np.asarray(f, float)
        return _as_result(self.problem.P_max / (k.C2 * d**k.n4 * f**k.n5))

    # ---------- economics ----------

    def pass_cost(self, kind: PassKind, V: ArrayLike, f: ArrayLike, d: ArrayLike) -> ArrayLike:
        """Cost of one pass in $/piece: a/(V f) + b V^(n1-1) d^n2 f^(n3-1) + c."""
        _require_positive(V=V, f=f, d=d)
        k = self.coefficients
        a, b, c = k.pass_coefficients(kind)
        V, f, d = np.asarray(V, float), np.asarray(f, float), np.asarray(d, float)
        cost = a / (V * f) + b * V ** (k.n1 - 1) * d**k.n2 * f ** (k.n3 - 1) + c
        return _as_result(cost)

    def unit_cost(self, plan: Plan) -> float:
        if plan.n < 1:
            raise InvalidInputError("n", f"rough pass count must be at least 1, got {plan.n}")
        return float(
            self.unit_cost_batch(
                np.array([plan.V_s]),
                np.array([plan.f_s]),
                np.array([plan.d_s]),
                np.array([plan.V_r]),
                np.array([plan.f_r]),
                np.array([plan.d_r]),
                np.array([plan.n]),
            )[0]
        )

    def unit_cost_batch(
        self,
        V_s: npt.NDArray[np.float64],
        f_s: npt.NDArray[np.float64],
        d_s: npt.NDArray[np.float64],
        V_r: npt.NDArray[np.float64],
        f_r: npt.NDArray[np.float64],
        d_r: npt.NDArray[np.float64],
        n: npt.NDArray[np.int64],
    ) -> npt.NDArray[np.float64]:
        finish = np.asarray(self.pass_cost(PassKind.FINISH, V_s, f_s, d_s))
        rough = np.asarray(self.pass_cost(PassKind.ROUGH, V_r, f_r, d_r))
        return finish + n * rough + self.coefficients.preparation_cost

    def cost_breakdown(self, plan: Plan) -> CostBreakdown:
        """Machining, idle, tool-replacement and tool cost from the raw cost terms."""
        p = self.problem
        k = self.coefficients
        t_ms = math.pi * p.D * k.L_ts / (1000.0 * plan.V_s * plan.f_s * p.Z)
        t_mr = math.pi * p.D * k.L_tr / (1000.0 * plan.V_r * plan.f_r * p.Z)
        T_s = float(self.tool_life(PassKind.FINISH, plan.V_s, plan.f_s, plan.d_s))
        T_r = float(self.tool_life(PassKind.ROUGH, plan.V_r, plan.f_r, plan.d_r))
        edge_use = p.Z * (t_ms / T_s + plan.n * t_mr / T_r)
        return CostBreakdown(
            CM=p.k0 * (t_ms + plan.n * t_mr),
            CI=p.k0 * (p.t_p + plan.n * (p.h1 * k.L_tr + p.h2) + (p.h1 * k.L_ts + p.h2)),
            CR=p.k0 * p.t_e * edge_use,
            CT=p.k_t * edge_use,
        )

    # ---------- constraints ----------

    def slacks(
        self,
        V_s: ArrayLike,
        f_s: ArrayLike,
        d_s: ArrayLike,
        V_r: ArrayLike,
        f_r: ArrayLike,
        d_r: ArrayLike,
    ) -> dict[str, npt.NDArray[np.float64]]:
        """Normalized slack of every inequality: 1 - value/limit, or value/min - 1."""
        p = self.problem
        V_s, f_s, d_s = np.asarray(V_s, float), np.asarray(f_s, float), np.asarray(d_s, float)
        V_r, f_r, d_r = np.asarray(V_r, float), np.asarray(f_r, float), np.asarray(d_r, float)
        k = self.coefficients
        force_s = k.C1 * d_s**k.n4 * f_s**k.n5
        force_r = k.C1 * d_r**k.n4 * f_r**k.n5
        return {
            "force_finish": 1 - force_s / p.F_max,
            "force_rough": 1 - force_r / p.F_max,
            "power_finish": 1 - k.C2 * V_s * d_s**k.n4 * f_s**k.n5 / p.P_max,
            "power_rough": 1 - k.C2 * V_r * d_r**k.n4 * f_r**k.n5 / p.P_max,
            "roughness_finish": 1 - SURFACE_FINISH_COEFF * f_s**2 / (p.r_e * p.R_s_max),
            "roughness_rough": 1 - SURFACE_FINISH_COEFF * f_r**2 / (p.r_e * p.R_r_max),
            "V_s_min": V_s / p.V_s_min - 1,
            "V_s_max": 1 - V_s / p.V_s_max,
            "V_r_min": V_r / p.V_r_min - 1,
            "V_r_max": 1 - V_r / p.V_r_max,
            "f_s_min": f_s / p.f_s_min - 1,
            "f_s_max": 1 - f_s / p.f_s_max,
            "f_r_min": f_r / p.f_r_min - 1,
            "f_r_max": 1 - f_r / p.f_r_max,
            "d_s_min": d_s / p.d_s_min - 1,
            "d_s_max": 1 - d_s / p.d_s_max,
            "d_r_min": d_r / p.d_r_min - 1,
            "d_r_max": 1 - d_r / p.d_r_max,
        }

    @staticmethod
    def violation(slacks: dict[str, npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
        """Sum of violated normalized constraints; violations within tolerance count as zero."""
        total = np.zeros(np.broadcast(*slacks.values()).shape)
        for g in slacks.values():
            excess = np.maximum(0.0, -g)
            total = total + np.where(excess > FEASIBILITY_TOL, excess, 0.0)
        return total

    def constraint_violation_batch(
        self,
        V_s: npt.NDArray[np.float64],
        f_s: npt.NDArray[np.float64],
        d_s: npt.NDArray[np.float64],
        V_r: npt.NDArray[np.float64],
        f_r: npt.NDArray[np.float64],
        d_r: npt.NDArray[np.float64],
    ) -> npt.NDArray[np.float64]:
        return self.violation(self.slacks(V_s, f_s, d_s, V_r, f_r, d_r))

    def constraint_report(self, plan: Plan, d_t: float | None = None) -> ConstraintReport:
        """Slack per constraint and CV for one plan. The depth equality is informational only."""
        raw = self.slacks(plan.V_s, plan.f_s, plan.d_s, plan.V_r, plan.f_r, plan.d_r)
        slacks = {name: float(raw[name]) for name in CONSTRAINT_NAMES}
        cv = float(self.violation(raw))
        residual = plan.total_depth - d_t if d_t is not None else 0.0
        return ConstraintReport(slacks=slacks, cv=cv, depth_residual=residual)

    def tool_lives(self, plan: Plan) -> tuple[float, float]:
        """(T_s, T_r) in minutes for a plan."""
        return (
            float(self.tool_life(PassKind.FINISH, plan.V_s, plan.f_s, plan.d_s)),
            float(self.tool_life(PassKind.ROUGH, plan.V_r, plan.f_r, plan.d_r)),
        )
