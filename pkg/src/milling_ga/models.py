"""Data models and exceptions used throughout milling-ga."""

from dataclasses import asdict, dataclass, field, fields
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt

from .constants import (
    DEFAULT_BITS_PER_REAL,
    DEFAULT_CROSSOVER_PROB,
    DEFAULT_GAP_THRESHOLD,
    DEFAULT_GENERATIONS,
    DEFAULT_MUTATION_PROB,
    DEFAULT_POPULATION,
    DEFAULT_SEED,
    DEPTH_QUANTUM_MM,
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    FEASIBILITY_TOL,
)

# ==================== Exceptions ====================


class MillingError(Exception):
    """Base class for all milling-ga errors."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class InvalidInputError(MillingError):
    """Raised when a physical input or problem parameter is out of its domain."""

    exit_code = EXIT_CONFIG

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"Invalid {field_name}: {message}")


class ConfigError(MillingError):
    """Raised when configuration cannot be loaded or resolved."""

    exit_code = EXIT_CONFIG

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"Configuration error ({key}): {message}")


class NoFeasibleAllocationError(MillingError):
    """Raised when no (d_s, d_r, n) allocation removes the requested total depth."""

    exit_code = EXIT_INFEASIBLE

    def __init__(self, d_t: float, message: str = ""):
        self.d_t = d_t
        detail = f": {message}" if message else ""
        super().__init__(f"No feasible depth allocation for d_t = {d_t:g} mm{detail}")


class InfeasiblePassError(MillingError):
    """Raised when a single pass has no feasible (V, f) under its limits."""

    exit_code = EXIT_INFEASIBLE

    def __init__(self, kind: str, depth: float, constraint: str):
        self.kind = kind
        self.depth = depth
        self.constraint = constraint
        super().__init__(
            f"{kind} pass at d = {depth:g} mm is infeasible: {constraint} limit "
            "is violated even at the lowest feed and speed"
        )


class EstimationError(MillingError):
    """Raised when the closed-form estimate cannot place the computed pass count."""

    exit_code = EXIT_INFEASIBLE


# ==================== Problem data ====================


class PassKind(StrEnum):
    """Finish (single, final) or rough (repeated n times) pass."""

    FINISH = "finish"
    ROUGH = "rough"


@dataclass(frozen=True)
class ProblemData:
    """All machine, tool and economic constants plus bounds and limits.

    Field names follow the Nomenclature symbols so that configuration keys map
    one-to-one onto attributes. Defaults are the published example dataset.
    """

    # geometry (mm)
    L: float = 400.0
    B: float = 100.0
    D: float = 160.0
    Z: int = 16
    r_e: float = 1.0
    e_r: float = 3.0
    e_s: float = 3.0
    L_tr: float = 260.55
    L_ts: float = 403.0

    # economics
    k0: float = 0.5  # $/min
    k_t: float = 2.5  # $/edge
    t_e: float = 1.5  # min/edge
    t_p: float = 0.75  # min/piece
    h1: float = 7e-4  # min/mm
    h2: float = 0.3  # min

    # variable bounds
    V_s_min: float = 50.0
    V_s_max: float = 300.0
    V_r_min: float = 50.0
    V_r_max: float = 300.0
    f_s_min: float = 0.1
    f_s_max: float = 0.6
    f_r_min: float = 0.1
    f_r_max: float = 0.6
    d_s_min: float = 0.5
    d_s_max: float = 2.0
    d_s_step: float = 0.1
    d_r_min: float = 1.0
    d_r_max: float = 4.0
    d_r_step: float = 0.1

    # constraint limits
    F_max: float = 815.77  # kgf
    P_max: float = 10.0  # kW
    R_s_max: float = 0.0025  # mm
    R_r_max: float = 0.025  # mm
    eta: float = 0.8

    # tool-life constants
    C_v: float = 445.0
    K_v: float = 1.0
    l: float = 0.32
    x_v: float = 0.15
    y_v: float = 0.35
    p_v: float = 0.0
    q_v: float = 0.2
    s_v: float = 0.2

    # force constants
    C_f: float = 54.5
    K_f: float = 1.0
    s_f: float = 1.0
    p_f: float = 1.0
    q_f: float = 1.0
    n4: float = 0.9
    n5: float = 0.74

    # printed model constants, used by "printed" mode and the consistency report
    C0: float = 253337816.7
    C1: float = 545.0
    C2: float = 0.111315
    n1: float = 3.125
    n2: float = 0.46875
    n3: float = 1.09375
    a_s: float = 6.330309
    a_r: float = 4.09271
    b_s: float = 1.680135e-6
    b_r: float = 2.598712e-6
    c_s: float = 0.29105
    c_r: float = 0.2411925

    # modes
    coefficients: str = "derived"  # "derived" | "printed"
    recompute_travel: bool = False

    def validate(self) -> None:
        """Check the ProblemData invariants, raising InvalidInputError on the first failure."""
        positive = (
            "L", "B", "D", "r_e", "L_tr", "L_ts",
            "V_s_min", "V_r_min", "f_s_min", "f_r_min", "d_s_min", "d_r_min",
            "d_s_step", "d_r_step",
            "F_max", "P_max", "R_s_max", "R_r_max", "eta",
            "C_v", "K_v", "l", "C_f", "K_f", "n4", "n5",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidInputError(name, f"must be positive, got {getattr(self, name)}")

        non_negative = ("k0", "k_t", "t_e", "t_p", "h1", "h2", "e_r", "e_s")
        for name in non_negative:
            if getattr(self, name) < 0:
                raise InvalidInputError(name, f"must be non-negative, got {getattr(self, name)}")

        if self.Z < 1:
            raise InvalidInputError("Z", f"tooth count must be at least 1, got {self.Z}")
        if self.eta > 1:
            raise InvalidInputError("eta", f"efficiency must lie in (0, 1], got {self.eta}")

        for low, high in (
            ("V_s_min", "V_s_max"),
            ("V_r_min", "V_r_max"),
            ("f_s_min", "f_s_max"),
            ("f_r_min", "f_r_max"),
            ("d_s_min", "d_s_max"),
            ("d_r_min", "d_r_max"),
        ):
            if getattr(self, low) > getattr(self, high):
                raise InvalidInputError(
                    high, f"{low} = {getattr(self, low)} exceeds {high} = {getattr(self, high)}"
                )

        if self.coefficients not in ("derived", "printed"):
            raise InvalidInputError(
                "coefficients", f"expected 'derived' or 'printed', got {self.coefficients!r}"
            )
        if self.recompute_travel and self.B > self.D:
            raise InvalidInputError("B", "width of cut exceeds the cutter diameter")

    def speed_bounds(self, kind: PassKind) -> tuple[float, float]:
        if kind is PassKind.FINISH:
            return self.V_s_min, self.V_s_max
        return self.V_r_min, self.V_r_max

    def feed_bounds(self, kind: PassKind) -> tuple[float, float]:
        if kind is PassKind.FINISH:
            return self.f_s_min, self.f_s_max
        return self.f_r_min, self.f_r_max

    def depth_bounds(self, kind: PassKind) -> tuple[float, float, float]:
        """Return (min, max, step) of the depth grid for a pass kind."""
        if kind is PassKind.FINISH:
            return self.d_s_min, self.d_s_max, self.d_s_step
        return self.d_r_min, self.d_r_max, self.d_r_step

    def roughness_limit(self, kind: PassKind) -> float:
        return self.R_s_max if kind is PassKind.FINISH else self.R_r_max

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def field_types(cls) -> dict[str, type]:
        """Map each configurable key to the Python type its value parses to."""
        types: dict[str, type] = {}
        for f in fields(cls):
            types[f.name] = f.type if isinstance(f.type, type) else type(f.default)
        return types


@dataclass(frozen=True)
class ConsistencyFinding:
    """Comparison of one derived coefficient against its printed value."""

    name: str
    derived: float
    printed: float
    rel_diff: float
    status: str  # "ok", "mismatch" or "swapped"
    message: str = ""


@dataclass(frozen=True)
class DerivedCoefficients:
    """Model constants of the cost, tool-life, force and power expressions."""

    C0: float
    C1: float
    C2: float
    n1: float
    n2: float
    n3: float
    n4: float
    n5: float
    a_s: float
    b_s: float
    c_s: float
    a_r: float
    b_r: float
    c_r: float
    preparation_cost: float  # k0 * t_p, $/piece
    L_ts: float
    L_tr: float
    consistency: tuple[ConsistencyFinding, ...] = ()

    def pass_coefficients(self, kind: PassKind) -> tuple[float, float, float]:
        """Return (a, b, c) of the per-pass cost for a pass kind."""
        if kind is PassKind.FINISH:
            return self.a_s, self.b_s, self.c_s
        return self.a_r, self.b_r, self.c_r

    @property
    def warnings(self) -> list[ConsistencyFinding]:
        return [f for f in self.consistency if f.status != "ok"]


# ==================== Plans and evaluations ====================


@dataclass(frozen=True)
class Plan:
    """Complete decision vector: finish (V_s, f_s, d_s), rough (V_r, f_r, d_r), n."""

    V_s: float
    f_s: float
    d_s: float
    V_r: float
    f_r: float
    d_r: float
    n: int

    @property
    def total_depth(self) -> float:
        return self.d_s + self.n * self.d_r


@dataclass(frozen=True)
class CostBreakdown:
    """Machining, idle, tool-replacement and tool cost per piece ($/piece)."""

    CM: float
    CI: float
    CR: float
    CT: float

    @property
    def total(self) -> float:
        return self.CM + self.CI + self.CR + self.CT


@dataclass(frozen=True)
class ConstraintReport:
    """Normalized slack per inequality constraint and the resulting violation."""

    slacks: dict[str, float]
    cv: float
    depth_residual: float = 0.0  # d_s + n d_r - d_t, informational only

    @property
    def feasible(self) -> bool:
        return self.cv == 0.0

    def violated(self) -> list[str]:
        """Constraints whose normalized slack falls below -FEASIBILITY_TOL, as counted in cv."""
        return [name for name, g in self.slacks.items() if g < -FEASIBILITY_TOL]


# ==================== Lookup table ====================


@dataclass(frozen=True)
class PairEntry:
    """One feasible (d_s, d_r, n) allocation; depths held in 0.1 mm quanta."""

    index: int
    ds_q: int
    dr_q: int
    n: int

    @property
    def d_s(self) -> float:
        return round(self.ds_q * DEPTH_QUANTUM_MM, 10)

    @property
    def d_r(self) -> float:
        return round(self.dr_q * DEPTH_QUANTUM_MM, 10)


@dataclass(frozen=True)
class PairTable:
    """Ordered lookup table of all feasible allocations for one total depth."""

    dt_q: int
    entries: tuple[PairEntry, ...]

    @property
    def d_t(self) -> float:
        return round(self.dt_q * DEPTH_QUANTUM_MM, 10)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.entries)


# ==================== Genetic algorithm ====================


@dataclass(frozen=True)
class GaConfig:
    """Genetic algorithm parameters."""

    population: int = DEFAULT_POPULATION
    generations: int = DEFAULT_GENERATIONS
    p_c: float = DEFAULT_CROSSOVER_PROB
    p_m: float = DEFAULT_MUTATION_PROB
    bits: int = DEFAULT_BITS_PER_REAL
    index_bits: int | None = None  # None: ceil(log2(table size))
    seed: int = DEFAULT_SEED
    gap_threshold: float = DEFAULT_GAP_THRESHOLD

    def validate(self) -> None:
        if self.population < 2 or self.population % 2:
            raise InvalidInputError(
                "population", f"must be even and at least 2, got {self.population}"
            )
        if self.generations < 0:
            raise InvalidInputError("generations", f"must be non-negative, got {self.generations}")
        for name in ("p_c", "p_m"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(name, f"probability must lie in [0, 1], got {value}")
        if self.bits < 1:
            raise InvalidInputError("bits", f"must be at least 1, got {self.bits}")
        if self.index_bits is not None and self.index_bits < 1:
            raise InvalidInputError("index_bits", f"must be at least 1, got {self.index_bits}")
        if self.gap_threshold < 0:
            raise InvalidInputError(
                "gap_threshold", f"must be non-negative, got {self.gap_threshold}"
            )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class Individual:
    """Genome with its decoded plan, unit cost (fitness) and constraint violation."""

    genome: npt.NDArray[np.uint8]
    plan: Plan
    unit_cost: float
    cv: float
    pair_index: int

    @property
    def feasible(self) -> bool:
        return self.cv == 0.0

    @property
    def bitstring(self) -> str:
        return "".join(str(int(b)) for b in self.genome)


@dataclass
class Population:
    """Genomes of one generation (one row each) with their cached evaluations."""

    genomes: npt.NDArray[np.uint8]
    unit_cost: npt.NDArray[np.float64]
    cv: npt.NDArray[np.float64]

    @property
    def size(self) -> int:
        return int(self.genomes.shape[0])

    @property
    def feasible(self) -> npt.NDArray[np.bool_]:
        return self.cv == 0.0

    def take(self, indices: npt.NDArray[np.intp]) -> "Population":
        return Population(
            self.genomes[indices].copy(), self.unit_cost[indices].copy(), self.cv[indices].copy()
        )

    @staticmethod
    def concat(first: "Population", second: "Population") -> "Population":
        return Population(
            np.concatenate([first.genomes, second.genomes]),
            np.concatenate([first.unit_cost, second.unit_cost]),
            np.concatenate([first.cv, second.cv]),
        )


@dataclass(frozen=True)
class GenerationStats:
    """Population summary for one generation (generation 0 is the initial population)."""

    generation: int
    best: float
    average: float
    gap: float
    best_cv: float


@dataclass
class RunResult:
    """Outcome of one GA run."""

    d_t: float
    seed: int
    best: Individual
    history: list[GenerationStats] = field(default_factory=list)
    converged_at: int | None = None
    evaluations: int = 0


# ==================== Oracle and analysis ====================


@dataclass(frozen=True)
class PassOptimum:
    """Constrained minimum of one pass cost over (V, f) at a fixed depth."""

    kind: PassKind
    depth: float
    V: float
    f: float
    cost: float
    active: tuple[str, ...] = ()


@dataclass(frozen=True)
class OracleRow:
    """Per-pair constrained optimum of finish and rough passes."""

    index: int
    d_s: float
    d_r: float
    n: int
    V_s: float
    f_s: float
    V_r: float
    f_r: float
    UC_s: float
    UC_r: float
    UC: float

    @property
    def plan(self) -> Plan:
        return Plan(self.V_s, self.f_s, self.d_s, self.V_r, self.f_r, self.d_r, self.n)


@dataclass(frozen=True)
class SensitivityPoint:
    """Optimal unit cost with one constraint limit scaled by a multiplier."""

    kind: str  # "force" | "power"
    multiplier: float
    unit_cost: float | None
    message: str = ""

    @property
    def feasible(self) -> bool:
        return self.unit_cost is not None


@dataclass
class SensitivityResult:
    points: list[SensitivityPoint]
    slopes: dict[str, float]


@dataclass(frozen=True)
class SweepRow:
    """Optimum plan, cost and tool lives at one total depth."""

    d_t: float
    plan: Plan
    unit_cost: float
    T_s: float
    T_r: float
    cv: float = 0.0


@dataclass
class SweepResult:
    rows: list[SweepRow]
    skipped: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class Estimate:
    """Closed-form estimate of the optimum plan and which rule fixed each field."""

    d_t: float
    plan: Plan
    unit_cost: float
    cv: float
    provenance: dict[str, str]


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI invocation's outputs."""

    command: str
    problem: ProblemData
    ga: GaConfig
    seeds: list[int]
    options: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "problem": self.problem.to_dict(),
            "ga": self.ga.to_dict(),
            "seeds": list(self.seeds),
            "options": dict(self.options),
            "outputs": list(self.outputs),
        }
