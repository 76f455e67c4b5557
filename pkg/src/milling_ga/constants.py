"""Constants used throughout milling-ga."""

# Depths are carried as integer multiples of this quantum (mm)
DEPTH_QUANTUM_MM = 0.1

# Empirical constants of the process model
SURFACE_FINISH_COEFF = 0.0321  # Ra = 0.0321 f^2 / r_e
POWER_DIVISOR = 6120.0  # P[kW] = F[kgf] V[m/min] / (6120 eta)

# Depth grids. "coarse" is the grid the published d_t = 6 lookup table was built on.
DEPTH_GRID_PRESETS: dict[str, dict[str, float]] = {
    "table1": {
        "d_s_min": 0.5,
        "d_s_max": 2.0,
        "d_s_step": 0.1,
        "d_r_min": 1.0,
        "d_r_max": 4.0,
        "d_r_step": 0.1,
    },
    "coarse": {
        "d_s_min": 1.0,
        "d_s_max": 2.0,
        "d_s_step": 0.5,
        "d_r_min": 0.5,
        "d_r_max": 4.0,
        "d_r_step": 0.5,
    },
}

# Relative tolerance for derived-vs-printed coefficient checks
CONSISTENCY_RTOL = 1e-4

# Normalized slack below which a constraint still counts as satisfied
FEASIBILITY_TOL = 1e-9

# GA defaults
DEFAULT_POPULATION = 750
DEFAULT_GENERATIONS = 100
DEFAULT_CROSSOVER_PROB = 0.8
DEFAULT_MUTATION_PROB = 0.05
DEFAULT_BITS_PER_REAL = 15
DEFAULT_SEED = 12345
DEFAULT_GAP_THRESHOLD = 0.0025  # 0.25 %

# A run "succeeds" when it ends within this relative distance of the oracle optimum
SUCCESS_TOLERANCE = 0.001
DEFAULT_RUNS_PER_POINT = 20

# Seeded GA runs behind each sweep or sensitivity point; the best one is kept
DEFAULT_GA_ANALYSIS_RUNS = 10

# Population sizing scan
POPSIZE_MAX_MU = 5000
POPSIZE_GAIN_FRACTION = 0.999
POPSIZE_LINEAR_STEP = 10

# Oracle grid check
ORACLE_GRID_POINTS = 2000

# Fixed conditions of the estimation strategy (observed optimum averages)
ESTIMATE_F_S = 0.279
ESTIMATE_V_S = 123.2
ESTIMATE_V_R = 60.35

# Published optimum unit costs ($/piece) of two-stage methods, keyed by d_t (mm).
# Literature values for comparison only; never recomputed.
LITERATURE_UNIT_COST: dict[float, dict[str, float]] = {
    6.0: {"An & Chen (2003)": 1.4858},
    8.0: {"An & Chen (2003)": 1.8523, "Shunmugam et al. (2000)": 2.0086},
}

# CLI exit codes (argparse keeps 2 for usage errors)
EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5

# CSV headers
TABLE_COLUMNS = ["pair", "ds_mm", "dr_mm", "n"]
OPTIMIZE_COLUMNS = ["dt", "Vs", "Vr", "fs", "fr", "ds", "dr", "n", "CV", "UC", "Ts", "Tr"]
HISTORY_COLUMNS = ["gen", "best", "avg", "gap"]
ORACLE_COLUMNS = ["ds", "dr", "n", "UCs", "UCr", "UC", "global"]
SWEEP_COLUMNS = ["dt", "n", "ds", "dr", "fr", "Vs", "Vr", "fs", "UC", "Ts", "Tr"]
SENSITIVITY_COLUMNS = ["kind", "multiplier", "UC", "feasible"]
ESTIMATE_COLUMNS = ["dt", "n", "ds", "dr", "fs", "fr", "Vs", "Vr", "UC"]
POPSIZE_COLUMNS = ["mu", "G"]
SUCCESS_COLUMNS = ["pm", "success_pct", "runs"]
DERIVE_COLUMNS = ["name", "derived", "printed", "rel_diff", "status"]
