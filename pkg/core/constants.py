# core/constants.py
# Numerical tolerances, defaults and reference values used across the toolkit.

# --- Size limits (overridable through core.settings) ---
DEFAULT_ORACLE_LIMIT = 100_000
DEFAULT_ENUMERATION_LIMIT = 50_000
MAX_SUPPORTED_PRIME = 101

# --- Tolerances ---
EQUALITY_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-10
BRANCH_PRUNE_THRESHOLD = 1e-12
PIVOT_TOLERANCE = 1e-7
LP_OPTIMALITY_TOLERANCE = 1e-9
LP_RESIDUAL_WARNING = 1e-6
COEFFICIENT_PRUNE_THRESHOLD = 1e-12

# Bland's rule simplex iteration cap per phase
SIMPLEX_MAX_ITERATIONS = 200_000

# --- Enumeration cache ---
ENUMERATION_FORMAT_VERSION = 1

# --- Magic states ---
# The qutrit gate U_(0,1,8) and the ququint gate U_(0,3,4,2,1) both use
# z'=1, gamma'=p-1, eps'=0; the same triple is the default for every p.
DEFAULT_MAGIC_Z = 1
DEFAULT_MAGIC_EPS = 0

# Published robustness values for |T_v><T_v|^{(x)copies}, keyed by (p, copies).
REFERENCE_ROM = {
    (3, 1): 1.94098,
    (3, 2): 3.44194,
    (3, 3): 5.97505,
    (5, 1): 3.43607,
    (5, 2): 9.55197,
}

# --- Hybrid sampling ---
DEFAULT_FAILURE_PROBABILITY = 0.05
DEFAULT_ACCURACY = 0.05

# --- Seed stream labels ---
SEED_LABEL_COMPILE = "compile"
SEED_LABEL_SAMPLE = "sample"
SEED_LABEL_RANDOM_CIRCUIT = "random-circuit"
SEED_LABEL_PROFILE = "profile"
