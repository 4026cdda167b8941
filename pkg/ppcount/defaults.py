from fractions import Fraction

# dynatomic
ITERATE_CAP = 12
DYNATOMIC_CAP = 8
PREPERIOD_CAP = 4

# preperiodic search
QUAD_PERIOD_CAP = 6
QUAD_PREPERIOD_CAP = 4
CLOSURE_PERIOD_CAP = 4
CENSUS_PERIOD_CAP = 4
ROOT_DPS = 40
ROOT_MATCH_TOL = 1e-8
LATTICE_MARGIN = 1

# constants
ZETA_TERMS = 1000
MP_DPS = 30
QUAD_REL_TOL = 1e-6
AREA_ABS_TOL = 1e-4
AREA_MAX_LEVELS = 24
UNIT_CIRCLE_SAMPLES = 4096
QMC_LOG2_POINTS = 16
QMC_REPLICATES = 8
PADIC_DEPTH_GUARD = 40
GOOD_PRIME_LIMIT = 50
SYM2_PRIME_LIMIT = 20
# every y = (1,1,0) mod 2 has H(y) = 0 mod 16, so y/2 lies in S_2(1)
SYM2_VOLUME_AT_2 = 16
BOX_SAFETY = Fraction(1, 2)

# torsion by point-count stabilization
TORSION_HEIGHTS = (100, 1000)

# declared Mordell-Weil ranks for genus-1 rows
DEFAULT_RANKS = {
    "10(2,1,1)a": 0,
    "10(2,1,1)b": 0,
}

# census
PARAMETRIZED_MIN_B = 10
DEG2_EXHAUSTIVE_MAX_B = 20
NUMERATOR_SHARDS = 64
X_BOUND_SAFETY = Fraction(11, 10)

# c-values with collapsed preimages or collisions between families, found by the
# exhaustive runs; always run through the exact portrait in parametrized mode
BOUNDARY_ALLOWLIST = [
    Fraction(0),
    Fraction(-1),
    Fraction(-2),
    Fraction(1, 4),
    Fraction(-3, 4),
]

# verification suites
VERIFY_GCD_RANGE = 500
VERIFY_BASELINE_B = 10**4
VERIFY_NQ1_BOUNDS = (10**4, 10**6, 10**8)
VERIFY_NQ1_RESIDUAL_C = 2.0
VERIFY_DEG1_BOUNDS = (10**4, 10**6)
VERIFY_CROSS_B = 2000
VERIFY_RANK0_BOUNDS = (500, 1000, 2000)
VERIFY_DEG2_BOUNDS = (100, 200, 400)
VERIFY_FIBER_COUNT = 200
VERIFY_FIBER_MAX_EXCEPTIONS = 4
VERIFY_SYM2_SAMPLES = 100
VERIFY_DETERMINISM_WORKERS = 8
