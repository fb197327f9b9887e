from numba import njit
import numpy as np
import math

# normal kernels
SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
LOG_CDF_TAIL_X = -20.0  # below this, log-cdf switches to the asymptotic series
QUANTILE_REFINE_STEPS = 2  # Halley steps after the rational initializer

# model defaults
DEFAULT_G0 = 0.02
DEFAULT_G1 = 1.0
DEFAULT_THETA0 = 0.0
DEFAULT_PRIOR_PROB_M0 = 0.5
DEFAULT_ALPHA = 0.05

# quantile search
BRACKET_SIGMAS = 12.0
BRACKET_GROWTH = 2.0
BRACKET_MAX_WIDENINGS = 60
BISECTION_TOL = 1e-12  # relative to the narrowest component sd
QUANTILE_CDF_TOL = 1e-12
BISECTION_MAX_ITER = 400

# quadrature
QUAD_SIGMAS = 14.0
QUAD_LIMIT = 400
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
QUAD_MAX_ERROR = 1e-8  # relative error estimate above which quadrature is a failure

# simulation
DEFAULT_SEED = 42
DEFAULT_REPS = 1_000_000
MIN_REPS = 1000
SIM_CHUNK_SIZE = 250_000
SE_MULTIPLIER = 3.0
DEFAULT_BIN_WIDTH = 0.05
JOINT_MAX_DRAWS = 50_000_000

# data for p = 0.05, 0.02 and 0.005 against H0: theta < 0
Z_P05 = 1.645
Z_P02 = 2.054
Z_P005 = 2.575

# fixed-p regime multipliers for A = 0.05, 0.10, 0.20, 0.30
APPENDIX_A = (0.05, 0.10, 0.20, 0.30)
APPENDIX_K = (1.645, 1.282, 0.842, 0.524)

# figure grids
N_GRID_MIN = 1.0
N_GRID_MAX = 1e4
N_GRID_POINTS = 200
N_GRID_MAX_LIMITS = 1e8
N_GRID_MAX_MODEL_PROB = 1e10
THETA_GRID = (-1.5, 2.0, 701)
PANEL_N = 10
PANEL_YBAR = 0.520  # rounded 1.645 / sqrt(10)
FIG7_N_MAX = 100
FIG8_P_VALUES = (0.05, 0.01, 0.005, 0.001)

# output
SIGNIFICANT_DIGITS = 17
SUMMARY_DIGITS = 4

# exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
