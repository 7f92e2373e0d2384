"""
Global Configuration File for the Nematic Droplet Hedgehog Laboratory
---------------------------------------------------------------------

This file defines system-wide constants for:
- Tensor algebra tolerances
- Radial profile solver (grid, Newton iteration)
- Field assembly and sphere quadrature
- 3-D energy evaluation and gradient-flow relaxation
- Output formatting and exit codes
- Logging options

All toolkits and experiments import values from this file for consistent behavior.
"""

from typing import Tuple


# --------------------------------------------------------------
# TENSOR ALGEBRA
# --------------------------------------------------------------

# Tolerance for unit directors and symmetric/traceless checks
UNIT_TOL = 1e-12

# Cubic discriminant below which the closed-form eigen-solver hands over
# to LAPACK (scaled by max(1, |Q|^6))
EIGEN_DISCRIMINANT_TOL = 1e-14


# --------------------------------------------------------------
# RADIAL PROFILE SOLVER
# --------------------------------------------------------------

# Default number of profile nodes (grid r = R * s^2, s uniform in (0, 1])
PROFILE_NODES = 2000

# Minimal admissible inputs for solve_profile
PROFILE_MIN_T = 1.0
PROFILE_MIN_R = 10.0
PROFILE_MIN_NODES = 200

# Newton iteration
NEWTON_MAX_ITER = 100
NEWTON_UPDATE_TOL = 1e-10
NEWTON_RESIDUAL_TOL = 1e-8
NEWTON_MIN_DAMPING = 1.0 / 1024.0

# Lower envelope constants r^2/(r^2 + 14) and r^2/15 (r <= 1)
ENVELOPE_CORE = 14.0
ENVELOPE_INNER = 15.0

# Caps for the t-uniform bounds: |h'| r^3 on [R/2, R], sup|h'|, sup|h''|
DECAY_CAP = 10.0
DERIVATIVE_CAPS: Tuple[float, float] = (1.0, 2.0)


# --------------------------------------------------------------
# FIELDS / QUADRATURE
# --------------------------------------------------------------

# Biaxial perturbation width (zero crossing of 1 - r/sigma)
PERTURBATION_SIGMA = 10.0

# S = Q/h is evaluated only outside r_min = R_MIN_FRACTION * R
R_MIN_FRACTION = 1e-4

# Product Gauss-Legendre x trapezoid sphere rule: m x 2m nodes
QUADRATURE_ORDER = 32
QUADRATURE_MIN_ORDER = 6

# Relative step of the finite-difference gradient of field closures
FD_STEP = 1e-3


# --------------------------------------------------------------
# ENERGY / RELAXATION
# --------------------------------------------------------------

# Minimal number of lattice nodes across the droplet diameter
MIN_GRID_NODES = 16
MIN_RELAX_GRID = 33

# Pseudo-time step in units of dx^2, and its explicit-stability ceiling
DT_FACTOR = 1.0 / 7.0
DT_FACTOR_MAX = 1.0 / 6.0

# Upper bound for the bulk Hessian on |Q| <= 1, used to cap dt
BULK_STIFFNESS = 4.0

RELAX_MAX_STEPS = 20000
RELAX_TOL = 1e-8
ENERGY_INCREASE_TOL = 1e-10
MAX_NORM_SLACK = 1e-3
TRANSIENT_STEPS = 100
CHECKPOINT_EVERY = 500
LOG_EVERY = 100


# --------------------------------------------------------------
# OUTPUT
# --------------------------------------------------------------

FLOAT_FORMAT = "%.17g"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_INSTABILITY = 3


# --------------------------------------------------------------
# LOGGING CONFIGURATION
# --------------------------------------------------------------

LOG_FILE = "hedgehog_lab.log"
LOG_LEVEL = "INFO"   # DEBUG, INFO, WARNING, ERROR


# --------------------------------------------------------------
# RANDOM SEED (optional)
# --------------------------------------------------------------

RANDOM_SEED = 42
