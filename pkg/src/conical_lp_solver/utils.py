"""
Contains utility code and constants used throughout the project.
"""

import logging

logger = logging.getLogger(__name__)

# Brute-force caps for the independent oracles.
MAX_ORACLE_ROWS = 16
MAX_ORACLE_COLS = 8
MAX_RAY_ORACLE_DIM = 14

# The evolutive search gives up after examining this many rays.
MAX_RAYS_EXAMINED = 1_000_000

# The initial objective level sits this far (relative) below a feasible value.
INITIAL_H_MARGIN = 1e-3

# A singular value this close (as a factor) to the rank cutoff is reported.
NEAR_THRESHOLD_FACTOR = 100.0

DEFAULT_BENCH_WORKERS = 1
SOLVER_MODES = ["enum", "evo"]
INSTANCE_KINDS = ["feasible", "unrestricted", "lp", "face"]
