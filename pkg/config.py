"""
Configuration for the Frobenius manifold toolkit
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env file (values already in the environment win)
load_dotenv()

# Base paths
BASE_DIR = Path(__file__).parent
CATALOG_DIR = BASE_DIR / "catalog"
OUTPUT_DIR = BASE_DIR / "output"
LOG_DIR = Path(os.getenv('LOG_DIR', str(BASE_DIR / "logs")))

# Numeric regime
DEFAULT_TOLERANCE = float(os.getenv('FROBENIUS_TOLERANCE', '1e-9'))
FD_STEP = float(os.getenv('FROBENIUS_FD_STEP', '1e-5'))  # relative, central differences
ROOT_MAX_ITERATIONS = int(os.getenv('FROBENIUS_ROOT_MAX_ITERATIONS', '500'))
NEWTON_POLISH_STEPS = 3

# Exact regime
TRUNCATION_ORDER = int(os.getenv('FROBENIUS_TRUNCATION_ORDER', '6'))
DEFAULT_SEED = int(os.getenv('FROBENIUS_SEED', '0'))
IDENTITY_SAMPLES = int(os.getenv('FROBENIUS_IDENTITY_SAMPLES', '100'))
DIRECTION_SAMPLES = 20
BRUTE_FORCE_LIMIT = int(os.getenv('FROBENIUS_BRUTE_FORCE_LIMIT', str(10 ** 7)))
MAX_PERMUTATION_SIZE = int(os.getenv('FROBENIUS_MAX_PERMUTATION_SIZE', '12'))
PARTIAL_CACHE_SIZE = 4096  # memoized d_a matrices per algebra

# Projective plane generator: number of lines through two points
P2_SEED_INVARIANT = 1
P2_DEFAULT_DEGREE = 4

# Correlator tables are listed up to this many insertions
MAX_CORRELATOR_POINTS = 5

# Reports
REPORT_SCHEMA = "frobenius-toolkit/1"
ALGEBRA_SUFFIX = ".alg"

# Logging
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_TO_FILE = os.getenv('LOG_TO_FILE', 'false').lower() == 'true'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
