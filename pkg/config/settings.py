import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).parent.parent
RESULTS_DIR = Path(os.getenv("RESULTS_DIR", str(PROJECT_ROOT / "results")))

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

SWEEP_JOBS = int(os.getenv("SWEEP_JOBS", "4"))

ORACLE_GRID_POINTS = int(os.getenv("ORACLE_GRID_POINTS", str(2 ** 14)))
DENSITY_GRID_POINTS = int(os.getenv("DENSITY_GRID_POINTS", "1024"))

DEFAULT_RAMP_DURATION_NS = float(os.getenv("DEFAULT_RAMP_DURATION_NS", "5.0"))
DEFAULT_N0 = float(os.getenv("DEFAULT_N0", "1.5"))

# in coherence lengths c/Γ
QUADRATURE_TRUNCATION_LENGTHS = float(os.getenv("QUADRATURE_TRUNCATION_LENGTHS", "30"))
RESIDUAL_SUPPORT_LENGTHS = float(os.getenv("RESIDUAL_SUPPORT_LENGTHS", "1"))

MISMATCH_NODES = int(os.getenv("MISMATCH_NODES", "16"))

CSV_FLOAT_FORMAT = "%.11e"
