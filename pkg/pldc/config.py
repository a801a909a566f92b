import os
from dotenv import load_dotenv

load_dotenv()

# Logging Config
BASE_DIR = os.path.abspath(os.path.dirname(os.path.dirname(__file__)))
LOG_DIR = os.environ.get("PLDC_LOG_DIR", os.path.join(BASE_DIR, "logs"))
LOG_LEVEL = os.environ.get("PLDC_LOG_LEVEL", "INFO").upper()
LOG_MAX_BYTES = 2_000_000
LOG_BACKUP_COUNT = 5

# ADMM Config
DEFAULT_RHO = float(os.environ.get("PLDC_DEFAULT_RHO", "0.01"))
DEFAULT_MAX_ITERS = int(os.environ.get("PLDC_DEFAULT_MAX_ITERS", "20000"))
DEFAULT_TOL = float(os.environ.get("PLDC_DEFAULT_TOL", "1e-6"))

# Model Algebra Config
MAX_PLANES = int(os.environ.get("PLDC_MAX_PLANES", "65536"))

# Interior Point Config
ORACLE_TOL = float(os.environ.get("PLDC_ORACLE_TOL", "1e-9"))
ORACLE_MAX_NEWTON = int(os.environ.get("PLDC_ORACLE_MAX_NEWTON", "200"))
BARRIER_MU = 10.0
NEWTON_TOL = 1e-10

# Cross Validation Config
CV_FOLDS = int(os.environ.get("PLDC_CV_FOLDS", "5"))
CV_WORKERS = int(os.environ.get("PLDC_CV_WORKERS", "1"))

# Model File Config
MODEL_FORMAT_VERSION = 1
