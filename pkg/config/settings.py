"""
Configuration management for the Lamb-effect simulator.
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Base configuration class."""

    # Worker pool for sweeps and tau scans
    WORKERS = int(os.getenv("DLE_WORKERS", "4"))

    # Numerical guards
    NEAR_RESONANCE_EPS = float(os.getenv("DLE_NEAR_RESONANCE_EPS", "1e-9"))
    HERMITIAN_TOL = float(os.getenv("DLE_HERMITIAN_TOL", "1e-12"))
    NORMALIZATION_TOL = float(os.getenv("DLE_NORMALIZATION_TOL", "1e-10"))

    # Fock truncation
    DEFAULT_CUTOFF = int(os.getenv("DLE_DEFAULT_CUTOFF", "20"))
    CONVERGENCE_TOL = float(os.getenv("DLE_CONVERGENCE_TOL", "1e-6"))
    CONVERGENCE_STEP = 5

    # Time-domain integrator
    ODE_METHOD = os.getenv("DLE_ODE_METHOD", "DOP853")
    ODE_RTOL = float(os.getenv("DLE_ODE_RTOL", "1e-11"))
    ODE_ATOL = float(os.getenv("DLE_ODE_ATOL", "1e-13"))
    MONITOR_POINTS = int(os.getenv("DLE_MONITOR_POINTS", "200"))
    TOP_FOCK_LIMIT = float(os.getenv("DLE_TOP_FOCK_LIMIT", "1e-6"))
    NORM_DRIFT_LIMIT = float(os.getenv("DLE_NORM_DRIFT_LIMIT", "1e-8"))

    # Validity flag thresholds for result rows
    PROBABILITY_WARN = 0.5
    COEFFICIENT_WARN = 0.3
    COUPLING_WARN_RATIO = 0.5

    # Output
    EXPORTS_DIR = os.getenv("DLE_EXPORTS_DIR", "./exports")
    FLOAT_FORMAT = "%.9e"
    LOG_LEVEL = os.getenv("DLE_LOG_LEVEL", "INFO").upper()

    @classmethod
    def validate(cls):
        """Validate configuration values."""
        if cls.WORKERS < 1:
            raise ValueError(f"DLE_WORKERS must be positive, got {cls.WORKERS}")

        if cls.NEAR_RESONANCE_EPS <= 0:
            raise ValueError("DLE_NEAR_RESONANCE_EPS must be positive")

        if cls.DEFAULT_CUTOFF < 2:
            raise ValueError(f"DLE_DEFAULT_CUTOFF must be at least 2, got {cls.DEFAULT_CUTOFF}")

        if not (0 < cls.ODE_RTOL < 1 and 0 < cls.ODE_ATOL < 1):
            raise ValueError("ODE tolerances must lie in (0, 1)")

        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"DLE_LOG_LEVEL must be a logging level name, got '{cls.LOG_LEVEL}'")


# Default configuration
config = Config()
