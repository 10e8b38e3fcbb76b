"""
Configuration settings for Robin Spectra
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _default_threads():
    return min(8, os.cpu_count() or 1)


class Config:
    """Application configuration class"""

    # Worker pool
    THREADS = int(os.getenv('ROBIN_SPECTRA_THREADS', _default_threads()))

    # Logging
    LOG_LEVEL = os.getenv('ROBIN_SPECTRA_LOG_LEVEL', 'INFO').upper()
    LOG_FILE = os.getenv('ROBIN_SPECTRA_LOG_FILE', 'robin_spectra.log')

    # Tolerance defaults
    ROOT_ABS_TOL = float(os.getenv('ROBIN_SPECTRA_ROOT_ABS_TOL', 1e-12))
    EIG_REL_TOL = float(os.getenv('ROBIN_SPECTRA_EIG_REL_TOL', 1e-10))
    DISCRETE_REL_TOL = float(os.getenv('ROBIN_SPECTRA_DISCRETE_REL_TOL', 1e-6))
    MAX_ITERATIONS = int(os.getenv('ROBIN_SPECTRA_MAX_ITERATIONS', 200))

    # Discretization defaults
    SHOOTING_STEPS = int(os.getenv('ROBIN_SPECTRA_SHOOTING_STEPS', 4096))
    TRIDIAG_CELLS = int(os.getenv('ROBIN_SPECTRA_TRIDIAG_CELLS', 4096))
    FEM_RESOLUTION = int(os.getenv('ROBIN_SPECTRA_FEM_RESOLUTION', 64))

    # Output
    OUTPUT_DIR = os.getenv('ROBIN_SPECTRA_OUTPUT_DIR', 'results')
    CSV_DIGITS = 17
    ALLOWED_MESH_EXTENSIONS = {'.mesh', '.txt'}
    ALLOWED_CONFIG_EXTENSIONS = {'.cfg', '.conf', '.txt', '.ini'}

    @property
    def worker_count(self):
        """Worker pool size, never below one"""
        return max(1, self.THREADS)

    @property
    def log_to_file(self):
        """Check if a log file is configured"""
        return bool(self.LOG_FILE)
