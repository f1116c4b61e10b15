import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str) -> bool:
    value = os.getenv(name, default).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"{name} must be a boolean (true/false) in .env file")


OUTPUT_DIR = os.getenv('VOICESIM_OUTPUT_DIR', 'voicesim-out')
LOG_LEVEL = os.getenv('VOICESIM_LOG_LEVEL', 'INFO').upper()
CALIBRATION_EPSILON = os.getenv('VOICESIM_CALIBRATION_EPSILON')
PRIOR_MODE = os.getenv('VOICESIM_PRIOR_MODE', 'empirical').lower()
EXCLUDE_OP_SELF_PAIRS = _flag('VOICESIM_EXCLUDE_OP_SELF_PAIRS', 'false')
CELL_SIZE = os.getenv('VOICESIM_CELL_SIZE', '16')
WORKERS = os.getenv('VOICESIM_WORKERS', '3')

if LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
    raise ValueError("VOICESIM_LOG_LEVEL must be a logging level name in .env file")

if PRIOR_MODE not in ('empirical', 'none'):
    raise ValueError("VOICESIM_PRIOR_MODE must be 'empirical' or 'none' in .env file")

if CALIBRATION_EPSILON is not None:
    try:
        CALIBRATION_EPSILON = float(CALIBRATION_EPSILON)
    except ValueError:
        raise ValueError("VOICESIM_CALIBRATION_EPSILON must be a number in .env file")
    if not 0.0 < CALIBRATION_EPSILON < 0.5:
        raise ValueError("VOICESIM_CALIBRATION_EPSILON must lie in (0, 0.5) in .env file")

if not CELL_SIZE.isdigit() or int(CELL_SIZE) < 1:
    raise ValueError("VOICESIM_CELL_SIZE must be a positive integer in .env file")
CELL_SIZE = int(CELL_SIZE)

if not WORKERS.isdigit() or int(WORKERS) < 1:
    raise ValueError("VOICESIM_WORKERS must be a positive integer in .env file")
WORKERS = int(WORKERS)
