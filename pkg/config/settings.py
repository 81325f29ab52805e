import configparser
import os
from pathlib import Path

BASE_DIR = Path(__file__).parent.parent
OUTPUT_DIR = Path(os.environ.get("RBCSP_OUTPUT_DIR", BASE_DIR / "outputs"))
INSTANCE_DIR = OUTPUT_DIR / "instances"
RESULTS_DIR = OUTPUT_DIR / "results"
AUDIT_DIR = OUTPUT_DIR / "audit_log"
BENCHMARK_DIR = OUTPUT_DIR / "benchmark"


def ensure_dirs():
    for d in [OUTPUT_DIR, INSTANCE_DIR, RESULTS_DIR, AUDIT_DIR, BENCHMARK_DIR]:
        d.mkdir(parents=True, exist_ok=True)


INSTANCE_FORMAT_TAG = "RBCSP"
INSTANCE_FORMAT_VERSION = 1
CONFIG_FILE_VERSION = 1

# Desk-scale experiment defaults; larger runs go through the CLI flags
DEFAULT_SAMPLES_PER_POINT = 50
DEFAULT_SURVIVAL_RUNS = 500
DEFAULT_THRESHOLD_SAMPLES = 100
DEFAULT_THRESHOLD_TOLERANCE = 0.01
DEFAULT_MASTER_SEED = 20050101

DEFAULT_TABU_TENURE = 10
DEFAULT_MAX_FLIPS = 100_000
DEFAULT_TABU_RESTARTS = 1
TABU_SELF_CHECK_EVERY = 1000

BRUTE_FORCE_LIMIT = 10 ** 8
BRUTE_FORCE_CHUNK = 1 << 18

EXACT_BINOMIAL_MAX_N = 64
DEFAULT_PROFILE_GRID = 101

CSV_FLOAT_FORMAT = "%.6g"

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_TIMEOUT = 30
EXIT_ERROR = 2


def load_config_file(path):
    """
    Read a versioned ``key = value`` config file.

    The file has no section headers; every key maps to the ``dest`` of a
    CLI flag (dashes and underscores are interchangeable). ``version`` must
    equal CONFIG_FILE_VERSION.

    Returns:
        dict: flag dest -> raw string value (``version`` removed)
    """
    from src.core import ConfigError

    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        parser.read_string("[rbcsp]\n" + text, source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from e

    values = {key.replace("-", "_"): value for key, value in parser["rbcsp"].items()}
    version = values.pop("version", None)
    if version is None:
        raise ConfigError(f"{path}: missing 'version' key")
    if version.strip() != str(CONFIG_FILE_VERSION):
        raise ConfigError(
            f"{path}: unsupported config version {version!r} "
            f"(expected {CONFIG_FILE_VERSION})"
        )
    return values
