import os

from dotenv import load_dotenv

load_dotenv()

WORKING_DIRECTORY = os.getcwd()
PACKAGE_DIRECTORY = os.path.dirname(os.path.abspath(__file__))
PRESETS_DIRECTORY = os.path.join(PACKAGE_DIRECTORY, "presets")
DOCS_DIRECTORY = os.path.join(os.path.dirname(PACKAGE_DIRECTORY), "docs")
SCENARIO_FORMAT_MD = os.path.join(DOCS_DIRECTORY, "scenario_format.md")
PRESET_EXTENSION = ".scn"

SEED_KEY = "SIM_SEED"
LOG_LEVEL_KEY = "SIM_LOG_LEVEL"
WORKERS_KEY = "SIM_WORKERS"
OUTPUT_DIRECTORY_KEY = "SIM_OUTPUT_DIR"

DEFAULT_SEED = 0
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_OUTPUT_DIRECTORY = os.path.join(WORKING_DIRECTORY, "output")

# Virtual length of the solo runs that give percent-of-baseline its denominator.
BASELINE_HORIZON = 2_000_000
EVENT_LOG_TAIL = 32
RUN_TOLERANCE = 37  # µs


def _int_from_env(key: str, default: int) -> int:
    raw = os.environ.get(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"Environment variable {key} must be an integer, got {raw!r}.") from e


def get_default_seed() -> int:
    """Get the seed used when neither the scenario nor the command line sets one.

    Returns:
        int: The value of SIM_SEED, or 0 if it is not set.
    """
    seed = _int_from_env(SEED_KEY, DEFAULT_SEED)
    if seed < 0:
        raise ValueError(f"Environment variable {SEED_KEY} must be non-negative, got {seed}.")
    return seed


def get_log_level() -> str:
    """Get the log level for the application loggers.

    Returns:
        str: The upper-cased value of SIM_LOG_LEVEL, INFO by default.
    """
    return os.environ.get(LOG_LEVEL_KEY, DEFAULT_LOG_LEVEL).upper()


def get_workers() -> int:
    """Get the number of worker threads used to run replicas.

    Returns:
        int: The value of SIM_WORKERS, at least 1.
    """
    return max(1, _int_from_env(WORKERS_KEY, 1))


def get_output_directory() -> str:
    """Get the directory the dashboard writes reports to, creating it if needed.

    Returns:
        str: The path to the output directory.
    """
    directory = os.environ.get(OUTPUT_DIRECTORY_KEY, DEFAULT_OUTPUT_DIRECTORY)
    os.makedirs(directory, exist_ok=True)
    return directory


def get_presets() -> dict[str, str]:
    """Get the built-in scenario presets.

    Returns:
        dict[str, str]: Preset names mapped to the paths of their scenario files, sorted by name.
    """
    if not os.path.isdir(PRESETS_DIRECTORY):
        return {}
    return {
        filename[: -len(PRESET_EXTENSION)]: os.path.join(PRESETS_DIRECTORY, filename)
        for filename in sorted(os.listdir(PRESETS_DIRECTORY))
        if filename.endswith(PRESET_EXTENSION)
    }
