"""Configuration management for Speedscale.

Settings are loaded from ./.speedscale/settings.toml (in the current working directory)
with the following precedence:
1. CLI flags (highest)
2. Environment variables (SPEEDSCALE_* prefix)
3. Config file
4. Built-in defaults (lowest)

Environment variable naming convention:
    SPEEDSCALE_{SECTION}_{KEY}

Examples:
    SPEEDSCALE_SOLVER_TOLERANCE
    SPEEDSCALE_ORACLE_MAX_JOBS
    SPEEDSCALE_BENCH_WORKERS
    SPEEDSCALE_LOGGING_CONSOLE_LEVEL

SPEEDSCALE_TOLERANCE is accepted as a shorthand for the solver tolerance and
wins over SPEEDSCALE_SOLVER_TOLERANCE.
"""

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import toml

# Default paths - stored in current working directory
SPEEDSCALE_HOME = Path.cwd() / ".speedscale"
SETTINGS_FILE = SPEEDSCALE_HOME / "settings.toml"


@dataclass
class SolverConfig:
    """Preemptive solver and algorithm settings."""

    tolerance: float = 1e-9  # relative certificate gap accepted by optimal_preemptive
    alpha: float = 3.0  # default power exponent for generated instances
    degenerate_threshold: float = 1e-12  # e_j below this times the horizon is rejected


@dataclass
class OracleConfig:
    """Brute-force oracle settings."""

    tolerance: float = 1e-7
    max_jobs: int = 8
    max_machines: int = 3
    max_sweeps: int = 100_000  # coordinate-descent sweep cap per fixed order


@dataclass
class GeneratorConfig:
    """Random instance generator settings."""

    work_min: int = 1
    work_max: int = 10
    horizon: int = 100
    grid: int = 1000  # sampled times are multiples of horizon / grid
    max_attempts: int = 100


@dataclass
class BenchConfig:
    """Benchmark harness settings."""

    workers: int = 1  # 0 uses every CPU
    bound_slack: float = 1e-9


@dataclass
class LoggingConfig:
    """Logging configuration section."""

    level: str = "info"  # "debug", "info", "warning", "error"
    console_level: str = "warning"  # Level for console output
    file_logging: bool = True


@dataclass
class SpeedscaleConfig:
    """Main configuration container."""

    solver: SolverConfig = field(default_factory=SolverConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


SECTIONS = ("solver", "oracle", "generator", "bench", "logging")


def ensure_home() -> None:
    """Create the Speedscale home directory if it doesn't exist."""
    SPEEDSCALE_HOME.mkdir(parents=True, exist_ok=True)


def _get_env(key: str, default: str | None = None) -> str | None:
    """Get an environment variable with SPEEDSCALE_ prefix."""
    return os.environ.get(f"SPEEDSCALE_{key}", default)


def _coerce(current: Any, raw: Any) -> Any:
    """Convert a raw file or environment value to the type of the current setting."""
    if isinstance(current, bool):
        if isinstance(raw, str):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return bool(raw)
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return str(raw)


def _apply_env_overrides(config: SpeedscaleConfig) -> None:
    """Apply environment variable overrides to configuration.

    Environment variables take precedence over settings.toml values.
    Uses SPEEDSCALE_ prefix with section names in uppercase.
    """
    for section_name in SECTIONS:
        section = getattr(config, section_name)
        for f in fields(section):
            if val := _get_env(f"{section_name.upper()}_{f.name.upper()}"):
                setattr(section, f.name, _coerce(getattr(section, f.name), val))

    if val := _get_env("TOLERANCE"):
        config.solver.tolerance = float(val)


def load_config() -> SpeedscaleConfig:
    """Load configuration from settings.toml, merging with defaults.

    Precedence (highest to lowest):
    1. Environment variables (SPEEDSCALE_* prefix)
    2. Config file (.speedscale/settings.toml)
    3. Built-in defaults
    """
    config = SpeedscaleConfig()

    if not SETTINGS_FILE.exists():
        _apply_env_overrides(config)
        return config

    try:
        data = toml.load(SETTINGS_FILE)
    except Exception:
        _apply_env_overrides(config)
        return config

    for section_name in SECTIONS:
        if section_name not in data:
            continue
        section = getattr(config, section_name)
        section_data = data[section_name]
        for f in fields(section):
            if f.name in section_data:
                setattr(section, f.name, _coerce(getattr(section, f.name), section_data[f.name]))

    # Apply environment variable overrides (highest precedence after CLI flags)
    _apply_env_overrides(config)

    return config


def save_config(config: SpeedscaleConfig) -> None:
    """Save configuration to settings.toml."""
    ensure_home()

    data: dict[str, Any] = {
        section_name: {
            f.name: getattr(getattr(config, section_name), f.name)
            for f in fields(getattr(config, section_name))
        }
        for section_name in SECTIONS
    }

    with open(SETTINGS_FILE, "w") as f:
        toml.dump(data, f)


def create_default_config() -> bool:
    """Create a default settings.toml if it doesn't exist.

    Returns:
        True if a new config was created (first run), False if it already existed.
    """
    ensure_home()

    if SETTINGS_FILE.exists():
        return False

    commented_config = '''# Speedscale Configuration
#
# Settings can also be configured via environment variables (SPEEDSCALE_* prefix).
# Environment variables take precedence over this file.
#
# Naming convention:
#   SPEEDSCALE_{SECTION}_{KEY}
#
# Examples:
#   SPEEDSCALE_SOLVER_TOLERANCE=1e-10
#   SPEEDSCALE_TOLERANCE=1e-10        (shorthand, wins over the line above)
#   SPEEDSCALE_BENCH_WORKERS=4

[solver]
# Relative gap allowed between the preemptive optimum and its certified lower bound
tolerance = 1e-9

# Default power exponent (power = speed ** alpha) for generated instances
alpha = 3.0

# Jobs whose preemptive execution time falls below this fraction of the
# horizon are rejected as numerically infeasible
degenerate_threshold = 1e-12

[oracle]
# Relative tolerance of the fixed-order timing solver
tolerance = 1e-7

# Brute force is refused beyond these sizes
max_jobs = 8
max_machines = 3
max_sweeps = 100000

[generator]
work_min = 1
work_max = 10
horizon = 100

# Sampled times are integer multiples of horizon / grid
grid = 1000
max_attempts = 100

[bench]
# Worker processes for the benchmark (0 = one per CPU)
workers = 1

# Relative slack when comparing a ratio against its theorem bound
bound_slack = 1e-9

[logging]
# File logging level: "debug", "info", "warning", "error"
level = "info"

# Console logging level: "debug", "info", "warning", "error"
console_level = "warning"

# Write .speedscale/logs/speedscale.log and performance.log
file_logging = true
'''

    SETTINGS_FILE.write_text(commented_config)
    return True


def set_value(key: str, value: str) -> Any:
    """Set one setting in settings.toml.

    Args:
        key: Dotted name, e.g. "oracle.max_jobs".
        value: Raw value, converted to the type of the current setting.

    Returns:
        The stored value.

    Raises:
        KeyError: if no such setting exists.
        ValueError: if value cannot be converted.
    """
    section_name, _, name = key.partition(".")
    config = load_config()
    section = getattr(config, section_name) if section_name in SECTIONS else None
    if section is None or name not in {f.name for f in fields(section)}:
        raise KeyError(key)
    setattr(section, name, _coerce(getattr(section, name), value))
    save_config(config)
    return getattr(section, name)
