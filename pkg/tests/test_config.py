"""Tests for configuration module."""

import pytest

from speedscale import config as settings
from speedscale.config import (
    SpeedscaleConfig,
    create_default_config,
    load_config,
    save_config,
    set_value,
)


def test_default_config():
    """Test default configuration values."""
    config = SpeedscaleConfig()
    assert config.solver.tolerance == 1e-9
    assert config.solver.alpha == 3.0
    assert config.oracle.max_jobs == 8
    assert config.oracle.max_machines == 3
    assert config.generator.grid == 1000
    assert config.bench.workers == 1


def test_config_round_trip():
    """Test saving and loading configuration."""
    config = SpeedscaleConfig()
    config.solver.tolerance = 1e-6
    config.oracle.max_jobs = 6
    config.logging.file_logging = False

    save_config(config)

    loaded = load_config()
    assert loaded.solver.tolerance == 1e-6
    assert loaded.oracle.max_jobs == 6
    assert loaded.logging.file_logging is False


def test_create_default_config_only_once(monkeypatch):
    """Test that the commented default file is written on first run only."""
    monkeypatch.delenv("SPEEDSCALE_LOGGING_FILE_LOGGING", raising=False)
    assert create_default_config() is True
    assert settings.SETTINGS_FILE.exists()
    assert create_default_config() is False

    loaded = load_config()
    assert loaded == SpeedscaleConfig()


def test_unreadable_file_falls_back_to_defaults():
    """Test that a corrupt settings.toml does not break loading."""
    settings.SPEEDSCALE_HOME.mkdir(parents=True)
    settings.SETTINGS_FILE.write_text("[solver\ntolerance = ")

    assert load_config().solver.tolerance == 1e-9


def test_env_overrides_without_config_file(monkeypatch):
    """Test that environment variables work even without a settings.toml."""
    monkeypatch.setenv("SPEEDSCALE_ORACLE_MAX_JOBS", "5")
    monkeypatch.setenv("SPEEDSCALE_GENERATOR_HORIZON", "40")

    loaded = load_config()
    assert loaded.oracle.max_jobs == 5
    assert loaded.generator.horizon == 40


def test_env_overrides_config_file(monkeypatch):
    """Test that environment variables take precedence over settings.toml."""
    config = SpeedscaleConfig()
    config.solver.alpha = 2.5
    config.bench.workers = 2
    save_config(config)

    monkeypatch.setenv("SPEEDSCALE_BENCH_WORKERS", "4")

    loaded = load_config()
    # Env var should win
    assert loaded.bench.workers == 4
    # File value preserved for non-overridden setting
    assert loaded.solver.alpha == 2.5


def test_tolerance_shorthand_wins(monkeypatch):
    """Test that SPEEDSCALE_TOLERANCE beats SPEEDSCALE_SOLVER_TOLERANCE."""
    monkeypatch.setenv("SPEEDSCALE_SOLVER_TOLERANCE", "1e-5")
    monkeypatch.setenv("SPEEDSCALE_TOLERANCE", "1e-3")

    assert load_config().solver.tolerance == 1e-3


def test_env_overrides_logging(monkeypatch):
    """Test environment variable overrides for logging settings."""
    monkeypatch.setenv("SPEEDSCALE_LOGGING_LEVEL", "debug")
    monkeypatch.setenv("SPEEDSCALE_LOGGING_CONSOLE_LEVEL", "info")
    monkeypatch.setenv("SPEEDSCALE_LOGGING_FILE_LOGGING", "false")

    loaded = load_config()
    assert loaded.logging.level == "debug"
    assert loaded.logging.console_level == "info"
    assert loaded.logging.file_logging is False


def test_set_value_persists():
    """Test that set_value converts the value and writes settings.toml."""
    assert set_value("oracle.max_jobs", "6") == 6
    assert set_value("logging.file_logging", "no") is False
    assert load_config().oracle.max_jobs == 6
    assert "max_jobs = 6" in settings.SETTINGS_FILE.read_text()


def test_set_value_rejects_unknown_and_bad_values():
    """Test that unknown keys and unconvertible values are refused."""
    with pytest.raises(KeyError):
        set_value("solver.speed", "1")
    with pytest.raises(KeyError):
        set_value("nosuch.tolerance", "1")
    with pytest.raises(ValueError):
        set_value("bench.workers", "many")
