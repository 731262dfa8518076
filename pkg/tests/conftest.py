"""Shared pytest fixtures for Speedscale tests."""

import os

# Loggers are configured on first import; keep test runs from writing .speedscale/logs
os.environ.setdefault("SPEEDSCALE_LOGGING_FILE_LOGGING", "0")

from fractions import Fraction  # noqa: E402
from pathlib import Path  # noqa: E402

import pytest  # noqa: E402

from speedscale.io import write_instance  # noqa: E402
from speedscale.model import Instance, Job  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Point the settings file at an empty temp directory and clear overrides."""
    home = tmp_path / ".speedscale"
    monkeypatch.setattr("speedscale.config.SPEEDSCALE_HOME", home)
    monkeypatch.setattr("speedscale.config.SETTINGS_FILE", home / "settings.toml")
    for key in list(os.environ):
        if key.startswith("SPEEDSCALE_") and key != "SPEEDSCALE_LOGGING_FILE_LOGGING":
            monkeypatch.delenv(key)
    return home


@pytest.fixture
def common_release_instance() -> Instance:
    """Three unit jobs in [0, 1] on two machines, alpha = 2."""
    jobs = tuple(Job(f"J{i}", 1, 0, 1) for i in range(1, 4))
    return Instance(jobs, machines=2, alpha=2)


@pytest.fixture
def common_deadline_instance() -> Instance:
    """J1 in [0, 2] and J2 in [1, 2], one machine, alpha = 2."""
    return Instance((Job("J1", 1, 0, 2), Job("J2", 1, 1, 2)), machines=1, alpha=2)


@pytest.fixture
def clique_instance() -> Instance:
    """J1 in [0, 2] and J2 in [1, 3], one machine, alpha = 2."""
    return Instance((Job("J1", 1, 0, 2), Job("J2", 1, 1, 3)), machines=1, alpha=2)


@pytest.fixture
def agreeable_instance() -> Instance:
    """Two disjoint unit jobs J1 in [0, 2] and J2 in [3, 5], one machine, alpha = 2."""
    return Instance((Job("J1", 1, 0, 2), Job("J2", 1, 3, 5)), machines=1, alpha=2)


@pytest.fixture
def mixed_instance() -> Instance:
    """Agreeable instance with a two-job clique followed by a lone job, two machines."""
    return Instance(
        (
            Job("J1", 2, 0, 4),
            Job("J2", Fraction(3, 2), 1, 5),
            Job("J3", 1, Fraction(11, 2), 8),
        ),
        machines=2,
        alpha=3,
    )


@pytest.fixture
def write_instance_file(tmp_path: Path):
    """Write an instance document into tmp_path and return its path."""

    def _write(instance: Instance, name: str = "instance.json") -> Path:
        path = tmp_path / name
        path.write_text(write_instance(instance), encoding="utf-8")
        return path

    return _write
