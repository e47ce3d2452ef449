"""Shared fixtures: every test runs against a fresh config in a temporary directory."""

from collections.abc import Iterator
from pathlib import Path

import pytest

from covrisk.services.config import reload_config
from covrisk.services.sampling import RngStream

_ENV_KEYS = ("SEED", "REPLICATES", "WORKERS", "SHARD_SIZE", "DATA_DIR", "LOG_LEVEL", "CONFIG_PATH")


@pytest.fixture(autouse=True)
def isolated_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Iterator[Path]:
    """Point the global config at an empty file under tmp_path with no COVRISK_* overrides."""
    for key in _ENV_KEYS:
        monkeypatch.delenv(f"COVRISK_{key}", raising=False)
    monkeypatch.setenv("COVRISK_DATA_DIR", str(tmp_path / "data"))
    config_path = tmp_path / "config.yaml"
    reload_config(config_path)
    yield config_path
    monkeypatch.delenv("COVRISK_DATA_DIR", raising=False)
    # Reset to defaults from a path no test writes to (tests may leave invalid YAML at config_path).
    reload_config(tmp_path / "teardown-defaults.yaml")


@pytest.fixture
def rng() -> RngStream:
    return RngStream(seed=12345)
