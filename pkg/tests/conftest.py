"""Shared fixtures for the gsinclusion test suite."""

from pathlib import Path

import numpy as np
import pytest

from gsinclusion.core.config import create_default_config
from gsinclusion.core.data_structures import ApplicationConfig


@pytest.fixture
def config() -> ApplicationConfig:
    return create_default_config()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def isolated_home(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Home directory under tmp_path so user config and logs stay out of the real one."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.setenv("APPDATA", str(home))
    monkeypatch.setenv("LOCALAPPDATA", str(home))
    return home
