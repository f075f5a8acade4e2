"""
Pytest configuration and fixtures
"""

import os
import sys

import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

SETTING_NAMES = [
    "APP_NAME",
    "DEBUG",
    "LOG_LEVEL",
    "DEFAULT_SEED",
    "DEFAULT_SAMPLES",
    "DEFAULT_CHUNKS",
    "N_JOBS",
    "BATCH_SIZE",
    "MEDIAN_OF_MEANS_GROUPS",
    "QUAD_TOLERANCE",
    "STDERR_MARGIN",
    "ESCALATION_FACTOR",
    "OUTPUT_DIR",
]


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Run without inherited settings or a stray .env file"""
    for name in SETTING_NAMES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return monkeypatch


@pytest.fixture
def fresh_settings(clean_env):
    """Re-import config so Settings() reads the patched environment"""

    def load():
        if "config" in sys.modules:
            del sys.modules["config"]
        from config import settings

        return settings

    return load


@pytest.fixture
def small_env(clean_env, tmp_path):
    """Environment for fast CLI runs that write under tmp_path"""
    clean_env.setenv("DEFAULT_SAMPLES", "2000")
    clean_env.setenv("DEFAULT_CHUNKS", "2")
    clean_env.setenv("OUTPUT_DIR", str(tmp_path / "results"))
    return tmp_path
