import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(__file__)), "backend"))

from exact_family import enumerate_support  # noqa: E402


@pytest.fixture(scope="session")
def support_tables():
    """Exact support tables for n = 2..6, enumerated once per session"""
    return {n: enumerate_support(n, workers=1) for n in range(2, 7)}


@pytest.fixture
def isolated_env(tmp_path, monkeypatch):
    """Point the result store at a temporary file and reset the TURAN_* settings"""
    for name in ("TURAN_ENUM_CAP", "TURAN_ENUM_WORKERS", "TURAN_CHAIN_WORKERS", "TURAN_LOG_LEVEL", "TURAN_SEED"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("TURAN_STORE_PATH", str(tmp_path / "store.db"))
    return tmp_path
