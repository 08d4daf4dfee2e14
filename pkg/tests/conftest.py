from __future__ import annotations

import numpy as np
import pytest

from dealias import fftprovider

@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """Keep logs and the tune cache inside the test's tmp dir."""
    monkeypatch.setenv("DEALIAS_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("DEALIAS_TUNE_CACHE", str(tmp_path / "tune_cache.csv"))
    monkeypatch.delenv("DEALIAS_FORCE_RETUNE", raising=False)
    monkeypatch.delenv("RUN_ID", raising=False)
    fftprovider.set_fftlib("scipy")
    yield
    fftprovider.set_fftlib("scipy")

@pytest.fixture
def rng():
    return np.random.default_rng(1234)
