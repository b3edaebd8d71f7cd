"""Shared fixtures: src/ on the import path and the reference models"""

import math
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from model import build_model  # noqa: E402

CENSUS_SIGMAS = (0.6, 1.0, 1.5, 2.2)


@pytest.fixture
def rem():
    """d=1, a=2, alpha=e: sigma_1 = 1"""
    return build_model(1, [2.0], [math.e])


@pytest.fixture
def canonical():
    """d=2, a=(2,2), alpha=(e, e^2): sigma = (1, sqrt 2)"""
    return build_model(2, [2.0, 2.0], [math.e, math.e ** 2])


@pytest.fixture
def desk_rem():
    """alpha=2, a=2 log 2: sigma_1 = 1 and N_n = 2^n"""
    return build_model(1, [2.0 * math.log(2.0)], [2.0])


@pytest.fixture
def census_model():
    """Four levels with a_k = 1 and the given sigma_k"""
    return build_model(4, [1.0] * 4, [math.exp(s * s / 2.0) for s in CENSUS_SIGMAS])


@pytest.fixture
def registry_path(tmp_path, monkeypatch):
    path = str(tmp_path / "runs.db")
    monkeypatch.setenv("GREM_RUN_DB", path)
    import run_store
    monkeypatch.setattr(run_store, "_run_store", None)
    return path
