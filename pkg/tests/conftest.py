"""Pytest fixtures for SPPS tests."""

import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

from spps.core.grid import make_grid


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def unit_grid():
    """Uniform grid on [0, 1] with 400 subintervals."""
    return make_grid(0.0, 1.0, 400)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def sample_file(temp_dir):
    """Two-column sample file of sin(x) on [0, pi]."""
    x = np.linspace(0.0, np.pi, 201)
    path = temp_dir / "samples.csv"
    np.savetxt(path, np.column_stack([x, np.sin(x)]), delimiter=",", header="x,value")
    return path


@pytest.fixture(autouse=True)
def reset_environment():
    """Reset environment variables after each test."""
    original_env = os.environ.copy()
    yield
    os.environ.clear()
    os.environ.update(original_env)
