"""Pytest configuration and fixtures."""

import numpy as np
import pytest


# Test markers
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests that take more than a few seconds"
    )
    config.addinivalue_line(
        "markers", "e2e: marks end-to-end tests"
    )


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid():
    """16^3 grid sized for the direct convolution oracle."""
    from src.grid.gridfn import GridSpec

    return GridSpec.cube(5.0, 16)


@pytest.fixture
def field_grid():
    """32^3 grid fine enough for spectral derivatives of unit Gaussians."""
    from src.grid.gridfn import GridSpec

    return GridSpec.cube(6.0, 32)


@pytest.fixture
def bracket_grid():
    """Grid with a long, fine s axis for antiderivative checks."""
    from src.grid.gridfn import GridSpec

    return GridSpec(6.0, 5.0, 5.0, 64, 16, 16)


@pytest.fixture
def gaussian():
    """Unit Gaussian e^{-s²-x²-y²}."""
    from src.grid.catalog import get_signal

    return get_signal("gauss")


@pytest.fixture
def algebra_grid():
    """Long, well-resolved s axis; coarse x and y axes."""
    from src.grid.gridfn import GridSpec

    return GridSpec(8.0, 5.0, 5.0, 64, 16, 16)


@pytest.fixture
def triple():
    """Three asymmetric signals for algebraic identity checks."""
    from src.grid.catalog import Factor, TestSignal

    return [
        TestSignal("a", Factor(0, 0.0, 1.0), Factor(1, 0.2, 2.0), Factor(0, 0.0, 2.5)),
        TestSignal("b", Factor(0, 0.1, 1.2), Factor(0, -0.2, 2.0), Factor(1, 0.0, 2.0), 1j),
        TestSignal("c", Factor(2, 0.0, 1.0), Factor(0, 0.1, 2.5), Factor(0, 0.2, 2.0), 0.5),
    ]


@pytest.fixture
def mock_config(tmp_path):
    """Default run configuration with output sent to a temp directory."""
    from src.config import RunConfig

    return RunConfig(outdir=tmp_path / "out")


@pytest.fixture
def rep_grid():
    """
    Group grid dual to the matched wave grids.

    With h_x = h_y = √(2π)/8 the matched wave grid at ħ has N_v = 64/ħ points,
    so ħ ∈ {1, ½, ¼} gives N_v ∈ {64, 128, 256}.
    """
    from src.grid.gridfn import GridSpec

    extent = 2.0 * np.sqrt(2.0 * np.pi)
    return GridSpec(6.0, extent, extent, 32, 32, 32)


@pytest.fixture
def triple_grid():
    """Wide x-y grid holding nested products of catalog signals."""
    from src.grid.gridfn import GridSpec

    return GridSpec.cube(8.0, 32)
