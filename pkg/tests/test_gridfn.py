"""Tests for grids, quadrature, s-transforms and spectral interpolation."""

import numpy as np
import pytest

from src.grid.catalog import Factor, TestSignal, get_signal
from src.grid.gridfn import (
    DomainTooSmallError,
    GridSpec,
    InvalidGridError,
    NotInL1vError,
    PFunction,
    check_l1v,
    fourier_s,
    inverse_fourier_s,
    quadrature,
    sample,
    shift_interp,
)


def test_grid_spec_validation():
    """Test that sample counts must be powers of two of at least 16."""
    GridSpec.cube(4.0, 16)
    with pytest.raises(InvalidGridError):
        GridSpec.cube(4.0, 24)
    with pytest.raises(InvalidGridError):
        GridSpec.cube(4.0, 8)
    with pytest.raises(InvalidGridError):
        GridSpec(4.0, -1.0, 4.0, 16, 16, 16)


def test_grid_nodes_and_padding():
    """Test node placement and the doubled grid."""
    spec = GridSpec(2.0, 4.0, 4.0, 16, 32, 16)
    assert spec.s[0] == -2.0
    assert spec.s[8] == pytest.approx(0.0)
    assert spec.h_x == pytest.approx(0.25)
    padded = spec.padded()
    assert padded.shape == (32, 64, 32)
    assert padded.h_x == spec.h_x


def test_sample_odd_profile_vanishes_at_origin():
    """Test s·e^{-s²-x²-y²} sampled at the origin."""
    spec = GridSpec.cube(6.0, 32)
    k = sample(get_signal("s_gauss"), spec)
    assert k.values[16, 16, 16] == 0.0


def test_gaussian_l1_norm():
    """Test sampled Gaussian mass against π^{3/2}."""
    spec = GridSpec.cube(8.0, 64)
    k = sample(get_signal("gauss"), spec)
    assert abs(k.l1_norm() - np.pi ** 1.5) / np.pi ** 1.5 < 1e-10


def test_tail_mass_guard():
    """Test that L = 3σ passes and L = σ raises."""
    signal = TestSignal("wide", Factor(), Factor(), Factor())
    assert sample(signal, GridSpec.cube(3.0, 32)).tail_mass < 0.01
    with pytest.raises(DomainTooSmallError):
        sample(signal, GridSpec.cube(1.0, 16))


def test_tail_mass_zero_function():
    """Test tail mass of the zero function."""
    assert PFunction.zeros(GridSpec.cube(2.0, 16)).tail_mass == 0.0


def test_pfunction_rejects_bad_values():
    """Test shape and finiteness checks."""
    spec = GridSpec.cube(2.0, 16)
    with pytest.raises(InvalidGridError):
        PFunction(spec, np.zeros((16, 16, 8)))
    bad = np.zeros(spec.shape)
    bad[0, 0, 0] = np.nan
    with pytest.raises(InvalidGridError):
        PFunction(spec, bad)


def test_quadrature_gaussian_moments():
    """Test Gaussian integrals and moments."""
    spec = GridSpec.cube(8.0, 64)
    k = sample(get_signal("gauss"), spec)
    assert abs(quadrature(k) - np.pi ** 1.5) < 1e-10 * np.pi ** 1.5
    assert abs(quadrature(k, lambda s, x, y: s)) < 1e-12
    expected = np.sqrt(np.pi) / 2 * np.pi
    assert abs(quadrature(k, lambda s, x, y: s ** 2) - expected) < 1e-9 * expected


def test_quadrature_array_weight():
    """Test an explicit weight array."""
    spec = GridSpec.cube(8.0, 32)
    k = sample(get_signal("gauss"), spec)
    weight = np.full(spec.shape, 2.0)
    assert quadrature(k, weight) == pytest.approx(2 * quadrature(k))


def test_fourier_s_zero_slice_of_gaussian():
    """Test the ħ = 0 slice of e^{-s²}φ(x, y)."""
    spec = GridSpec(8.0, 4.0, 4.0, 64, 16, 16)
    k = sample(get_signal("gauss"), spec)
    sf = fourier_s(k)
    assert sf.hbar_grid[0] == 0.0
    _, X, Y = spec.mesh()
    phi = np.exp(-X[0] ** 2 - Y[0] ** 2)
    expected = np.sqrt(np.pi) / np.sqrt(2 * np.pi) * phi
    np.testing.assert_allclose(sf.slices[0], expected, rtol=1e-12, atol=1e-14)


def test_fourier_s_symmetries():
    """Test real slices for even profiles and a vanishing zero slice for odd ones."""
    spec = GridSpec(8.0, 4.0, 4.0, 64, 16, 16)
    even = fourier_s(sample(get_signal("gauss"), spec))
    assert np.max(np.abs(even.slices.imag)) < 1e-12 * np.max(np.abs(even.slices))
    odd = fourier_s(sample(get_signal("s_gauss"), spec))
    assert np.max(np.abs(odd.slices[0])) < 1e-12


def test_fourier_s_round_trip_and_parseval(rng):
    """Test inverse transform and norm preservation."""
    spec = GridSpec.cube(4.0, 16)
    k = PFunction(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))
    sf = fourier_s(k)
    back = inverse_fourier_s(sf)
    assert back.distance(k) < 1e-12
    energy = np.sum(np.abs(sf.slices) ** 2) * sf.dual_step * spec.h_x * spec.h_y
    assert energy == pytest.approx(k.norm() ** 2, rel=1e-12)


@pytest.mark.parametrize("name", ["gauss", "s_gauss", "squeezed_gauss", "shifted_gauss"])
def test_fourier_s_matches_closed_form(name):
    """Test sampled transforms against the catalog's closed forms."""
    spec = GridSpec(8.0, 6.0, 6.0, 64, 32, 32)
    signal = get_signal(name)
    sf = fourier_s(sample(signal, spec))
    hbar = sf.hbar_grid[:, np.newaxis, np.newaxis]
    x = spec.x[np.newaxis, :, np.newaxis]
    y = spec.y[np.newaxis, np.newaxis, :]
    exact = signal.fourier_s(hbar, x, y)
    error = np.linalg.norm(sf.slices - exact) / np.linalg.norm(exact)
    assert error < 1e-8


def test_zero_mask_selects_zero_slice():
    """Test that only the ħ = 0 slice is binned as zero."""
    spec = GridSpec.cube(4.0, 16)
    sf = fourier_s(PFunction.zeros(spec))
    assert np.flatnonzero(sf.zero_mask).tolist() == [0]


def test_shift_interp_identity_and_whole_step():
    """Test zero shift and one-step circular shift."""
    v = np.linspace(-8, 8, 64, endpoint=False)
    u = np.exp(-v ** 2) * (1 + 0.5j * v)
    h = v[1] - v[0]
    np.testing.assert_allclose(shift_interp(u, 0.0, h), u, atol=1e-15)
    np.testing.assert_allclose(shift_interp(u, h, h), np.roll(u, -1), atol=1e-12)


def test_shift_interp_fractional_step():
    """Test a 0.3-step shift of a Gaussian against re-evaluation."""
    v = np.linspace(-8, 8, 64, endpoint=False)
    h = v[1] - v[0]
    u = np.exp(-v ** 2)
    shifted = shift_interp(u, 0.3 * h, h)
    exact = np.exp(-(v + 0.3 * h) ** 2)
    assert np.linalg.norm(shifted - exact) / np.linalg.norm(exact) < 1e-9


def test_shift_interp_broadcasts_over_rows():
    """Test per-row shifts."""
    v = np.linspace(-8, 8, 64, endpoint=False)
    h = v[1] - v[0]
    rows = np.tile(np.exp(-v ** 2), (3, 1))
    shifts = np.array([0.0, h, 2 * h])
    out = shift_interp(rows, shifts, h)
    np.testing.assert_allclose(out[2], np.roll(rows[2], -2), atol=1e-12)


def test_check_l1v():
    """Test the vanishing s-mean proxy check."""
    spec = GridSpec.cube(6.0, 32)
    check_l1v(sample(get_signal("s_gauss"), spec))
    with pytest.raises(NotInL1vError):
        check_l1v(sample(get_signal("gauss"), spec))


def test_pfunction_arithmetic():
    """Test linear combinations and distances."""
    spec = GridSpec.cube(6.0, 16)
    k = sample(get_signal("gauss"), spec)
    assert (k + k).distance(2 * k) == 0.0
    assert (k - k).norm() == 0.0
    assert (-k).distance(k * -1) == 0.0
    with pytest.raises(InvalidGridError):
        k + PFunction.zeros(GridSpec.cube(6.0, 32))
