"""Tests for Heisenberg group arithmetic and invariant vector fields."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.grid.catalog import Factor, TestSignal, get_signal
from src.grid.gridfn import GridSpec, PFunction, sample, spectral_derivative
from src.group.heisenberg import (
    Axis,
    DimensionMismatchError,
    FieldPolynomial,
    GridTooCoarseError,
    GroupPoint,
    InvariantField,
    Side,
    apply_field,
    apply_word,
    field_commutator,
    inverse,
    multiply,
)

coords = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
points = st.builds(GroupPoint, coords, coords, coords)

XL = InvariantField(Side.LEFT, Axis.X)
YL = InvariantField(Side.LEFT, Axis.Y)
XR = InvariantField(Side.RIGHT, Axis.X)
YR = InvariantField(Side.RIGHT, Axis.Y)
S = InvariantField(Side.LEFT, Axis.S)


@pytest.fixture
def fine_xy_grid():
    """Coarse s axis, fine x and y axes."""
    return GridSpec(6.0, 6.0, 6.0, 32, 64, 64)


def test_multiply_example():
    """Test (0,1,0)·(0,0,1) = (½,1,1)."""
    g = multiply(GroupPoint(0, 1, 0), GroupPoint(0, 0, 1))
    assert g == GroupPoint(0.5, 1, 1)


def test_identity_and_inverse_examples():
    """Test identity and inverse on fixed points."""
    e = GroupPoint.identity()
    g = GroupPoint(1, 2, 3)
    assert multiply(g, e) == g
    assert inverse(e) == e
    assert inverse(g) == GroupPoint(-1, -2, -3)


def test_fixed_associativity_example():
    """Test associativity on the integer triple."""
    a, b, c = GroupPoint(1, 2, 3), GroupPoint(4, 5, 6), GroupPoint(7, 8, 9)
    assert (a * b) * c == a * (b * c)


@settings(max_examples=1000, deadline=None)
@given(points, points, points)
def test_associativity(a, b, c):
    """Test associativity on random triples."""
    assert multiply(multiply(a, b), c).isclose(multiply(a, multiply(b, c)), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(points)
def test_inverse_laws(g):
    """Test g·g⁻¹ = e and involution."""
    assert multiply(g, inverse(g)).isclose(GroupPoint.identity(), atol=1e-12)
    assert multiply(inverse(g), g).isclose(GroupPoint.identity(), atol=1e-12)
    assert inverse(inverse(g)) == g


def test_dimension_mismatch():
    """Test that H^1 and H^2 points cannot be multiplied."""
    with pytest.raises(DimensionMismatchError):
        multiply(GroupPoint(0, 1, 1), GroupPoint(0, (1, 2), (3, 4)))
    with pytest.raises(DimensionMismatchError):
        GroupPoint(0, (1, 2), (3,))


def test_higher_dimensional_group_law():
    """Test the dot-product twist in H^2."""
    g = multiply(GroupPoint(0, (1, 0), (0, 0)), GroupPoint(0, (0, 0), (1, 0)))
    assert g.s == pytest.approx(0.5)
    assert g.n == 2


def test_field_on_constant_is_zero():
    """Test S applied to a constant."""
    spec = GridSpec.cube(4.0, 16)
    one = PFunction(spec, np.ones(spec.shape))
    assert np.max(np.abs(apply_field(S, one).values)) < 1e-14


def test_left_field_commutator_is_central_derivative(fine_xy_grid):
    """Test [X^l, Y^l] = ∂s on a Gaussian."""
    k = sample(get_signal("gauss"), fine_xy_grid)
    lhs = field_commutator(XL, YL, k)
    ds = apply_field(S, k)
    assert lhs.distance(ds) < 1e-7


def test_right_field_commutator_is_minus_central_derivative(fine_xy_grid):
    """Test [X^r, Y^r] = -∂s."""
    k = sample(get_signal("shifted_gauss"), fine_xy_grid)
    lhs = field_commutator(XR, YR, k)
    assert lhs.distance(-apply_field(S, k)) < 1e-7


@pytest.mark.parametrize("left", [XL, YL])
@pytest.mark.parametrize("right", [XR, YR])
def test_left_fields_commute_with_right_fields(fine_xy_grid, left, right):
    """Test that every left field commutes with every right field."""
    k = sample(get_signal("gauss"), fine_xy_grid)
    residual = field_commutator(left, right, k).norm()
    scale = apply_field(left, apply_field(right, k)).norm()
    assert residual < 1e-7 * scale


def test_same_axis_fields_commute(fine_xy_grid):
    """Test [X^l, X^r] = 0 and [S, X^l] = 0."""
    k = sample(get_signal("gauss"), fine_xy_grid)
    assert field_commutator(XL, XR, k).norm() < 1e-7 * k.norm()
    assert field_commutator(S, XL, k).norm() < 1e-7 * k.norm()


def test_left_and_right_agree_without_s_dependence(field_grid):
    """Test that central terms vanish on s-independent functions."""
    k = PFunction.from_callable(field_grid, lambda s, x, y: np.exp(-x ** 2 - (y - 0.3) ** 2) + 0 * s)
    assert apply_field(XL, k).distance(apply_field(XR, k)) < 1e-12
    assert apply_field(YL, k).distance(apply_field(YR, k)) < 1e-12


def test_field_formula(field_grid):
    """Test X^l = ∂x - (y/2)∂s directly."""
    k = sample(get_signal("gauss"), field_grid)
    dx = spectral_derivative(k.values, 1, field_grid.h_x)
    ds = spectral_derivative(k.values, 0, field_grid.h_s)
    y = field_grid.y[np.newaxis, np.newaxis, :]
    expected = k.with_values(dx - 0.5 * y * ds)
    assert apply_field(XL, k).distance(expected) < 1e-14


def test_grid_too_coarse():
    """Test the Nyquist guard on an unresolved Gaussian."""
    spec = GridSpec.cube(5.0, 16)
    narrow = TestSignal("narrow", Factor(0, 0, 20.0), Factor(0, 0, 20.0), Factor(0, 0, 20.0))
    k = sample(narrow, spec)
    with pytest.raises(GridTooCoarseError):
        apply_field(XL, k)


def test_field_index_must_be_in_range():
    """Test index validation and the n = 1 restriction of grid operations."""
    with pytest.raises(DimensionMismatchError):
        InvariantField(Side.LEFT, Axis.X, index=2)
    spec = GridSpec.cube(4.0, 16)
    with pytest.raises(DimensionMismatchError):
        apply_field(InvariantField(Side.LEFT, Axis.X, index=2, n=2), PFunction.zeros(spec))


def test_apply_word_order(field_grid):
    """Test that the last letter of a word acts first."""
    k = sample(get_signal("gauss"), field_grid)
    word = apply_word("XY", Side.LEFT, k)
    manual = apply_field(XL, apply_field(YL, k))
    assert word.distance(manual) < 1e-14


def test_field_polynomial_sides(field_grid):
    """Test right/left convolution actions of a field polynomial."""
    k = sample(get_signal("x_gauss"), field_grid)
    poly = FieldPolynomial.from_mapping({"XY": 1.0, "S": 0.5})
    assert poly.degree == 2
    right = poly.right_convolve(k)
    left = poly.left_convolve(k)
    expected_right = apply_word("XY", "left", k) + 0.5 * apply_word("S", "left", k)
    expected_left = apply_word("YX", "right", k) + 0.5 * apply_word("S", "right", k)
    assert right.distance(expected_right) < 1e-14
    assert left.distance(expected_left) < 1e-14
