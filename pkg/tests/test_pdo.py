import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiwf.grid import WaveFunction, grid_for, make_grid
from semiwf.pdo import apply_op_general, apply_op_t0, apply_op_t1
from semiwf.symbols import Symbol, constant, gauss_product, momentum, multiplier, phase_bump

# the identities below hold exactly for the discrete operators, so edge mass is harmless
pytestmark = pytest.mark.filterwarnings("ignore::semiwf.grid.AliasingWarning")


def gaussian(g, h, x0=0.1, xi0=0.3):
    x = g.x
    return WaveFunction(g, h, (math.pi * h) ** -0.25 * np.exp(-(x - x0) ** 2 / (2 * h) + 1j * x * xi0 / h))


def x_times_xi():
    return Symbol("x_xi", terms=lambda h: [(lambda x, h: np.asarray(x, dtype=float),
                                            lambda xi, h: np.asarray(xi, dtype=float))])


@pytest.fixture
def small():
    h = 0.05
    g = make_grid(2.0, 128)
    return gaussian(g, h)


def test_identity(small):
    for op in (apply_op_t1, apply_op_t0):
        assert np.allclose(op(constant(1.0), small).samples, small.samples, atol=1e-13)


def test_momentum_is_scaled_derivative():
    h = 0.02
    g = grid_for(h, 1.0, 3.0, max_dx=h / 4)
    u = gaussian(g, h)
    x = g.x
    exact = -1j * h * (-(x - 0.1) / h + 1j * 0.3 / h) * u.samples
    assert np.max(np.abs(apply_op_t1(momentum(), u).samples - exact)) < 1e-10


def test_multiplier_multiplies(small):
    a = multiplier(np.cos)
    assert np.allclose(apply_op_t1(a, small).samples, np.cos(small.grid.x) * small.samples, atol=1e-13)


@pytest.mark.parametrize("a", [gauss_product(0.1, 0.2, 0.7, 0.5), phase_bump(0.0, 0.3, 0.5, 0.5), x_times_xi()])
def test_fast_matches_reference(small, a):
    for op in (apply_op_t1, apply_op_t0):
        fast = op(a, small).samples
        ref = op(a, small, method="reference").samples
        assert np.max(np.abs(fast - ref)) < 1e-11


@pytest.mark.parametrize("a", [gauss_product(0.1, 0.2, 0.7, 0.5), x_times_xi()])
def test_general_matches_endpoints(a):
    g = make_grid(2.0, 64)
    u = gaussian(g, 0.1)
    assert np.max(np.abs(apply_op_general(a, 1.0, u).samples - apply_op_t1(a, u).samples)) < 1e-11
    assert np.max(np.abs(apply_op_general(a, 0.0, u).samples - apply_op_t0(a, u).samples)) < 1e-11


@given(t=st.floats(0, 1))
def test_bilinear_symbol_interpolates_linearly_in_t(t):
    # a = x xi is affine in the base point, so Op_t = t Op_1 + (1 - t) Op_0 exactly
    g = make_grid(2.0, 32)
    u = gaussian(g, 0.1)
    a = x_times_xi()
    lhs = apply_op_general(a, t, u).samples
    rhs = t * apply_op_t1(a, u).samples + (1 - t) * apply_op_t0(a, u).samples
    assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_commutator_of_x_and_momentum():
    # Op_1(x xi) - Op_0(x xi) = [x, hD] = i h
    h = 0.02
    g = grid_for(h, 1.0, 3.0, max_dx=h / 4)
    u = gaussian(g, h)
    diff = apply_op_t1(x_times_xi(), u).samples - apply_op_t0(x_times_xi(), u).samples
    assert np.max(np.abs(diff - 1j * h * u.samples)) < 1e-9


def test_bad_arguments(small):
    with pytest.raises(ValueError):
        apply_op_t1(constant(), small, method="slow")
    with pytest.raises(ValueError):
        apply_op_t0(constant(), small, method="slow")
    with pytest.raises(ValueError):
        apply_op_general(constant(), 1.5, small)
    with pytest.raises(ValueError):
        apply_op_general(constant(), 0.5, WaveFunction(make_grid(1.0, 4096), 0.1, np.zeros(4096)))
