import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiwf.bounds import (TEST_FUNCTIONS, catalog_ratios, empirical_constant, epsilon_recurrence,
                           gradient_estimate_ratio, prop2_scaling_check, scaled_gradient_sup)
from semiwf.symbols import gauss_product, modulated_bump, phase_bump
from semiwf.wavefront import HLadder


def exact_recurrence(n):
    # same map in exact rational arithmetic
    out = [Fraction(1)]
    for _ in range(n):
        q = 1 - out[-1]
        out.append(1 - (Fraction(1, 2) + q * q / 2))
    return out


def test_recurrence_prefix():
    assert epsilon_recurrence(3) == [1.0, 0.5, 0.375, 0.3046875]


def test_recurrence_matches_exact_arithmetic():
    exact = exact_recurrence(12)
    assert epsilon_recurrence(12) == pytest.approx([float(e) for e in exact], rel=1e-15)


def test_recurrence_decreases_to_zero():
    eps = epsilon_recurrence(200)
    assert all(b < a for a, b in zip(eps, eps[1:]))
    assert eps[200] < 0.01
    # eps_n ~ 2/n
    assert eps[200] * 200 == pytest.approx(2.0, rel=0.1)
    with pytest.raises(ValueError):
        epsilon_recurrence(0)


def test_sin_ratio_is_one():
    x = np.arange(0.0, 20.0, 1e-3)
    r = gradient_estimate_ratio(np.sin(x), 1e-3)
    assert r.ratio == pytest.approx(1.0, abs=1e-6)
    assert r.richardson < 1e-6


def test_affine_function_is_degenerate():
    x = np.linspace(0, 1, 101)
    r = gradient_estimate_ratio(3 * x + 1, x[1] - x[0])
    assert r.degenerate and math.isnan(r.ratio)


def test_input_validation():
    with pytest.raises(ValueError):
        gradient_estimate_ratio(np.zeros(5), 0.1)
    with pytest.raises(ValueError):
        gradient_estimate_ratio(np.zeros(20), 0.0)


@given(a=st.floats(0.2, 5), s=st.floats(0.3, 3), c=st.floats(-3, 3))
def test_ratio_is_scale_and_shift_invariant(a, s, c):
    # amplitude scaling, argument dilation and translation leave the ratio unchanged
    dx = 2e-3
    x = np.arange(-15, 15, dx)
    base = gradient_estimate_ratio(np.exp(-x**2), dx).ratio
    moved = gradient_estimate_ratio(a * np.exp(-((x - c) * s) ** 2), dx).ratio
    assert moved == pytest.approx(base, rel=1e-4)


def test_catalog_ratios_finite_and_bounded():
    r = catalog_ratios(2e-3)
    assert set(r) == set(TEST_FUNCTIONS) and len(r) == 20
    assert all(np.isfinite(v) and 0 < v < 2 for v in r.values())


def test_empirical_constant_stable_under_refinement():
    assert empirical_constant(2e-3) == pytest.approx(empirical_constant(1e-3), rel=1e-4)


@pytest.mark.parametrize("a, alpha, lo, hi", [
    (phase_bump(power=2.0), 2.0, 1.98, 2.02),
    (phase_bump(power=2.0, delta=0.3), 2.0, 1.95, 2.05),
    (modulated_bump(), 2.0, 1.8, 2.5),
    (gauss_product(), 0.0, -0.02, 0.02),
])
def test_scaling_slopes(a, alpha, lo, hi, ladder):
    rep = prop2_scaling_check(a, alpha, ladder)
    assert lo <= rep.slope <= hi
    assert rep.holds


def test_scaled_gradient_sup_of_gaussian():
    # |grad exp(-x^2 - xi^2)| peaks at 2 r e^{-r^2} with r = 1/sqrt(2)
    g = scaled_gradient_sup(gauss_product(), 0.1, box=(-2, 2, -2, 2), resolution=401)
    assert g == pytest.approx(math.sqrt(2) * math.exp(-0.5), rel=1e-3)


def test_scaling_check_rejects_vanishing_gradient(short_ladder):
    with pytest.raises(ValueError):
        prop2_scaling_check(phase_bump(3.0, 3.0, 0.1, 0.1), 0.0, short_ladder)
