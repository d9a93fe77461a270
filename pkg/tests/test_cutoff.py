"""The smooth bump, its exact constants, and the block weight vectors."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from thetareg.cutoff import (WeightVector, make_smooth_cutoff, one_sided_unit,
                             rough_weights, smooth_weights, unit_window)
from thetareg.errors import DomainError


def test_chi_exact_anchor_values(cut):
    assert cut(np.array([1.0]))[0] == 1.0          # phi(1) - phi(2) = 1 - 0
    assert cut(np.array([0.5]))[0] == 0.0
    assert cut(np.array([2.0]))[0] == 0.0
    x = np.array([0.0, 0.1, 0.49, 2.0, 3.0, 100.0, -1.0])
    assert np.all(cut(x) == 0.0)                   # bit-exact outside support
    # just inside the edges chi is positive but underflows binary64; test
    # strict positivity only where the value is representable
    inside = np.linspace(0.6, 1.9, 301)
    assert np.all(cut(inside) > 0.0)


def test_phi_complementary_symmetry(cut):
    u = np.linspace(1e-6, 1.0 - 1e-6, 257)
    s = cut.plateau(1.0 + u) + cut.plateau(2.0 - u)
    assert np.max(np.abs(s - 1.0)) < 1e-14


def test_partition_of_unity_on_wide_range(cut):
    x = np.concatenate([np.geomspace(2.0**-10, 2.0**10, 400),
                        np.array([1.0, 2.0, 0.5, 3.0, 2.0**9])])
    total = cut.partition_sum(x, -14, 14)
    assert np.max(np.abs(total - 1.0)) < 1e-12


@given(x=st.floats(0.001, 1000.0, allow_nan=False))
@settings(max_examples=100)
def test_partition_of_unity_random(cut, x):
    total = cut.partition_sum(np.array([x]), -16, 16)[0]
    assert abs(total - 1.0) < 1e-12


def test_plateau_plus_tail_telescopes(cut):
    # phi(2^-J x) = phi(x) + sum_{j=1..J} chi(2^-j x); at J large the left
    # side is 1 for moderate x
    x = np.linspace(0.01, 50.0, 97)
    total = cut.plateau(x).copy()
    for j in range(1, 12):
        total += cut(x * 2.0 ** -j)
    assert np.max(np.abs(total - 1.0)) < 1e-13


def test_integral_constant_against_quadrature(cut):
    val, err = quad(lambda u: float(cut(np.array([u]))[0]), 0.5, 2.0,
                    points=[1.0], limit=200)
    assert err < 1e-6                 # quad is conservative at flat edges
    assert abs(val - cut.integral) < 1e-9
    assert cut.integral == 0.75
    val2, _ = quad(lambda u: float(cut.plateau(np.array([u]))[0]), 0.0, 2.0,
                   limit=200)
    assert abs(val2 - 1.5) < 1e-9


def test_kappa_matches_measured_variation(cut):
    grid = np.linspace(0.5, 2.0, 20001)
    tv = float(np.abs(np.diff(cut(grid))).sum())
    assert tv <= cut.kappa + 1e-9
    assert tv > cut.kappa - 1e-3      # one full rise plus one full fall


# ---------------------------------------------------------- weight vectors

def test_rough_block_counts_and_bounds():
    for j in range(1, 12):
        w = rough_weights(j)
        assert (w.M, w.N) == (2**(j-1) + 1, 2**(j+1))
        assert w.count_nonzero() == 3 * 2**j
        assert w.l2_squared() == float(3 * 2**j)
        assert w.tv() == 4.0            # two jumps up, two down
        assert w.tv_one_sided() == 2.0
        assert w.window_mass() == float(3 * 2**j)
    w0 = rough_weights(0)
    assert (w0.M, w0.N) == (0, 2)
    assert w0.count_nonzero() == 5
    with pytest.raises(DomainError):
        rough_weights(-1)


def test_smooth_block_anchors_and_supports():
    for j in range(1, 14):
        w = smooth_weights(j)
        assert w.w_pos[2**j] == 1.0                  # chi(1) = 1 exactly
        assert w.w_pos[w.M - 1] == 0.0 if w.M > 0 else True
        assert np.all(w.w_pos[:w.M] == 0.0)          # bit-exact zeros
        assert w.w_pos[w.N] == 0.0                   # chi(2) = 0
        assert np.all(w.w_pos <= 1.0)
        assert w.tv() <= 4.0 + 1e-12
        assert w.tv_one_sided() <= 2.0 + 1e-12


def test_smooth_block_mass_riemann():
    # sum_n chi(2^-j n) = 2^j * integral + O(tv): within 2 of 0.75 * 2^j
    for j in range(4, 17):
        w = smooth_weights(j)
        one_sided = float(w.w_pos.sum())
        assert abs(one_sided - 0.75 * 2**j) <= 2.0
        assert abs(w.window_mass() - 1.5 * 2**j) <= 4.0


def test_smooth_block_zero_uses_plateau(cut):
    w = smooth_weights(0)
    assert (w.M, w.N) == (0, 2)
    assert w.w_pos[0] == 1.0 and w.w_pos[1] == 1.0 and w.w_pos[2] == 0.0


def test_unit_windows():
    w = unit_window(1, 16)
    assert w.count_nonzero() == 32
    assert w.window_mass() == 32.0
    assert w.l2_squared() == 32.0
    assert w.symmetric
    o = one_sided_unit(3, 10)
    assert not o.symmetric
    assert o.count_nonzero() == 8
    assert o.window_mass() == 8.0
    assert np.all(o.neg() == 0.0)
    with pytest.raises(DomainError):
        unit_window(0, 4)
    with pytest.raises(DomainError):
        one_sided_unit(0, 4)


def test_weight_vector_shape_validation():
    with pytest.raises(DomainError):
        WeightVector(j=None, M=1, N=4, w_pos=np.ones(4), w_neg=None,
                     mode="unit")
    with pytest.raises(DomainError):
        WeightVector(j=None, M=5, N=4, w_pos=np.ones(5), w_neg=None,
                     mode="unit")
