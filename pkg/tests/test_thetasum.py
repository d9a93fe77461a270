"""Weighted quadratic exponential sums: evaluation, grids, probes, monitors."""

import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import brute_probe_max, brute_sum_at
from thetareg.contfrac import QuadraticIrrational, Rational
from thetareg.cutoff import (one_sided_unit, rough_weights, smooth_weights,
                             unit_window)
from thetareg.errors import (AliasingError, BudgetError, DomainError,
                             HypothesisError)
from thetareg.thetasum import (MAX_BLOCK_N, SumSpec, eval_sum, grid_values,
                               hl_constant_monitor, mean_square_on_grid,
                               merged_block_sup, probe_floors, rational_probe,
                               scale_bits_for, stability_ratio, sup_norm)


def test_scale_bits_for():
    assert scale_bits_for(1) == 34
    assert scale_bits_for(2**21) == 76
    assert scale_bits_for(1000) == 52


def test_hand_zero_sum():
    # t = 1: e(n^2/2) = (-1)^n, so the n = 1..4 partial sum vanishes at x = 0
    spec = SumSpec(Rational(1, 1), one_sided_unit(1, 4))
    assert abs(eval_sum(spec, 0.0)) < 1e-13


def test_eval_sum_matches_bruteforce():
    for (p, q) in ((1, 3), (2, 5), (5, 7)):
        for w in (unit_window(1, 12), smooth_weights(3), rough_weights(2)):
            spec = SumSpec(Rational(p, q), w)
            for (num, den) in ((0, 1), (1, 7), (3, 4), (5, 11)):
                got = eval_sum(spec, num / den)
                want = brute_sum_at(p, q, w, num, den)
                # x as float vs exact rational differ by the float rounding
                # of num/den times the sum's derivative, well below 1e-8
                assert abs(got - want) < 1e-8


def test_grid_values_match_pointwise_eval(golden):
    for time in (Rational(2, 7), golden):
        spec = SumSpec(time, rough_weights(4))
        K = 128                           # N = 32 needs K >= 65
        vals = grid_values(spec, K)
        assert vals.shape == (K,)
        for k in (0, 1, 13, 40, 127):
            assert abs(vals[k] - eval_sum(spec, k / K)) < 1e-9


def test_grid_values_guards():
    spec = SumSpec(Rational(1, 3), rough_weights(4))  # N = 32
    with pytest.raises(AliasingError):
        grid_values(spec, 64)            # needs >= 2N+1 = 65
    with pytest.raises(BudgetError):
        grid_values(spec, 1 << 27)


def test_block_budget():
    with pytest.raises(BudgetError):
        SumSpec(Rational(1, 3), unit_window(1, MAX_BLOCK_N + 1))


def test_parseval_identity(golden):
    for time in (Rational(1, 3), golden):
        for w in (rough_weights(9), smooth_weights(9), unit_window(3, 250)):
            spec = SumSpec(time, w)
            mean, l2sq = mean_square_on_grid(spec)
            assert l2sq == pytest.approx(w.l2_squared(), rel=1e-14)
            assert mean == pytest.approx(l2sq, rel=1e-10)


def test_probe_matches_bruteforce():
    for q in (2, 3, 5, 7, 12):
        p = 1 if q != 12 else 5
        for w in (unit_window(1, 16), smooth_weights(3), unit_window(2, 9)):
            pr = rational_probe(p, q, w)
            want = brute_probe_max(p, q, w)
            assert pr.max_abs == pytest.approx(want, rel=1e-12, abs=1e-12)
            assert 0 <= pr.argmax_h < 2 * q


def test_probe_argmax_attains_max():
    w = unit_window(1, 16)
    pr = rational_probe(3, 7, w)
    direct = abs(brute_sum_at(3, 7, w, pr.argmax_h, 14))
    assert direct == pytest.approx(pr.max_abs, rel=1e-12)


def test_probe_floors_branches():
    w = unit_window(1, 16)
    sat = probe_floors(w, 3, (1, 16))       # q = 3 < window length
    assert set(sat) == {"mass_saturated", "unit_saturated"}
    assert sat["mass_saturated"] == pytest.approx(32 / math.sqrt(6))
    assert sat["unit_saturated"] == pytest.approx(math.sqrt(2) * 15 / math.sqrt(3))
    sparse = probe_floors(w, 17, (1, 16))    # q = 17 >= window length
    assert set(sparse) == {"mass_sparse", "unit_sparse"}
    assert sparse["mass_sparse"] == pytest.approx(32 / (math.sqrt(2) * math.sqrt(15)))
    assert sparse["unit_sparse"] == pytest.approx(math.sqrt(2) * math.sqrt(15))
    sm = probe_floors(smooth_weights(3), 17, (1, 16))
    assert set(sm) == {"mass_sparse"}        # no unit floor for tapered weights
    with pytest.raises(DomainError):
        probe_floors(w, 3, (0, 16))


def test_probe_floor_satisfaction_spot_checks():
    for q, win in ((17, (1, 16)), (101, (16, 128)), (3, (1, 16))):
        pr = rational_probe(1, q, unit_window(*win), window=win)
        assert pr.satisfied
        assert pr.floor_margin() >= 1.0


def test_probe_budget():
    with pytest.raises(BudgetError):
        rational_probe(1, 10_001, unit_window(1, 16))


def test_sup_norm_dominates_samples(golden):
    for time in (Rational(3, 5), golden):
        spec = SumSpec(time, smooth_weights(6))
        res = sup_norm(spec)
        rng = np.random.default_rng(3)
        for x in rng.uniform(0.0, 1.0, 25):
            assert abs(eval_sum(spec, float(x))) <= res.value * (1 + 1e-12)
        # sup >= rms: mean |S|^2 equals the weight l2 mass
        assert res.value >= math.sqrt(spec.weights.l2_squared())
        assert res.refinement_gain >= 1.0
        assert res.value >= res.grid_value


def test_sup_norm_deterministic(golden):
    spec = SumSpec(golden, rough_weights(7))
    a = sup_norm(spec)
    b = sup_norm(spec)
    assert (a.value, a.argmax_x, a.grid_size) == (b.value, b.argmax_x, b.grid_size)


def test_merged_block_sup_rational_merges_probe():
    res, probe = merged_block_sup(Rational(1, 3), rough_weights(8))
    assert probe is not None and probe.satisfied
    count = 3 * 2**8
    assert res.value >= count / math.sqrt(3) - 1e-9
    assert res.value <= (count / math.sqrt(3)) * 1.001


def test_merged_block_sup_irrational_has_no_probe(golden):
    res, probe = merged_block_sup(golden, rough_weights(6))
    assert probe is None
    assert res.value > 0


def test_phase_error_bound_small(golden):
    spec = SumSpec(golden, rough_weights(16))
    assert spec.phase_error_bound() < 1e-8
    spec_r = SumSpec(Rational(1, 3), rough_weights(16))
    # exact modular reduction leaves only the final float division
    assert spec_r.phase_error_bound() <= 2.0 ** -50


def test_coefficient_arrays_symmetric_weights(golden):
    spec = SumSpec(golden, rough_weights(5))
    cpos, cneg = spec.coefficient_arrays()
    assert cpos.shape == cneg.shape == (spec.weights.N + 1,)
    # e((-n)^2 t/2) = e(n^2 t/2), so symmetric weights give equal arrays
    assert np.array_equal(cpos[1:], cneg[1:])
    one = SumSpec(golden, one_sided_unit(1, 20))
    _, cneg1 = one.coefficient_arrays()
    assert np.all(cneg1[1:] == 0.0)


# ------------------------------------------------------------- HL monitor

def test_hl_monitor_on_exact_rational(third):
    recs = hl_constant_monitor(third, 1, 3, [16, 64, 256, 1024])
    assert [r.length for r in recs] == [16, 64, 256, 1024]
    for r in recs:
        assert 0.0 < r.ratio <= 1.05
        assert r.envelope == pytest.approx(r.length / math.sqrt(3) + math.sqrt(3))


def test_hl_monitor_certifies_hypothesis(golden):
    # 1/4 is more than 1/16 away from the golden conjugate: must refuse
    with pytest.raises(HypothesisError):
        hl_constant_monitor(golden, 1, 4, [16])
    # a true convergent passes
    recs = hl_constant_monitor(golden, 5, 8, [16, 64])
    assert all(r.ratio > 0 for r in recs)


# ---------------------------------------------------------------- stability

def test_stability_certified_pair(golden):
    res = stability_ratio(golden, Rational(144, 233), rough_weights(6))
    assert 1 / 8 <= res.ratio <= 8
    assert res.sup_a > 0 and res.sup_b > 0


def test_stability_refuses_distant_pair(golden):
    with pytest.raises(HypothesisError):
        stability_ratio(golden, Rational(1, 2), rough_weights(6))


def test_stability_kbound_widens_certification(golden):
    # 34/55 is within 9/N^2 of t at j = 6 (N = 128) but not within 1/N^2
    with pytest.raises(HypothesisError):
        stability_ratio(golden, Rational(34, 55), rough_weights(6))
    res = stability_ratio(golden, Rational(34, 55), rough_weights(6), k_bound=9)
    assert res.ratio > 0
