import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dyadic_sobolev import DyadicIndex, StepFunction
from dyadic_sobolev.capacity import (
    DyadicSet,
    capacity,
    capacity_upper_indicator,
    capacity_value,
    mazya_integral,
    outer_measure_suite,
)
from dyadic_sobolev.dyadic import intervals
from dyadic_sobolev.norms import hs_norm_sq
from dyadic_sobolev.sampling import random_nonneg

GOLDEN = json.loads((Path(__file__).parent / "golden" / "capacity_bands.json").read_text())

masks = st.integers(0, 4).flatmap(
    lambda d: st.lists(st.booleans(), min_size=1 << d, max_size=1 << d).map(lambda m: np.array(m))
)


# DyadicSet


def test_dyadic_set_basics():
    E = DyadicSet.from_intervals([DyadicIndex(1, 0), DyadicIndex(3, 7)])
    assert E.depth == 3 and E.leaves == {0, 1, 2, 3, 7}
    assert E.measure == 5 / 8
    assert E.refine(4).leaves == {0, 1, 2, 3, 4, 5, 6, 7, 14, 15}
    assert DyadicSet.from_intervals([DyadicIndex(1, 0)]).issubset(E)
    assert (DyadicSet(1, {1}) | DyadicSet(2, {0})).leaves == {0, 2, 3}
    assert DyadicSet(3).is_empty()
    assert DyadicSet.from_json(json.loads(json.dumps(E.to_json()))) == E
    assert E.to_json() == {"depth": 3, "leaves": [0, 1, 2, 3, 7]}
    with pytest.raises(ValueError):
        DyadicSet(2, {4})
    with pytest.raises(ValueError):
        E.mask(2)


# Solver


def test_capacity_of_unit_interval():
    est = capacity(DyadicSet(0, {0}), 0.4, 6)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.certificate.allclose(StepFunction.constant(1.0, 6), atol=1e-9)


def test_capacity_of_empty_set():
    est = capacity(DyadicSet(3), 0.4)
    assert est.value == 0.0 and np.all(est.certificate.values == 0.0) and est.converged


def test_capacity_preconditions():
    with pytest.raises(ValueError):
        capacity(DyadicSet(4, {0}), 0.5, 3)
    with pytest.raises(ValueError):
        capacity(DyadicSet(2, {0}), 0.5, 4, tol=0.0)
    with pytest.raises(ValueError):
        capacity(DyadicSet(2, {0}), 1.2)


def test_capacity_interval_within_scan_band():
    est = capacity(DyadicSet.from_intervals([DyadicIndex(4, 0)]), 0.25, 10)
    band = GOLDEN["bands"]["s=0.25,M=10"]
    ratio = est.value / 2.0 ** (-4 * 0.5)
    assert min(band["ratio"]) - 1e-9 <= ratio <= max(band["ratio"]) + 1e-9
    assert ratio == pytest.approx(band["ratio"][3], rel=1e-9)


@settings(max_examples=40)
@given(masks, st.floats(0.1, 0.9), st.integers(0, 3))
def test_certificate_feasible_and_consistent(mask, s, extra):
    E = DyadicSet.from_mask(mask)
    est = capacity(E, s, E.depth + extra)
    assert est.converged
    assert np.all(est.certificate.values[E.mask(est.solve_depth)] >= 1 - 1e-9)
    assert hs_norm_sq(est.certificate, s) == pytest.approx(est.value, rel=1e-9, abs=1e-15)


@settings(max_examples=40)
@given(masks, st.floats(0.1, 0.9))
def test_capacity_matches_dense_qp(mask, s):
    E = DyadicSet.from_mask(mask)
    assert capacity(E, s, E.depth).value == pytest.approx(oracles.capacity(mask, s), rel=1e-6, abs=1e-9)


@settings(max_examples=25)
@given(masks, st.floats(0.1, 0.9))
def test_depth_monotone_and_exact_at_set_depth(mask, s):
    E = DyadicSet.from_mask(mask)
    values = [capacity(E, s, E.depth + k).value for k in (0, 2, 4, 6)]
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
    # averaging an admissible function down to the set depth keeps it admissible and lowers the norm
    assert np.allclose(values, values[0], rtol=1e-9, atol=1e-12)


def test_minimizer_may_exceed_one_off_the_set():
    est = capacity(DyadicSet(2, {0, 2}), 0.75, 6)
    assert est.certificate.values.min() >= 0.0
    assert est.converged


def test_objective_convexity_spot_check():
    rng = np.random.default_rng(0)
    E = DyadicSet.from_mask(rng.random(16) < 0.4)
    mask = E.mask(6)
    for _ in range(100):
        u = StepFunction(6, np.where(mask, 1 + rng.exponential(size=64), rng.standard_normal(64)))
        v = StepFunction(6, np.where(mask, 1 + rng.exponential(size=64), rng.standard_normal(64)))
        mid = (u + v) * 0.5
        assert np.all(mid.values[mask] >= 1)
        assert hs_norm_sq(mid, 0.4) <= 0.5 * (hs_norm_sq(u, 0.4) + hs_norm_sq(v, 0.4)) + 1e-12


def test_non_convergence_is_flagged():
    E = DyadicSet.from_mask(np.random.default_rng(1).random(64) < 0.5)
    est = capacity(E, 0.5, 6, tol=1e-300, max_iters=3)
    assert not est.converged and est.kkt_residual > est.tol
    assert est.iterations <= 3


def test_memoized_value_matches_direct_solve():
    E = DyadicSet(3, {1, 2, 6})
    assert capacity_value(E, 0.3, 5) == capacity(E, 0.3, 5).value
    assert capacity_value(E, 0.3, 5) == capacity_value(DyadicSet(3, {6, 2, 1}), 0.3, 5)


# Indicator bound


def test_indicator_upper_bound_examples():
    assert capacity_upper_indicator(DyadicIndex(0, 0), 0.3) == 1.0
    assert capacity_upper_indicator(DyadicIndex(1, 1), 0.5) == pytest.approx(0.75)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_indicator_upper_bound_is_exact_norm_and_dominates(s):
    for I in intervals(5):
        ub = capacity_upper_indicator(I, s)
        assert ub == pytest.approx(hs_norm_sq(StepFunction.indicator(I), s), rel=1e-12)
        assert capacity(DyadicSet.from_intervals([I]), s, I.level + 2).value <= ub + 1e-12


# Interval asymptotics


def test_low_regularity_band_is_stable():
    for M in GOLDEN["solve_depths"]:
        band = GOLDEN["bands"][f"s=0.25,M={M}"]
        assert band["ratio_max_over_min"] <= 10
        assert band["max_residual"] <= GOLDEN["tol"]


def test_high_regularity_band():
    band = GOLDEN["bands"]["s=0.75,M=10"]
    assert 0.2 < band["cap_min"] and max(band["cap"]) <= 1.0


# Capacitary integral


def test_mazya_examples():
    assert mazya_integral(StepFunction.constant(1.0, 2), 0.4) == pytest.approx(0.5, abs=1e-12)
    assert mazya_integral(StepFunction.constant(0.0, 3), 0.4) == 0.0
    with pytest.raises(ValueError):
        mazya_integral(StepFunction.from_values([1.0, -0.5]), 0.4)


def test_mazya_level_set_sum():
    f = StepFunction.from_values([0.0, 2.0, 1.0, 2.0])
    expected = 0.5 * 1.0 * capacity(DyadicSet(2, {1, 2, 3}), 0.5, 2).value
    expected += 0.5 * 3.0 * capacity(DyadicSet(2, {1, 3}), 0.5, 2).value
    assert mazya_integral(f, 0.5, 2) == pytest.approx(expected, rel=1e-12)


def test_mazya_ratio_bounded():
    rng = np.random.default_rng(2)
    ratios = [mazya_integral(f, 0.5, 4) / hs_norm_sq(f, 0.5) for f in (random_nonneg(rng, 4) for _ in range(40))]
    assert np.all(np.isfinite(ratios)) and max(ratios) < 1.0


# Outer measure


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_outer_measure_suite(s):
    report = outer_measure_suite(seed=3, trials=30, s=s, depth=4)
    assert report.empty_value == 0.0
    assert report.passed, report.to_json()
    assert len(report.rows) == 60
    assert json.loads(json.dumps(report.to_json()))["passed"] is True
