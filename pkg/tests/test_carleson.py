import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dyadic_sobolev import DyadicIndex, HaarCoeffs, StepFunction, haar_synthesize
from dyadic_sobolev.capacity import DyadicSet, capacity
from dyadic_sobolev.carleson import (
    OPERATOR_NAMES,
    CarlesonSequence,
    ExactDepthError,
    antichain_count,
    antichains,
    bmo_s_norm,
    bmo_s_value,
    carleson_norm,
    cmo_tail,
    embedding_constant,
    embedding_matrices,
    named_operator,
    operator_matrix,
    operator_norm_hs,
    rayleigh_quotient,
    single_interval_sup,
    symbol_sequence,
)
from dyadic_sobolev.dyadic import averages, intervals
from dyadic_sobolev.norms import hs_dot_norm, hs_dot_sq, hs_norm
from dyadic_sobolev.operators import paraproduct, shift
from dyadic_sobolev.sampling import random_mu_values, random_step

I0 = DyadicIndex(0, 0)


def random_mu(seed, depth, density=0.6):
    mu = CarlesonSequence(depth, random_mu_values(np.random.default_rng(seed), depth, density))
    return mu if np.any(mu.mu) else CarlesonSequence.point_mass(I0, 1.0, depth)


# Sequences


def test_sequence_basics():
    mu = CarlesonSequence.point_mass(DyadicIndex(2, 1), 3.0)
    assert mu.depth == 2 and mu[DyadicIndex(2, 1)] == 3.0 and mu[DyadicIndex(5, 0)] == 0.0
    assert mu.support_depth == 2
    assert np.allclose(mu.subtree_sums(), [3, 3, 0, 0, 3, 0, 0])
    assert mu.restrict_finer_than(1).mu.sum() == 3.0
    assert mu.restrict_finer_than(2).mu.sum() == 0.0
    obj = json.loads(json.dumps(mu.to_json()))
    assert obj == {"depth": 2, "entries": [{"level": 2, "pos": 1, "mu": 3.0}]}
    assert np.array_equal(CarlesonSequence.from_json(obj).mu, mu.mu)
    with pytest.raises(ValueError):
        CarlesonSequence(1, [1.0, -1.0, 0.0])
    with pytest.raises(ValueError):
        CarlesonSequence.from_json({"depth": 1, "entries": [{"level": 2, "pos": 0, "mu": 1.0}]})


def test_subtree_sums_match_oracle():
    mu = random_mu(0, 3)
    table = {(I.level, I.pos): mu[I] for I in intervals(3)}
    expected = [oracles.subtree_mass(table, (I.level, I.pos)) for I in intervals(3)]
    assert np.allclose(mu.subtree_sums(), expected)


# Antichains


def test_antichain_counts():
    assert [antichain_count(d) for d in range(5)] == [2, 5, 26, 677, 458330]
    assert len([a for a in antichains(2) if a]) == 25
    assert len([a for a in antichains(3) if a]) == 676
    for d in range(4):
        assert len(antichains(d)) == antichain_count(d)


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_antichains_match_subset_enumeration(depth):
    ours = {tuple(sorted((I.level, I.pos) for I in a)) for a in antichains(depth) if a}
    theirs = {tuple(sorted(c)) for c in oracles.antichains(depth)}
    assert ours == theirs


# Carleson norm


def test_carleson_norm_examples():
    val = carleson_norm(CarlesonSequence.point_mass(I0), 0.4)
    assert val.collection == (I0,) and val.ratio == pytest.approx(1.0)
    assert carleson_norm(CarlesonSequence.zeros(2), 0.4).ratio == 0.0


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("s", [0.25, 0.75])
def test_exact_norm_matches_independent_enumeration(seed, s):
    mu = random_mu(seed, 2)
    table = {(I.level, I.pos): mu[I] for I in intervals(2)}
    expected = oracles.carleson_norm_sq(table, mu.support_depth, s)
    assert carleson_norm(mu, s).ratio == pytest.approx(expected, rel=1e-6)


def test_collection_value_fields():
    val = carleson_norm(random_mu(4, 3), 0.5)
    I = val.collection
    assert all(a.disjoint(b) for i, a in enumerate(I) for b in I[i + 1:])
    assert val.ratio == pytest.approx(val.mass / val.cap.value)
    assert val.exact and val.to_json()["exact"] is True


@pytest.mark.parametrize("seed", range(10))
def test_heuristic_never_exceeds_exact(seed):
    mu = random_mu(seed, 3)
    for s in (0.25, 0.75):
        h = carleson_norm(mu, s, "heuristic")
        assert not h.exact
        assert h.ratio <= carleson_norm(mu, s).ratio + 1e-12


def test_exact_depth_guard():
    mu = CarlesonSequence.point_mass(DyadicIndex(4, 0))
    with pytest.raises(ExactDepthError):
        carleson_norm(mu, 0.5)
    with pytest.raises(ValueError):
        carleson_norm(CarlesonSequence.point_mass(I0), 0.5, mode="greedy")
    assert carleson_norm(mu, 0.5, "heuristic").ratio > 0


def test_single_interval_sup_is_a_lower_bound():
    for seed in range(5):
        mu = random_mu(seed, 3)
        assert single_interval_sup(mu, 0.3) <= carleson_norm(mu, 0.3).ratio + 1e-12


# BMO^s and CMO^s


def test_bmo_s_examples():
    assert bmo_s_norm(StepFunction.constant(2.0, 3), 0.4).ratio == 0.0
    assert bmo_s_norm(StepFunction.haar(I0), 0.4).ratio == pytest.approx(1.0)
    assert bmo_s_value(StepFunction.haar(I0) * 3.0, 0.4) == pytest.approx(3.0)


def test_symbol_sequence_weights():
    b = random_step(np.random.default_rng(5), 3)
    mu = symbol_sequence(b, 0.3)
    c = oracles.coefficients(b.values)[1:]
    w = [2.0 ** (2 * 0.3 * j) for j, _ in oracles.heap_intervals(2)]
    assert mu.depth == 2 and np.allclose(mu.mu, np.array(w) * c ** 2)


def test_bmo_s_vs_sobolev_band():
    rng = np.random.default_rng(6)
    ratios = [bmo_s_value(b, 0.75) / hs_dot_norm(b, 0.75) for b in (random_step(rng, 3) for _ in range(30))]
    assert 0 < min(ratios) and max(ratios) < np.inf


def test_cmo_tail_examples():
    assert cmo_tail(StepFunction.haar(I0), 0.5, 1) == 0.0
    b = random_step(np.random.default_rng(7), 6)
    assert cmo_tail(b, 0.5, 6, mode="heuristic") == 0.0
    assert cmo_tail(b, 0.5, 5, mode="heuristic") == 0.0


def test_cmo_tail_non_increasing():
    b = random_step(np.random.default_rng(8), 4)
    tails = [cmo_tail(b, 0.4, N) for N in range(-1, 5)]
    assert all(t1 <= t0 + 1e-12 for t0, t1 in zip(tails, tails[1:]))
    assert tails[-1] == 0.0 and tails[0] == pytest.approx(bmo_s_norm(b, 0.4).ratio)


# Embedding constant


def test_embedding_examples():
    est = embedding_constant(CarlesonSequence.point_mass(I0, 2.5, 3), 0.4)
    assert est.value == pytest.approx(2.5, rel=1e-9)
    f = haar_synthesize(est.vector)
    assert np.allclose(f.values / f.values[0], 1.0, atol=1e-4)
    assert embedding_constant(CarlesonSequence.zeros(2), 0.4).value == 0.0


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("s", [0.25, 0.75])
def test_embedding_matches_dense_eigh(seed, s):
    mu = random_mu(seed, 3)
    est = embedding_constant(mu, s)
    assert est.converged
    assert est.value == pytest.approx(oracles.embedding_constant(mu.mu, 3, s), rel=1e-8)
    A, G = embedding_matrices(mu, s)
    assert np.allclose(A, A.T) and np.allclose(G, np.diag(oracles.hs_gram_diag(3, s)))


def test_power_iteration_value_is_attained_by_its_vector():
    for seed in range(5):
        mu = random_mu(seed, 3)
        est = embedding_constant(mu, 0.5)
        assert est.value >= rayleigh_quotient(mu, 0.5, est.vector) - 1e-9
        assert est.value == pytest.approx(rayleigh_quotient(mu, 0.5, est.vector), rel=1e-8)


def test_embedding_monotone_in_mu():
    rng = np.random.default_rng(9)
    for seed in range(10):
        mu = random_mu(seed, 3)
        bigger = CarlesonSequence(3, mu.mu + rng.exponential(size=mu.mu.size) * (rng.random(mu.mu.size) < 0.3))
        assert embedding_constant(mu, 0.4).value <= embedding_constant(bigger, 0.4).value + 1e-9


def test_embedding_does_not_grow_with_trial_depth():
    mu = random_mu(10, 2)
    values = [embedding_constant(mu, 0.5, depth=D).value for D in (2, 4, 6)]
    assert np.allclose(values, values[0], rtol=1e-8)


def test_embedding_dominates_carleson_norm():
    for seed in range(8):
        mu = random_mu(seed, 3)
        for s in (0.25, 0.75):
            assert embedding_constant(mu, s).value >= carleson_norm(mu, s).ratio * (1 - 1e-9)


def test_embedding_rejects_shallow_depth():
    with pytest.raises(ValueError):
        embedding_constant(random_mu(0, 3), 0.5, depth=2)


# Operator norms


def test_paraproduct_energy_law():
    rng = np.random.default_rng(11)
    for _ in range(50):
        b, f = random_step(rng, 5), random_step(rng, 5)
        mu = symbol_sequence(b, 0.6)
        avg = np.concatenate(averages(f)[:-1])
        assert hs_dot_sq(paraproduct(b, f), 0.6) == pytest.approx(float(mu.mu @ avg ** 2), rel=1e-10)


@given(st.floats(0.05, 0.95), st.integers(1, 5))
@settings(max_examples=20)
def test_identity_norm_is_one(s, depth):
    est = operator_norm_hs(named_operator("identity"), s, depth)
    assert est.value == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_shift_norm(s):
    depth = 5
    est = operator_norm_hs(shift, s, depth)
    # h_I goes to two orthogonal children, so the norm is a max over levels
    exact = max(2 * (1 + 4 ** (s * (j + 1))) / (1 + 4 ** (s * j)) for j in range(depth))
    assert est.value ** 2 == pytest.approx(exact, rel=1e-8)
    assert est.value ** 2 <= 2 ** (1 + 2 * s)
    rng = np.random.default_rng(12)
    scan = max(hs_norm(shift(f), s) / hs_norm(f, s) for f in (random_step(rng, depth) for _ in range(1000)))
    assert scan <= est.value + 1e-12


@pytest.mark.parametrize("name", [n for n in OPERATOR_NAMES if n != "identity"])
def test_operator_norm_matches_dense_svd(name):
    b = random_step(np.random.default_rng(13), 3)
    op = named_operator(name, b)
    est = operator_norm_hs(op, 0.4, 3)
    expected = oracles.operator_norm(lambda v: op(StepFunction.from_values(v)).values, 3, 0.4)
    assert est.value == pytest.approx(expected, rel=1e-6)
    x = haar_synthesize(est.vector)
    assert est.value >= hs_norm(op(x), 0.4) / hs_norm(x, 0.4) - 1e-9


def test_paraproduct_of_top_haar_against_search():
    s, depth = 0.5, 3
    op = named_operator("paraproduct", StepFunction.haar(I0))
    est = operator_norm_hs(op, s, depth)

    def ratio(x):
        f = haar_synthesize(HaarCoeffs.from_vector(x))
        return hs_norm(op(f), s) / hs_norm(f, s)

    found = oracles.maximize_ratio(ratio, 1 << depth, np.random.default_rng(14))
    assert est.value == pytest.approx(found, rel=0.01)
    assert est.value == pytest.approx(np.sqrt(2.0), rel=1e-8)


def test_operator_matrix_shape_and_unknown_names():
    assert operator_matrix(shift, 3).shape == (16, 8)
    with pytest.raises(ValueError):
        named_operator("paraproduct")
    with pytest.raises(ValueError):
        named_operator("hilbert", StepFunction.constant(1.0))


def test_capacity_of_collection_is_union_capacity():
    mu = random_mu(15, 2)
    val = carleson_norm(mu, 0.5)
    E = DyadicSet.from_intervals(val.collection, mu.support_depth)
    assert val.cap.value == pytest.approx(capacity(E, 0.5, mu.support_depth).value)
