import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egocircles.model import CircleState, EgoModel, log_likelihood, make_state, membership_matrix, sim_to_circle
from egocircles.optimizer import (OptimizerConfig, detect, ego_seed, init_state, make_rng,
                                  membership_deltas, perturb, prune, step, update_thresholds)
from egocircles.profiles import SIM_CAP
from egocircles.synth import PlantedEgoSpec, best_match_f1, generate_ego


def unit_model(n, edges=()):
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return EgoModel.from_matrices(adj, np.ones((n, n)) - np.eye(n))


def test_init_state_singletons():
    state = init_state(unit_model(3), OptimizerConfig())
    assert state.k == 3
    assert state.member_sets() == [frozenset({0}), frozenset({1}), frozenset({2})]


def test_init_loglik_two_disconnected_alters():
    # each singleton leaves the pair unshared: beta2 = 2 / (1 - tau + tau) = 2, phi = -4
    state = init_state(unit_model(2), OptimizerConfig())
    assert state.loglik == pytest.approx(-math.log1p(math.exp(-4.0)), rel=1e-12)


def test_single_alter_returns_immediately():
    res = detect(unit_model(1), OptimizerConfig(seed=1))
    assert res.iterations == 0
    assert res.circles == [(("0",), SIM_CAP)]


def test_empty_network_rejected():
    with pytest.raises(ValueError):
        init_state(unit_model(0), OptimizerConfig())


@pytest.mark.parametrize("kwargs", [{"tau_l": 0.0}, {"patience": 0}])
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        OptimizerConfig(**kwargs)


def test_membership_deltas_examples(rng):
    # |S1| = 2, |S2| = 3: add = ceil((K1 + 2) / 2) with K1 in {1, 2} -> 2; remove = ceil(3 / 2) = 2
    for _ in range(20):
        assert membership_deltas(2, 3, rng) == (2, 2)
    assert membership_deltas(1, 4, rng)[1] == 0
    assert membership_deltas(3, 0, rng)[0] == 0
    assert membership_deltas(0, 0, rng) == (0, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_membership_deltas_bounds(n_in, n_out, seed):
    add, remove = membership_deltas(n_in, n_out, make_rng(seed))
    assert 0 <= add <= n_out and 0 <= remove <= n_in
    assert remove == (2 if n_in >= 2 else 0)
    if n_out:
        assert add >= 1


def test_perturb_add_only():
    # alter 0 sits in {0}; the only other circle is {1}, so it is added there and nothing removed
    state = CircleState(membership_matrix([{0}, {1}], 2), np.array([SIM_CAP, SIM_CAP]))
    m = perturb(state, make_rng(0))
    assert sorted(map(sorted, CircleState(m, np.zeros(len(m))).member_sets())) == [[0, 1], [0, 1]]


def test_perturb_no_circles_identity():
    state = CircleState(np.zeros((0, 4), dtype=np.uint8), np.zeros(0))
    assert perturb(state, make_rng(0)).shape == (0, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_perturb_keeps_every_alter_placed(n, k, seed):
    rng = make_rng(seed)
    m = (rng.random((k, n)) < 0.5).astype(np.uint8)
    m[rng.integers(k, size=n), np.arange(n)] = 1
    m = m[m.any(axis=1)]
    out = perturb(CircleState(m, np.zeros(len(m))), rng)
    assert out.any(axis=1).all()
    # an alter with a circle to join is added to at least one, and additions are never undone
    outside = (m == 0).any(axis=0)
    assert out.any(axis=0)[outside].all()


def test_update_thresholds_examples():
    dist = np.array([[0, 2, 0], [2, 0, 0], [0, 0, 0]], dtype=float)
    model = EgoModel.from_matrices(np.zeros((3, 3)), dist)
    state = update_thresholds(model, membership_matrix([{0, 1}, {2}], 3))
    assert state.taus.tolist() == [0.5, SIM_CAP]
    # member similarities 1/2, 1/2.5, 1/(20/9) -> min 0.4
    d = np.array([[0, 2, 2], [2, 0, 3], [2, 3, 0]], dtype=float)
    d[1, 2] = d[2, 1] = 3.0
    model = EgoModel.from_matrices(np.zeros((3, 3)), d)
    assert update_thresholds(model, membership_matrix([{0, 1, 2}], 3)).taus[0] == pytest.approx(0.4)


def test_prune():
    state = CircleState(membership_matrix([{0}, {1}], 2), np.array([0.5, 0.1]))
    assert prune(state, 0.2).member_sets() == [frozenset({0})]
    assert prune(state, 0.05).k == 2
    model = unit_model(3)
    empty = prune(CircleState(membership_matrix([{0, 1}], 3), np.array([0.1])), 0.2)
    assert empty.k == 0
    assert log_likelihood(model, empty) == pytest.approx(-3 * math.log(2), rel=1e-12)


def test_equal_likelihood_rejected():
    # every candidate on a 2-alter net with no circles-after-prune ties with an empty state
    model = unit_model(2)
    state = make_state(model, [])
    new, ok = step(model, state, make_rng(0), OptimizerConfig())
    assert not ok and new is state


def test_two_alters_one_edge_terminates():
    model = unit_model(2, [(0, 1)])
    res = detect(model, OptimizerConfig(seed=3))
    assert res.loglik >= init_state(model, OptimizerConfig()).loglik
    assert res.iterations <= 400


def test_ego_seed_stable():
    assert ego_seed(7, "abc") == ego_seed(7, "abc")
    assert ego_seed(7, "abc") != ego_seed(7, "abd")


def test_detect_deterministic():
    ego, P, _ = generate_ego(PlantedEgoSpec(sizes=(5, 5), seed=4))
    a = detect(EgoModel(ego, P), OptimizerConfig(seed=9))
    b = detect(EgoModel(ego, P), OptimizerConfig(seed=9))
    assert a.circles == b.circles and a.loglik == b.loglik and a.trace == b.trace


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.integers(4, 14))
def test_detect_invariants(seed, n):
    rng = make_rng(seed)
    P = rng.random((n, 6))
    adj = np.triu((rng.random((n, n)) < 0.3).astype(np.uint8), 1)
    model = EgoModel.from_matrices(adj + adj.T, np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1)))
    cfg = OptimizerConfig(seed=seed)
    res = detect(model, cfg)
    assert all(b > a for a, b in zip(res.trace, res.trace[1:]))
    state = res.state
    assert state.loglik == pytest.approx(log_likelihood(model, state), rel=1e-9)
    for members, tau in zip(state.member_sets(), state.taus):
        assert tau >= cfg.tau_l
        assert all(sim_to_circle(members, y, model.dist) >= tau for y in members)


def test_two_planted_cliques_recovered():
    scores = []
    for seed in range(10):
        spec = PlantedEgoSpec(sizes=(4, 4), p_in=1.0, p_out=0.0, sigma_within=0.001,
                              sigma_between=0.3, seed=seed)
        ego, P, truth = generate_ego(spec)
        res = detect(EgoModel(ego, P), OptimizerConfig(seed=seed))
        scores.append(best_match_f1([m for m, _ in res.circles], truth.circles) if res.circles else 0.0)
    assert np.mean(scores) >= 0.9, scores
