import math

import numpy as np
import pytest

from hoptte import hopfield as hf


def random_net(rng, n, beta=1.0, symmetric=False):
    w = rng.normal(size=(n, n))
    if symmetric:
        w = 0.5 * (w + w.T)
        np.fill_diagonal(w, 0.0)
    return hf.make_net(w, beta=beta)


def test_hebbian_single_pattern():
    eps = np.array([1, -1, 1, -1])
    w = hf.hebbian_weights([eps])
    assert np.allclose(w, np.outer(eps, eps))
    assert np.allclose(np.diag(w), 1.0)


def test_hebbian_opposite_patterns_collapse():
    eps = np.array([1, 1, -1, -1])
    assert np.allclose(hf.hebbian_weights([eps, -eps]), hf.hebbian_weights([eps]))


def test_hebbian_hand_value():
    w = hf.hebbian_weights([[1, 1, -1, -1], [1, -1, 1, -1]])
    assert w[0, 1] == pytest.approx((1 * 1 + 1 * (-1)) / 2)  # = 0


def test_hebbian_zero_diagonal_flag():
    w = hf.hebbian_weights([[1, -1, 1]], zero_diagonal=True)
    assert np.all(np.diag(w) == 0)


def test_hebbian_empty_rejected():
    with pytest.raises(ValueError):
        hf.hebbian_weights([])


def test_deterministic_step_tie_keeps_state():
    net = hf.make_net(np.zeros((3, 3)))
    x = np.array([1, -1, 1])
    assert np.array_equal(hf.deterministic_step(net, x), x)


def test_deterministic_step_threshold():
    net = hf.make_net([[0.0]], thresholds=np.array([-1.0]))
    assert hf.deterministic_step(net, [-1])[0] == 1


def test_stored_pattern_is_fixed_point():
    eps = np.array([1, -1, -1, 1, 1])
    net = hf.make_net(hf.hebbian_weights([eps]))
    assert np.array_equal(hf.deterministic_step(net, eps), eps)


def test_transition_probability_coin_flip():
    net = hf.make_net([[0.0]])
    assert hf.transition_probability(net, [1], [1]) == pytest.approx(0.5)
    assert hf.transition_probability(net, [1], [-1]) == pytest.approx(0.5)


def test_transition_probability_exact_value():
    net = hf.make_net([[0, 1], [1, 0]], beta=1.0)
    p = hf.transition_probability(net, [1, 1], [1, 1])
    assert p == pytest.approx((1 + math.exp(-1)) ** -2, abs=1e-15)
    assert p == pytest.approx(0.534447, abs=1e-6)


def test_transition_probability_saturates():
    net = hf.make_net([[0, 1], [1, 0]], beta=200.0)
    assert hf.transition_probability(net, [1, 1], [1, 1]) == pytest.approx(1.0)


def test_transition_normalization_enumeration():
    rng = np.random.default_rng(11)
    for n in (2, 3, 5, 8):
        net = random_net(rng, n, beta=0.8)
        x = rng.choice([-1, 1], size=n)
        assert hf.transition_matrix_row(net, x).sum() == pytest.approx(1.0, abs=1e-12)


def test_stochastic_step_deterministic_given_seed():
    rng = np.random.default_rng(5)
    net = random_net(rng, 6)
    x = rng.choice([-1, 1], size=6)
    a = hf.stochastic_step(net, x, np.random.default_rng(99))
    b = hf.stochastic_step(net, x, np.random.default_rng(99))
    assert np.array_equal(a, b)


def test_stochastic_step_beta_zero_uniform():
    net = hf.make_net(np.zeros((4, 4)), beta=0.0)
    rng = np.random.default_rng(1)
    draws = np.array([hf.stochastic_step(net, np.ones(4), rng) for _ in range(4000)])
    assert abs(draws.mean()) < 0.05


def test_stochastic_step_concentrates_at_large_beta():
    rng = np.random.default_rng(21)
    net = random_net(rng, 6, beta=1e3)
    x = rng.choice([-1, 1], size=6)
    target = hf.deterministic_step(net, x)
    for seed in range(5):
        assert np.array_equal(hf.stochastic_step(net, x, np.random.default_rng(seed)), target)


def test_monte_carlo_matches_exact_probabilities():
    rng = np.random.default_rng(31)
    net = random_net(rng, 6, beta=0.7)
    x = rng.choice([-1, 1], size=6)
    samples = 10**6
    h = hf.local_fields(net, x) - net.thresholds
    p_plus = 0.5 * (1 + np.tanh(0.5 * net.beta * h))
    u = np.random.default_rng(777).random((samples, 6))
    bits = (u >= p_plus).astype(np.int64)
    idx = bits @ (1 << np.arange(5, -1, -1))
    freq = np.bincount(idx, minlength=64) / samples
    exact = hf.transition_matrix_row(net, x)
    se = np.sqrt(exact * (1 - exact) / samples)
    assert np.all(np.abs(freq - exact) <= 4 * se)


def test_trajectory_probability_single_step():
    rng = np.random.default_rng(2)
    net = random_net(rng, 4)
    x0 = rng.choice([-1, 1], size=4)
    x1 = rng.choice([-1, 1], size=4)
    assert hf.trajectory_probability(net, [x0, x1]) == pytest.approx(
        hf.transition_probability(net, x0, x1)
    )


def test_trajectory_probability_beta_zero():
    net = hf.make_net(np.zeros((3, 3)), beta=0.0)
    layers = np.ones((5, 3), dtype=np.int8)  # T = 4 steps
    assert hf.trajectory_probability(net, layers) == pytest.approx(2.0 ** (-3 * 4))


def test_trajectory_sum_over_paths_is_one():
    # N = 4, T = 2: exhaustive sum over all 2^(4*2) trajectories with fixed start
    rng = np.random.default_rng(9)
    net = random_net(rng, 4, beta=0.6)
    x0 = rng.choice([-1, 1], size=4)
    states = hf.all_states(4)
    total = 0.0
    for x1 in states:
        p1 = hf.transition_probability(net, x0, x1)
        for x2 in states:
            total += p1 * hf.transition_probability(net, x1, x2)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_energy_zero_net():
    net = hf.make_net(np.zeros((4, 4)))
    assert hf.energy(net, [1, -1, 1, -1]) == 0.0


def test_energy_stored_pattern():
    n = 6
    eps = np.ones(n)
    net = hf.make_net(hf.hebbian_weights([eps]))
    assert hf.energy(net, eps) == pytest.approx(-n * n / 2)


def test_energy_raised_by_flip():
    eps = np.array([1, -1, 1, 1, -1])
    net = hf.make_net(hf.hebbian_weights([eps]))
    e0 = hf.energy(net, eps)
    for i in range(5):
        flipped = eps.copy()
        flipped[i] *= -1
        assert hf.energy(net, flipped) > e0


def test_async_updates_never_raise_energy():
    # symmetric zero-diagonal weights: single-site updates are monotone in E
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(3, 11))
        net = random_net(rng, n, symmetric=True)
        x = rng.choice([-1, 1], size=n)
        e = hf.energy(net, x)
        for _ in range(3 * n):
            i = int(rng.integers(n))
            x = hf.deterministic_site_update(net, x, i)
            e_new = hf.energy(net, x)
            assert e_new <= e + 1e-9
            e = e_new


# --- triangular lattice -----------------------------------------------------


def test_triangular_requires_multiple_of_three():
    with pytest.raises(ValueError):
        hf.TriangularNet(4)
    with pytest.raises(ValueError):
        hf.build_triangular_net(5, 1.0)


def test_triangular_degree_and_asymmetry():
    net = hf.build_triangular_net(3, 1.0)
    w = net.weights
    assert np.all(np.sum(w != 0, axis=1) == 3)
    assert np.all(np.sum(w != 0, axis=0) == 3)
    off_diag = ~np.eye(net.size, dtype=bool)
    assert np.all((w * w.T)[off_diag] == 0)


def test_triangular_color_structure():
    tri = hf.TriangularNet(6)
    counts = [0, 0, 0]
    for y in range(6):
        for x in range(6):
            counts[tri.color(x, y)] += 1
            for nx, ny in tri.in_neighbors(x, y):
                assert tri.color(nx, ny) == (tri.color(x, y) - 1) % 3
    assert counts == [12, 12, 12]


def test_cubic_projection_matches_stencil():
    # the three cubic coordinate steps project onto the in-neighbor offsets
    tri = hf.TriangularNet(3)
    i, j, k = 4, 2, 1
    x, y, t = hf.cubic_to_site(tri, i, j, k)
    preds = {
        hf.cubic_to_site(tri, i - 1, j, k)[:2],
        hf.cubic_to_site(tri, i, j - 1, k)[:2],
        hf.cubic_to_site(tri, i, j, k - 1)[:2],
    }
    assert preds == set(tri.in_neighbors(x, y))
    for ii, jj, kk in ((i - 1, j, k), (i, j - 1, k), (i, j, k - 1)):
        assert hf.cubic_to_site(tri, ii, jj, kk)[2] == t - 1


def test_sublattice_classes_closed_under_inputs():
    tri = hf.TriangularNet(3)
    for t in range(1, 4):
        for y in range(3):
            for x in range(3):
                r = hf.site_time_class(tri, x, y, t)
                for nx, ny in tri.in_neighbors(x, y):
                    assert hf.site_time_class(tri, nx, ny, t - 1) == r


def test_sublattice_sizes_per_layer():
    tri = hf.TriangularNet(3)
    chains = hf.decompose_sublattices(tri, np.ones((4, 9), dtype=np.int8))
    for chain in chains:
        per_layer = {}
        for _, _, t in chain.members:
            per_layer[t] = per_layer.get(t, 0) + 1
        assert all(v == 3 for v in per_layer.values())  # L^2 / 3


def test_sublattice_factorization_exact():
    tri = hf.TriangularNet(3, beta=0.8)
    net = tri.to_hopfield()
    rng = np.random.default_rng(23)
    traj = hf.sample_trajectory(net, rng.choice([-1, 1], size=9), 3, rng)
    chains = hf.decompose_sublattices(tri, traj)
    total = hf.log_trajectory_probability(net, traj)
    assert total == pytest.approx(sum(c.log_probability for c in chains), abs=1e-12)


def test_state_json_round_trip():
    layers = np.array([[1, -1, 1], [-1, -1, 1]], dtype=np.int8)
    assert np.array_equal(hf.trajectory_from_json(hf.trajectory_to_json(layers)), layers)
    with pytest.raises(ValueError):
        hf.state_from_json([1, 0, -1])
