import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koopdmd import systems
from koopdmd.errors import NoClosedForm, NonDiagonalizableGenerator


def states(spec):
    return systems.generate(spec).trajectories[0].states


def test_linear_discrete_iterates():
    out = states(systems.linear_discrete(np.diag([0.9, 0.5]), [1, 1], 4))
    np.testing.assert_allclose(
        out, [[1, 1], [0.9, 0.5], [0.81, 0.25], [0.729, 0.125], [0.6561, 0.0625]], rtol=1e-15
    )


def test_random_walk_without_noise_is_constant():
    out = states(systems.noisy_random_walk(0.0, 3, [1.0], 3))
    np.testing.assert_array_equal(out, np.ones((4, 1)))


def test_slow_manifold_one_step():
    out = states(systems.slow_manifold(0.9, 0.5, [1.0, 1.0], 1))
    np.testing.assert_allclose(out[1], [0.9, 0.5 * 1 + (0.81 - 0.5) * 1], rtol=1e-15)


def test_random_walk_is_seeded():
    a = states(systems.noisy_random_walk(0.01, 7, [0.0], 50))
    b = states(systems.noisy_random_walk(0.01, 7, [0.0], 50))
    c = states(systems.noisy_random_walk(0.01, 8, [0.0], 50))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_true_state_examples():
    assert systems.true_state(systems.linear_discrete([[2.0]], [1.0], 3), 5)[0] == 32.0
    still = systems.linear_continuous([[0.0]], [4.0], 3)
    for t in (0.0, 1.3, -7.0, 100.0):
        np.testing.assert_allclose(systems.true_state(still, t), [4.0])
    with pytest.raises(NoClosedForm):
        systems.true_state(systems.noisy_random_walk(0.1, 0, [0.0], 5), 2.5)


def test_non_diagonalizable_generator():
    with pytest.raises(NonDiagonalizableGenerator):
        systems.generate(systems.linear_continuous([[0.0, 1.0], [0.0, 0.0]], [1.0, 1.0], 3))


def test_continuous_generator_matches_matrix_exponential():
    # oracle: Taylor series of exp(G t) summed to convergence
    G = np.array([[-0.1, 0.5], [-0.5, -0.1]])
    t = 1.5
    term, total = np.eye(2), np.eye(2)
    for k in range(1, 60):
        term = term @ (G * t) / k
        total = total + term
    spec = systems.linear_continuous(G, [1.0, 2.0], 6, delta_k=0.5)
    np.testing.assert_allclose(states(spec)[3], total @ [1.0, 2.0], rtol=1e-13)


def test_slow_manifold_closed_form_fractional():
    spec = systems.slow_manifold(0.9, 0.5, [1.0, 0.0], 4)
    x = systems.true_state(spec, 2.5)
    np.testing.assert_allclose(x, [0.9**2.5, 0.5**2.5 * (0 - 1) + 0.9**5], rtol=1e-14)


@pytest.mark.parametrize("spec", [
    systems.linear_discrete([[0.9, 0.2], [-0.1, 0.7]], [1.0, -1.0], 10, delta_k=0.25, start_index=3.0),
    systems.linear_continuous([[-0.1, 0.5], [-0.5, -0.1]], [1.0, 2.0], 10, delta_k=0.5),
    systems.noisy_random_walk(0.05, 11, [0.3, 0.1], 10),
    systems.slow_manifold(0.9, 0.5, [1.0, 0.0], 10, start_index=-2.0),
    systems.slow_manifold(-0.8, 0.3, [0.7, 0.2], 10),
])
def test_generate_matches_true_state(spec):
    data = systems.generate(spec)
    for index, x in zip(data.indices(), data.trajectories[0].states):
        np.testing.assert_allclose(systems.true_state(spec, index), x, rtol=1e-12, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99), st.floats(-2, 2), st.floats(-2, 2))
def test_slow_manifold_closed_form_matches_iteration(lam, mu, a, b):
    spec = systems.slow_manifold(lam, mu, [a, b], 8)
    out = states(spec)
    for k in range(9):
        np.testing.assert_allclose(systems.true_state(spec, k), out[k], rtol=1e-10, atol=1e-12)
