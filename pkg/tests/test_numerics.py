import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from koopdmd import numerics
from koopdmd.errors import (
    DefectiveMatrixWarning,
    RankPolicyUnsatisfiable,
    SingularValueUnderflow,
    ZeroMatrix,
    ZeroToNegativePower,
)
from koopdmd.numerics import EnergyFraction, Fixed, RelativeTolerance


def test_svd_identity():
    U, s, V = numerics.svd_truncated(np.eye(2), Fixed(2))
    np.testing.assert_allclose(s, [1.0, 1.0])
    np.testing.assert_allclose(U @ V.conj().T, np.eye(2), atol=1e-15)


def test_svd_rank_one_tolerance():
    X = np.array([[1.0, 2.0], [2.0, 4.0]])
    # oracle: largest eigenvalue of X^T X from the 2x2 characteristic polynomial
    G = X.T @ X
    tr, det = np.trace(G), np.linalg.det(G)
    top = (tr + np.sqrt(tr**2 - 4 * det)) / 2
    assert top == pytest.approx(25.0)
    U, s, V = numerics.svd_truncated(X, RelativeTolerance(1e-10))
    assert s.size == 1
    assert s[0] == pytest.approx(np.sqrt(top), rel=1e-14)
    assert s[0] == pytest.approx(5.0, rel=1e-14)


def test_svd_zero_matrix():
    with pytest.raises(ZeroMatrix):
        numerics.svd_truncated(np.zeros((3, 2)), Fixed(1))


def test_svd_fixed_rank_too_large():
    with pytest.raises(RankPolicyUnsatisfiable):
        numerics.svd_truncated(np.ones((3, 2)), Fixed(3))


def test_energy_fraction_rank():
    X = np.diag([3.0, 2.0, 1.0])
    # energies 9, 4, 1 out of 14
    assert numerics.svd_truncated(X, EnergyFraction(9 / 14))[1].size == 1
    assert numerics.svd_truncated(X, EnergyFraction(0.7))[1].size == 2
    assert numerics.svd_truncated(X, EnergyFraction(1.0))[1].size == 3


@pytest.mark.parametrize("bad", [lambda: Fixed(0), lambda: RelativeTolerance(1.0),
                                 lambda: EnergyFraction(0.0)])
def test_rank_policy_validation(bad):
    with pytest.raises(ValueError):
        bad()


def test_parse_rank_policy_roundtrip():
    for text in ["fixed:3", "tol:1e-10", "energy:0.99"]:
        assert numerics.format_rank_policy(numerics.parse_rank_policy(text)) == text.replace(
            "1e-10", repr(1e-10)
        )
    with pytest.raises(ValueError):
        numerics.parse_rank_policy("rank:3")


def test_pinv_identity():
    np.testing.assert_allclose(numerics.pinv_from_svd(np.eye(2), [1.0, 1.0], np.eye(2)), np.eye(2))


def test_pinv_rank_one_penrose():
    X = np.array([[1.0, 2.0], [2.0, 4.0]])
    U, s, V = numerics.svd_truncated(X, RelativeTolerance(1e-10))
    P = numerics.pinv_from_svd(U, s, V)
    assert np.linalg.norm(X @ P @ X - X) <= 1e-12
    assert np.linalg.norm(P @ X @ P - P) <= 1e-12
    assert np.linalg.norm((X @ P).T - X @ P) <= 1e-12
    assert np.linalg.norm((P @ X).T - P @ X) <= 1e-12


def test_pinv_underflow():
    with pytest.raises(SingularValueUnderflow):
        numerics.pinv_from_svd(np.eye(2), [1.0, 1e-300], np.eye(2))


def test_eig_diagonal():
    W, lam = numerics.eig(np.diag([0.5, 0.9]))
    np.testing.assert_allclose(lam, [0.9, 0.5])
    np.testing.assert_allclose(W, [[0, 1], [1, 0]], atol=1e-15)


def test_eig_rotation():
    # characteristic polynomial lambda^2 + 1 has roots +i, -i
    roots = np.roots([1, 0, 1])
    W, lam = numerics.eig(np.array([[0.0, -1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(sorted(lam, key=lambda z: z.imag), sorted(roots, key=lambda z: z.imag),
                               atol=1e-14)
    # ties on modulus and real part fall back to descending imaginary part
    assert lam[0].imag > 0 > lam[1].imag


def test_eig_defective_warns():
    with pytest.warns(DefectiveMatrixWarning):
        W, lam = numerics.eig(np.array([[2.0, 1.0], [0.0, 2.0]]))
    np.testing.assert_allclose(lam, [2.0, 2.0], atol=1e-7)


def test_eig_well_conditioned_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        numerics.eig(np.array([[1.0, 2.0], [3.0, 4.0]]))


def test_phase_convention():
    v = numerics.normalize_phase(np.array([[1j], [-2j]]))
    np.testing.assert_allclose(np.linalg.norm(v), 1.0)
    assert v[1, 0].imag == 0 and v[1, 0].real > 0


def test_diag_power():
    np.testing.assert_array_equal(numerics.diag_power([1, 1], 1000), [1, 1])
    np.testing.assert_allclose(numerics.diag_power([2], -1), [0.5])
    np.testing.assert_array_equal(numerics.diag_power([0, 2], 3), [0, 8])
    np.testing.assert_array_equal(numerics.diag_power([0, 2], 0), [1, 1])
    with pytest.raises(ZeroToNegativePower):
        numerics.diag_power([0], -2)


def test_diag_power_fractional_principal_branch():
    np.testing.assert_allclose(numerics.diag_power([4.0], 0.5), [2.0])
    np.testing.assert_allclose(numerics.diag_power([-1.0], 0.5), [1j], atol=1e-15)


def _random_matrix(seed, n=10):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_eig_residual_and_conjugate_closure(seed):
    A = _random_matrix(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DefectiveMatrixWarning)
        W, lam = numerics.eig(A)
    res = max(np.linalg.norm(A @ W[:, i] - lam[i] * W[:, i]) for i in range(10))
    assert res / np.linalg.norm(A) <= 1e-8
    for z in lam:
        assert np.min(np.abs(lam - np.conj(z))) <= 1e-10
    mods = np.abs(lam)
    assert np.all(np.diff(mods) <= 1e-9 * mods[0])


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(float, st.tuples(st.integers(1, 8), st.integers(1, 8)),
                  elements=st.floats(-10, 10, allow_nan=False, allow_subnormal=False)))
def test_svd_orthonormal_and_reconstructs(X):
    if np.linalg.norm(X) < 1e-100:
        return
    s_all = np.linalg.svd(X, compute_uv=False)
    r = int(np.count_nonzero(s_all > s_all[0] * 1e-12))
    U, s, V = numerics.svd_truncated(X, Fixed(r))
    assert np.linalg.norm(U.conj().T @ U - np.eye(r)) <= 1e-10
    assert np.linalg.norm(V.conj().T @ V - np.eye(r)) <= 1e-10
    assert np.all(s > 0) and np.all(np.diff(s) <= 0)
    assert np.linalg.norm(X - (U * s) @ V.conj().T) / np.linalg.norm(X) <= 1e-10
