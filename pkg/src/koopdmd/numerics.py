"""Dense linear algebra used by the DMD fit.

Thin wrappers over LAPACK (through numpy) that pin down the conventions the
rest of the package relies on: rank selection, singular value floors,
a canonical eigenvalue order and a deterministic eigenvector phase.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DefectiveMatrixWarning,
    NonConvergence,
    NonFiniteInput,
    RankPolicyUnsatisfiable,
    SingularValueUnderflow,
    ZeroMatrix,
    ZeroToNegativePower,
)

SIGMA_FLOOR = 1e-150
DEFECTIVE_COND = 1e8
TOL_EIG = 1e-8


@dataclass(frozen=True)
class Fixed:
    r: int

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"fixed rank must be a positive integer, got {self.r!r}")


@dataclass(frozen=True)
class RelativeTolerance:
    """Drop singular values below ``tau * sigma_1``."""

    tau: float

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"relative tolerance must lie in (0, 1), got {self.tau!r}")


@dataclass(frozen=True)
class EnergyFraction:
    """Keep the smallest rank whose squared singular values reach ``eta`` of the total."""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"energy fraction must lie in (0, 1], got {self.eta!r}")


RankPolicy = Union[Fixed, RelativeTolerance, EnergyFraction]


def parse_rank_policy(text: str) -> RankPolicy:
    """Parse ``fixed:r``, ``tol:tau`` or ``energy:eta``."""
    kind, _, value = text.partition(":")
    if not value:
        raise ValueError(f"rank policy needs a value: {text!r}")
    kind = kind.strip().lower()
    if kind == "fixed":
        return Fixed(int(value))
    if kind == "tol":
        return RelativeTolerance(float(value))
    if kind == "energy":
        return EnergyFraction(float(value))
    raise ValueError(f"unknown rank policy {kind!r} (expected fixed, tol or energy)")


def format_rank_policy(policy: RankPolicy) -> str:
    if isinstance(policy, Fixed):
        return f"fixed:{policy.r}"
    if isinstance(policy, RelativeTolerance):
        return f"tol:{policy.tau!r}"
    return f"energy:{policy.eta!r}"


def _check_finite(a: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")


def select_rank(sigma: np.ndarray, policy: RankPolicy) -> int:
    """Number of singular values to retain under ``policy``."""
    limit = sigma.size
    if isinstance(policy, Fixed):
        if policy.r > limit:
            raise RankPolicyUnsatisfiable(
                f"fixed rank {policy.r} exceeds min(n, M) = {limit}"
            )
        return policy.r
    if isinstance(policy, RelativeTolerance):
        r = int(np.count_nonzero(sigma >= policy.tau * sigma[0]))
    elif isinstance(policy, EnergyFraction):
        energy = np.cumsum(sigma**2) / np.sum(sigma**2)
        # guard the final entry against cumsum roundoff landing just below 1
        energy[-1] = 1.0
        r = int(np.searchsorted(energy, policy.eta * (1 - 1e-15)) + 1)
    else:
        raise TypeError(f"not a rank policy: {policy!r}")
    return max(1, min(r, limit))


def svd_truncated(X, policy: RankPolicy):
    """Thin SVD of ``X`` cut down to the rank chosen by ``policy``.

    Returns ``(U, sigma, V)`` with ``X ~= U @ diag(sigma) @ V.conj().T``;
    ``U`` is n x r, ``sigma`` has r descending entries and ``V`` is M x r.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    _check_finite(X, "snapshot matrix")
    if not np.any(X):
        raise ZeroMatrix("cannot decompose an all-zero matrix")
    try:
        U, sigma, Vh = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    r = select_rank(sigma, policy)
    return U[:, :r], sigma[:r], Vh[:r].conj().T


def pinv_from_svd(U, sigma, V) -> np.ndarray:
    """``V @ diag(1/sigma) @ U^H``."""
    sigma = np.asarray(sigma)
    if np.any(sigma < SIGMA_FLOOR):
        raise SingularValueUnderflow(
            f"singular value {sigma.min():.3e} below floor {SIGMA_FLOOR:.0e}"
        )
    return (V / sigma) @ np.asarray(U).conj().T


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting ``values`` by descending modulus, then real, then imaginary part.

    Keys are rounded relative to the largest modulus so conjugate pairs and
    repeated eigenvalues are treated as ties despite roundoff.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.arange(0)
    scale = float(np.max(np.abs(values))) or 1.0

    def q(v):
        return np.round(v / scale, 10)

    # lexsort uses the last key as primary
    return np.lexsort((-q(values.imag), -q(values.real), -q(np.abs(values))))


def normalize_phase(vectors: np.ndarray) -> np.ndarray:
    """Scale columns to unit 2-norm with the largest-magnitude entry real and positive.

    All-zero columns are returned unchanged.
    """
    out = np.array(vectors, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        norm = np.linalg.norm(col)
        if norm == 0.0:
            continue
        col = col / norm
        # prefer the first index among entries equal in magnitude up to roundoff
        mags = np.abs(col)
        pivot = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-12))[0])
        col = col * (abs(col[pivot]) / col[pivot])
        col[pivot] = abs(col[pivot])
        out[:, j] = col
    return out


def eig(A):
    """Eigendecomposition of a general square matrix.

    Returns ``(vectors, values)`` in canonical order with phase-normalized
    eigenvector columns. Emits ``DefectiveMatrixWarning`` when the
    eigenvector matrix has condition number above ``DEFECTIVE_COND``.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"eig needs a square matrix, got shape {A.shape}")
    _check_finite(A, "matrix")
    try:
        values, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    order = canonical_order(values)
    values = values[order].astype(complex)
    vectors = normalize_phase(vectors[:, order])
    cond = np.linalg.cond(vectors) if vectors.size else 1.0
    if not np.isfinite(cond) or cond > DEFECTIVE_COND:
        warnings.warn(
            f"eigenvector matrix condition number {cond:.3e} exceeds {DEFECTIVE_COND:.0e};"
            " the matrix is numerically defective",
            DefectiveMatrixWarning,
            stacklevel=2,
        )
    return vectors, values


def _is_integer(k: float) -> bool:
    return float(k).is_integer()


def _int_power(z: np.ndarray, k: int) -> np.ndarray:
    # exponentiation by squaring keeps 0**k == 0 exact and matches repeated products
    result = np.ones_like(z)
    base = z.copy()
    while k:
        if k & 1:
            result = result * base
        base = base * base
        k >>= 1
    return result


def diag_power(values, k: float) -> np.ndarray:
    """Elementwise ``values ** k`` for a real exponent.

    Integer exponents use repeated multiplication, non-integer exponents the
    principal branch ``exp(k * Log(lambda))``.
    """
    values = np.asarray(values, dtype=complex)
    k = float(k)
    zero = values == 0
    if k < 0 and np.any(zero):
        raise ZeroToNegativePower(f"zero eigenvalue raised to negative power {k}")
    if _is_integer(k):
        n = int(k)
        if n >= 0:
            return _int_power(values, n)
        return _int_power(1.0 / values, -n)
    out = np.zeros_like(values)
    nz = ~zero
    out[nz] = np.exp(k * np.log(values[nz]))
    return out
