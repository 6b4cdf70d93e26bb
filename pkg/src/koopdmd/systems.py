"""Synthetic dynamical systems with known answers.

Each generator spec produces a ``TrajectorySet`` and, where one exists, a
closed-form state at any index. Noise uses numpy's ``PCG64`` bit generator
drawing ``standard_normal`` samples of shape ``(steps, n)`` in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .dmd import TrajectorySet
from .errors import DimensionMismatch, InputError, NoClosedForm, NonDiagonalizableGenerator

RNG_ALGORITHM = f"numpy.random.PCG64/standard_normal (numpy {np.__version__})"


def _as_matrix(a) -> np.ndarray:
    a = np.array(a, dtype=float, ndmin=2)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"generator matrix must be square, got {a.shape}")
    return a


@dataclass(frozen=True)
class _Common:
    x0: tuple
    steps: int
    delta_k: float = 1.0
    start_index: float = 0.0

    def _check(self):
        if self.steps < 1:
            raise InputError("steps must be >= 1")
        if not self.delta_k > 0:
            raise InputError("delta_k must be positive")


@dataclass(frozen=True)
class LinearDiscrete(_Common):
    A: tuple = field(default=((1.0,),), kw_only=True)


@dataclass(frozen=True)
class LinearContinuous(_Common):
    generator: tuple = field(default=((0.0,),), kw_only=True)


@dataclass(frozen=True)
class NoisyRandomWalk(_Common):
    sigma: float = field(default=0.0, kw_only=True)
    seed: int = field(default=0, kw_only=True)


@dataclass(frozen=True)
class SlowManifold(_Common):
    lam: float = field(default=0.9, kw_only=True)
    mu: float = field(default=0.5, kw_only=True)


GeneratorSpec = Union[LinearDiscrete, LinearContinuous, NoisyRandomWalk, SlowManifold]


def linear_discrete(A, x0, steps, delta_k=1.0, start_index=0.0) -> LinearDiscrete:
    return LinearDiscrete(tuple(np.ravel(x0).tolist()), steps, delta_k, start_index,
                          A=tuple(map(tuple, _as_matrix(A).tolist())))


def linear_continuous(generator, x0, steps, delta_k=1.0, start_index=0.0) -> LinearContinuous:
    return LinearContinuous(tuple(np.ravel(x0).tolist()), steps, delta_k, start_index,
                            generator=tuple(map(tuple, _as_matrix(generator).tolist())))


def noisy_random_walk(sigma, seed, x0, steps, delta_k=1.0, start_index=0.0) -> NoisyRandomWalk:
    return NoisyRandomWalk(tuple(np.ravel(x0).tolist()), steps, delta_k, start_index,
                           sigma=float(sigma), seed=int(seed))


def slow_manifold(lam, mu, x0, steps, delta_k=1.0, start_index=0.0) -> SlowManifold:
    return SlowManifold(tuple(np.ravel(x0).tolist()), steps, delta_k, start_index,
                        lam=float(lam), mu=float(mu))


def slow_manifold_map(x, lam: float, mu: float) -> np.ndarray:
    """One step of ``x1 -> lam x1``, ``x2 -> mu x2 + (lam^2 - mu) x1^2``."""
    return np.array([lam * x[0], mu * x[1] + (lam**2 - mu) * x[0] ** 2])


def _eigen_generator(matrix: np.ndarray):
    values, vectors = np.linalg.eig(matrix)
    if np.linalg.cond(vectors) > 1e8:
        raise NonDiagonalizableGenerator("generator matrix is not diagonalizable")
    return values.astype(complex), vectors.astype(complex)


def _x0(spec) -> np.ndarray:
    return np.array(spec.x0, dtype=float)


def generate(spec: GeneratorSpec) -> TrajectorySet:
    spec._check()
    x0 = _x0(spec)
    n = x0.size
    if isinstance(spec, LinearDiscrete):
        A = _as_matrix(spec.A)
        if A.shape[0] != n:
            raise DimensionMismatch(f"A is {A.shape}, x0 has {n} entries")
        states = [x0]
        for _ in range(spec.steps):
            states.append(A @ states[-1])
    elif isinstance(spec, LinearContinuous):
        G = _as_matrix(spec.generator)
        if G.shape[0] != n:
            raise DimensionMismatch(f"generator is {G.shape}, x0 has {n} entries")
        values, vectors = _eigen_generator(G)
        coeffs = np.linalg.solve(vectors, x0)
        t = spec.delta_k * np.arange(spec.steps + 1)
        states = (vectors @ (np.exp(np.outer(values, t)) * coeffs[:, None])).real.T
    elif isinstance(spec, NoisyRandomWalk):
        if spec.sigma < 0:
            raise InputError("sigma must be non-negative")
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        kicks = spec.sigma * rng.standard_normal((spec.steps, n))
        states = np.vstack([x0, x0 + np.cumsum(kicks, axis=0)])
    elif isinstance(spec, SlowManifold):
        if n != 2:
            raise DimensionMismatch("the slow-manifold system is 2-dimensional")
        states = [x0]
        for _ in range(spec.steps):
            states.append(slow_manifold_map(states[-1], spec.lam, spec.mu))
    else:
        raise TypeError(f"unknown generator spec {spec!r}")
    return TrajectorySet.single(np.asarray(states), spec.delta_k, spec.start_index)


def _real_power(base: float, k: float) -> float:
    if float(k).is_integer():
        return base ** int(k) if base != 0 or k >= 0 else float("inf")
    if base < 0:
        raise NoClosedForm("fractional power of a negative multiplier has no real closed form")
    return base**k


def true_state(spec: GeneratorSpec, index: float) -> np.ndarray:
    """Exact state at ``index`` (original units)."""
    x0 = _x0(spec)
    t = index - spec.start_index
    k = t / spec.delta_k
    if isinstance(spec, LinearContinuous):
        values, vectors = _eigen_generator(_as_matrix(spec.generator))
        return (vectors @ (np.exp(values * t) * np.linalg.solve(vectors, x0))).real
    if isinstance(spec, LinearDiscrete):
        A = _as_matrix(spec.A)
        if float(k).is_integer() and k >= 0:
            return np.linalg.matrix_power(A, int(k)) @ x0
        try:
            values, vectors = _eigen_generator(A)
        except NonDiagonalizableGenerator as exc:
            raise NoClosedForm(str(exc)) from exc
        if np.any(values == 0):
            raise NoClosedForm("singular generator has no backward or fractional powers")
        powers = np.exp(k * np.log(values)) if not float(k).is_integer() else values ** int(k)
        x = vectors @ (powers * np.linalg.solve(vectors, x0))
        if not float(k).is_integer() and np.max(np.abs(x.imag)) > 1e-9 * max(1.0, np.linalg.norm(x)):
            raise NoClosedForm("fractional power of this generator is not real")
        return x.real
    if isinstance(spec, NoisyRandomWalk):
        if spec.sigma == 0:
            return x0.copy()
        if float(k).is_integer() and 0 <= k <= spec.steps:
            return generate(spec).trajectories[0].states[int(k)].copy()
        raise NoClosedForm("a noisy random walk is only known at its sampled indices")
    if isinstance(spec, SlowManifold):
        lam_k = _real_power(spec.lam, k)
        mu_k = _real_power(spec.mu, k)
        x1, x2 = x0
        return np.array([lam_k * x1, mu_k * (x2 - x1**2) + lam_k**2 * x1**2])
    raise TypeError(f"unknown generator spec {spec!r}")
