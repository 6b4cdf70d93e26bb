"""Dynamic mode decomposition on snapshot data.

The fit never materializes the n x n operator. It works with the reduced
operator ``A_tilde = U^H X' V Sigma^-1`` in the space of the leading POD
modes, lifts its eigenvectors back to state space (exact or projected modes)
and anchors amplitudes at the first snapshot.

Index conventions: a model stores ``start_index`` (the original-unit index of
its anchor snapshot) and ``delta_k``. ``predict_discrete`` takes a step count
measured from the anchor, ``predict_continuous`` an elapsed time in original
units measured from the anchor, and ``predict_at`` an absolute index in
original units.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import numerics
from .errors import (
    BranchWarning,
    DimensionCapExceeded,
    DimensionMismatch,
    InputError,
    NonFiniteInput,
    TrajectoryTooShort,
    ZeroEigenvalueLog,
    ZeroEigenvalueWithOffset,
)
from .numerics import RankPolicy, RelativeTolerance

TOL_ZERO = 1e-12
TOL_UNIT = 1e-6
DEFAULT_DIM_CAP = 1000


class ModeKind(str, enum.Enum):
    EXACT = "exact"
    PROJECTED = "projected"
    EXACT_WITH_FALLBACK = "auto"

    @classmethod
    def parse(cls, text: str) -> "ModeKind":
        text = text.strip().lower()
        aliases = {"exact_with_fallback": "auto", "fallback": "auto"}
        return cls(aliases.get(text, text))


@dataclass(frozen=True)
class Trajectory:
    """One run of the system; ``states`` has one row per sample."""

    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if states.ndim != 2:
            raise DimensionMismatch(f"trajectory must be 2-D (samples x n), got {states.shape}")
        if states.shape[0] < 2:
            raise TrajectoryTooShort(
                f"a trajectory needs at least 2 samples, got {states.shape[0]}"
            )
        if not np.all(np.isfinite(states)):
            raise NonFiniteInput("trajectory contains NaN or Inf")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def m(self) -> int:
        return self.states.shape[0] - 1

    def __len__(self):
        return self.states.shape[0]


@dataclass(frozen=True)
class TrajectorySet:
    trajectories: tuple
    delta_k: float = 1.0
    start_index: float = 0.0

    def __post_init__(self):
        trajs = tuple(t if isinstance(t, Trajectory) else Trajectory(t) for t in self.trajectories)
        if not trajs:
            raise InputError("a trajectory set needs at least one trajectory")
        dims = {t.n for t in trajs}
        if len(dims) != 1:
            raise DimensionMismatch(f"trajectories disagree on state dimension: {sorted(dims)}")
        if not (np.isfinite(self.delta_k) and self.delta_k > 0):
            raise InputError(f"delta_k must be positive and finite, got {self.delta_k!r}")
        if not np.isfinite(self.start_index):
            raise InputError("start_index must be finite")
        if self.start_index != 0 and len(trajs) > 1:
            raise InputError("a nonzero start_index is only allowed with a single trajectory")
        object.__setattr__(self, "trajectories", trajs)
        object.__setattr__(self, "delta_k", float(self.delta_k))
        object.__setattr__(self, "start_index", float(self.start_index))

    @classmethod
    def single(cls, states, delta_k: float = 1.0, start_index: float = 0.0) -> "TrajectorySet":
        return cls((Trajectory(states),), delta_k, start_index)

    @property
    def n(self) -> int:
        return self.trajectories[0].n

    def indices(self, t: int = 0) -> np.ndarray:
        """Original-unit indices of the samples of trajectory ``t``."""
        start = self.start_index if t == 0 else 0.0
        return start + self.delta_k * np.arange(len(self.trajectories[t]))


@dataclass(frozen=True)
class SnapshotPair:
    X: np.ndarray
    X_prime: np.ndarray

    @property
    def M(self) -> int:
        return self.X.shape[1]


def build_snapshot_pair(data: TrajectorySet) -> SnapshotPair:
    """Stack consecutive sample pairs of every trajectory as columns."""
    n = data.n
    for t in data.trajectories:
        if t.n != n:
            raise DimensionMismatch(f"trajectory of dimension {t.n}, expected {n}")
        if len(t) < 2:
            raise TrajectoryTooShort("every trajectory needs at least 2 samples")
    X = np.concatenate([t.states[:-1].T for t in data.trajectories], axis=1)
    Xp = np.concatenate([t.states[1:].T for t in data.trajectories], axis=1)
    return SnapshotPair(X, Xp)


@dataclass(frozen=True)
class DmdModel:
    n: int
    r: int
    eigenvalues: np.ndarray
    modes: np.ndarray
    amplitudes: np.ndarray
    delta_k: float
    start_index: float
    mode_kind: ModeKind
    x_init: np.ndarray
    U: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None
    A_tilde: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ContinuousSpectrum:
    omegas: np.ndarray
    delta_k: float


@dataclass(frozen=True)
class Prediction:
    state: np.ndarray
    imag_residual: float


def _exact_modes(X_prime, V, sigma, W_tilde):
    return X_prime @ (V / sigma) @ W_tilde


def fit(
    data: TrajectorySet,
    policy: RankPolicy = RelativeTolerance(1e-10),
    mode_kind: ModeKind = ModeKind.EXACT,
) -> DmdModel:
    """Fit a DMD model to ``data``.

    Amplitudes are anchored at the first sample of the first trajectory,
    which sits at step 0 (``start_index`` in original units).
    """
    mode_kind = ModeKind(mode_kind)
    pair = build_snapshot_pair(data)
    X, Xp = pair.X, pair.X_prime
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        U, sigma, V = numerics.svd_truncated(X, policy)
        # pinv_from_svd enforces the singular value floor before any division
        numerics.pinv_from_svd(U, sigma, V)
        A_tilde = U.conj().T @ Xp @ (V / sigma)
        W_tilde, lam = numerics.eig(A_tilde)

        projected = U @ W_tilde
        if mode_kind is ModeKind.PROJECTED:
            W = projected
        else:
            W = _exact_modes(Xp, V, sigma, W_tilde)
            floor = TOL_ZERO * np.linalg.norm(Xp)
            for i in range(W.shape[1]):
                if np.linalg.norm(W[:, i]) >= floor:
                    continue
                if mode_kind is ModeKind.EXACT_WITH_FALLBACK and abs(lam[i]) < TOL_ZERO:
                    W[:, i] = projected[:, i]
                else:
                    # roundoff only; normalizing it would invent a direction
                    W[:, i] = 0.0
        W = numerics.normalize_phase(W)

        x_init = data.trajectories[0].states[0].copy()
        b = amplitudes(W, lam, x_init, 0.0)

    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)

    for a in (U, sigma, V, A_tilde, lam, W, b, x_init):
        a.setflags(write=False)
    model = DmdModel(
        n=data.n,
        r=int(sigma.size),
        eigenvalues=lam,
        modes=W,
        amplitudes=b,
        delta_k=data.delta_k,
        start_index=data.start_index,
        mode_kind=mode_kind,
        x_init=x_init,
        U=U,
        sigma=sigma,
        V=V,
        A_tilde=A_tilde,
        diagnostics={
            "fit_residual": fit_residual_of(W, lam, pair),
            "warnings": [f"{w.category.__name__}: {w.message}" for w in caught],
        },
    )
    return model


def fit_residual_of(modes, eigenvalues, pair: SnapshotPair) -> float:
    """Relative Frobenius misfit of ``X'`` against the fitted operator applied to ``X``."""
    W = np.asarray(modes)
    recon = W @ (np.asarray(eigenvalues)[:, None] * (np.linalg.pinv(W) @ pair.X))
    denom = np.linalg.norm(pair.X_prime)
    return float(np.linalg.norm(pair.X_prime - recon) / denom) if denom else 0.0


def full_operator(model: DmdModel, X_prime, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Materialize ``A = X' V Sigma^-1 U^H``. Meant for small test oracles."""
    if model.n > cap:
        raise DimensionCapExceeded(f"n = {model.n} exceeds the cap of {cap}")
    if model.U is None or model.V is None or model.sigma is None:
        raise InputError("model carries no SVD factors")
    X_prime = np.asarray(X_prime)
    if X_prime.shape != (model.n, model.V.shape[0]):
        raise DimensionMismatch(
            f"X_prime has shape {X_prime.shape}, expected {(model.n, model.V.shape[0])}"
        )
    return X_prime @ numerics.pinv_from_svd(model.U, model.sigma, model.V)


def amplitudes(W, eigenvalues, x_init, start_index_steps: float = 0.0) -> np.ndarray:
    """Mode amplitudes ``b = Lambda^-i W^+ x_i`` for a snapshot taken at step ``i``."""
    W = np.asarray(W)
    lam = np.asarray(eigenvalues, dtype=complex)
    x_init = np.asarray(x_init)
    if x_init.shape != (W.shape[0],):
        raise DimensionMismatch(f"x_init has shape {x_init.shape}, expected ({W.shape[0]},)")
    b = np.linalg.pinv(W) @ x_init
    if start_index_steps != 0:
        if np.any(lam == 0):
            raise ZeroEigenvalueWithOffset(
                "a zero eigenvalue cannot be inverted to move the anchor to step 0"
            )
        b = numerics.diag_power(lam, -start_index_steps) * b
    return b


def _branch_check(lam: np.ndarray) -> None:
    nz = lam[lam != 0]
    if np.any(np.abs(np.angle(nz)) >= np.pi * (1 - 1e-12)):
        warnings.warn(
            "an eigenvalue lies on the negative real axis; principal-branch powers"
            " may not match the discrete dynamics",
            BranchWarning,
            stacklevel=3,
        )


def _combine(modes, coeffs) -> Prediction:
    x = np.asarray(modes) @ coeffs
    return Prediction(x.real.copy(), float(np.max(np.abs(x.imag), initial=0.0)))


def predict_discrete(model: DmdModel, k: float) -> Prediction:
    """State ``k`` steps after the anchor: ``W diag(lambda^k) b``."""
    if not float(k).is_integer():
        _branch_check(model.eigenvalues)
    return _combine(model.modes, numerics.diag_power(model.eigenvalues, k) * model.amplitudes)


def to_continuous(eigenvalues, delta_k: float) -> ContinuousSpectrum:
    """``omega = Log(lambda) / delta_k`` on the principal branch."""
    lam = np.asarray(eigenvalues, dtype=complex)
    if delta_k <= 0:
        raise InputError(f"delta_k must be positive, got {delta_k!r}")
    if np.any(lam == 0):
        raise ZeroEigenvalueLog("zero eigenvalue has no logarithm")
    return ContinuousSpectrum(np.log(lam) / delta_k, float(delta_k))


def from_continuous(spectrum, delta_k: float) -> np.ndarray:
    omegas = spectrum.omegas if isinstance(spectrum, ContinuousSpectrum) else spectrum
    return np.exp(np.asarray(omegas, dtype=complex) * delta_k)


def predict_continuous(model: DmdModel, t: float) -> Prediction:
    """State at elapsed time ``t`` (original units) after the anchor: ``W diag(e^{omega t}) b``."""
    spectrum = to_continuous(model.eigenvalues, model.delta_k)
    _branch_check(model.eigenvalues)
    return _combine(model.modes, np.exp(spectrum.omegas * t) * model.amplitudes)


def steps_from_index(model: DmdModel, index: float) -> float:
    return (index - model.start_index) / model.delta_k


def predict_at(model: DmdModel, index: float, continuous: bool = False) -> Prediction:
    """Prediction at an absolute index in original units."""
    if continuous:
        return predict_continuous(model, index - model.start_index)
    steps = steps_from_index(model, index)
    nearest = round(steps)
    if abs(steps - nearest) <= 1e-9 * max(1.0, abs(steps)):
        steps = nearest
    return predict_discrete(model, steps)


class StabilityFlag(str, enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    EXPLODING = "exploding"


@dataclass(frozen=True)
class EigenInfo:
    value: complex
    modulus: float
    argument: float
    real: float
    distance_from_unit: float
    omega: Optional[complex]


@dataclass(frozen=True)
class SpectrumReport:
    entries: tuple
    dominant: int
    flag: StabilityFlag
    conditioning: float
    notes: tuple

    def table(self) -> str:
        head = f"{'#':>3} {'re':>12} {'im':>12} {'|lam|':>12} {'arg':>10} {'|lam|-1':>12} {'omega':>26}"
        lines = [head]
        for i, e in enumerate(self.entries):
            om = "n/a" if e.omega is None else f"{e.omega.real:+.6e}{e.omega.imag:+.6e}j"
            mark = "*" if i == self.dominant else " "
            lines.append(
                f"{i:>2}{mark} {e.value.real:>12.6g} {e.value.imag:>12.6g} {e.modulus:>12.6g}"
                f" {e.argument:>10.5f} {e.distance_from_unit:>12.3e} {om:>26}"
            )
        return "\n".join(lines)


def spectrum_report(model: DmdModel, tol_unit: float = TOL_UNIT) -> SpectrumReport:
    """Per-eigenvalue growth diagnostics.

    The stability flag is keyed on the modulus of the dominant eigenvalue;
    the real part is reported alongside because the two criteria differ for
    complex eigenvalues.
    """
    lam = np.asarray(model.eigenvalues, dtype=complex)
    mods = np.abs(lam)
    entries = []
    for v, mod in zip(lam, mods):
        omega = None if v == 0 else complex(np.log(v) / model.delta_k)
        entries.append(
            EigenInfo(complex(v), float(mod), float(np.angle(v)), float(v.real), float(mod - 1.0), omega)
        )
    dominant = int(np.argmax(mods))
    top = mods[dominant]
    if abs(top - 1.0) <= tol_unit:
        flag = StabilityFlag.MARGINAL
    elif top > 1.0 + tol_unit:
        flag = StabilityFlag.EXPLODING
    else:
        flag = StabilityFlag.STABLE
    smallest = mods.min()
    conditioning = float(top / smallest) if smallest > 0 else float("inf")
    notes = []
    if flag is StabilityFlag.EXPLODING:
        notes.append("dominant |lambda| > 1: forward predictions grow without bound, backward ones decay")
    if smallest < 1.0 - tol_unit:
        notes.append(
            f"min |lambda| = {smallest:.3g}: backward predictions amplify that mode by"
            f" |lambda|^-k; past forecasts are ill-conditioned (ratio {conditioning:.3g})"
        )
    return SpectrumReport(tuple(entries), dominant, flag, conditioning, tuple(notes))
