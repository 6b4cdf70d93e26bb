"""Finite Koopman approximation by lifting states through an observable dictionary.

DMD is fit on the lifted snapshots ``y = g(x)``; predictions are made in the
lifted space and decoded back by reading off the observables that are the
plain state coordinates. Lifted eigenvectors play the role of Koopman
eigenfunctions restricted to the span of the dictionary; nothing here claims
convergence to the infinite-dimensional operator.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np

from . import dmd
from .dmd import DmdModel, ModeKind, TrajectorySet
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    InputError,
    NoCoordinateSlots,
    NonFiniteObservable,
)
from .numerics import RankPolicy, RelativeTolerance

DEFAULT_MAX_DIM = 5000


@dataclass(frozen=True)
class Monomial:
    exponents: tuple

    def __call__(self, x) -> float:
        out = 1.0
        for xi, a in zip(x, self.exponents):
            if a:
                out *= xi**a
        return out

    @property
    def name(self) -> str:
        parts = []
        for i, a in enumerate(self.exponents, start=1):
            if a == 1:
                parts.append(f"x{i}")
            elif a:
                parts.append(f"x{i}^{a}")
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class Dictionary:
    """Ordered observables ``g_1..g_p``, optionally standardized as ``(g - shift) / scale``."""

    n: int
    observables: tuple
    coordinate_slots: Optional[tuple] = None
    family: str = "custom"
    degree: Optional[int] = None
    include_constant: bool = False
    standardize: bool = False
    shift: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.observables) < 1:
            raise InputError("a dictionary needs at least one observable")
        if self.coordinate_slots is not None:
            slots = tuple(int(s) for s in self.coordinate_slots)
            if len(slots) != self.n:
                raise InputError(f"coordinate_slots needs {self.n} entries, got {len(slots)}")
            if any(not 0 <= s < len(self.observables) for s in slots):
                raise InputError("coordinate slot out of range")
            object.__setattr__(self, "coordinate_slots", slots)

    @property
    def p(self) -> int:
        return len(self.observables)

    @property
    def fitted_standardization(self) -> bool:
        return self.shift is not None

    def names(self) -> list:
        return [getattr(g, "name", f"g{i + 1}") for i, g in enumerate(self.observables)]

    def raw(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"state has shape {x.shape}, dictionary expects ({self.n},)")
        with np.errstate(all="ignore"):
            y = np.array([g(x) for g in self.observables], dtype=float)
        if not np.all(np.isfinite(y)):
            bad = [name for name, v in zip(self.names(), y) if not np.isfinite(v)]
            raise NonFiniteObservable(f"observables {bad} are not finite at x = {x.tolist()}")
        return y

    def __call__(self, x) -> np.ndarray:
        y = self.raw(x)
        if self.shift is not None:
            y = (y - self.shift) / self.scale
        return y

    def to_spec(self) -> dict:
        if self.family not in ("identity", "monomial"):
            raise InputError(f"dictionary family {self.family!r} cannot be serialized")
        spec = {
            "family": self.family,
            "degree": self.degree,
            "include_constant": self.include_constant,
            "standardize": self.standardize,
        }
        if self.shift is not None:
            spec["shift"] = self.shift.tolist()
            spec["scale"] = self.scale.tolist()
        return spec


def identity_dictionary(n: int) -> Dictionary:
    obs = tuple(Monomial(tuple(int(i == j) for i in range(n))) for j in range(n))
    return Dictionary(n, obs, tuple(range(n)), family="identity", degree=1)


def custom_dictionary(
    n: int, observables: Sequence[Callable], coordinate_slots: Optional[Sequence[int]] = None
) -> Dictionary:
    return Dictionary(n, tuple(observables), coordinate_slots, family="custom")


def monomial_exponents(n: int, degree: int, include_constant: bool = False) -> list:
    """Exponent tuples in graded lexicographic order."""
    out = [tuple([0] * n)] if include_constant else []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def monomial_dictionary(
    n: int,
    degree: int,
    include_constant: bool = False,
    standardize: bool = False,
    max_dim: int = DEFAULT_MAX_DIM,
) -> Dictionary:
    """All monomials of total degree 1..``degree`` (and optionally the constant)."""
    if n < 1 or degree < 1:
        raise InputError("monomial dictionary needs n >= 1 and degree >= 1")
    p = comb(n + degree, degree) - (0 if include_constant else 1)
    if p > max_dim:
        raise DimensionTooLarge(f"monomial dictionary would have {p} observables (cap {max_dim})")
    exps = monomial_exponents(n, degree, include_constant)
    obs = tuple(Monomial(e) for e in exps)
    slots = tuple(exps.index(tuple(int(i == j) for i in range(n))) for j in range(n))
    return Dictionary(
        n, obs, slots, family="monomial", degree=degree,
        include_constant=include_constant, standardize=standardize,
    )


def dictionary_from_spec(spec: dict, n: int) -> Dictionary:
    family = spec.get("family")
    if family == "identity":
        d = identity_dictionary(n)
    elif family == "monomial":
        d = monomial_dictionary(
            n, int(spec["degree"]), bool(spec.get("include_constant", False)),
            bool(spec.get("standardize", False)),
        )
    else:
        raise InputError(f"unknown dictionary family {family!r}")
    if "shift" in spec:
        d = replace(d, shift=np.array(spec["shift"], dtype=float),
                    scale=np.array(spec["scale"], dtype=float))
    return d


def parse_dictionary(text: str, n: int) -> Dictionary:
    """Parse ``identity`` or ``monomial:d[,const][,std]``."""
    head, _, rest = text.strip().partition(":")
    if head == "identity" and not rest:
        return identity_dictionary(n)
    if head == "monomial":
        parts = [s.strip() for s in rest.split(",") if s.strip()]
        if not parts:
            raise InputError("monomial dictionary needs a degree, e.g. monomial:2")
        flags = set(parts[1:])
        unknown = flags - {"const", "std"}
        if unknown:
            raise InputError(f"unknown dictionary flags {sorted(unknown)}")
        return monomial_dictionary(n, int(parts[0]), "const" in flags, "std" in flags)
    raise InputError(f"cannot parse dictionary {text!r}")


def with_standardization(dictionary: Dictionary, data: TrajectorySet) -> Dictionary:
    """Attach per-observable mean and standard deviation computed over the X snapshots."""
    X = np.vstack([t.states[:-1] for t in data.trajectories])
    raw = np.array([dictionary.raw(x) for x in X])
    shift = raw.mean(axis=0)
    scale = raw.std(axis=0)
    flat = scale <= 1e-12 * np.maximum(1.0, np.abs(shift))
    # constant observables are left untouched
    shift[flat] = 0.0
    scale[flat] = 1.0
    return replace(dictionary, standardize=True, shift=shift, scale=scale)


def lift(dictionary: Dictionary, data: TrajectorySet) -> TrajectorySet:
    if data.n != dictionary.n:
        raise DimensionMismatch(f"data has n = {data.n}, dictionary expects {dictionary.n}")
    lifted = tuple(np.array([dictionary(x) for x in t.states]) for t in data.trajectories)
    return TrajectorySet(lifted, data.delta_k, data.start_index)


def decode(dictionary: Dictionary, y) -> np.ndarray:
    """Read the state coordinates back out of a lifted vector."""
    if dictionary.coordinate_slots is None:
        raise NoCoordinateSlots("dictionary has no identity observables to decode from")
    y = np.asarray(y)
    if y.shape != (dictionary.p,):
        raise DimensionMismatch(f"lifted vector has shape {y.shape}, expected ({dictionary.p},)")
    slots = list(dictionary.coordinate_slots)
    x = y[slots]
    if dictionary.shift is not None:
        x = x * dictionary.scale[slots] + dictionary.shift[slots]
    return x


@dataclass(frozen=True)
class KoopmanModel:
    dictionary: Dictionary
    lifted_model: DmdModel

    @property
    def n(self) -> int:
        return self.dictionary.n

    @property
    def p(self) -> int:
        return self.dictionary.p


@dataclass(frozen=True)
class KoopmanPrediction:
    state: np.ndarray
    lifted: np.ndarray
    imag_residual: float
    manifold_defect: float


def fit_koopman(
    data: TrajectorySet,
    dictionary: Dictionary,
    policy: RankPolicy = RelativeTolerance(1e-10),
    mode_kind: ModeKind = ModeKind.EXACT,
) -> KoopmanModel:
    if dictionary.standardize and not dictionary.fitted_standardization:
        if not dictionary.include_constant:
            warnings.warn(
                "standardizing without the constant observable makes the lifted dynamics"
                " affine; add the constant (monomial:d,const,std) to keep them linear",
                UserWarning,
                stacklevel=2,
            )
        dictionary = with_standardization(dictionary, data)
    lifted = lift(dictionary, data)
    return KoopmanModel(dictionary, dmd.fit(lifted, policy, mode_kind))


def predict_koopman(model: KoopmanModel, index: float, continuous: bool = False) -> KoopmanPrediction:
    """Predict in the lifted space at an absolute index, then decode.

    ``manifold_defect`` is ``|y - g(decode(y))|``: how far the lifted
    prediction has drifted from vectors the dictionary can actually produce.
    """
    pred = dmd.predict_at(model.lifted_model, index, continuous)
    y = pred.state
    x = decode(model.dictionary, y)
    try:
        defect = float(np.linalg.norm(y - model.dictionary(x)))
    except NonFiniteObservable:
        defect = float("inf")
    return KoopmanPrediction(x, y, pred.imag_residual, defect)
