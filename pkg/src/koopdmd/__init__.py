"""Dynamic mode decomposition and finite Koopman surrogates for sampled trajectories."""

from .dmd import (
    ContinuousSpectrum,
    DmdModel,
    ModeKind,
    Prediction,
    SnapshotPair,
    StabilityFlag,
    Trajectory,
    TrajectorySet,
    amplitudes,
    build_snapshot_pair,
    fit,
    from_continuous,
    full_operator,
    predict_at,
    predict_continuous,
    predict_discrete,
    spectrum_report,
    to_continuous,
)
from .koopman import (
    Dictionary,
    KoopmanModel,
    custom_dictionary,
    decode,
    fit_koopman,
    identity_dictionary,
    lift,
    monomial_dictionary,
    predict_koopman,
)
from .numerics import EnergyFraction, Fixed, RelativeTolerance

__version__ = "0.1.0"
