"""Exception and warning classes.

Errors split into two families so the CLI can map them onto exit codes:
``InputError`` (bad data or arguments, exit 2) and ``NumericalError``
(linear algebra could not deliver, exit 3).
"""


class KoopDmdError(Exception):
    pass


class InputError(KoopDmdError, ValueError):
    pass


class NumericalError(KoopDmdError, ArithmeticError):
    pass


# input errors
class TrajectoryTooShort(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class DimensionCapExceeded(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class NonFiniteObservable(InputError):
    pass


class NoCoordinateSlots(InputError):
    pass


class NoClosedForm(InputError):
    pass


class NonDiagonalizableGenerator(InputError):
    pass


class IrregularSpacing(InputError):
    pass


class ModelFileError(InputError):
    pass


# numerical errors
class ZeroMatrix(NumericalError):
    pass


class RankPolicyUnsatisfiable(NumericalError):
    pass


class SingularValueUnderflow(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class ZeroToNegativePower(NumericalError):
    pass


class ZeroEigenvalueLog(NumericalError):
    pass


class ZeroEigenvalueWithOffset(NumericalError):
    pass


class DefectiveMatrixWarning(UserWarning):
    """Eigenvector matrix is too ill-conditioned to trust a diagonalization."""


class BranchWarning(UserWarning):
    """An eigenvalue sits on the branch cut of the principal logarithm."""
