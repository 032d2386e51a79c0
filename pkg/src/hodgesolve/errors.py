"""Exception types raised across the package."""


class HodgeError(Exception):
    """Base class for all package errors."""


class ValidationError(HodgeError, ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class VerificationError(HodgeError):
    """An oracle or Loewner verification failed (CLI exit code 3)."""


# complex_core
class MissingFace(ValidationError):
    pass


class DuplicateSimplex(ValidationError):
    pass


class NonSortedTuple(ValidationError):
    pass


class KNotFaceClosed(ValidationError):
    pass


class DimOutOfRange(ValidationError):
    pass


class ScopeMismatch(ValidationError):
    pass


# embedding
class NoAmbient(ValidationError):
    pass


class SpanningTreeBlocked(HodgeError):
    pass


class H2Mismatch(VerificationError):
    pass


class OrderInfeasible(HodgeError):
    pass


# collapse / chain_ops
class CannotReorder(HodgeError):
    pass


class SequenceNotNormalized(ValidationError):
    pass


class OrderMismatch(ValidationError):
    pass


# bases / harmonic / boundary
class DependentInput(HodgeError, ValueError):
    pass


class RankDeficient(HodgeError, ValueError):
    pass


class EpsilonUnderflow(HodgeError):
    def __init__(self, msg, exponent=None):
        super().__init__(msg)
        self.exponent = exponent


class NotACycle(HodgeError, ValueError):
    pass


class SingularM(HodgeError):
    pass


# graph_solver / solver
class SolveDiverged(HodgeError):
    pass


class IterationStalled(HodgeError):
    pass


# oracle
class NotSymmetric(VerificationError):
    pass


class TooLarge(HodgeError):
    pass


# cli
class InvalidParams(ValidationError):
    pass


class IOFailure(HodgeError):
    """A file could not be read, parsed or written (CLI exit code 4)."""
