"""Exception hierarchy shared across the library."""


class QdcError(Exception):
    """Base class for all library errors."""


class DomainError(QdcError):
    """A scalar argument is outside its mathematical domain."""


class InvalidSubsystem(QdcError):
    """A requested qubit label is not part of the register."""


class InvalidPartition(QdcError):
    """Subsystem specs overlap or leave the register."""


class InvalidMeasurement(QdcError):
    """Measurement effects are not a valid (complete, PSD) set."""


class InvalidOverlaps(QdcError):
    """A branch Gram matrix is not PSD with unit diagonal."""


class NotPositiveSemidefinite(QdcError):
    """A density matrix has an eigenvalue below the tolerance floor."""


class RegisterTooLarge(QdcError):
    """Dense register exceeds the qubit cap."""


class FragmentTooLarge(QdcError):
    """Kept subsystem exceeds the reduced-density-matrix cap."""


class DegenerateSystem(QdcError):
    """H_S is (numerically) zero; normalized measures are undefined."""


class PreconditionViolated(QdcError):
    """Structural precondition of a theorem checker does not hold."""


class ConfigError(QdcError):
    """Experiment configuration fails validation."""
