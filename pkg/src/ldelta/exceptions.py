"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line layer can map it
without a lookup table.
"""


class LDeltaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(LDeltaError, ValueError):
    """Malformed input: bad parameters, alphabets or file contents."""

    exit_code = 2


class PartitionError(ValidationError):
    """A partition is not a disjoint cover of the quasi-identifier alphabet."""


class OverlapError(PartitionError):
    def __init__(self, qid, first, second):
        self.qid = qid
        self.classes = (first, second)
        super().__init__(f"qid {qid} appears in classes {first} and {second}")


class CoverageError(PartitionError):
    def __init__(self, qid, message=None):
        self.qid = qid
        super().__init__(message or f"coverage gap at qid {qid}")


class UnsupportedParametersError(ValidationError):
    """Parameters for which no closed form or algorithm is offered."""


class InfeasibleError(LDeltaError):
    """No admissible partition exists for the requested (ell, p)."""

    exit_code = 3


class SizeGuardError(LDeltaError):
    """An exhaustive search was requested beyond its enumeration guard."""

    exit_code = 4
