from typing import ClassVar


class FractalSpectraError(Exception):
    exit_code: ClassVar[int] = 3


class UsageError(FractalSpectraError, ValueError):
    exit_code = 2


class ComputationError(FractalSpectraError, RuntimeError):
    exit_code = 3


class SchemaError(UsageError):
    pass


class UnknownName(UsageError):
    pass


class LengthMismatch(UsageError):
    pass


class EmptyInterior(UsageError):
    pass


class IndexOutOfRange(UsageError):
    pass


class SizeCapExceeded(ComputationError):
    pass


class NotSymmetric(ComputationError):
    pass


class NonpositiveMass(ComputationError):
    pass


class SolverError(ComputationError):
    pass
