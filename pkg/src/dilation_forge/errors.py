"""Exception hierarchy.

Validation problems (bad input) derive from :class:`ValidationError`;
numerical breakdowns of an algorithm derive from :class:`NumericalError`.
The command line front end maps these two families to distinct exit codes.
"""


class DilationError(Exception):
    """Base class for all errors raised by dilation_forge."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update({k: v for k, v in self.details.items() if _jsonable(v)})
        return out


def _jsonable(value):
    return isinstance(value, (str, int, float, bool, list, tuple, dict, type(None)))


class ValidationError(DilationError):
    pass


class NumericalError(DilationError):
    pass


class DimensionError(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class NotHermitian(NotPSD):
    pass


class NotNormalized(ValidationError):
    pass


class NotCommuting(ValidationError):
    pass


class NotNormal(ValidationError):
    pass


class NotIsometry(ValidationError):
    pass


class NotContraction(ValidationError):
    pass


class NotStrictContraction(NotContraction):
    pass


class ConstantMissing(ValidationError):
    pass


class DegenerateCertificate(ValidationError):
    pass


class TriangularizationFailed(NumericalError):
    pass


class MomentMismatch(NumericalError):
    pass


class NullspaceNotFound(NumericalError):
    """Recombination could not find a nullspace direction.

    ``partial`` holds the POVM reached before the failure.
    """

    def __init__(self, message, partial=None, **details):
        super().__init__(message, **details)
        self.partial = partial
