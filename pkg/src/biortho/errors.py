"""Exception hierarchy shared by every module of the package."""


class BiorthoError(Exception):
    """Base class for all errors raised by :mod:`biortho`."""


class NonFinite(BiorthoError, ValueError):
    pass


class ShapeMismatch(BiorthoError, ValueError):
    pass


class DimensionMismatch(BiorthoError, ValueError):
    pass


class NotHermitian(BiorthoError, ValueError):
    pass


class NotUnitary(BiorthoError, ValueError):
    pass


class NotNormalized(BiorthoError, ValueError):
    pass


class NoConvergence(BiorthoError, RuntimeError):
    pass


class NotDegenerate(BiorthoError, ValueError):
    """A basis change was requested on a singleton degeneracy class."""


class NotAPremeasurement(BiorthoError):
    """The unitary does not realise an ideal, nondisturbing premeasurement
    for the given ready state."""


class InvalidTarget(BiorthoError, ValueError):
    pass


class InvalidLattice(BiorthoError, ValueError):
    pass


class SelectionError(BiorthoError, RuntimeError):
    """Not exactly one candidate decomposition matched the calibration basis."""


class IoError(BiorthoError, OSError):
    pass


class SchemaError(BiorthoError, ValueError):
    """A model file failed validation; the message names the offending field."""


class DimensionError(SchemaError):
    pass
