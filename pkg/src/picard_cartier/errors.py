"""Exception types raised by the library.

Domain errors (bad field, degenerate or singular curve) are distinct from
usage errors so the CLI can map them to separate exit codes.
"""


class PicardError(Exception):
    """Base class for every domain error raised by this package."""


class InvalidField(PicardError, ValueError):
    """The characteristic is not a prime greater than 3."""


class DegenerateCurve(PicardError, ValueError):
    """The quartic lost its leading coefficient after reduction mod p."""


class SingularCurve(PicardError, ValueError):
    """The quartic has a repeated root over the algebraic closure."""


class OracleBoundExceeded(PicardError, ValueError):
    pass


class GenerationFailed(PicardError, RuntimeError):
    pass


class FieldMismatch(ValueError):
    """Operands live in different prime fields."""
