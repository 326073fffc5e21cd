"""Exception types shared across the package."""


class RclkitError(Exception):
    """Base class for every error raised by this library."""


class InvalidInput(RclkitError):
    """Malformed input: non-finite entries, wrong rank, bad parameters."""


class DimensionMismatch(RclkitError):
    """Operands have incompatible shapes or ambient dimensions."""


class NotAContraction(RclkitError):
    """Operator norm exceeds 1 beyond the allowed slack."""


class NotContractive(RclkitError):
    """A constructed interpolant fails its contractivity bound."""


class IllPosedData(RclkitError):
    """Data set violates its defining identities beyond roundoff."""


class InternalContradiction(RclkitError):
    """A mathematically guaranteed event did not occur numerically,
    usually a sign that tolerances are too loose for the instance."""


class OutOfDisc(RclkitError):
    """Evaluation point lies outside the open unit disc."""


class NotInvertible(RclkitError):
    """Constant term of a series (or a matrix) is numerically singular."""


class InvalidParameter(RclkitError):
    """A free parameter fails its contractivity constraint."""


class AuditFailure(RclkitError):
    """An exact operator identity deviates beyond tolerance.

    Carries the measured deviation so negative-control tests can assert
    its magnitude.
    """

    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = float(deviation)
