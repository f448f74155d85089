"""Exception hierarchy shared by all solver stages."""


class MixtypeError(Exception):
    """Base class for every error raised by the package."""


class SigmaInvalid(MixtypeError, ValueError):
    """Coupling coefficients outside the admissible set."""

    def __init__(self, name: str, value: float, reason: str):
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"{name}={value!r} is not admissible: {reason}")


class CurveInvalid(MixtypeError, ValueError):
    """A bounding curve violates one of its standing assumptions."""


class NonMonotone(CurveInvalid):
    """t - g(t) or t + g(t) fails to increase strictly on the sample grid."""


class NoIntersection(MixtypeError):
    """Root finding could not bracket a curve/characteristic intersection."""


class ParseError(MixtypeError, ValueError):
    """Malformed source expression; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.message = message
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class DomainError(MixtypeError, ValueError):
    """Evaluation outside the closure of the mixed domain, or of a partial function."""


class OutOfRegion(MixtypeError, ValueError):
    """Point lies outside the region a representation formula is valid on."""


class InvalidTime(MixtypeError, ValueError):
    """Kernel evaluated with y1 >= y."""


class StepSingular(MixtypeError):
    """A 2x2 step matrix of the Volterra march is numerically singular."""


class ConfigError(MixtypeError, ValueError):
    """Bad run configuration; ``key`` is the dotted key path at fault."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
