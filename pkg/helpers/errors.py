"""Error types raised by the mixmult helpers.

Every error carries a stable ``code`` that ends up in the JSON report, so a
problem file can say ``expect_error=HypothesisFailed`` and be checked.
"""


class MixmultError(Exception):
    code = "MixmultError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class RingMismatch(MixmultError):
    code = "RingMismatch"


class NonHomogeneous(MixmultError):
    code = "NonHomogeneous"


class WrongDegree(MixmultError):
    code = "WrongDegree"


class TypeTooSmall(MixmultError):
    code = "TypeTooSmall"


class NonIntegralMultiplicity(MixmultError):
    code = "NonIntegralMultiplicity"


class NotMMSystem(MixmultError):
    code = "NotMMSystem"


class GenericityExhausted(MixmultError):
    code = "GenericityExhausted"


class DimDropFails(MixmultError):
    code = "DimDropFails"


class HypothesisFailed(MixmultError):
    code = "HypothesisFailed"


class InfiniteLength(MixmultError):
    code = "InfiniteLength"


class StabilizationUncertain(MixmultError):
    code = "StabilizationUncertain"


class NotSuperficialSequence(MixmultError):
    code = "NotSuperficialSequence"


class ZeroLeadingForm(MixmultError):
    code = "ZeroLeadingForm"


class NotPrimary(MixmultError):
    code = "NotPrimary"


class PreconditionFailed(MixmultError):
    code = "PreconditionFailed"


class InternalInconsistency(MixmultError):
    code = "InternalInconsistency"


class ConfigError(MixmultError):
    code = "ConfigError"


class ParseError(MixmultError):
    code = "ParseError"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "column": self.column}
