"""Exception hierarchy shared across the package.

Every error carries a short machine-parsable ``code`` used by the CLI to
produce stable one-line diagnostics and exit codes.
"""


class KdvBvpError(Exception):
    """Base class; ``code`` is a short stable identifier."""

    code = "error"
    exit_code = 3

    def __init__(self, message=""):
        super().__init__(message or self.code)


class ConfigError(KdvBvpError):
    code = "config-error"
    exit_code = 2


class JetTooShortError(KdvBvpError):
    code = "jet-too-short"


class NotATotalDerivativeError(KdvBvpError):
    code = "antiderivative-not-exact"


class CapExceededError(KdvBvpError):
    code = "cap-exceeded"
    exit_code = 2


class Assumption1Error(KdvBvpError):
    code = "assumption1-violated"


class NormalizationError(KdvBvpError):
    code = "normalization-violated"


class MuOutOfRangeError(KdvBvpError):
    code = "mu-out-of-range"


class EtaOutOfRangeError(KdvBvpError):
    code = "eta-out-of-range"


class GlueMismatchError(KdvBvpError):
    code = "glue-mismatch"


class PoleWeightError(KdvBvpError):
    code = "pole-weight-nonpositive"


class RootCountError(KdvBvpError):
    code = "root-count-mismatch"


class SignPatternError(KdvBvpError):
    code = "inadmissible-sign"


class RoundTripError(KdvBvpError):
    code = "roundtrip-failure"


class BracketError(KdvBvpError):
    code = "w0-out-of-bracket"


class BracketViolationError(KdvBvpError):
    code = "bracket-violation"


class PoleCollisionError(KdvBvpError):
    code = "pole-collision"


class GridError(KdvBvpError):
    code = "grid-too-coarse"
    exit_code = 2


class VerificationFailure(KdvBvpError):
    code = "verification-failed"
    exit_code = 4
