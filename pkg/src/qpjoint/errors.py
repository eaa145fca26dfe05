"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so batch runs can
report failures without parsing messages.
"""


class QPJointError(Exception):
    code = "error"

    def __init__(self, message, *, module=None):
        super().__init__(message)
        self.module = module

    def to_dict(self):
        return {"code": self.code, "module": self.module, "message": str(self)}


class InvalidDimension(QPJointError, ValueError):
    code = "invalid-dimension"


class UnstableEvaluation(QPJointError, ArithmeticError):
    code = "unstable-evaluation"


class TruncationTooSmall(QPJointError, ValueError):
    code = "truncation-too-small"


class InvalidMixture(QPJointError, ValueError):
    code = "invalid-mixture"


class InvalidState(QPJointError, ValueError):
    code = "invalid-state"


class GridTooSmall(QPJointError, ValueError):
    code = "grid-too-small"


class MomentsUnreliable(QPJointError, ValueError):
    code = "moments-unreliable"


class InvalidGeometry(QPJointError, ValueError):
    code = "invalid-geometry"


class TruncationError(QPJointError, ArithmeticError):
    code = "truncation-error"


class ConditionViolated(QPJointError, ValueError):
    code = "condition-violated"


class NumericsInconsistent(QPJointError, ArithmeticError):
    code = "numerics-inconsistent"


class InsufficientData(QPJointError, ValueError):
    code = "insufficient-data"


class InvalidInput(QPJointError, ValueError):
    code = "invalid-input"


class ConfigError(QPJointError, ValueError):
    code = "config-error"
