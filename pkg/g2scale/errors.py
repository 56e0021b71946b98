class G2ScaleError(Exception):
    """Base class for every error raised by the package."""


class ScalarDivisionError(G2ScaleError, ZeroDivisionError):
    pass


class DegreeError(G2ScaleError):
    pass


class SingularMetricError(G2ScaleError):
    pass


class DegenerateFormError(G2ScaleError):
    pass


class NormalizationError(G2ScaleError):
    pass


class ConstraintError(G2ScaleError):
    pass


class RecoveryError(G2ScaleError):
    def __init__(self, message, residual=None, branch=None):
        super().__init__(message)
        self.residual = residual
        self.branch = branch


class ClassificationError(G2ScaleError):
    pass


class JetOrderError(G2ScaleError):
    pass


class KillingError(G2ScaleError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExpressionError(G2ScaleError):
    pass


class ConfigError(G2ScaleError):
    pass


class InputError(G2ScaleError):
    # field names the offending input (file key, flag, json path)
    def __init__(self, message, field=None):
        super().__init__(message if field is None else "{}: {}".format(field, message))
        self.field = field
