"""Exception hierarchy shared across the package."""


class QMapsError(Exception):
    """Base class for every error raised by this package."""


class PoleAtQ(QMapsError, ZeroDivisionError):
    """A rational function was evaluated at a root of its denominator."""


class UnknownPreset(QMapsError, KeyError):
    pass


class UnboundGenerator(QMapsError, KeyError):
    pass


class UnorientableRelation(QMapsError):
    pass


class RelationResidualTooLarge(QMapsError):
    def __init__(self, message, relation=None, residual=None):
        super().__init__(message)
        self.relation = relation
        self.residual = residual


class NoRootInUnitInterval(QMapsError):
    pass


class HypothesisViolated(QMapsError):
    pass


class NotSelfAdjoint(QMapsError):
    pass


class SpectrumOutOfRange(QMapsError):
    pass


class DimensionOverflow(QMapsError):
    pass


class InvalidSPoint(QMapsError):
    pass


class InvariantDrift(QMapsError):
    pass


class NonOrthogonalOutput(QMapsError):
    pass


class NotADensityMatrix(QMapsError):
    pass


class SamplerExhausted(QMapsError):
    pass


class NotUnitary(QMapsError):
    pass


class ParseError(QMapsError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownGenerator(ParseError):
    pass


class MalformedScalar(ParseError):
    pass
