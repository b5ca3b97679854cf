"""Exception hierarchy shared by all modules."""


class JKDError(Exception):
    """Base class for every error raised by jkdpoles."""


class SingularMatrix(JKDError):
    pass


class NotHermitian(JKDError):
    pass


class NotPositiveDefinite(JKDError):
    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateLeadingCoefficient(JKDError):
    pass


class BranchCutEvaluation(JKDError):
    pass


class DegenerateModulus(JKDError):
    pass


class InvalidRange(JKDError):
    pass


class DuplicateNode(JKDError):
    pass


class RepeatedPole(JKDError):
    pass


class ComplexPole(JKDError):
    pass


class UnknownMaterial(JKDError):
    pass


class SchemaMismatch(JKDError):
    pass


class ParseError(JKDError):
    pass
