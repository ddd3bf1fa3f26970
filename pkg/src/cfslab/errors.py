"""Exception hierarchy shared by the library and the command line driver."""


class CfslabError(Exception):
    """Base class for all errors raised by :mod:`cfslab`."""

    exit_code = 1


class InvalidArgument(CfslabError, ValueError):
    """Input outside the admissible domain (non-finite, wrong shape, bad config)."""

    exit_code = 2


class NumericalFailure(CfslabError, ArithmeticError):
    """A quadrature or linear solve did not reach its tolerance."""

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DegenerateFamily(NumericalFailure):
    """A family of solutions is (numerically) linearly dependent."""


class NonApproximatingSet(NumericalFailure):
    """Overlap matrix between a hole basis and its smooth approximants is singular."""
