"""Exception hierarchy shared by all modules."""


class KempfNessError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(KempfNessError, ValueError):
    pass


class EigFailure(KempfNessError, ArithmeticError):
    pass


class Overflow(KempfNessError, ArithmeticError):
    pass


class Singular(KempfNessError, ArithmeticError):
    """Group element too ill-conditioned to decompose reliably."""


class DegenerateFiltration(KempfNessError, ArithmeticError):
    """Subspace dimensions disagree with the eigenvalue multiplicities.

    Raised when a rank decision made at the configured tolerance
    contradicts a dimension count that holds exactly in theory.
    """


class ConnectFailure(KempfNessError, ArithmeticError):
    pass


class SpectrumMismatch(KempfNessError, ValueError):
    pass


class BoundViolated(KempfNessError, AssertionError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class QuadratureFailure(KempfNessError, ArithmeticError):
    pass


class Inconclusive(KempfNessError, ArithmeticError):
    pass


class PreconditionUnmet(KempfNessError, ValueError):
    pass


class NotATorusScene(KempfNessError, ValueError):
    pass


class StepFailure(KempfNessError, ArithmeticError):
    pass


class BudgetExhausted(KempfNessError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ParseError(KempfNessError, ValueError):
    pass


class ValidationError(KempfNessError, ValueError):
    pass
