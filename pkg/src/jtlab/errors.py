"""Exception hierarchy.

``ValidationError`` signals bad input (CLI exit code 2); ``InconsistencyError``
signals that two independent computations of the same quantity disagreed,
which points at a bug rather than at the data (CLI exit code 1).
"""


class JtlabError(Exception):
    pass


class ValidationError(JtlabError, ValueError):
    pass


class FactorMismatchError(ValidationError):
    pass


class NotTripotentError(ValidationError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"not a tripotent: residual {residual:.3e} > {tol:.3e}")
        self.residual = residual
        self.tol = tol


class NotInvertibleError(JtlabError, ArithmeticError):
    pass


class InconsistencyError(JtlabError, RuntimeError):
    pass
