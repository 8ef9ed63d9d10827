"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridMismatchError(ValueError):
    """A sampled function does not live on the grid an operator expects."""


class ParseError(ValueError):
    """Raised for malformed expression source; carries position and expectations."""

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        detail = f"{message} (at position {position}"
        if self.expected:
            detail += ", expected " + " or ".join(self.expected)
        detail += ")"
        super().__init__(detail)


class EvaluationError(ArithmeticError):
    """A real-valued evaluation left its domain (sqrt of a negative, ln of
    a non-positive, division by zero, non-finite result).

    Distinguishing this from NaN propagation lets the solver separate a bad
    model from a diverging iteration.  ``x``/``u`` hold the offending inputs
    when known; ``index`` locates the failure inside an array evaluation.
    """

    def __init__(self, message, *, x=None, u=None, index=None, detail=None):
        self.x = x
        self.u = u
        self.index = index
        self.detail = detail
        super().__init__(message)

    def with_point(self, x, u):
        self.x = x
        self.u = u
        args = self.args[0] if self.args else "evaluation failed"
        self.args = (f"{args} [at x={x!r}, u={u!r}]",)
        return self


class CertificateInconsistencyError(RuntimeError):
    """The two algebraically equivalent uniqueness tests disagreed beyond the
    floating-point tie zone; this signals an implementation bug, not bad input."""
