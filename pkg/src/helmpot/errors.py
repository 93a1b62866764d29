"""Exception types shared across the package."""


class HelmpotError(Exception):
    """Base class for all package-specific errors."""


class OverflowSignal(HelmpotError, ArithmeticError):
    """A quantity left the representable double range.

    Raised e.g. by the Faddeeva reflection for large negative imaginary
    parts, or by the double-exponential substitution outside its usable
    window.  Callers are expected to switch branch or truncate.
    """


class NonFiniteError(HelmpotError, ArithmeticError):
    """A NaN or infinity appeared where the algorithm guarantees finiteness.

    Carries enough context (quadrature node, rank term, dimension) to
    locate the offending factor; silent NaN propagation is never allowed.
    """

    def __init__(self, message, *, u=None, factor=None, dimension=None):
        super().__init__(message)
        self.u = u
        self.factor = factor
        self.dimension = dimension


class TruncationFailure(HelmpotError):
    """Quadrature truncation search exhausted ``max_nodes`` before the
    integrand envelope dropped below the threshold."""
