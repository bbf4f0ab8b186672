"""conflab: exact curvature verification and geodesic/quotient toolkit."""

from .exact import ExactScalar, Polynomial, RationalFunction, parse_polynomial

__version__ = "0.1.0"

__all__ = [
    "ExactScalar",
    "Polynomial",
    "RationalFunction",
    "parse_polynomial",
    "__version__",
]
