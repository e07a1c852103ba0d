"""Exception hierarchy shared by every aimkit module."""

from typing import Any, List, Optional, Tuple


class AimError(Exception):
    """Base class for all aimkit failures."""


class ExpressionError(AimError, ValueError):
    """Problem-input expression could not be turned into a rational function."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DegenerateLadderError(AimError, ArithmeticError):
    """lambda_{n-1} vanished identically, so alpha_n and Delta_n do not exist."""


class DegreeBoundExceeded(AimError, ArithmeticError):
    """A ladder rung grew past the configured polynomial degree bound."""

    def __init__(self, n: int, degree: int, bound: int):
        self.n = n
        self.degree = degree
        self.bound = bound
        super().__init__(
            f"ladder rung {n} reached degree {degree}, above the bound {bound}"
        )


class PoleCollisionError(AimError, ArithmeticError):
    """The sampling point kept landing on a pole after every allowed shift."""


class RootFindingError(AimError, ArithmeticError):
    """Simultaneous root iteration failed to converge at the requested precision."""


class QuadratureError(AimError, ArithmeticError):
    """Adaptive quadrature did not reach its error target."""


class PoleOnPathError(AimError, ArithmeticError):
    """A pole of alpha_n lies on the integration path."""


class OscillationSingularity(AimError, ArithmeticError):
    """The equal-moduli closed form for alpha_{n+1} has a vanishing denominator."""


class MissingEntriesError(AimError, ValueError):
    """A diagnostic series does not reach the requested index."""


class PrecisionExhausted(AimError, ArithmeticError):
    """Cancellation left fewer significant bits than the working precision allows."""

    def __init__(self, value: Any, bits_left: float, prec: int):
        self.value = value
        self.bits_left = bits_left
        self.prec = prec
        super().__init__(
            f"only {bits_left:.1f} significant bits left at {prec}-bit precision; raise prec"
        )


class BracketNotFoundError(AimError, ValueError):
    """No sign change isolates the requested level."""


class StabilizationError(AimError, ArithmeticError):
    """Successive eigenvalue estimates never agreed to the requested digits."""

    def __init__(self, message: str, trace: Optional[List[Tuple[int, Any]]] = None):
        self.trace = list(trace or [])
        super().__init__(message)
