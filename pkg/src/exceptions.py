"""Error types raised by nilplab.

Input problems subclass ValueError so callers that only know the builtin
hierarchy still catch them; identities that fail after a computation raise
InvariantViolation, which the CLI reports with its own exit code.
"""

from typing import Any, Iterable, Optional, Tuple


class NilplabError(Exception):
    """Base class for all nilplab errors."""


class FieldMismatchError(NilplabError, ValueError):
    """Operands live over different fields."""


class DimensionMismatchError(NilplabError, ValueError):
    """Shapes, indices or parents are incompatible."""


class DimensionLimitError(NilplabError, ValueError):
    """An algebra would exceed the configured dimension cap."""

    def __init__(self, dim: int, limit: int):
        super().__init__(f"dimension {dim} exceeds NILPLAB_MAX_DIM={limit}")
        self.dim = dim
        self.limit = limit


class NotInvertibleError(NilplabError, ZeroDivisionError):
    """Zero scalar or singular matrix passed to an inversion."""


class NotQuasiinvertibleError(NotInvertibleError):
    """1 + u is singular, so u has no quasiinverse."""

    def __init__(self, determinant: Any = 0):
        super().__init__(f"operator is not quasiinvertible: det(1 + u) = {determinant}")
        self.determinant = determinant


class NotAnIdealError(NilplabError, ValueError):
    """A subspace is not closed under multiplication by the algebra."""

    def __init__(self, message: str, witness: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.witness = witness


class NotMultiplicativeError(NilplabError, ValueError):
    """A linear map fails h(e_i e_j) = h(e_i) h(e_j)."""

    def __init__(self, i: int, j: int):
        super().__init__(f"map is not multiplicative on basis pair ({i}, {j})")
        self.witness = (i, j)


class NotSurjectiveError(NilplabError, ValueError):
    """A homomorphism is required to be onto."""


class NotNilpotentError(NilplabError, ValueError):
    """An operator required to be nilpotent is not."""


class PresentationMismatchError(NilplabError, ValueError):
    """Truncated algebras with different alphabets or relations."""


class UnknownScenarioError(NilplabError, KeyError):
    """Requested scenario is not registered."""

    def __init__(self, name: str, registered: Iterable[str]):
        self.name = name
        self.registered = sorted(registered)
        super().__init__(
            f"unknown scenario {name!r}; registered: {', '.join(self.registered)}"
        )

    def __str__(self) -> str:
        return self.args[0]


class NotInOperatorAlgebraError(NilplabError, ValueError):
    """An operator required to lie in a multiplication algebra does not."""


class InvariantViolation(NilplabError, AssertionError):
    """A computed result contradicts an identity that must hold."""
