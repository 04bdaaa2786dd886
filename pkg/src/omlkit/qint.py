"""Exact arithmetic in the ring Z[sqrt(D)] for square-free D."""

from __future__ import annotations

from dataclasses import dataclass


def is_square_free(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True, order=True)
class QuadraticInteger:
    """The value ``a + b*sqrt(D)``.

    ``D == 1`` is the plain-integer case; there ``b`` is always folded into
    ``a`` so that equal integers compare equal.
    """

    a: int
    b: int = 0
    D: int = 1

    def __post_init__(self):
        if not is_square_free(self.D):
            raise ValueError(f"radicand {self.D} is not a square-free positive integer")
        if self.D == 1 and self.b:
            object.__setattr__(self, "a", self.a + self.b)
            object.__setattr__(self, "b", 0)

    def _coerce(self, other) -> QuadraticInteger:
        if isinstance(other, int):
            return QuadraticInteger(other, 0, self.D)
        if isinstance(other, QuadraticInteger):
            if other.D != self.D and other.b and self.b:
                raise ValueError(f"mixed radicands {self.D} and {other.D}")
            return other
        return NotImplemented

    def _radicand(self, other: QuadraticInteger) -> int:
        # plain integers (b == 0) carry D only nominally
        if self.b:
            return self.D
        if other.b:
            return other.D
        return max(self.D, other.D)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticInteger(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticInteger(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self._radicand(o)
        return QuadraticInteger(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if not isinstance(other, QuadraticInteger):
            return NotImplemented
        if self.b == 0 and other.b == 0:
            return self.a == other.a
        return (self.a, self.b, self.D) == (other.a, other.b, other.D)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        coef = "" if abs(self.b) == 1 else f"{abs(self.b)}*"
        root = f"{coef}rt"
        if self.a == 0:
            return root if self.b > 0 else f"-{root}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{root}"
