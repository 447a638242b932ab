"""Exact arithmetic in Q(sqrt 5), enough to decide golden-ratio guards without rounding."""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@total_ordering
class Surd:
    """The number ``a + b*sqrt(5)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def lift(cls, x) -> "Surd":
        return x if isinstance(x, Surd) else cls(x, 0)

    def sign(self) -> int:
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 5 b^2
        return sa * _sign(self.a * self.a - 5 * self.b * self.b)

    def __add__(self, other):
        o = Surd.lift(other)
        return Surd(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-Surd.lift(other))

    def __rsub__(self, other):
        return Surd.lift(other) - self

    def __mul__(self, other):
        o = Surd.lift(other)
        return Surd(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Surd.lift(other)
        norm = o.a * o.a - 5 * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return self * Surd(o.a / norm, -o.b / norm)

    def __rtruediv__(self, other):
        return Surd.lift(other) / self

    def __eq__(self, other):
        try:
            return (self - other).sign() == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __float__(self):
        return float(self.a) + float(self.b) * 5 ** 0.5

    def __repr__(self):
        if self.b == 0:
            return f"Surd({self.a})"
        return f"Surd({self.a} + {self.b}*sqrt5)"


PHI = Surd(Fraction(1, 2), Fraction(1, 2))
INV_PHI = PHI - 1
INV_PHI_SQ = 2 - PHI   # 1/phi^2 = (3 - sqrt5)/2
PHI_SQ = PHI + 1

_NAMED = {"phi": PHI, "1/phi": INV_PHI, "1/phi^2": INV_PHI_SQ, "phi^2": PHI_SQ}


def parse_number(text: str) -> Fraction | Surd:
    """Exact number from ``phi``, ``1/phi``, ``1/phi^2``, ``phi^2``, a decimal or ``num/den``."""
    key = text.strip().lower()
    if key in _NAMED:
        return _NAMED[key]
    return Fraction(key)
