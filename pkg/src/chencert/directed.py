"""Directed-rounded extended-precision reals.

Every rigorous quantity in this package is carried as a ``DirectedReal``: an
enclosing interval together with a declared rounding direction.  The interval
is maintained by mpmath's outward-rounding interval context, so arithmetic on
``DirectedReal`` values can never silently cross the true value.  The
direction decides which endpoint ``value`` reports:

* ``UP``      -> the upper endpoint (guaranteed >= the exact quantity),
* ``DOWN``    -> the lower endpoint (guaranteed <= the exact quantity),
* ``NEAREST`` -> the midpoint (no one-sided guarantee).

Directions combine the way one would expect when summing error terms: two
ups add to an up, negation flips, a mix degrades to nearest.  Soundness never
depends on the tag, only on the interval.
"""

from __future__ import annotations

import enum
from contextlib import contextmanager
from fractions import Fraction

from mpmath import iv, mp

DEFAULT_DIGITS = 50

_GUARD_BITS = 30


def digits_to_bits(digits: int) -> int:
    return int(digits * 3.3219280948873626) + _GUARD_BITS


@contextmanager
def working_precision(digits: int):
    """Run a block with both mpmath contexts at `digits` significant digits."""
    bits = digits_to_bits(digits)
    old_iv, old_mp = iv.prec, mp.prec
    iv.prec = bits
    mp.prec = bits
    try:
        yield
    finally:
        iv.prec = old_iv
        mp.prec = old_mp


def current_digits() -> int:
    return max(1, int((iv.prec - _GUARD_BITS) / 3.3219280948873626))


class Direction(enum.Enum):
    DOWN = "down"
    NEAREST = "nearest"
    UP = "up"


DOWN = Direction.DOWN
NEAREST = Direction.NEAREST
UP = Direction.UP


def _flip(d: Direction) -> Direction:
    if d is UP:
        return DOWN
    if d is DOWN:
        return UP
    return NEAREST


def _combine(a: Direction, b: Direction) -> Direction:
    return a if a is b else NEAREST


def to_ival(x):
    """Convert x to an enclosing mpmath interval.

    Decimal strings and Fractions are enclosed outward; ints and mpf are
    exact.  DirectedReal passes through its interval.
    """
    if isinstance(x, DirectedReal):
        return x.ival
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    return iv.mpf(x)


class DirectedReal:
    __slots__ = ("ival", "direction", "precision_digits")

    def __init__(self, value, direction: Direction = NEAREST,
                 precision_digits: int | None = None):
        self.ival = to_ival(value)
        self.direction = direction
        self.precision_digits = (current_digits() if precision_digits is None
                                 else precision_digits)

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_endpoints(cls, lo, hi, direction: Direction = NEAREST) -> "DirectedReal":
        return cls(iv.mpf([lo, hi]), direction)

    @classmethod
    def exact(cls, n: int, direction: Direction = NEAREST) -> "DirectedReal":
        return cls(iv.mpf(n), direction)

    @classmethod
    def pair(cls, ival) -> tuple["DirectedReal", "DirectedReal"]:
        """The (down, up) views of one enclosure."""
        return cls(ival, DOWN), cls(ival, UP)

    # ---- views ---------------------------------------------------------

    @property
    def lower(self):
        return mp.mpf(self.ival.a)

    @property
    def upper(self):
        return mp.mpf(self.ival.b)

    @property
    def mid(self):
        return (self.lower + self.upper) / 2

    @property
    def value(self):
        if self.direction is UP:
            return self.upper
        if self.direction is DOWN:
            return self.lower
        return self.mid

    @property
    def width(self):
        return self.upper - self.lower

    def directed(self, direction: Direction) -> "DirectedReal":
        return DirectedReal(self.ival, direction, self.precision_digits)

    def up(self) -> "DirectedReal":
        return self.directed(UP)

    def down(self) -> "DirectedReal":
        return self.directed(DOWN)

    # ---- arithmetic ----------------------------------------------------

    def _wrap(self, ival, direction) -> "DirectedReal":
        return DirectedReal(ival, direction, self.precision_digits)

    def __add__(self, other):
        o = _coerce(other)
        return self._wrap(self.ival + o.ival, _combine(self.direction, o.direction))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.ival, _flip(self.direction))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        return self._wrap(self.ival * o.ival, _combine(self.direction, o.direction))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        return self._wrap(self.ival / o.ival,
                          _combine(self.direction, _flip(o.direction)))

    def __rtruediv__(self, other):
        o = _coerce(other)
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers; use power() for rationals")
        return self._wrap(self.ival ** n, self.direction if n >= 0 else _flip(self.direction))

    def __abs__(self):
        lo, hi = self.lower, self.upper
        if lo >= 0:
            return self
        if hi <= 0:
            return -self
        return self._wrap(iv.mpf([0, max(-lo, hi)]), NEAREST)

    # ---- certified comparisons ------------------------------------------
    # a < b is True only when every point of a's interval is below every
    # point of b's; overlapping intervals compare False both ways.

    def __lt__(self, other):
        return self.upper < _coerce(other).lower

    def __gt__(self, other):
        return self.lower > _coerce(other).upper

    def __le__(self, other):
        return self.upper <= _coerce(other).lower

    def __ge__(self, other):
        return self.lower >= _coerce(other).upper

    def contains(self, x) -> bool:
        o = to_ival(x)
        return self.ival.a <= o.a and o.b <= self.ival.b

    def overlaps(self, other) -> bool:
        o = _coerce(other)
        return not (self.upper < o.lower or o.upper < self.lower)

    # ---- output ----------------------------------------------------------

    def decimal(self, digits: int | None = None) -> str:
        d = digits or self.precision_digits
        return mp.nstr(self.value, d, strip_zeros=False)

    def __repr__(self):
        return "DirectedReal([%s, %s], %s)" % (
            mp.nstr(self.lower, 20), mp.nstr(self.upper, 20), self.direction.value)

    def __float__(self):
        return float(self.value)


def _coerce(x) -> DirectedReal:
    if isinstance(x, DirectedReal):
        return x
    return DirectedReal(x, NEAREST)


# ---- elementary functions (enclosure in, enclosure out) -------------------

def _monotone(fn, x: DirectedReal) -> DirectedReal:
    return DirectedReal(fn(x.ival), x.direction, x.precision_digits)


def dexp(x) -> DirectedReal:
    return _monotone(iv.exp, _coerce(x))


def dlog(x) -> DirectedReal:
    return _monotone(iv.log, _coerce(x))


def dsqrt(x) -> DirectedReal:
    return _monotone(iv.sqrt, _coerce(x))


def power(x, num: int, den: int) -> DirectedReal:
    """x**(num/den) for positive x, via exp/log so huge exponents stay exact
    to working precision."""
    b = _coerce(x)
    if b.lower <= 0:
        raise ValueError("power() needs a positive base enclosure")
    frac = iv.mpf(num) / iv.mpf(den)
    return DirectedReal(iv.exp(iv.log(b.ival) * frac), b.direction, b.precision_digits)


def from_ratio(num: int, den: int, direction: Direction = NEAREST) -> DirectedReal:
    return DirectedReal(iv.mpf(num) / iv.mpf(den), direction)


def hull(*values) -> DirectedReal:
    """Smallest DirectedReal enclosure covering all arguments."""
    items = [_coerce(v) for v in values]
    lo = min(v.lower for v in items)
    hi = max(v.upper for v in items)
    return DirectedReal.from_endpoints(lo, hi)
