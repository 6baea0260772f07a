"""Directed-rounding interval arithmetic on top of gmpy2/MPFR.

Every operation computes its lower endpoint in a round-toward-minus context
and its upper endpoint in a round-toward-plus context, so the returned
:class:`Interval` always encloses the exact mathematical value.  Certificates
built on these intervals are conclusive: an inequality whose residual
interval lies entirely on one side of zero genuinely holds (or fails) at
that grid point, with no floating-point leap of faith.

Contexts are explicit objects (no thread-global rounding state), so
independent workers may evaluate different grid points concurrently, each
with its own :class:`IntervalContext`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2

from .errors import DomainError

__all__ = ["Interval", "IntervalContext"]

_MPFR_ZERO = gmpy2.mpfr(0)

Exactable = Union[int, Fraction, "Interval"]


def _decimal_outward(x, digits: int, *, downward: bool) -> str:
    """Decimal string guaranteed <= x (downward) or >= x (upward).

    ``mpfr.digits`` rounds its mantissa to nearest, so the true value lies
    strictly within one unit in the last place; adding/subtracting one unit
    therefore yields a certified one-sided decimal bound.
    """
    if x == 0:
        return "0"
    mantissa, exponent, _ = x.digits(10, digits)
    signed = int(mantissa)
    signed += -1 if downward else 1
    return f"{signed}e{exponent - digits}"


class Interval:
    """A closed interval ``[lo, hi]`` with mpfr endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise DomainError("interval endpoint is NaN")
        if lo > hi:
            raise DomainError(f"inverted interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- queries ------------------------------------------------------------

    def is_positive(self) -> bool:
        """True when every point of the interval is > 0."""
        return self.lo > 0

    def is_negative(self) -> bool:
        """True when every point of the interval is < 0."""
        return self.hi < 0

    def is_nonnegative(self) -> bool:
        return self.lo >= 0

    def is_nonpositive(self) -> bool:
        return self.hi <= 0

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def width(self):
        return gmpy2.context(precision=64, round=gmpy2.RoundUp).sub(
            self.hi, self.lo
        )

    def midpoint(self):
        ctx = gmpy2.context(
            precision=max(self.lo.precision, self.hi.precision) + 8
        )
        return ctx.div(ctx.add(self.lo, self.hi), 2)

    def mag(self):
        """Largest absolute value over the interval (an mpfr)."""
        return max(abs(self.lo), abs(self.hi))

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    def decimal_bounds(self, digits: int = 24) -> tuple[str, str]:
        """Outward-rounded decimal endpoint strings (for serialization).

        Endpoints are rendered as ``<signed integer>e<exponent>`` with the
        mantissa nudged one unit outward, so parsing the strings at any
        precision re-encloses the interval.  (Directed rounding inside
        mpfr's own decimal formatter would be tighter, but this build's
        ``__format__`` handling of the rounding letters is unreliable.)
        """
        return (
            _decimal_outward(self.lo, digits, downward=True),
            _decimal_outward(self.hi, digits, downward=False),
        )


class IntervalContext:
    """Factory and arithmetic engine for intervals at a fixed precision."""

    def __init__(self, prec: int):
        if prec < 16:
            raise DomainError(f"interval precision {prec} is too small")
        self.prec = int(prec)
        self.down = gmpy2.context(precision=self.prec, round=gmpy2.RoundDown)
        self.up = gmpy2.context(precision=self.prec, round=gmpy2.RoundUp)

    # -- construction ---------------------------------------------------------

    def exact(self, value: Exactable) -> Interval:
        """Tightest interval around an integer, Fraction, or mpfr value."""
        if isinstance(value, Interval):
            return value
        if isinstance(value, Fraction):
            value = gmpy2.mpq(value.numerator, value.denominator)
        # adding to an mpfr zero forces a correctly rounded mpfr conversion
        return Interval(
            self.down.add(_MPFR_ZERO, value), self.up.add(_MPFR_ZERO, value)
        )

    def zero(self) -> Interval:
        return Interval(_MPFR_ZERO, _MPFR_ZERO)

    def one(self) -> Interval:
        one = gmpy2.mpfr(1)
        return Interval(one, one)

    # -- arithmetic -----------------------------------------------------------

    def add(self, a: Exactable, b: Exactable) -> Interval:
        a, b = self.exact(a), self.exact(b)
        return Interval(self.down.add(a.lo, b.lo), self.up.add(a.hi, b.hi))

    def sub(self, a: Exactable, b: Exactable) -> Interval:
        a, b = self.exact(a), self.exact(b)
        return Interval(self.down.sub(a.lo, b.hi), self.up.sub(a.hi, b.lo))

    def neg(self, a: Exactable) -> Interval:
        a = self.exact(a)
        return Interval(-a.hi, -a.lo)

    def mul(self, a: Exactable, b: Exactable) -> Interval:
        a, b = self.exact(a), self.exact(b)
        lo = min(
            self.down.mul(a.lo, b.lo),
            self.down.mul(a.lo, b.hi),
            self.down.mul(a.hi, b.lo),
            self.down.mul(a.hi, b.hi),
        )
        hi = max(
            self.up.mul(a.lo, b.lo),
            self.up.mul(a.lo, b.hi),
            self.up.mul(a.hi, b.lo),
            self.up.mul(a.hi, b.hi),
        )
        return Interval(lo, hi)

    def div(self, a: Exactable, b: Exactable) -> Interval:
        a, b = self.exact(a), self.exact(b)
        if b.contains_zero():
            raise DomainError(f"division by interval containing zero: {b}")
        lo = min(
            self.down.div(a.lo, b.lo),
            self.down.div(a.lo, b.hi),
            self.down.div(a.hi, b.lo),
            self.down.div(a.hi, b.hi),
        )
        hi = max(
            self.up.div(a.lo, b.lo),
            self.up.div(a.lo, b.hi),
            self.up.div(a.hi, b.lo),
            self.up.div(a.hi, b.hi),
        )
        return Interval(lo, hi)

    def sqrt(self, a: Exactable) -> Interval:
        a = self.exact(a)
        if a.lo < 0:
            raise DomainError(f"square root of interval below zero: {a}")
        return Interval(self.down.sqrt(a.lo), self.up.sqrt(a.hi))

    def cbrt(self, a: Exactable) -> Interval:
        a = self.exact(a)
        return Interval(self.down.cbrt(a.lo), self.up.cbrt(a.hi))

    def rootn(self, a: Exactable, k: int) -> Interval:
        """k-th root; even k requires a nonnegative interval."""
        a = self.exact(a)
        if k % 2 == 0 and a.lo < 0:
            raise DomainError(f"even root of interval below zero: {a}")
        return Interval(self.down.rootn(a.lo, k), self.up.rootn(a.hi, k))

    def scale2(self, a: Exactable, e: int) -> Interval:
        """Multiply by the exact power ``2**e`` (no rounding error)."""
        a = self.exact(a)
        return Interval(gmpy2.mul_2exp(a.lo, e), gmpy2.mul_2exp(a.hi, e)) if e >= 0 else Interval(
            gmpy2.div_2exp(a.lo, -e), gmpy2.div_2exp(a.hi, -e)
        )

    def gamma_at(self, q: Fraction) -> Interval:
        """Enclosure of the Gamma function at an exact rational point.

        Restricted to ``0 < q < 7/5``, where Gamma is strictly decreasing
        (its minimum sits near 1.4616), so outward rounding of the argument
        maps to swapped rounding of the result.
        """
        if not 0 < q < Fraction(7, 5):
            raise DomainError(
                f"gamma enclosure only supported on (0, 7/5), got {q}"
            )
        arg = self.exact(q)
        return Interval(self.down.gamma(arg.hi), self.up.gamma(arg.lo))

    # -- aggregates -----------------------------------------------------------

    def add_many(self, terms) -> Interval:
        total = self.zero()
        for t in terms:
            total = self.add(total, t)
        return total
