"""Certified evaluation of the Airy function Ai, its derivative, and the
quotients built from them.

Ai is computed from its Maclaurin expansion: with

    f(x)  = sum x^{3k}   * prod_{j<=k} 1/((3j)(3j-1))
    g(x)  = sum x^{3k+1} * prod_{j<=k} 1/((3j)(3j+1))

both entire solutions of y'' = x y, we have  Ai = alpha*f - beta*g  and
Ai' = alpha*f' - beta*g'  with the exact prefactors

    alpha = 3^{-2/3} / Gamma(2/3),    beta = 3^{-1/3} / Gamma(1/3).

All sums are accumulated in interval arithmetic; after the term ratio drops
below 1/2 the remaining tail is dominated by a geometric series and bounded
by the magnitude of the last term, which is added to the enclosure.  For
negative arguments the two series cancel almost completely (the partial sums
grow like e^{(2/3)|x|^{3/2}} while Ai stays bounded), so the working
precision is padded by about 1.93*|x|^{3/2} bits before summing.  Arguments
are limited to |x| <= 64; beyond that the padding would dwarf any requested
precision and a dedicated asymptotic expansion would be the right tool.

The module also locates the largest zero a1 of Ai (all zeros are negative)
and provides the quotients

    psi(x) = Ai'(a1 + x) / Ai(a1 + x),      phi(x) = x * psi(x),

which drive the inductive bound certificates: both are strictly decreasing
on x > 0, phi(0) = 1 by l'Hospital, and psi changes sign exactly once, at
x0 = a1' - a1 = 1.3193... where a1' is the largest zero of Ai'.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2

from .errors import DomainError, PrecisionError
from .intervals import Interval, IntervalContext

__all__ = [
    "AIRY_ARGUMENT_CAP",
    "airy_ai",
    "airy_ai_prime",
    "airy_root_a1",
    "phi",
    "psi",
    "psi_root_x0",
]

#: Largest |x| accepted by the series evaluator.  At the cap the
#: cancellation padding alone is ~990 bits, which is still cheap; the cap
#: exists because the padding grows like |x|^{3/2} and silently swallowing
#: ever larger arguments would hide an inappropriate use of the expansion.
AIRY_ARGUMENT_CAP = 64

_ESCALATION_STEP = 64
_MAX_ESCALATIONS = 6

ArgLike = Union[int, Fraction, Interval]


def _pad_bits(x_mag) -> int:
    """Extra working bits to absorb cancellation at argument magnitude x.

    For x > 0 the partial sums of f, g grow like e^{(2/3)x^{3/2}} while
    Ai(x) decays like e^{-(2/3)x^{3/2}}, so forming alpha*f - beta*g
    cancels about (4/3)x^{3/2}/ln 2 = 1.93 x^{3/2} bits; negative
    arguments cancel about half that, but the uniform bound is cheap.
    """
    m = abs(float(x_mag))
    return int(1.94 * m ** 1.5)


def _accumulate_series(x3: Interval, first: Interval, start_k: int,
                       ratio_den, ctx: IntervalContext) -> Interval:
    """Sum t_0 + t_1 + ... with t_k = t_{k-1} * x^3 / ratio_den(k).

    ratio_den(k) may return a Fraction; the per-step ratio magnitude
    |x^3|/ratio_den(k) must be decreasing in k (true for all four series
    used here), so once it is rigorously <= 1/2 the remaining tail is
    geometrically dominated by the last term, which is added outward.

    The loop works on raw endpoints with locally bound context methods:
    this is the innermost hot path of every certification run.  The
    stopping threshold may be computed sloppily (any stopping point yields
    a valid enclosure; only the ratio check and the endpoint arithmetic
    must be exact), but the final width feeds the caller's tightness test.
    """
    down_mul, up_mul = ctx.down.mul, ctx.up.mul
    down_div, up_div = ctx.down.div, ctx.up.div
    down_add, up_add = ctx.down.add, ctx.up.add
    down_sub = ctx.down.sub
    x3lo, x3hi = x3.lo, x3.hi
    x3_pos = x3lo >= 0
    x3_neg = x3hi <= 0
    x3_mag2 = gmpy2.mul_2exp(x3.mag(), 1)  # exact 2*|x^3|
    x3_mag2q = gmpy2.mpq(x3_mag2)
    tiny = gmpy2.mpfr(2) ** (-(ctx.prec + 8))
    t_lo, t_hi = first.lo, first.hi
    s_lo, s_hi = t_lo, t_hi
    k = start_k
    budget = 64 + 8 * ctx.prec
    while True:
        k += 1
        den = ratio_den(k)
        # term *= x^3, sign-cased Moore multiplication
        if x3_pos:
            if t_lo >= 0:
                nlo, nhi = down_mul(t_lo, x3lo), up_mul(t_hi, x3hi)
            elif t_hi <= 0:
                nlo, nhi = down_mul(t_lo, x3hi), up_mul(t_hi, x3lo)
            else:
                nlo, nhi = down_mul(t_lo, x3hi), up_mul(t_hi, x3hi)
        elif x3_neg:
            if t_lo >= 0:
                nlo, nhi = down_mul(t_hi, x3lo), up_mul(t_lo, x3hi)
            elif t_hi <= 0:
                nlo, nhi = down_mul(t_hi, x3hi), up_mul(t_lo, x3lo)
            else:
                nlo, nhi = down_mul(t_hi, x3lo), up_mul(t_lo, x3lo)
        else:
            nlo = min(down_mul(t_lo, x3lo), down_mul(t_lo, x3hi),
                      down_mul(t_hi, x3lo), down_mul(t_hi, x3hi))
            nhi = max(up_mul(t_lo, x3lo), up_mul(t_lo, x3hi),
                      up_mul(t_hi, x3lo), up_mul(t_hi, x3hi))
        # term /= den, a positive exact rational
        if isinstance(den, Fraction):
            dn, dd = den.numerator, den.denominator
            t_lo = down_div(down_mul(nlo, dd), dn)
            t_hi = up_div(up_mul(nhi, dd), dn)
            ratio_small = x3_mag2q * dd <= dn
        else:
            t_lo, t_hi = down_div(nlo, den), up_div(nhi, den)
            ratio_small = x3_mag2 <= den
        s_lo, s_hi = down_add(s_lo, t_lo), up_add(s_hi, t_hi)
        if ratio_small:
            t_mag = max(abs(t_lo), abs(t_hi))
            if t_mag <= tiny * max(abs(s_lo), abs(s_hi), 1):
                return Interval(down_sub(s_lo, t_mag), up_add(s_hi, t_mag))
        if k > budget:
            raise PrecisionError(
                "series failed to converge within the term budget"
            )


def _series_sums(x: Interval, ctx: IntervalContext, *, values: bool,
                 derivatives: bool):
    """Enclosures of ((f, g), (f', g')) at x; unrequested halves are None."""
    one = ctx.one()
    x2 = ctx.mul(x, x)
    x3 = ctx.mul(x2, x)
    fg = fpgp = None
    if values:
        f = _accumulate_series(x3, one, 0, lambda k: (3 * k) * (3 * k - 1), ctx)
        g = _accumulate_series(x3, x, 0, lambda k: (3 * k) * (3 * k + 1), ctx)
        fg = (f, g)
    if derivatives:
        fp = _accumulate_series(
            x3,
            ctx.div(x2, ctx.exact(2)),
            1,
            lambda k: Fraction((k - 1) * (3 * k) * (3 * k - 1), k),
            ctx,
        )
        gp = _accumulate_series(x3, one, 0, lambda k: (3 * k) * (3 * k - 2), ctx)
        fpgp = (fp, gp)
    return fg, fpgp


@lru_cache(maxsize=32)
def _prefactors(prec: int) -> tuple[Interval, Interval]:
    """Enclosures of alpha = 3^{-2/3}/Gamma(2/3), beta = 3^{-1/3}/Gamma(1/3)."""
    ctx = IntervalContext(prec)
    alpha = ctx.div(
        ctx.one(),
        ctx.mul(ctx.cbrt(ctx.exact(9)), ctx.gamma_at(Fraction(2, 3))),
    )
    beta = ctx.div(
        ctx.one(),
        ctx.mul(ctx.cbrt(ctx.exact(3)), ctx.gamma_at(Fraction(1, 3))),
    )
    return alpha, beta


def _coerce_argument(x: ArgLike, ctx: IntervalContext) -> Interval:
    if not isinstance(x, Interval):
        x = ctx.exact(x)
    if x.mag() > AIRY_ARGUMENT_CAP:
        raise DomainError(
            f"Airy argument magnitude exceeds {AIRY_ARGUMENT_CAP}: {x}"
        )
    return x


def _round_out(v: Interval, out: IntervalContext) -> Interval:
    zero = gmpy2.mpfr(0)
    return Interval(out.down.add(zero, v.lo), out.up.add(zero, v.hi))


def _airy_once(x: ArgLike, prec: int, wp: int, *, values: bool,
               derivatives: bool):
    ctx = IntervalContext(wp)
    xi = _coerce_argument(x, ctx)
    fg, fpgp = _series_sums(xi, ctx, values=values, derivatives=derivatives)
    alpha, beta = _prefactors(wp)
    out = IntervalContext(prec)
    ai = aip = None
    if fg is not None:
        f, g = fg
        ai = _round_out(ctx.sub(ctx.mul(alpha, f), ctx.mul(beta, g)), out)
    if fpgp is not None:
        fp, gp = fpgp
        aip = _round_out(ctx.sub(ctx.mul(alpha, fp), ctx.mul(beta, gp)), out)
    return ai, aip


def _tight_enough(v: Interval, prec: int) -> bool:
    w = v.width()
    if w <= gmpy2.mpfr(2) ** (-prec):
        return True
    return w <= gmpy2.mpfr(2) ** (1 - prec) * v.mag()


def _airy_eval(x: ArgLike, prec: int, *, values: bool, derivatives: bool):
    """Evaluate Ai and/or Ai' with escalation for point inputs.

    For exact arguments (int, Fraction, or a zero-width interval) the
    working precision is escalated until each requested enclosure is
    correct to a relative 2^(1-prec) (or an absolute 2^-prec when the
    value sits at zero); a PrecisionError reports failure to get there.
    For genuine interval arguments one evaluation is performed and the
    (always valid) enclosure is returned as-is, since its width is
    dominated by the input's.
    """
    point_input = not isinstance(x, Interval) or x.lo == x.hi
    pad_probe = _coerce_argument(x, IntervalContext(64))
    # quantize the padding so the Gamma-prefactor cache is hit across many
    # nearby arguments
    pad = _pad_bits(pad_probe.mag())
    wp = prec + 64 + 32 * ((pad + 31) // 32)
    for _ in range(_MAX_ESCALATIONS):
        ai, aip = _airy_once(x, prec, wp, values=values,
                             derivatives=derivatives)
        if not point_input or all(
            _tight_enough(v, prec) for v in (ai, aip) if v is not None
        ):
            return ai, aip
        wp += _ESCALATION_STEP
    raise PrecisionError(
        f"Airy enclosure at {x!r} still too wide after "
        f"{_MAX_ESCALATIONS} precision escalations"
    )


def airy_pair(x: ArgLike, prec: int = 128) -> tuple[Interval, Interval]:
    """Enclosures of (Ai(x), Ai'(x)); see _airy_eval for the contract."""
    return _airy_eval(x, prec, values=True, derivatives=True)


def airy_ai(x: ArgLike, prec: int = 128) -> Interval:
    """Enclosure of Ai(x), skipping the derivative series."""
    return _airy_eval(x, prec, values=True, derivatives=False)[0]


def airy_ai_prime(x: ArgLike, prec: int = 128) -> Interval:
    """Enclosure of Ai'(x), skipping the value series."""
    return _airy_eval(x, prec, values=False, derivatives=True)[1]


def _bisect_sign_change(fn, lo: Fraction, hi: Fraction, prec: int) -> Interval:
    """Shrink [lo, hi] to width 2^(4-prec) around a decreasing-to-* sign
    change of fn, where fn(q) returns an interval of certain sign for exact
    rational q.  fn(lo) must be negative-side and fn(hi) positive-side or
    vice versa; the orientation is read off the endpoints.
    """
    ctx = IntervalContext(prec)
    v_lo = fn(lo)
    v_hi = fn(hi)
    if v_lo.contains_zero() or v_hi.contains_zero():
        raise PrecisionError("bisection bracket endpoints are inconclusive")
    if v_lo.is_negative() == v_hi.is_negative():
        raise DomainError("bisection bracket does not straddle a sign change")
    lo_negative = v_lo.is_negative()
    target = Fraction(1, 2 ** (prec - 4))
    while hi - lo > target:
        mid = (lo + hi) / 2
        v = fn(mid)
        if v.contains_zero():
            # the midpoint landed essentially on the root; nudge it
            mid = lo + (hi - lo) * Fraction(5, 11)
            v = fn(mid)
            if v.contains_zero():
                raise PrecisionError(
                    "bisection cannot classify the midpoint sign"
                )
        if v.is_negative() == lo_negative:
            lo = mid
        else:
            hi = mid
    return Interval(ctx.exact(lo).lo, ctx.exact(hi).hi)


@lru_cache(maxsize=8)
def airy_root_a1(prec: int = 128) -> Interval:
    """Enclosure of the largest (least-magnitude, negative) zero of Ai.

    Ai is positive on (a1, infinity) and negative just left of a1, with
    Ai(-2.4) < 0 < Ai(-2.3); bisection on that bracket converges to
    a1 = -2.33810741...  The returned interval has width <= 2^(4-prec).
    """
    eval_prec = prec + 32

    def sign_of_ai(q: Fraction) -> Interval:
        return airy_ai(q, eval_prec)

    return _bisect_sign_change(
        sign_of_ai, Fraction(-24, 10), Fraction(-23, 10), prec
    )


def _quotient_parts(x: ArgLike, prec: int) -> tuple[Interval, Interval]:
    """(Ai'(a1+x), Ai(a1+x)) with the denominator certified nonzero."""
    work = prec + 16
    for _ in range(_MAX_ESCALATIONS):
        ctx = IntervalContext(work)
        a1 = airy_root_a1(work)
        arg = ctx.add(a1, ctx.exact(x) if not isinstance(x, Interval) else x)
        den, num = airy_pair(arg, work)
        if not den.contains_zero():
            return num, den
        work += _ESCALATION_STEP
    raise PrecisionError(
        f"Ai(a1 + x) cannot be separated from zero at x = {x!r}"
    )


def psi(x: ArgLike, prec: int = 128) -> Interval:
    """Enclosure of Ai'(a1 + x) / Ai(a1 + x) for x > 0."""
    num, den = _quotient_parts(x, prec)
    return IntervalContext(prec).div(num, den)


def phi(x: ArgLike, prec: int = 128) -> Interval:
    """Enclosure of x * Ai'(a1 + x) / Ai(a1 + x), with phi(0) = 1 exactly.

    At x = 0 both Ai(a1) and the prefactor vanish; the limit value 1
    follows from l'Hospital together with Ai''(a1) = a1 * Ai(a1) = 0.
    """
    ctx = IntervalContext(prec)
    if not isinstance(x, Interval) and x == 0:
        return ctx.one()
    if isinstance(x, Interval) and x.lo == x.hi == 0:
        return ctx.one()
    num, den = _quotient_parts(x, prec)
    xi = x if isinstance(x, Interval) else ctx.exact(x)
    return ctx.div(ctx.mul(xi, num), den)


@lru_cache(maxsize=8)
def psi_root_x0(prec: int = 128) -> Interval:
    """Enclosure of the unique positive zero x0 of psi.

    Since Ai > 0 strictly right of a1, psi changes sign exactly where
    Ai'(a1 + x) does, i.e. at x0 = a1' - a1 with a1' the largest zero of
    Ai'; numerically x0 = 1.31931443881229594947...  psi is positive on
    (0, x0) and negative beyond, so bisection on [1, 3/2] applies.
    """
    eval_prec = prec + 32

    def sign_of_psi(q: Fraction) -> Interval:
        return psi(q, eval_prec)

    return _bisect_sign_change(
        sign_of_psi, Fraction(1), Fraction(3, 2), prec
    )
