"""Certified grid verification of the Airy-profile bound inequalities.

The counting recurrences for relaxed and compacted trees admit sandwich
arguments: explicit profiles built from the Airy function, multiplied by
row-dependent ratio factors (drifts), stay below resp. above the true
normalized counts once the profiles themselves satisfy a one-row (relaxed)
or three-row (compacted) inequality.  This module evaluates those
inequalities cell by cell on their (n, m) grids in directed-rounding
interval arithmetic and aggregates the outcome into a certificate: a cell
passes only when the residual's interval sign is conclusive, so a PASS
verdict cannot be an artifact of rounding.

The four families:

* lower-relaxed:    X(n,m) = (1 - 2m^2/(3n) + m/(2n)) Ai(a1 + 2^{1/3}(m+1)/n^{1/3})
                    drift  s(n) = 2 + 2^{2/3} a1 n^{-2/3} + 8/(3n) - n^{-7/6}
                    claim  X(n,m) s(n) <= (n-m+2)/(n+m) X(n-1,m-1) + X(n-1,m+1)
* upper-relaxed:    profile adds + eta m^4/n^2 (any fixed eta > 2/9); drift
                    flips the n^{-7/6} sign; the claim reverses.
* lower-compacted:  profile with m/(4n); drift with 13/(6n) - n^{-7/6}; the
                    claim spans three rows with drift products
                    s(n) s(n-1) s(n-2) and reaches back to row n-3.
* upper-compacted:  + eta m^4/n^2, + n^{-7/6}, reversed three-row claim.

Grid rules: m < n^{2/3-eps} for lower families, m < n^{1-eps} for upper
ones.  Defaults are eps = 1/12 (lower) and eps = 1/3 (upper); the latter
keeps every Airy argument below ~16 on grids up to n = 2000, where the
series evaluator is fast, while still covering the region the sandwich
argument feeds on.  Profiles at m = -1 are exactly zero (their Airy factor
sits exactly at the root a1), and lower-compacted hits one singular
coefficient cell at (n, m) = (4, 2), where n - m - 2 = 0; it is reported
as a violation rather than silently skipped, and the empirical n0 moves
past it.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .airy import airy_ai, airy_root_a1
from .errors import PrecisionError, RangeError, ValidationError
from .intervals import Interval, IntervalContext

__all__ = [
    "BoundCertificate",
    "BoundFamilyParams",
    "FAMILY_IDS",
    "bound_profile",
    "check_inequality",
    "family_params",
]

FAMILY_IDS = (
    "lower-relaxed",
    "upper-relaxed",
    "lower-compacted",
    "upper-compacted",
)

_DEFAULT_EPSILON = {
    "lower": Fraction(1, 12),
    "upper": Fraction(1, 3),
}


@dataclass(frozen=True)
class BoundFamilyParams:
    """Coefficients pinning one bound family.

    tau2 and tau1 are the m^2/n and m/n profile coefficients, eta the
    m^4/n^2 coefficient of the upper families (must exceed 2/9), sigma_n
    the 1/n drift coefficient, and tail_sign the sign of the n^{-7/6}
    drift term (-1 for lower families, +1 for upper; flipping it is the
    deliberate negative control).  epsilon sets the grid margin.
    """

    family: str
    kind: str
    side: str
    tau2: Fraction
    tau1: Fraction
    eta: Optional[Fraction]
    sigma_n: Fraction
    tail_sign: int
    epsilon: Fraction

    def __post_init__(self):
        if self.kind not in ("relaxed", "compacted"):
            raise ValidationError(f"unknown kind {self.kind!r}")
        if self.side not in ("lower", "upper"):
            raise ValidationError(f"unknown side {self.side!r}")
        if self.tail_sign not in (-1, 1):
            raise ValidationError("tail_sign must be -1 or +1")
        if self.side == "upper":
            if self.eta is None or self.eta <= Fraction(2, 9):
                raise ValidationError(
                    "upper families need eta > 2/9, got "
                    f"{self.eta}"
                )
            if not 0 < self.epsilon < Fraction(1, 2):
                raise ValidationError(
                    f"upper-family epsilon out of (0, 1/2): {self.epsilon}"
                )
        else:
            if self.eta is not None:
                raise ValidationError("lower families take no eta")
            if not 0 < self.epsilon < Fraction(1, 6):
                # the grid exponent 2/3 - eps must stay above the clamp
                # exponent 1/2
                raise ValidationError(
                    f"lower-family epsilon out of (0, 1/6): {self.epsilon}"
                )

    @property
    def m_exponent(self) -> Fraction:
        if self.side == "lower":
            return Fraction(2, 3) - self.epsilon
        return 1 - self.epsilon

    def m_rule(self) -> str:
        e = self.m_exponent
        return f"m < n^({e.numerator}/{e.denominator})"

    def m_in_grid(self, n: int, m: int) -> bool:
        """Exact integer test of m < n^(m_exponent)."""
        e = self.m_exponent
        return m ** e.denominator < n ** e.numerator

    def grid_top(self, n: int) -> int:
        """One past the largest m in row n's grid."""
        m = 0
        while self.m_in_grid(n, m):
            m += 1
        return m

    def clamped_to_zero(self, n: int, m: int) -> bool:
        """Exact test of the lower families' clamp threshold.

        The clamped profile max{X, 0} vanishes exactly where the rational
        prefactor 1 + tau2 m^2/n + tau1 m/n is <= 0 (the Airy factor is
        positive for every m >= 0), i.e. at m >= (tau1 + sqrt(tau1^2 +
        4|tau2| n))/(2|tau2|); for the stock coefficients this is the
        integer test (8m-3)^2 >= 96n+9 resp. (16m-3)^2 >= 384n+9.
        """
        if self.side != "lower":
            return False
        a = -self.tau2
        lhs = (2 * a * m - self.tau1) ** 2
        return 2 * a * m >= self.tau1 and lhs >= 4 * a * n + self.tau1 ** 2


def _stock_families() -> dict:
    return {
        "lower-relaxed": BoundFamilyParams(
            family="lower-relaxed", kind="relaxed", side="lower",
            tau2=Fraction(-2, 3), tau1=Fraction(1, 2), eta=None,
            sigma_n=Fraction(8, 3), tail_sign=-1,
            epsilon=_DEFAULT_EPSILON["lower"],
        ),
        "upper-relaxed": BoundFamilyParams(
            family="upper-relaxed", kind="relaxed", side="upper",
            tau2=Fraction(-2, 3), tau1=Fraction(1, 2), eta=Fraction(1, 4),
            sigma_n=Fraction(8, 3), tail_sign=1,
            epsilon=_DEFAULT_EPSILON["upper"],
        ),
        "lower-compacted": BoundFamilyParams(
            family="lower-compacted", kind="compacted", side="lower",
            tau2=Fraction(-2, 3), tau1=Fraction(1, 4), eta=None,
            sigma_n=Fraction(13, 6), tail_sign=-1,
            epsilon=_DEFAULT_EPSILON["lower"],
        ),
        "upper-compacted": BoundFamilyParams(
            family="upper-compacted", kind="compacted", side="upper",
            tau2=Fraction(-2, 3), tau1=Fraction(1, 4), eta=Fraction(1, 4),
            sigma_n=Fraction(13, 6), tail_sign=1,
            epsilon=_DEFAULT_EPSILON["upper"],
        ),
    }


def family_params(
    family: str,
    *,
    epsilon: Optional[Fraction] = None,
    eta: Optional[Fraction] = None,
    flip_tail: bool = False,
) -> BoundFamilyParams:
    """Stock parameters for a family id, with optional overrides.

    flip_tail inverts the sign of the n^{-7/6} drift term — the
    deliberately broken negative control that must produce violations.
    """
    stock = _stock_families()
    if family not in stock:
        raise ValidationError(
            f"unknown family {family!r}; expected one of {FAMILY_IDS}"
        )
    params = stock[family]
    overrides = {}
    if epsilon is not None:
        overrides["epsilon"] = Fraction(epsilon)
    if eta is not None:
        overrides["eta"] = Fraction(eta)
    if flip_tail:
        overrides["tail_sign"] = -params.tail_sign
    if overrides:
        params = dataclasses.replace(params, **overrides)
    return params


class _SingularCoefficient(Exception):
    """A recurrence coefficient divides by zero at this cell."""


class _Evaluator:
    """Profile/drift/residual evaluation with a rolling per-row cache."""

    def __init__(self, params: BoundFamilyParams, prec: int):
        self.params = params
        self.prec = prec
        self.ctx = IntervalContext(prec)
        self.a1 = airy_root_a1(prec)
        self.cbrt2 = self.ctx.cbrt(self.ctx.exact(2))
        self.cbrt4 = self.ctx.cbrt(self.ctx.exact(4))
        self.two = self.ctx.exact(2)
        self.rows: dict[int, dict[int, Interval]] = {}
        self.cbrt_n: dict[int, Interval] = {}
        self.drifts: dict[int, Interval] = {}

    def evict_below(self, n_keep: int) -> None:
        for store in (self.rows, self.cbrt_n, self.drifts):
            for key in [k for k in store if k < n_keep]:
                del store[key]

    def profile(self, n: int, m: int) -> Interval:
        """Unclamped profile value at (n, m); m = -1 is exactly zero."""
        row = self.rows.setdefault(n, {})
        value = row.get(m)
        if value is None:
            value = self._compute_profile(n, m)
            row[m] = value
        return value

    def _compute_profile(self, n: int, m: int) -> Interval:
        if m == -1:
            # Airy argument is exactly a1: the factor Ai(a1) is exactly 0
            return self.ctx.zero()
        ctx = self.ctx
        pref = 1 + Fraction(self.params.tau2 * m * m, n) + Fraction(
            self.params.tau1 * m, n
        )
        if self.params.eta is not None:
            pref += Fraction(self.params.eta * m ** 4, n * n)
        cbrt_n = self.cbrt_n.get(n)
        if cbrt_n is None:
            cbrt_n = ctx.cbrt(ctx.exact(n))
            self.cbrt_n[n] = cbrt_n
        arg = ctx.add(
            self.a1, ctx.div(ctx.mul(self.cbrt2, ctx.exact(m + 1)), cbrt_n)
        )
        return ctx.mul(ctx.exact(pref), airy_ai(arg, self.prec))

    def drift(self, n: int) -> Interval:
        value = self.drifts.get(n)
        if value is None:
            ctx = self.ctx
            n23 = ctx.cbrt(ctx.exact(n * n))
            n76 = ctx.rootn(ctx.exact(n ** 7), 6)
            value = ctx.add_many(
                [
                    self.two,
                    ctx.div(ctx.mul(self.cbrt4, self.a1), n23),
                    ctx.exact(Fraction(self.params.sigma_n, n)),
                    ctx.div(ctx.exact(self.params.tail_sign), n76),
                ]
            )
            self.drifts[n] = value
        return value

    def residual(self, n: int, m: int) -> Interval:
        """Inequality slack at (n, m); nonnegative means the cell passes."""
        if self.params.kind == "relaxed":
            return self._residual_relaxed(n, m)
        if self.params.side == "lower":
            return self._residual_compacted_lower(n, m)
        return self._residual_compacted_upper(n, m)

    def _residual_relaxed(self, n: int, m: int) -> Interval:
        ctx = self.ctx
        lhs = ctx.mul(self.profile(n, m), self.drift(n))
        rhs = ctx.add(
            ctx.mul(
                ctx.exact(Fraction(n - m + 2, n + m)), self.profile(n - 1, m - 1)
            ),
            self.profile(n - 1, m + 1),
        )
        if self.params.side == "lower":
            return ctx.sub(rhs, lhs)
        return ctx.sub(lhs, rhs)

    def _residual_compacted_lower(self, n: int, m: int) -> Interval:
        if n - m - 2 == 0:
            raise _SingularCoefficient(
                f"coefficient (n-m-4)/(n-m-2) divides by zero at (n,m)=({n},{m})"
            )
        ctx = self.ctx
        s2 = self.drift(n - 2)
        s12 = ctx.mul(self.drift(n - 1), s2)
        lhs = ctx.mul(self.profile(n, m), ctx.mul(self.drift(n), s12))
        t1 = ctx.mul(
            ctx.exact(Fraction(n - m + 2, n + m)),
            ctx.mul(self.profile(n - 1, m - 1), s12),
        )
        t2 = ctx.mul(
            ctx.exact(Fraction(n - m - 2, n - m)),
            ctx.mul(self.profile(n - 1, m + 1), s12),
        )
        inner = ctx.add(
            ctx.mul(
                ctx.exact(Fraction(2, n - m)),
                ctx.mul(self.profile(n - 2, m + 2), s2),
            ),
            ctx.mul(ctx.exact(Fraction(2, n + m)), self.profile(n - 3, m + 1)),
        )
        t3 = ctx.mul(ctx.exact(Fraction(n - m - 4, n - m - 2)), inner)
        rhs = ctx.add(ctx.add(t1, t2), t3)
        return ctx.sub(rhs, lhs)

    def _residual_compacted_upper(self, n: int, m: int) -> Interval:
        ctx = self.ctx
        s2 = self.drift(n - 2)
        s12 = ctx.mul(self.drift(n - 1), s2)
        lhs = ctx.mul(self.profile(n, m), ctx.mul(self.drift(n), s12))
        rhs = ctx.add_many(
            [
                ctx.mul(
                    ctx.exact(Fraction(n - m + 2, n + m)),
                    ctx.mul(self.profile(n - 1, m - 1), s12),
                ),
                ctx.mul(
                    ctx.exact(Fraction(n - m - 2, n - m)),
                    ctx.mul(self.profile(n - 1, m + 1), s12),
                ),
                ctx.mul(
                    ctx.exact(Fraction(2, n - m)),
                    ctx.mul(self.profile(n - 2, m + 2), s2),
                ),
                ctx.mul(
                    ctx.exact(Fraction(2, n + m)), self.profile(n - 3, m + 1)
                ),
                ctx.mul(
                    ctx.exact(Fraction(4, (n + m) * (n + m - 2))),
                    self.profile(n - 3, m - 1),
                ),
            ]
        )
        return ctx.sub(lhs, rhs)


def bound_profile(
    family: Union[str, BoundFamilyParams], n: int, m: int, prec: int = 128
) -> Interval:
    """Profile value at (n, m), clamped to zero for the lower families.

    The lower-family profiles enter the sandwich argument as max{X, 0};
    the clamp is decided by the exact rational threshold test, never by
    the sign of an interval.
    """
    params = family if isinstance(family, BoundFamilyParams) else family_params(family)
    if n < 1:
        raise RangeError(f"profile needs n >= 1, got {n}")
    if m < 0:
        raise RangeError(f"profile needs m >= 0, got {m}")
    evaluator = _Evaluator(params, prec)
    if params.clamped_to_zero(n, m):
        return evaluator.ctx.zero()
    return evaluator.profile(n, m)


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of a grid inequality check; PASS only with conclusive signs."""

    params: BoundFamilyParams
    n_min: int
    n_max: int
    precision: int
    checked_cells: int
    n0: Optional[int]
    violations: tuple
    min_residual: Optional[dict]
    negative_control: bool

    @property
    def family(self) -> str:
        return self.params.family

    @property
    def verdict(self) -> str:
        return "PASS" if self.n0 is not None else "FAIL"

    def summary_line(self) -> str:
        extra = " [negative control]" if self.negative_control else ""
        if self.n0 is not None:
            detail = f"n0={self.n0}"
        else:
            detail = f"{len(self.violations)} violation(s) up to n_max"
        return (
            f"{self.family}{extra}: {self.verdict} "
            f"({self.params.m_rule()}, n in [{self.n_min}, {self.n_max}], "
            f"{self.precision} bits, {self.checked_cells} cells, {detail})"
        )

    def to_dict(self) -> dict:
        p = self.params
        return {
            "family": p.family,
            "kind": p.kind,
            "side": p.side,
            "parameters": {
                "tau2": str(p.tau2),
                "tau1": str(p.tau1),
                "eta": None if p.eta is None else str(p.eta),
                "sigma_n": str(p.sigma_n),
                "tail_sign": p.tail_sign,
                "epsilon": str(p.epsilon),
            },
            "m_rule": p.m_rule(),
            "n_range": [self.n_min, self.n_max],
            "precision_bits": self.precision,
            "checked_cells": self.checked_cells,
            "n0": self.n0,
            "min_residual": self.min_residual,
            "violations": list(self.violations),
            "negative_control": self.negative_control,
            "verdict": self.verdict,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _residual_fresh(
    params: BoundFamilyParams, n: int, m: int, prec: int
) -> Interval:
    return _Evaluator(params, prec).residual(n, m)


def check_inequality(
    family: Union[str, BoundFamilyParams],
    n_min: int = 4,
    n_max: int = 400,
    prec: int = 192,
    *,
    negative_control: bool = False,
    progress: Optional[Callable[[int], None]] = None,
) -> BoundCertificate:
    """Check one family's inequality over its full grid in [n_min, n_max].

    Every cell's residual is evaluated in interval arithmetic: a cell
    passes when the residual's lower endpoint is >= 0 (exact zero arises
    only from exact-zero profile factors), fails when its upper endpoint
    is < 0, and is otherwise re-evaluated at higher precision until the
    sign is conclusive (PrecisionError after +128 bits).  The certificate
    reports the first n0 from which every later row is violation-free;
    verdict is PASS exactly when such an n0 exists.
    """
    params = family if isinstance(family, BoundFamilyParams) else family_params(family)
    if negative_control:
        params = dataclasses.replace(params, tail_sign=-params.tail_sign)
    if n_min < 4:
        raise RangeError(
            f"n_min must be >= 4 (deepest recurrence reaches n-3), got {n_min}"
        )
    if n_max < n_min:
        raise RangeError(f"empty range [{n_min}, {n_max}]")
    if prec < 128:
        raise RangeError(
            f"certification precision must be >= 128 bits, got {prec}"
        )

    evaluator = _Evaluator(params, prec)
    violations = []
    min_residual = None
    min_lo = None
    checked = 0
    for n in range(n_min, n_max + 1):
        evaluator.evict_below(n - 3)
        if progress is not None:
            progress(n)
        for m in range(0, params.grid_top(n)):
            checked += 1
            try:
                res = evaluator.residual(n, m)
            except _SingularCoefficient as exc:
                violations.append(
                    {"n": n, "m": m, "reason": str(exc), "residual": None}
                )
                continue
            if not res.is_nonnegative() and res.contains_zero():
                # inconclusive: retry this one cell at higher precision
                for extra in (64, 128):
                    res = _residual_fresh(params, n, m, prec + extra)
                    if res.is_nonnegative() or res.is_negative():
                        break
                else:
                    raise PrecisionError(
                        f"residual sign undecidable at (n,m)=({n},{m}) even "
                        f"at {prec + 128} bits; retry with higher prec"
                    )
            if res.hi < 0:
                lo_s, hi_s = res.decimal_bounds()
                violations.append(
                    {
                        "n": n,
                        "m": m,
                        "reason": "negative residual",
                        "residual": [lo_s, hi_s],
                    }
                )
            if min_lo is None or res.lo < min_lo:
                min_lo = res.lo
                lo_s, hi_s = res.decimal_bounds()
                min_residual = {"n": n, "m": m, "lo": lo_s, "hi": hi_s}

    if violations:
        last_bad = max(v["n"] for v in violations)
        n0 = last_bad + 1 if last_bad < n_max else None
    else:
        n0 = n_min
    return BoundCertificate(
        params=params,
        n_min=n_min,
        n_max=n_max,
        precision=prec,
        checked_cells=checked,
        n0=n0,
        violations=tuple(violations),
        min_residual=min_residual,
        negative_control=negative_control,
    )
