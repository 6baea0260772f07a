"""Stretched-exponential constant estimation from exact diagonal counts.

The diagonal counts grow like Theta(n! 4^n e^{3 a1 n^{1/3}} n^p) with p = 1
for relaxed trees and p = 3/4 for compacted ones.  Dividing the exact
counts by everything except the constant,

    u_n = count_n / (n! 4^n e^{3 a1 n^{1/3}} n^p),

leaves a sequence converging to the constant gamma — but at a glacial
n^{-1/3} pace, so the limit is extrapolated: assuming the refined ansatz
u_m = sum_{j<k} delta_j m^{-j/3}, solving the k x k linear system through k
consecutive u-values isolates delta_0 = gamma.  The Vandermonde-like
system in m^{-1/3} is severely ill-conditioned, hence the documented
precision floor of 96 + 32k bits; a synthetic-recovery test (data built
from a known delta vector must reproduce it) validates that floor.

All arithmetic here is plain high-precision floating point (mpmath) — the
estimates are measurements, not certificates; nothing downstream treats
them as proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import mpmath

from .airy import airy_root_a1
from .errors import RangeError, ValidationError

__all__ = [
    "ExtrapolationEstimate",
    "extrapolate_gamma",
    "min_precision_for",
    "ratio_diagnostics",
    "u_sequence",
]

#: number of trailing extrapolation windows folded into the stability spread
STABILITY_WINDOWS = 10


def min_precision_for(k: int) -> int:
    """Documented precision floor (bits) for a k-term extrapolation."""
    return 96 + 32 * k


def _require_kind(kind: str) -> None:
    if kind not in ("relaxed", "compacted"):
        raise ValidationError(f"unknown kind {kind!r}")


def _a1_mpf() -> mpmath.mpf:
    """The Airy root a1 at (at least) the current mpmath precision."""
    enclosure = airy_root_a1(mpmath.mp.prec + 16)
    mantissa, exponent, _ = enclosure.midpoint().digits(10)
    if mantissa.startswith("-"):
        return -mpmath.mpf(f"0.{mantissa[1:]}e{exponent}")
    return mpmath.mpf(f"0.{mantissa}e{exponent}")


def u_sequence(
    kind: str, counts: Mapping[int, int], prec: int = 256
) -> dict[int, mpmath.mpf]:
    """Normalized diagonal counts u_n, keyed by n.

    counts maps n to the exact diagonal count (relaxed or compacted); the
    normalization divides out n!, 4^n, the stretched-exponential factor,
    and the polynomial factor n^p in log space before exponentiating.
    """
    _require_kind(kind)
    if prec < 64:
        raise RangeError(f"u_sequence needs prec >= 64, got {prec}")
    out: dict[int, mpmath.mpf] = {}
    with mpmath.workprec(prec):
        a1 = _a1_mpf()
        ln4 = mpmath.log(4)
        p = mpmath.mpf(1) if kind == "relaxed" else mpmath.mpf(3) / 4
        for n in sorted(counts):
            if n < 1:
                raise RangeError(f"counts must be indexed by n >= 1, got {n}")
            value = counts[n]
            if value <= 0:
                raise ValidationError(f"count at n={n} must be positive")
            ln_u = (
                mpmath.log(mpmath.mpf(value))
                - mpmath.loggamma(n + 1)
                - n * ln4
                - 3 * a1 * mpmath.cbrt(n)
                - p * mpmath.log(n)
            )
            out[n] = mpmath.exp(ln_u)
    return out


def _solve_window(
    u: Mapping[int, mpmath.mpf], k: int, n: int
) -> tuple[mpmath.mpf, list]:
    """Solve the k x k system over the window m in [n, n+k)."""
    rows = []
    rhs = []
    for i in range(k):
        m = n + i
        if m not in u:
            raise RangeError(
                f"u-sequence lacks index {m} needed by window [{n}, {n + k})"
            )
        mr = mpmath.mpf(m)
        rows.append([mr ** (-mpmath.mpf(j) / 3) for j in range(k)])
        rhs.append(u[m])
    deltas = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
    return deltas[0], [deltas[j] for j in range(k)]


@dataclass(frozen=True)
class ExtrapolationEstimate:
    """One extrapolated constant with its stability measurement."""

    kind: str
    k: int
    window_start: int
    precision: int
    gamma: mpmath.mpf
    deltas: tuple
    stability: Optional[mpmath.mpf]  # relative spread over trailing windows

    def summary_line(self) -> str:
        stab = (
            f"stability {mpmath.nstr(self.stability, 3)}"
            if self.stability is not None
            else "stability n/a"
        )
        return (
            f"{self.kind}: gamma ~ {mpmath.nstr(self.gamma, 15)} "
            f"(k={self.k}, window [{self.window_start}, "
            f"{self.window_start + self.k - 1}], {self.precision} bits, {stab})"
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "window": [self.window_start, self.window_start + self.k - 1],
            "precision_bits": self.precision,
            "gamma": mpmath.nstr(self.gamma, 30),
            "stability": None
            if self.stability is None
            else mpmath.nstr(self.stability, 6),
        }


def extrapolate_gamma(
    u: Mapping[int, mpmath.mpf],
    k: int,
    n: int,
    prec: Optional[int] = None,
    *,
    kind: str = "relaxed",
) -> ExtrapolationEstimate:
    """Extrapolate gamma = lim u_n through the window m in [n, n+k).

    Also re-solves the trailing STABILITY_WINDOWS windows ending at n
    (when u covers them) and records the relative spread of their gamma
    estimates; a spread near the requested tolerance is the practical
    signal that k, n, or prec is too small.
    """
    _require_kind(kind)
    if k < 2:
        raise RangeError(f"extrapolation needs k >= 2, got {k}")
    if n < 1:
        raise RangeError(f"window start must be >= 1, got {n}")
    floor = min_precision_for(k)
    if prec is None:
        prec = floor
    if prec < floor:
        raise RangeError(
            f"k={k} needs at least {floor} bits, got {prec}"
        )
    with mpmath.workprec(prec):
        gamma, deltas = _solve_window(u, k, n)
        spread = None
        starts = range(n - STABILITY_WINDOWS + 1, n + 1)
        if all(
            m in u for s in starts for m in range(s, s + k)
        ) and len(starts) == STABILITY_WINDOWS:
            values = [_solve_window(u, k, s)[0] for s in starts]
            lo, hi = min(values), max(values)
            spread = (hi - lo) / abs(values[-1])
    return ExtrapolationEstimate(
        kind=kind,
        k=k,
        window_start=n,
        precision=prec,
        gamma=gamma,
        deltas=tuple(deltas),
        stability=spread,
    )


def convergence_csv(
    kind: str,
    counts: Mapping[int, int],
    k: int,
    n_min: int,
    n_max: int,
    prec: Optional[int] = None,
) -> str:
    """``n,u,v`` rows over [n_min, n_max]: u_n always, v_n where it exists.

    v_n is the k-point window estimate anchored at n, present only when
    counts covers the whole window [n, n+k); its column is left empty
    otherwise.  Values are shortest round-trip decimal floats, so the
    output is byte-deterministic.
    """
    if k < 2:
        raise RangeError(f"extrapolation needs k >= 2, got {k}")
    if n_min < 1 or n_max < n_min:
        raise RangeError(f"bad n-range [{n_min}, {n_max}]")
    floor = min_precision_for(k)
    if prec is None:
        prec = floor
    if prec < floor:
        raise RangeError(f"k={k} needs at least {floor} bits, got {prec}")
    u = u_sequence(kind, counts, prec)
    lines = ["n,u,v"]
    with mpmath.workprec(prec):
        for n in range(n_min, n_max + 1):
            if n not in u:
                continue
            if all(m in u for m in range(n, n + k)):
                v = repr(float(_solve_window(u, k, n)[0]))
            else:
                v = ""
            lines.append(f"{n},{float(u[n])!r},{v}")
    if len(lines) == 1:
        raise RangeError(f"no counts inside [{n_min}, {n_max}]")
    return "\n".join(lines) + "\n"


def ratio_diagnostics(
    kind: str, counts: Mapping[int, int], prec: int = 128
) -> list[dict]:
    """Consecutive-count ratios against their three-term expansion.

    For each n with both counts available, reports rho_n =
    count_n/count_{n-1}, the remainder rho_n - (4n + 4 a1 n^{1/3} + 4),
    and the remainder rescaled by n^{1/3}; the remainder sequence decaying
    toward zero (and the rescaled one staying bounded) is the numerical
    echo of the ratio expansion whose leading terms are 4, 0, 4 a1, 4.
    """
    _require_kind(kind)
    rows: list[dict] = []
    with mpmath.workprec(prec):
        a1 = _a1_mpf()
        for n in sorted(counts):
            if n - 1 not in counts or n < 2:
                continue
            rho = mpmath.mpf(counts[n]) / mpmath.mpf(counts[n - 1])
            cbrt_n = mpmath.cbrt(n)
            remainder = rho - (4 * n + 4 * a1 * cbrt_n + 4)
            rows.append(
                {
                    "n": n,
                    "rho": rho,
                    "remainder": remainder,
                    "remainder_scaled": remainder * cbrt_n,
                }
            )
    return rows
