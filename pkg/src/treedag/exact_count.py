"""Exact counting tables for relaxed and compacted binary trees.

Everything in this module is exact: big integers for the tree counts,
`fractions.Fraction` for the weighted lattice-path quantities.  No floating
point enters any computation here.

Conventions
-----------
* ``r[n][m]`` counts decorated lattice paths with ``n`` horizontal steps H
  and ``m`` vertical steps V, every prefix satisfying #V <= #H, where an H
  step whose height (number of earlier V steps) is ``k`` carries a decoration
  in {1, ..., k+1}.  The diagonal ``r[n][n]`` counts relaxed binary trees
  with ``n`` internal nodes.  Recurrence::

      r[n][m] = r[n][m-1] + (m+1) * r[n-1][m],      r[n][0] = 1,
      r[n][m] = 0  for m > n.

* ``c[n][m]`` is the analogous count restricted to paths whose decorations
  avoid the forbidden patterns characterising compacted trees::

      c[n][m] = c[n][m-1] + (m+1) * c[n-1][m] - (m-1) * c[n-2][m-1]

  with the same boundary.  ``c[n][n]`` counts compacted trees of size n.

* Meander weights use step-count coordinates: ``d(n, m)`` is the total
  weight of walks with n unit steps from (0,0) to height m staying
  nonnegative, where an up step starting at (a, b) weighs (a-b+2)/(a+b+2)
  and down steps weigh 1.  It satisfies the transform

      d(n, m) = r[(n+m)/2][(n-m)/2] / ((n+m)/2)!

  and vanishes when n, m have different parities.  ``e(n, m)`` is the same
  transform of ``c``; n! * d(2n, 0) and n! * e(2n, 0) recover the diagonal
  counts.

* Suffix weights ``p(l, m | 2n)`` and ``q(l, m | 2n)`` give the weighted
  number of walks from (l, m) to (2n, 0) for the plain meander steps
  (p; steps (1,1) weighted, (1,-1) free) and for the five-step system
  underlying the upper-bound envelope (q; steps (1,1), (1,-1), (2,-2),
  (3,-1), (3,1)).  Both are built by reverse iteration on l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import CapacityError, DomainError, RangeError

# Default caps.  Full triangles are quadratic in memory with entries that
# grow to thousands of bits, so the default cap keeps the footprint modest;
# exact rational tables grow even faster and are meant for lemma-scale
# checks only.
FULL_TRIANGLE_CAP = 300
RATIONAL_CAP = 60

# Diagonal prefixes used as fingerprints throughout the test-suite and by
# ``--version`` (OEIS A082161 and A254789).
RELAXED_PREFIX = (1, 1, 3, 16, 127, 1363, 18628, 311250, 6173791, 142190703)
COMPACTED_PREFIX = (1, 1, 3, 15, 111, 1119, 14487, 230943, 4395855, 97608831)


class CountTable:
    """Triangular table of exact counts r[n][m] or c[n][m].

    ``mode='full-triangle'`` stores every row (needed by unranking and the
    meander transforms); ``mode='rolling-row'`` stores only the final row
    plus the diagonal sequence, enough for diagonal queries up to n ~ 1000
    in O(n) bignum memory.
    """

    def __init__(self, kind: str, max_n: int, mode: str, rows, last_row, diagonal):
        self.kind = kind
        self.max_n = max_n
        self.mode = mode
        self._rows = rows          # list[list[int]] in full-triangle mode
        self._last_row = last_row  # list[int] in rolling-row mode
        self._diagonal = diagonal  # list[int], always present

    def value(self, n: int, m: int) -> int:
        """Exact table entry; zero for m > n, never stored explicitly."""
        if n < 0 or m < 0 or n > self.max_n:
            raise RangeError(f"(n={n}, m={m}) outside table range 0..{self.max_n}")
        if m > n:
            return 0
        if self._rows is not None:
            return self._rows[n][m]
        if n == self.max_n:
            return self._last_row[m]
        if m == n:
            return self._diagonal[n]
        raise RangeError(
            "rolling-row mode retains only the final row and the diagonal; "
            f"cell (n={n}, m={m}) was discarded"
        )

    def diagonal(self, n: int | None = None):
        """The sequence r[n][n] (resp. c[n][n]); a single value if n given."""
        if n is None:
            return list(self._diagonal)
        if not 0 <= n <= self.max_n:
            raise RangeError(f"n={n} outside 0..{self.max_n}")
        return self._diagonal[n]

    def recurrence_residual(self, n: int, m: int) -> int:
        """LHS minus RHS of the defining recurrence at a stored cell (full mode)."""
        if m < 1 or m > n:
            raise DomainError("recurrence cells need 1 <= m <= n")
        rhs = self.value(n, m - 1) + (m + 1) * (self.value(n - 1, m) if n >= 1 else 0)
        if self.kind == "compacted":
            rhs -= (m - 1) * (self.value(n - 2, m - 1) if n >= 2 else 0)
        return self.value(n, m) - rhs


def _build_table(kind: str, max_n: int, mode: str, cap: int) -> CountTable:
    if max_n < 0:
        raise RangeError("max_n must be nonnegative")
    if mode not in ("full-triangle", "rolling-row"):
        raise RangeError(f"unknown storage mode {mode!r}")
    if mode == "full-triangle" and max_n > cap:
        raise CapacityError(
            f"full-triangle mode is capped at n={cap} "
            f"(requested {max_n}); use rolling-row or raise the cap"
        )
    keep_all = mode == "full-triangle"
    rows: list[list[int]] | None = [] if keep_all else None
    diagonal: list[int] = []
    prev: list[int] = []
    prevprev: list[int] = []
    row: list[int] = []
    for n in range(max_n + 1):
        row = [1] * (n + 1)
        for m in range(1, n + 1):
            v = row[m - 1]
            if m < n:  # prev row has no column n
                v += (m + 1) * prev[m]
            if kind == "compacted" and m >= 2 and m - 1 <= n - 2:
                v -= (m - 1) * prevprev[m - 1]
            assert v >= 0, f"negative count at ({n}, {m})"
            row[m] = v
        diagonal.append(row[n])
        if keep_all:
            rows.append(row)
        prevprev = prev
        prev = row
    return CountTable(kind, max_n, mode, rows, row if not keep_all else None, diagonal)


def relaxed_table(max_n: int, mode: str = "full-triangle", *,
                  cap: int = FULL_TRIANGLE_CAP) -> CountTable:
    """Table of r[n][m] (decorated-path counts; diagonal = relaxed trees)."""
    return _build_table("relaxed", max_n, mode, cap)


def compacted_table(max_n: int, mode: str = "full-triangle", *,
                    cap: int = FULL_TRIANGLE_CAP) -> CountTable:
    """Table of c[n][m] (diagonal = compacted trees)."""
    return _build_table("compacted", max_n, mode, cap)


# ---------------------------------------------------------------------------
# Rational tables
# ---------------------------------------------------------------------------

RATIONAL_KINDS = (
    "meander-d", "meander-e", "suffix-p", "suffix-q", "ehat", "dtilde", "etilde",
)


@dataclass
class RationalTable:
    """Exact rational table keyed by integer pairs.

    ``entries`` holds reduced ``Fraction`` values; absent keys inside the
    declared bounds read as exact zero (parity zeros and truncated cells are
    never stored).  ``total_length`` is the fixed right endpoint 2n for the
    suffix kinds and None otherwise.
    """

    kind: str
    max_index: int
    entries: dict = field(default_factory=dict)
    total_length: int | None = None

    def value(self, i: int, j: int) -> Fraction:
        if not (0 <= j and 0 <= i <= self.max_index):
            return Fraction(0)
        return self.entries.get((i, j), Fraction(0))

    def to_csv(self) -> str:
        lines = ["n,m,value"]
        for (i, j) in sorted(self.entries):
            lines.append(f"{i},{j},{self.entries[(i, j)]}")
        return "\n".join(lines) + "\n"


def meander_weight(n: int, m: int, table: CountTable | None = None) -> Fraction:
    """d(n, m): weighted meanders with n steps ending at height m.

    Computed through the integer transform d = r[(n+m)/2][(n-m)/2] / ((n+m)/2)!
    rather than the fractional recurrence (which the tests keep as an
    independent oracle).  Zero off-parity and for m > n or m < 0.
    """
    if m < 0 or m > n or (n + m) % 2:
        return Fraction(0)
    a, b = (n + m) // 2, (n - m) // 2
    if table is None:
        table = relaxed_table(a)
    return Fraction(table.value(a, b), math.factorial(a))


def compacted_meander_weight(n: int, m: int, table: CountTable | None = None) -> Fraction:
    """e(n, m): the compacted analogue of d(n, m), via the c-table transform."""
    if m < 0 or m > n or (n + m) % 2:
        return Fraction(0)
    a, b = (n + m) // 2, (n - m) // 2
    if table is None:
        table = compacted_table(a)
    return Fraction(table.value(a, b), math.factorial(a))


def meander_table(max_len: int, kind: str = "relaxed", *,
                  cap: int = RATIONAL_CAP) -> RationalTable:
    """Materialised d (or e) table for all 0 <= m <= n <= max_len."""
    if max_len > cap:
        raise CapacityError(f"rational tables capped at {cap} steps (requested {max_len})")
    if kind == "relaxed":
        base, tkind, weight = relaxed_table(max_len), "meander-d", meander_weight
    elif kind == "compacted":
        base, tkind, weight = compacted_table(max_len), "meander-e", compacted_meander_weight
    else:
        raise RangeError(f"unknown kind {kind!r}")
    entries = {}
    for n in range(max_len + 1):
        for m in range(n % 2, n + 1, 2):
            v = weight(n, m, base)
            if v:
                entries[(n, m)] = v
    return RationalTable(tkind, max_len, entries)


def suffix_weight_table(n: int, *, cap: int = RATIONAL_CAP) -> RationalTable:
    """p(l, m | 2n): weighted walks from (l, m) to (2n, 0), plain meander steps.

    Reverse iteration on l with base row p(2n, m) = [m == 0]; an up step
    starting at (l, m) weighs (l-m+2)/(l+m+2), a down step weighs 1::

        p(l, m) = p(l+1, m-1) + (l-m+2)/(l+m+2) * p(l+1, m+1)
    """
    if n < 1:
        raise RangeError("suffix tables need n >= 1")
    L = 2 * n
    if L > cap:
        raise CapacityError(f"exact suffix tables capped at 2n={cap} (requested {L})")
    entries = {(L, 0): Fraction(1)}
    nxt = [Fraction(1)] + [Fraction(0)] * L  # row l+1, index by m
    for l in range(L - 1, -1, -1):
        row = [Fraction(0)] * (l + 1)
        for m in range(l + 1):
            v = (nxt[m - 1] if m >= 1 else Fraction(0))
            v += Fraction(l - m + 2, l + m + 2) * nxt[m + 1]
            row[m] = v
            if v:
                entries[(l, m)] = v
        nxt = row + [Fraction(0)] * 2
    return RationalTable("suffix-p", L, entries, total_length=L)


def compacted_suffix_weight_table(n: int, *, cap: int = RATIONAL_CAP) -> RationalTable:
    """q(l, m | 2n): suffix weights for the five-step system.

    Steps and weights, keyed at the start point (l, m)::

        (1,-1): (l-m)/(l-m+2)          (1,1): (l-m+2)/(l+m+2)
        (2,-2): 2/(l-m+4)              (3,-1): 2/(l+m+2)
        (3,1):  4/((l+m+4)(l+m+2))

    Base q(2n, m) = [m == 0]; q = 0 for m < 0.  The table covers
    0 <= m <= l <= 2n, where every denominator is nonzero.
    """
    if n < 1:
        raise RangeError("suffix tables need n >= 1")
    L = 2 * n
    if L > cap:
        raise CapacityError(f"exact suffix tables capped at 2n={cap} (requested {L})")
    zeros = lambda: [Fraction(0)] * (L + 4)
    rows = {L: zeros()}
    rows[L][0] = Fraction(1)
    entries = {(L, 0): Fraction(1)}
    get = lambda l, m: rows[l][m] if (l in rows and 0 <= m <= l) else Fraction(0)
    for l in range(L - 1, -1, -1):
        row = zeros()
        for m in range(l + 1):
            v = Fraction(l - m, l - m + 2) * get(l + 1, m - 1) if m >= 1 else Fraction(0)
            v += Fraction(l - m + 2, l + m + 2) * get(l + 1, m + 1)
            if m >= 2:
                v += Fraction(2, l - m + 4) * get(l + 2, m - 2)
            if m >= 1:
                v += Fraction(2, l + m + 2) * get(l + 3, m - 1)
            v += Fraction(4, (l + m + 4) * (l + m + 2)) * get(l + 3, m + 1)
            row[m] = v
            if v:
                entries[(l, m)] = v
        rows[l] = row
        rows.pop(l + 4, None)
    return RationalTable("suffix-q", L, entries, total_length=L)


# ---------------------------------------------------------------------------
# The e-envelope: sandwich forms, the ehat table, truncated tables
# ---------------------------------------------------------------------------

Values = Callable[[int, int], Fraction]


def lower_envelope(values: Values, n: int, m: int) -> Fraction:
    """The lower sandwich form evaluated on an arbitrary table.

    L = (n-m+2)/(n+m) t(n-1,m-1) + (n-m-2)/(n-m) t(n-1,m+1)
        + (n-m-4)/(n-m-2) * [ 2/(n-m) t(n-2,m+2) + 2/(n+m) t(n-3,m+1) ]

    The bracket is evaluated first: it vanishes identically for m > n-5
    (both referenced cells lie above the diagonal), which keeps the scaled
    term well-defined at m = n-2 where its coefficient's denominator is 0.
    """
    if n < 3 or m < 0 or m >= n:
        raise DomainError(f"sandwich forms need n >= 3 and 0 <= m < n, got ({n}, {m})")
    total = Fraction(n - m + 2, n + m) * values(n - 1, m - 1)
    total += Fraction(n - m - 2, n - m) * values(n - 1, m + 1)
    bracket = Fraction(2, n - m) * values(n - 2, m + 2)
    bracket += Fraction(2, n + m) * values(n - 3, m + 1)
    if bracket:
        total += Fraction(n - m - 4, n - m - 2) * bracket
    return total


def upper_envelope(values: Values, n: int, m: int) -> Fraction:
    """The upper sandwich form (five positive terms) on an arbitrary table."""
    if n < 3 or m < 0 or m >= n:
        raise DomainError(f"sandwich forms need n >= 3 and 0 <= m < n, got ({n}, {m})")
    total = Fraction(n - m + 2, n + m) * values(n - 1, m - 1)
    total += Fraction(n - m - 2, n - m) * values(n - 1, m + 1)
    total += Fraction(2, n - m) * values(n - 2, m + 2)
    total += Fraction(2, n + m) * values(n - 3, m + 1)
    total += Fraction(4, (n + m) * (n + m - 2)) * values(n - 3, m - 1)
    return total


def sandwich_bounds(n: int, m: int, table: CountTable | None = None) -> tuple[Fraction, Fraction]:
    """(L, U) with L <= e(n, m) <= U, from the compacted meander weights."""
    if n < 3 or m < 0 or m >= n:
        raise DomainError(f"sandwich_bounds needs n >= 3 and 0 <= m < n, got ({n}, {m})")
    if table is None:
        table = compacted_table((n + m) // 2 + 2)
    values = lambda a, b: compacted_meander_weight(a, b, table)
    return lower_envelope(values, n, m), upper_envelope(values, n, m)


def ehat_table(max_len: int, *, cap: int = RATIONAL_CAP,
               zero_rule: Callable[[int, int], bool] | None = None) -> RationalTable:
    """The upper-envelope sequence: e with its recurrence closed positively.

    For n >= 3 and n > m >= 0 the entry follows the five-term recurrence of
    ``upper_envelope`` applied to the table itself; all other cells copy
    e(n, m).  Satisfies e <= ehat <= d cellwise.  ``zero_rule(n, m)`` forces
    cells to zero (used by the truncated variant).
    """
    if max_len > cap:
        raise CapacityError(f"rational tables capped at {cap} steps (requested {max_len})")
    ctable = compacted_table(max_len)
    entries: dict[tuple[int, int], Fraction] = {}

    def val(a: int, b: int) -> Fraction:
        if b < 0 or b > a or a < 0:
            return Fraction(0)
        return entries.get((a, b), Fraction(0))

    for n in range(max_len + 1):
        for m in range(n % 2, n + 1, 2):
            if zero_rule is not None and zero_rule(n, m):
                continue
            if n >= 3 and m < n:
                v = upper_envelope(val, n, m)
            else:
                v = compacted_meander_weight(n, m, ctable)
            if v:
                entries[(n, m)] = v
    return RationalTable("ehat", max_len, entries)


def _cutoff_hit(n: int, m: int, cutoff_N: int) -> bool:
    # m > n^(3/4) and n > N, decided in exact integer arithmetic.
    return n > cutoff_N and m > 0 and m ** 4 > n ** 3


def truncated_relaxed_diagonal(max_n: int, cutoff_N: int) -> list[int]:
    """Integer diagonal of the truncated r-table.

    Zeroing d-cells at meander points (n, m) with m > n^(3/4), n > N is
    equivalent, through d(n, m) = r[a][b]/a! with (a, b) = ((n+m)/2, (n-m)/2),
    to running the r-recurrence with cells zeroed when (a-b)^4 > (a+b)^3 and
    a+b > N.  Entry k of the result is the truncated r[k][k], so the retained
    weight proportion is exactly rtilde[n][n] / r[n][n].
    """
    if max_n < 0:
        raise RangeError("max_n must be nonnegative")
    diag = []
    prev: list[int] = []
    for a in range(max_n + 1):
        row = [0] * (a + 1)
        for b in range(a + 1):
            if _cutoff_hit(a + b, a - b, cutoff_N):
                continue
            v = 1 if b == 0 else row[b - 1] + (b + 1) * (prev[b] if b < a else 0)
            row[b] = v
        diag.append(row[a])
        prev = row
    return diag


def truncated_meander_table(max_n: int, cutoff_N: int, kind: str = "relaxed", *,
                            cap: int = RATIONAL_CAP) -> RationalTable:
    """dtilde (or etilde): the d (resp. ehat) table with truncated support.

    ``max_n`` is the tree size, so meander indices run to 2*max_n.  Cells at
    meander points (n, m) with m > n^(3/4) and n > cutoff_N are forced to
    zero before being read by any later cell, making the truncation
    path-hereditary.  Both comparisons are exact (m^4 > n^3).
    """
    L = 2 * max_n
    if L > cap:
        raise CapacityError(f"rational tables capped at {cap} steps (requested {L})")
    if kind == "compacted":
        t = ehat_table(L, cap=cap, zero_rule=lambda n, m: _cutoff_hit(n, m, cutoff_N))
        return RationalTable("etilde", L, t.entries)
    if kind != "relaxed":
        raise RangeError(f"unknown kind {kind!r}")
    # The meander triangle n <= 2*max_n pulls in transform cells (a, b) with
    # a + b <= 2*max_n, so the integer triangle runs to row 2*max_n.
    entries = {}
    prev: list[int] = []
    for a in range(L + 1):
        row = [0] * (min(a, L - a) + 1)
        fact = math.factorial(a)
        for b in range(len(row)):
            if _cutoff_hit(a + b, a - b, cutoff_N):
                continue
            v = 1 if b == 0 else row[b - 1] + (b + 1) * (prev[b] if b < len(prev) else 0)
            row[b] = v
            if v:
                entries[(a + b, a - b)] = Fraction(v, fact)
        prev = row
    return RationalTable("dtilde", L, entries)


def passage_proportion(x: int, y: int, n: int, *,
                       r_table: CountTable | None = None,
                       p_table: RationalTable | None = None,
                       cap: int = RATIONAL_CAP) -> Fraction:
    """Proportion of total meander weight passing through the point (2x, 2y).

    s(x, y, n) = d(2x, 2y) * p(2x, 2y | 2n) / d(2n, 0); every walk to (2n, 0)
    crosses the abscissa 2x exactly once, so the proportions at fixed x sum
    to 1.
    """
    if not 0 <= y <= x <= n:
        raise DomainError("passage_proportion needs 0 <= y <= x <= n")
    if 2 * n > cap:
        raise CapacityError(f"exact mode capped at 2n={cap}")
    if r_table is None:
        r_table = relaxed_table(n + y)
    if p_table is None:
        p_table = suffix_weight_table(n, cap=cap)
    total = meander_weight(2 * n, 0, r_table)
    assert total > 0, "total meander weight is positive for every n >= 0"
    return meander_weight(2 * x, 2 * y, r_table) * p_table.value(2 * x, 2 * y) / total


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def diagonal_csv(table: CountTable) -> str:
    """``n,value`` rows for the diagonal sequence, plain decimal strings."""
    lines = ["n,value"]
    lines += (f"{n},{v}" for n, v in enumerate(table.diagonal()))
    return "\n".join(lines) + "\n"


def triangle_csv(table: CountTable) -> str:
    """``n,m,value`` rows for every stored cell (full-triangle mode)."""
    if table.mode != "full-triangle":
        raise RangeError("triangle export needs a full-triangle table")
    lines = ["n,m,value"]
    for n in range(table.max_n + 1):
        lines += (f"{n},{m},{table.value(n, m)}" for m in range(n + 1))
    return "\n".join(lines) + "\n"


def sequence_csv(pairs: Iterable[tuple[int, object]]) -> str:
    """Generic ``n,value`` export; Fractions serialise as ``p/q``."""
    lines = ["n,value"]
    lines += (f"{n},{v}" for n, v in pairs)
    return "\n".join(lines) + "\n"


def paired_diagonal_csv(max_n: int) -> str:
    """``n,relaxed,compacted`` rows for both diagonal sequences at once."""
    r = relaxed_table(max_n, mode="rolling-row").diagonal()
    c = compacted_table(max_n, mode="rolling-row").diagonal()
    lines = ["n,relaxed,compacted"]
    lines += (f"{n},{r[n]},{c[n]}" for n in range(max_n + 1))
    return "\n".join(lines) + "\n"
