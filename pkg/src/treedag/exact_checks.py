"""Exact rational verification of the lattice-path lemmas.

Each checker sweeps its full claimed range with `Fraction` arithmetic and
returns a :class:`CheckReport`; a report passes only when the violation
list is empty.  These back the CLI's ``verify --lemma`` exact modes
(``suffix-monotone``, ``compacted-suffix-monotone``, ``sandwich``,
``cutoff``) and the corresponding acceptance criteria.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exact_count as ec
from .errors import ValidationError


@dataclass
class CheckReport:
    name: str
    passed: bool
    checked: int
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)  # optional (n, value) pairs for CSV

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f", {len(self.violations)} violation(s)" if self.violations else ""
        return f"{self.name}: {verdict} ({self.checked} comparisons{extra})"

    def to_dict(self) -> dict:
        """JSON-ready form; Fractions (exact) serialize as ``p/q`` strings."""

        def plain(value):
            if isinstance(value, Fraction):
                return str(value)
            if isinstance(value, (list, tuple)):
                return [plain(v) for v in value]
            return value

        return {
            "name": self.name,
            "verdict": "PASS" if self.passed else "FAIL",
            "checked": self.checked,
            "violations": plain(self.violations),
            "stats": {k: plain(v) for k, v in self.stats.items()},
        }

    def rows_csv(self) -> str:
        """The per-n measurement rows as ``n,value`` CSV."""
        if not self.rows:
            raise ValidationError(f"check {self.name!r} records no row data")
        return ec.sequence_csv(self.rows)


def _monotone_violations(table: ec.RationalTable, min_level: int = 0) -> tuple[int, list]:
    """Adjacent-pair check of t(l, j)/(j+1) >= t(l, j+2)/(j+3) on every row.

    Adjacent pairs imply the full claim for all j < k of equal parity by
    transitivity along the chain j, j+2, ..., k.
    """
    checked = 0
    bad = []
    L = table.total_length or table.max_index
    for l in range(min_level, L + 1):
        for j in range(l - 1):
            lhs = table.value(l, j) * (j + 3)
            rhs = table.value(l, j + 2) * (j + 1)
            checked += 1
            if lhs < rhs:
                bad.append((l, j, table.value(l, j), table.value(l, j + 2)))
    return checked, bad


def check_suffix_monotone(max_len: int = 60) -> CheckReport:
    """Monotonicity of p(l, j | 2n)/(j+1) in j (even gaps), all 2n <= max_len."""
    checked = 0
    bad = []
    for n in range(1, max_len // 2 + 1):
        table = ec.suffix_weight_table(n, cap=max_len)
        c, b = _monotone_violations(table)
        checked += c
        bad += [(2 * n,) + v for v in b]
    return CheckReport("suffix-monotone", not bad, checked, bad,
                       stats={"max_len": max_len})


def check_compacted_suffix_monotone(max_len: int = 60, min_n: int = 10) -> CheckReport:
    """Monotonicity of q(l, j | 2n)/(j+1) in j, for n >= min_n, 2n <= max_len.

    The claim holds from n = 10 on; smaller n are excluded by the statement
    itself and indeed fail (see the unit tests).
    """
    checked = 0
    bad = []
    for n in range(min_n, max_len // 2 + 1):
        table = ec.compacted_suffix_weight_table(n, cap=max_len)
        c, b = _monotone_violations(table)
        checked += c
        bad += [(2 * n,) + v for v in b]
    return CheckReport("compacted-suffix-monotone", not bad, checked, bad,
                       stats={"max_len": max_len, "min_n": min_n})


def check_sandwich(max_len: int = 60) -> CheckReport:
    """The full exact envelope sweep on 3 <= n <= max_len, 0 <= m < n.

    Checks, cellwise with exact rationals:
      * L <= e(n, m) <= U   (sandwich forms on the e-table);
      * U <= d(n, m)        (the e-form upper envelope stays below d);
      * U_d <= d(n, m)      (the same form evaluated on the d-table);
      * e(n, m) <= ehat(n, m) <= d(n, m).
    """
    rt = ec.relaxed_table(max_len)
    ct = ec.compacted_table(max_len)
    ehat = ec.ehat_table(max_len, cap=max_len)
    e = lambda a, b: ec.compacted_meander_weight(a, b, ct)
    d = lambda a, b: ec.meander_weight(a, b, rt)
    checked = 0
    bad = []
    for n in range(max_len + 1):
        for m in range(n % 2, n + 1, 2):
            ev, dv, hv = e(n, m), d(n, m), ehat.value(n, m)
            checked += 2
            if not ev <= hv:
                bad.append(("e<=ehat", n, m, ev, hv))
            if not hv <= dv:
                bad.append(("ehat<=d", n, m, hv, dv))
            if n < 3 or m >= n:
                continue
            lo = ec.lower_envelope(e, n, m)
            up = ec.upper_envelope(e, n, m)
            up_d = ec.upper_envelope(d, n, m)
            checked += 4
            if not lo <= ev:
                bad.append(("L<=e", n, m, lo, ev))
            if not ev <= up:
                bad.append(("e<=U", n, m, ev, up))
            if not up <= dv:
                bad.append(("U<=d", n, m, up, dv))
            if not up_d <= dv:
                bad.append(("U_d<=d", n, m, up_d, dv))
    return CheckReport("sandwich", not bad, checked, bad, stats={"max_len": max_len})


def check_cutoff(max_n: int = 300, cutoff_N: int = 50,
                 tol: Fraction = Fraction(1, 100)) -> CheckReport:
    """Lost-weight proportions 1 - dtilde(2n,0)/d(2n,0) for n <= max_n.

    Computed entirely in integers via the truncated r-diagonal; the report
    rows carry the exact proportion per n and the stats record the maximum.
    Passes when every proportion is <= tol.
    """
    full = ec.relaxed_table(max_n, "rolling-row").diagonal()
    trunc = ec.truncated_relaxed_diagonal(max_n, cutoff_N)
    rows = []
    worst = Fraction(0)
    bad = []
    for n in range(max_n + 1):
        lost = 1 - Fraction(trunc[n], full[n])
        rows.append((n, lost))
        if lost > worst:
            worst = lost
        if lost > tol:
            bad.append((n, lost))
    return CheckReport("cutoff", not bad, max_n + 1, bad,
                       stats={"cutoff_N": cutoff_N, "tol": tol, "max_lost": worst},
                       rows=rows)


EXACT_CHECKS = {
    "suffix-monotone": check_suffix_monotone,
    "compacted-suffix-monotone": check_compacted_suffix_monotone,
    "sandwich": check_sandwich,
    "cutoff": check_cutoff,
}
