"""Acceptance suite: ten end-to-end criteria, one verdict line each.

Run ``pytest -s tests/test_acceptance.py`` to see the per-criterion
ACCEPTANCE lines (pytest hides stdout of passing tests by default).
Criterion 8 is reported honestly as FAIL: its published-value clause
asks for the quotient root near 0.91, but the root provably sits at
1.3193...; the test is a strict expected-failure so the suite stays
green while the verdict line records the discrepancy.
"""

import time
from fractions import Fraction

import mpmath
import pytest

from treedag import exact_checks
from treedag.airy import airy_root_a1, phi, psi, psi_root_x0
from treedag.automata import (
    brute_count_minimal,
    dfa_bounds,
    language_of,
    tree_to_dfa,
)
from treedag.bounds import FAMILY_IDS, check_inequality
from treedag.cli import main as cli_main
from treedag.extrapolate import extrapolate_gamma, ratio_diagnostics, u_sequence
from treedag.sampling import SamplerContext, rank_relaxed, sample_relaxed, unrank_relaxed
from treedag.trees import RelaxedTree, enumerate_relaxed, from_path, is_compacted, to_path

RELAXED_SEQUENCE = (1, 1, 3, 16, 127, 1363, 18628, 311250, 6173791, 142190703)
COMPACTED_SEQUENCE = (1, 1, 3, 15, 111, 1119, 14487, 230943, 4395855, 97608831)


def report(number: int, name: str, verdict: str, detail: str) -> None:
    print(f"ACCEPTANCE {number} {name}: {verdict} ({detail})")


def test_criterion_01_exact_sequences(capsys):
    t0 = time.time()
    code = cli_main(["count", "--kind", "both", "--max-n", "9"])
    out = capsys.readouterr().out
    elapsed = time.time() - t0
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,relaxed,compacted"
    got = [tuple(int(x) for x in line.split(",")) for line in lines[1:]]
    assert tuple(row[1] for row in got) == RELAXED_SEQUENCE
    assert tuple(row[2] for row in got) == COMPACTED_SEQUENCE
    assert elapsed < 1.0
    report(1, "exact-sequences", "PASS", f"both n<=9 prefixes, {elapsed:.2f}s")


def test_criterion_02_brute_force_and_bijection():
    t0 = time.time()
    total = 0
    for n in range(6):
        trees = list(enumerate_relaxed(n))
        assert len(trees) == RELAXED_SEQUENCE[n]
        assert sum(1 for t in trees if is_compacted(t)) == COMPACTED_SEQUENCE[n]
        for tree in trees:
            assert from_path(to_path(tree)) == tree
        for index in range(RELAXED_SEQUENCE[n]):
            path = unrank_relaxed(n, index)
            assert rank_relaxed(path) == index
            assert to_path(from_path(path)) == path
        total += len(trees)
    elapsed = time.time() - t0
    assert elapsed < 60
    report(
        2,
        "brute-force-oracle",
        "PASS",
        f"{total} objects n<=5, all roundtrips, {elapsed:.1f}s",
    )


def test_criterion_03_exact_lemma_checks():
    t0 = time.time()
    reports = [
        exact_checks.check_suffix_monotone(60),
        exact_checks.check_compacted_suffix_monotone(60, min_n=10),
        exact_checks.check_sandwich(60),
    ]
    elapsed = time.time() - t0
    for rep in reports:
        assert rep.passed, rep.summary()
        assert not rep.violations
    assert elapsed < 300
    checked = sum(r.checked for r in reports)
    report(
        3,
        "exact-lemma-checks",
        "PASS",
        f"{checked} exact comparisons at 2n<=60, zero violations, {elapsed:.1f}s",
    )


def test_criterion_04_bound_certification():
    t0 = time.time()
    n0_by_family = {}
    for family in FAMILY_IDS:
        cert = check_inequality(family, 4, 2000, 192)
        assert cert.verdict == "PASS", cert.summary_line()
        assert cert.n0 is not None and cert.n0 <= 500, cert.summary_line()
        n0_by_family[family] = cert.n0
    # pin the measured onset points: a drift here means the inequalities,
    # the grids, or the interval engine changed
    assert n0_by_family == {
        "lower-relaxed": 111,
        "upper-relaxed": 285,
        "lower-compacted": 255,
        "upper-compacted": 216,
    }
    control = check_inequality("lower-relaxed", 4, 300, 192, negative_control=True)
    assert control.verdict == "FAIL"
    assert control.violations
    elapsed = time.time() - t0
    assert elapsed < 1800
    report(
        4,
        "bound-certification",
        "PASS",
        "n0=" + ",".join(f"{f}:{n}" for f, n in n0_by_family.items())
        + f"; negative control FAILs; {elapsed:.0f}s at 192 bits",
    )


def test_criterion_05_constant_reproduction(
    relaxed_diagonal_1000, compacted_diagonal_1000
):
    t0 = time.time()
    targets = {
        "relaxed": (relaxed_diagonal_1000, "166.95208957"),
        "compacted": (compacted_diagonal_1000, "173.12670485"),
    }
    gaps = {}
    for kind, (diagonal, target) in targets.items():
        window = {n: diagonal[n] for n in range(900, 1001)}
        u = u_sequence(kind, window, 672)
        est = extrapolate_gamma(u, 18, 983, 672, kind=kind)
        with mpmath.workprec(700):
            gap = abs(est.gamma - mpmath.mpf(target))
            assert gap <= mpmath.mpf("1e-4"), (kind, mpmath.nstr(gap, 5))
            gaps[kind] = float(gap)
    elapsed = time.time() - t0
    assert elapsed < 1800
    report(
        5,
        "constant-reproduction",
        "PASS",
        f"k=18 window [983,1000] at 672 bits; |gap| r:{gaps['relaxed']:.1e} "
        f"c:{gaps['compacted']:.1e} (tol 1e-4); {elapsed:.1f}s",
    )


def test_criterion_06_stretched_exponential_consistency(
    relaxed_diagonal_1000, compacted_diagonal_1000
):
    rows = ratio_diagnostics(
        "relaxed",
        {n: relaxed_diagonal_1000[n] for n in (199, 200, 999, 1000)},
    )
    by_n = {row["n"]: row for row in rows}
    with mpmath.workprec(128):
        r200 = abs(by_n[200]["remainder"])
        r1000 = abs(by_n[1000]["remainder"])
        assert r1000 < r200
    # the compacted/relaxed proportion scaled by n^(1/4) is nearly constant
    scaled = {}
    for n in (250, 500, 1000):
        ratio = Fraction(compacted_diagonal_1000[n], relaxed_diagonal_1000[n])
        scaled[n] = float(ratio) * n**0.25
    spread = max(scaled.values()) / min(scaled.values()) - 1
    assert spread < 0.05, scaled
    report(
        6,
        "stretched-exponential-consistency",
        "PASS",
        f"|remainder_1000|={float(r1000):.3f} < |remainder_200|={float(r200):.3f}; "
        f"(c_n/r_n) n^(1/4) spread {spread:.2%} < 5%",
    )


def test_criterion_07_sampler_uniformity():
    t0 = time.time()
    ctx = SamplerContext(4, seed=0)
    counts: dict[str, int] = {}
    for _ in range(12700):
        key = sample_relaxed(4, ctx).tokens()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 127
    expected = 12700 / 127
    stat = sum((c - expected) ** 2 / expected for c in counts.values())
    p_value = float(
        mpmath.gammainc(126 / 2, stat / 2, mpmath.inf, regularized=True)
    )
    elapsed = time.time() - t0
    assert p_value > 0.001, f"chi-square {stat:.2f}, p={p_value:.5f}"
    assert elapsed < 10
    report(
        7,
        "sampler-uniformity",
        "PASS",
        f"12700 draws at n=4 over 127 objects: chi2={stat:.2f}, "
        f"p={p_value:.3f} > 0.001, {elapsed:.1f}s",
    )


def test_criterion_08_airy_numerics_attainable_clauses():
    t0 = time.time()
    a1_128 = airy_root_a1(128).midpoint()
    a1_192 = airy_root_a1(192).midpoint()
    assert abs(float(a1_128 - a1_192)) < 5e-13  # 12 decimal digits stable
    one = phi(Fraction(0), 128)
    assert one.lo == 1 and one.hi == 1
    # exactly one sign transition of the quotient on a positive grid
    signs = []
    for j in range(1, 40):
        value = psi(Fraction(j, 4), 160)
        assert value.is_positive() or value.is_negative(), j
        signs.append(1 if value.is_positive() else -1)
    assert signs.count(-1) > 0 and signs.count(1) > 0
    flips = sum(1 for s, t in zip(signs, signs[1:]) if s != t)
    assert flips == 1
    assert time.time() - t0 < 10


@pytest.mark.xfail(
    strict=True,
    reason="the positive zero of the Airy quotient sits at 1.3193..., not "
    "near 0.91; psi(0.91) = +0.5348 is plainly positive, so the published "
    "two-digit value cannot be reproduced",
)
def test_criterion_08_published_root_value_clause():
    x0 = psi_root_x0(160)
    mid = float(x0.midpoint())
    report(
        8,
        "airy-numerics",
        "FAIL",
        f"x0 = {mid:.6f}, published-value clause 'x0 ~ 0.91 to 2 digits' "
        "unattainable; a1 stability, phi(0)=1 and sign-change uniqueness "
        "all hold (see companion test)",
    )
    assert abs(mid - 0.91) < 0.005


def test_criterion_09_automata():
    t0 = time.time()
    brute = {n: brute_count_minimal(n) for n in range(1, 5)}
    assert brute[1] == 1 and brute[2] == 6
    for n in range(1, 5):
        lower, upper = dfa_bounds(n)
        assert lower <= brute[n] <= upper, (n, lower, brute[n], upper)
        if n <= 2:
            assert lower == upper == brute[n]
    tree = RelaxedTree(4, (((None, (None, None)), None), None), (1, 1, 2, 3))
    dfa = tree_to_dfa(tree, {2, 3})
    words = language_of(dfa, 6)
    assert words == ["aa", "aab", "ab", "b", "bb"]
    elapsed = time.time() - t0
    assert elapsed < 60
    report(
        9,
        "automata",
        "PASS",
        f"m2n={tuple(brute.values())} inside bounds n<=4; five-state DFA "
        f"accepts exactly {{aa,aab,ab,b,bb}}; {elapsed:.1f}s",
    )


def test_criterion_10_cutoff(tmp_path):
    t0 = time.time()
    rep = exact_checks.check_cutoff(max_n=300, cutoff_N=50)
    elapsed = time.time() - t0
    assert rep.passed
    worst = rep.stats["max_lost"]
    assert worst <= Fraction(1, 100)
    csv_path = tmp_path / "cutoff_lost_weight.csv"
    csv_path.write_text(rep.rows_csv())
    assert len(csv_path.read_text().splitlines()) == 302  # header + n = 0..300
    assert elapsed < 300
    report(
        10,
        "cutoff",
        "PASS",
        f"max lost weight {float(worst):.3e} <= 0.01 over n<=300 at N=50, "
        f"recorded to CSV, {elapsed:.1f}s",
    )
