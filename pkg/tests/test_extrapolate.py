"""Tests for the stretched-exponential constant extrapolation.

Frozen decimals were produced by running the extrapolator on the exact
diagonals at its documented precision floor and cross-checked for
stability across window positions and orders (k = 6, 10, 14, 18 agree
to ~9 digits); the synthetic-recovery test guards the solver itself
with data whose answer is known by construction.
"""

import mpmath
import pytest

from treedag.errors import RangeError, ValidationError
from treedag.extrapolate import (
    STABILITY_WINDOWS,
    ExtrapolationEstimate,
    extrapolate_gamma,
    min_precision_for,
    ratio_diagnostics,
    u_sequence,
)

GAMMA_R_30 = "166.952089574028353663890785846"
GAMMA_C_30 = "173.126704849813291756449693662"


@pytest.fixture(scope="module")
def u_relaxed(relaxed_diagonal_1000):
    window = {n: relaxed_diagonal_1000[n] for n in range(900, 1001)}
    return u_sequence("relaxed", window, min_precision_for(18))


@pytest.fixture(scope="module")
def u_compacted(compacted_diagonal_1000):
    window = {n: compacted_diagonal_1000[n] for n in range(900, 1001)}
    return u_sequence("compacted", window, min_precision_for(18))


def test_precision_floor():
    assert min_precision_for(18) == 96 + 32 * 18 == 672
    assert min_precision_for(2) == 160


def test_u_sequence_validation():
    with pytest.raises(ValidationError):
        u_sequence("slack", {5: 10})
    with pytest.raises(RangeError):
        u_sequence("relaxed", {5: 10}, prec=32)
    with pytest.raises(RangeError):
        u_sequence("relaxed", {0: 1})
    with pytest.raises(ValidationError):
        u_sequence("relaxed", {5: 0})


def test_u_values_frozen(u_relaxed, u_compacted):
    with mpmath.workprec(256):
        assert abs(u_relaxed[1000] - mpmath.mpf("222.01926068068999089")) < 1e-14
        assert abs(u_compacted[1000] - mpmath.mpf("232.11972568305903959")) < 1e-14


def test_extrapolate_validation(u_relaxed):
    with pytest.raises(RangeError):
        extrapolate_gamma(u_relaxed, 1, 950)
    with pytest.raises(RangeError):
        extrapolate_gamma(u_relaxed, 4, 0)
    with pytest.raises(RangeError):
        extrapolate_gamma(u_relaxed, 18, 983, prec=500)
    with pytest.raises(RangeError):
        extrapolate_gamma(u_relaxed, 4, 999)  # window exceeds the data
    with pytest.raises(ValidationError):
        extrapolate_gamma(u_relaxed, 4, 950, kind="slack")


def test_gamma_relaxed(u_relaxed):
    est = extrapolate_gamma(u_relaxed, 18, 983, kind="relaxed")
    assert isinstance(est, ExtrapolationEstimate)
    assert est.kind == "relaxed"
    assert est.k == 18 and est.window_start == 983
    assert est.precision == 672
    with mpmath.workprec(700):
        assert abs(est.gamma - mpmath.mpf(GAMMA_R_30)) < mpmath.mpf("1e-18")
    assert est.stability is not None
    assert est.stability < mpmath.mpf("1e-12")
    assert len(est.deltas) == 18
    assert "gamma" in est.summary_line()


def test_gamma_compacted(u_compacted):
    est = extrapolate_gamma(u_compacted, 18, 983, kind="compacted")
    with mpmath.workprec(700):
        assert abs(est.gamma - mpmath.mpf(GAMMA_C_30)) < mpmath.mpf("1e-18")
    assert est.stability < mpmath.mpf("1e-12")


def test_stability_needs_full_history(u_relaxed):
    # the trailing-window spread is only computed when all
    # STABILITY_WINDOWS windows fit inside the data
    est = extrapolate_gamma(
        {n: u_relaxed[n] for n in range(900, 920)}, 18, 902, kind="relaxed"
    )
    assert est.stability is None
    assert STABILITY_WINDOWS == 10


def test_order_two_closed_form(u_relaxed):
    # the k = 2 solve through (n, n+1) has the closed form
    #   v_n = ((n+1)^{1/3} u_{n+1} - n^{1/3} u_n) / ((n+1)^{1/3} - n^{1/3})
    # note the pairing: each u is weighted by its own cube root, which is
    # what cancels the m^{-1/3} correction term exactly
    n = 950
    est = extrapolate_gamma(u_relaxed, 2, n, 256, kind="relaxed")
    with mpmath.workprec(256):
        cb_n, cb_n1 = mpmath.cbrt(n), mpmath.cbrt(n + 1)
        closed = (cb_n1 * u_relaxed[n + 1] - cb_n * u_relaxed[n]) / (cb_n1 - cb_n)
        assert abs(est.gamma - closed) < mpmath.mpf("1e-60")
        # the transposed weighting does not cancel the correction term
        swapped = (cb_n1 * u_relaxed[n] - cb_n * u_relaxed[n + 1]) / (cb_n1 - cb_n)
        assert abs(est.gamma - swapped) > 100


def test_synthetic_recovery():
    # data built from known deltas must reproduce them to working precision
    k = 5
    with mpmath.workprec(min_precision_for(k)):
        deltas = [
            mpmath.mpf(3),
            mpmath.mpf(-2),
            mpmath.mpf(1) / 7,
            mpmath.mpf(5),
            mpmath.mpf(-1) / 3,
        ]
        synth = {
            m: mpmath.fsum(
                d * mpmath.mpf(m) ** (-mpmath.mpf(j) / 3)
                for j, d in enumerate(deltas)
            )
            for m in range(50, 60)
        }
    est = extrapolate_gamma(synth, k, 50)
    with mpmath.workprec(300):
        assert abs(est.gamma - 3) < mpmath.mpf("1e-60")
        assert abs(est.deltas[3] - 5) < mpmath.mpf("1e-55")


def test_estimate_serialization(u_relaxed):
    est = extrapolate_gamma(u_relaxed, 18, 983, kind="relaxed")
    data = est.to_dict()
    assert data["kind"] == "relaxed"
    assert data["k"] == 18
    assert data["window"] == [983, 1000]
    assert data["precision_bits"] == 672
    assert data["gamma"].startswith("166.952089574028")
    assert data["stability"] is not None


def test_ratio_diagnostics(relaxed_diagonal_1000):
    counts = {
        n: relaxed_diagonal_1000[n] for n in (1, 2, 3, 199, 200, 999, 1000)
    }
    rows = ratio_diagnostics("relaxed", counts)
    assert [row["n"] for row in rows] == [2, 3, 200, 1000]
    with mpmath.workprec(128):
        assert rows[0]["rho"] == 3
        assert abs(rows[1]["rho"] - mpmath.mpf(16) / 3) < mpmath.mpf("1e-30")
        by_n = {row["n"]: row for row in rows}
        # the remainder after the three explicit expansion terms shrinks
        assert abs(by_n[1000]["remainder"]) < abs(by_n[200]["remainder"])
        assert abs(by_n[200]["remainder"] - mpmath.mpf("1.0653304")) < 1e-6
        assert abs(by_n[1000]["remainder"] - mpmath.mpf("0.64066835")) < 1e-7
        # rescaled by n^{1/3} it stays bounded
        assert 6 < by_n[1000]["remainder_scaled"] < 7
    with pytest.raises(ValidationError):
        ratio_diagnostics("slack", counts)
