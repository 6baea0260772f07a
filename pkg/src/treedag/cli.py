"""Command-line interface: counting, sampling, certification, estimation.

Every subcommand is a thin shell over one library call and writes that
call's own serialization (CSV for sequences and tables, JSON for
certificates and reports, SVG for figures), so CLI output is
byte-identical to the library's.

Exit codes: 0 success / PASS verdict; 1 check or certificate FAIL;
2 usage error (bad flags, bad ranges, malformed input); 3 capacity or
precision limit hit.  The environment variable TREEDAG_PRECISION_BITS
overrides the default interval precision.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from . import automata, bounds, exact_checks, exact_count, extrapolate, figures
from .errors import CapacityError, PrecisionError, TreedagError
from .sampling import SamplerContext, sample_compacted, sample_relaxed, unrank_relaxed
from .trees import to_path

PRECISION_ENV = "TREEDAG_PRECISION_BITS"

_EXIT_OK = 0
_EXIT_FAIL = 1
_EXIT_USAGE = 2
_EXIT_CAPACITY = 3


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _approx_fraction(value: float, name: str) -> Fraction:
    """Nearest small-denominator fraction to a flag value like 0.0833."""
    if not value > 0:
        raise click.UsageError(f"--{name} must be positive, got {value}")
    return Fraction(str(value)).limit_denominator(1000)


def _print_version(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    try:
        from importlib.metadata import version

        pkg_version = version("treedag")
    except Exception:  # pragma: no cover - metadata missing in odd installs
        pkg_version = "unknown"
    r9 = exact_count.relaxed_table(9, mode="rolling-row").diagonal(9)
    c9 = exact_count.compacted_table(9, mode="rolling-row").diagonal(9)
    click.echo(f"treedag {pkg_version} (self-test: r_9={r9}, c_9={c9})")
    ctx.exit(0)


@click.group()
@click.option(
    "--version",
    is_flag=True,
    callback=_print_version,
    expose_value=False,
    is_eager=True,
    help="Print the version plus the n=9 diagonal counts as a self-test.",
)
def cli():
    """Exact counting, sampling and certified asymptotics for relaxed and
    compacted binary trees."""


# ------------------------------------------------------------------ count


@cli.command()
@click.option(
    "--kind",
    type=click.Choice(["relaxed", "compacted", "both"]),
    default="both",
    show_default=True,
)
@click.option("--max-n", type=int, required=True, help="Largest size n to count.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def count(kind, max_n, output):
    """Diagonal count sequences as CSV."""
    if kind == "both":
        text = exact_count.paired_diagonal_csv(max_n)
    else:
        build = (
            exact_count.relaxed_table
            if kind == "relaxed"
            else exact_count.compacted_table
        )
        text = exact_count.diagonal_csv(build(max_n, mode="rolling-row"))
    _emit(text, output)


@cli.command()
@click.option(
    "--kind",
    type=click.Choice(["relaxed", "compacted"]),
    default="relaxed",
    show_default=True,
)
@click.option("--max-n", type=int, required=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def table(kind, max_n, output):
    """Full counting triangle (n,m,value rows) as CSV."""
    build = (
        exact_count.relaxed_table
        if kind == "relaxed"
        else exact_count.compacted_table
    )
    _emit(exact_count.triangle_csv(build(max_n, mode="full-triangle")), output)


# ----------------------------------------------------------------- sample


@cli.command()
@click.option(
    "--kind",
    type=click.Choice(["relaxed", "compacted"]),
    default="relaxed",
    show_default=True,
)
@click.option("--size", type=int, required=True, help="Tree size n.")
@click.option("--count", "how_many", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="RNG seed (default: entropy).")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def sample(kind, size, how_many, seed, output):
    """Uniform random objects, one token-encoded path per line.

    Compacted sampling is by rejection from the relaxed sampler; the
    attempt count is reported on stderr.
    """
    if how_many < 1:
        raise click.UsageError(f"--count must be >= 1, got {how_many}")
    ctx = SamplerContext(size, seed=seed)
    lines = []
    for _ in range(how_many):
        if kind == "relaxed":
            lines.append(sample_relaxed(size, ctx).tokens())
        else:
            lines.append(to_path(sample_compacted(size, ctx)).tokens())
    _emit("\n".join(lines) + "\n", output)
    if kind == "compacted":
        click.echo(
            f"# {ctx.total_attempts} rejection attempt(s) for {how_many} sample(s)",
            err=True,
        )


@cli.command()
@click.option(
    "--kind",
    type=click.Choice(["relaxed", "compacted"]),
    default="relaxed",
    show_default=True,
)
@click.option("--size", type=int, required=True)
@click.option("--index", type=int, required=True, help="Rank in [0, count(size)).")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def unrank(kind, size, index, output):
    """The index-th object of the given size, token-encoded."""
    if kind == "compacted":
        raise click.UsageError(
            "no direct unranking exists for compacted trees (their recurrence "
            "has a negative term); use `sample --kind compacted`"
        )
    _emit(unrank_relaxed(size, index).tokens() + "\n", output)


# ----------------------------------------------------------------- verify


_BOUND_LEMMAS = set(bounds.FAMILY_IDS)
_EXACT_LEMMAS = set(exact_checks.EXACT_CHECKS)


@cli.command()
@click.option(
    "--lemma",
    required=True,
    type=click.Choice(sorted(_BOUND_LEMMAS | _EXACT_LEMMAS)),
    help="Bound family (interval certification) or exact rational check.",
)
@click.option("--n-min", type=int, default=4, show_default=True)
@click.option("--n-max", type=int, default=400, show_default=True)
@click.option(
    "--eps",
    type=float,
    default=None,
    help="Grid margin for bound families (nearest fraction with denominator "
    "<= 1000 is used); default 1/12 for lower families, 1/3 for upper.",
)
@click.option(
    "--eta",
    type=float,
    default=None,
    help="Quartic prefactor coefficient for upper families (must exceed 2/9).",
)
@click.option(
    "--precision-bits",
    type=int,
    default=192,
    show_default=True,
    envvar=PRECISION_ENV,
    help=f"Interval precision (env {PRECISION_ENV}).",
)
@click.option(
    "--negative-control",
    is_flag=True,
    help="Flip the drift tail term's sign; the check must then FAIL.",
)
@click.option(
    "--threads",
    type=int,
    default=1,
    show_default=True,
    help="Upper cap on parallel grid workers (evaluation currently uses one).",
)
@click.option(
    "--max-len",
    type=int,
    default=60,
    show_default=True,
    help="Path length 2n sweep limit for the exact rational checks.",
)
@click.option(
    "--cutoff-n",
    "cutoff_n",
    type=int,
    default=50,
    show_default=True,
    help="Truncation height N for --lemma cutoff.",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
    help="--output format: json report/certificate, or csv measurement rows.",
)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def verify(
    ctx, lemma, n_min, n_max, eps, eta, precision_bits, negative_control,
    threads, max_len, cutoff_n, fmt, output,
):
    """Check one inequality family or exact lemma; exit 0 on PASS, 1 on FAIL."""
    if threads < 1:
        raise click.UsageError(f"--threads must be >= 1, got {threads}")
    if lemma in _BOUND_LEMMAS:
        overrides = {}
        if eps is not None:
            overrides["epsilon"] = _approx_fraction(eps, "eps")
        if eta is not None:
            overrides["eta"] = _approx_fraction(eta, "eta")
        params = bounds.family_params(lemma, **overrides)
        cert = bounds.check_inequality(
            params, n_min, n_max, precision_bits, negative_control=negative_control
        )
        click.echo(cert.summary_line())
        if output:
            if fmt == "csv":
                raise click.UsageError(
                    "bound certificates serialize as JSON; use --format json"
                )
            Path(output).write_text(cert.to_json() + "\n")
        ctx.exit(_EXIT_OK if cert.verdict == "PASS" else _EXIT_FAIL)
    else:
        if negative_control:
            raise click.UsageError(
                "--negative-control applies only to the bound families"
            )
        if lemma == "cutoff":
            report = exact_checks.check_cutoff(max_n=n_max, cutoff_N=cutoff_n)
        else:
            report = exact_checks.EXACT_CHECKS[lemma](max_len)
        click.echo(report.summary())
        if output:
            if fmt == "csv":
                Path(output).write_text(report.rows_csv())
            else:
                import json as _json

                Path(output).write_text(_json.dumps(report.to_dict(), indent=2) + "\n")
        ctx.exit(_EXIT_OK if report.passed else _EXIT_FAIL)


# ------------------------------------------------------------ extrapolate


@cli.command("extrapolate")
@click.option(
    "--kind",
    type=click.Choice(["relaxed", "compacted", "both"]),
    default="relaxed",
    show_default=True,
)
@click.option("--max-n", type=int, default=1000, show_default=True)
@click.option("--k", type=int, default=18, show_default=True)
@click.option(
    "--precision-bits",
    type=int,
    default=None,
    envvar=PRECISION_ENV,
    help=f"Defaults to the documented floor 96 + 32k (env {PRECISION_ENV}).",
)
@click.option(
    "--window-start",
    type=int,
    default=None,
    help="First n of the extrapolation window; default max_n - k + 1.",
)
@click.option(
    "--csv-min",
    type=int,
    default=None,
    help="With --output: first n of the n,u,v convergence CSV "
    "(default max(1, max_n - 200)).",
)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def extrapolate_cmd(kind, max_n, k, precision_bits, window_start, csv_min, output):
    """Estimate the stretched-exponential constant(s) by window extrapolation."""
    kinds = ["relaxed", "compacted"] if kind == "both" else [kind]
    if window_start is None:
        window_start = max_n - k + 1
    if window_start < 1:
        raise click.UsageError(
            f"window [{window_start}, {window_start + k - 1}] needs max_n >= k"
        )
    csv_parts = []
    for one in kinds:
        build = (
            exact_count.relaxed_table
            if one == "relaxed"
            else exact_count.compacted_table
        )
        diag = build(max_n, mode="rolling-row").diagonal()
        counts = {n: diag[n] for n in range(1, max_n + 1)}
        prec = (
            extrapolate.min_precision_for(k) if precision_bits is None else precision_bits
        )
        u = extrapolate.u_sequence(one, counts, prec)
        est = extrapolate.extrapolate_gamma(u, k, window_start, prec, kind=one)
        click.echo(est.summary_line())
        if output:
            lo = max(1, max_n - 200) if csv_min is None else csv_min
            csv_parts.append(
                extrapolate.convergence_csv(one, counts, k, lo, max_n, prec)
            )
    if output:
        if len(csv_parts) > 1:
            raise click.UsageError(
                "--output holds one kind's convergence CSV; pick "
                "--kind relaxed or --kind compacted"
            )
        Path(output).write_text(csv_parts[0])


# -------------------------------------------------------------------- dfa


@cli.group()
def dfa():
    """Minimal-automaton counting bounds."""


@dfa.command("bounds")
@click.option("--max-n", type=int, required=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def dfa_bounds_cmd(max_n, output):
    """Sandwich bounds 2^(n-1) c_n <= m_{2,n} <= 2^(n-1) r_n as CSV."""
    _emit(automata.dfa_bounds_csv(max_n), output)


@dfa.command("brute")
@click.option("--max-n", type=int, required=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def dfa_brute_cmd(max_n, output):
    """Exhaustive m_{2,n} between its bounds (small n only) as CSV."""
    _emit(automata.minimal_dfa_csv(max_n), output)


# ------------------------------------------------------------------- plot


@cli.command()
@click.option(
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="Convergence CSV (n,u,v) as written by `extrapolate --output`.",
)
@click.option(
    "--panel",
    type=click.Choice(list(figures.PANELS)),
    required=True,
    help="u: u_n vs 10 n^(-1/3); vhat: v_n - offset vs 10^18 n^(-6).",
)
@click.option(
    "--offset",
    type=float,
    default=figures.DEFAULT_V_OFFSET,
    show_default=True,
    help="Limit estimate subtracted in the vhat panel.",
)
@click.option("--n-min", type=int, default=None)
@click.option("--n-max", type=int, default=None)
@click.option("--title", type=str, default=None)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def plot(input_path, panel, offset, n_min, n_max, title, output):
    """Scatter-plot one convergence panel as a self-contained SVG."""
    rows = figures.convergence_rows_from_csv(Path(input_path).read_text())
    svg = figures.emit_figure(
        rows, panel, offset=offset, n_min=n_min, n_max=n_max, title=title
    )
    _emit(svg, output)


# ------------------------------------------------------------------ entry


def main(argv: Optional[list] = None) -> int:
    """Console entry point with the documented exit-code mapping."""
    # diagonal counts grow past the default int->str conversion guard
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(2_000_000)
    try:
        result = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return _EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return _EXIT_USAGE
    except (CapacityError, PrecisionError) as exc:
        click.echo(f"error: {exc}", err=True)
        return _EXIT_CAPACITY
    except TreedagError as exc:
        click.echo(f"error: {exc}", err=True)
        return _EXIT_USAGE
    return _EXIT_OK if result is None else int(result)


if __name__ == "__main__":
    sys.exit(main())
