"""Command line interface.

Exit codes: 0 success, 1 computational failure or failed verification,
2 usage, domain or cache-mismatch error.
"""

from __future__ import annotations

import json
import sys
from decimal import Decimal, InvalidOperation

import click
import mpmath

from .arith import ConfigurationError, DefExpError, DomainError, Params, make_context, to_mpf
from .qseries import g_lambert, g_series
from .report import fmt
from .series import eval_f
from .suites import SUITES, ZeroSource, run_suite
from .zeros import CacheError

FORMATS = click.Choice(["table", "csv", "json"])


def _params(q: str) -> Params:
    try:
        return Params.from_q(q)
    except DomainError as exc:
        raise click.BadParameter(str(exc), param_hint="--q") from None


def _context(digits: int):
    try:
        return make_context(digits)
    except ConfigurationError as exc:
        raise click.BadParameter(str(exc), param_hint="--digits") from None


def _tol(tol: str | None, digits: int):
    if tol is None:
        return mpmath.mpf(10) ** -digits
    try:
        value = Decimal(tol)
    except InvalidOperation:
        raise click.BadParameter(f"not a decimal literal: {tol!r}", param_hint="--tol") from None
    if value <= 0:
        raise click.BadParameter("must be positive", param_hint="--tol")
    return mpmath.mpf(tol)


def _fail(exc: Exception, code: int = 1):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _common(f):
    f = click.option("--q", "q", required=True, help="Deformation parameter in (0, 1), as a decimal.")(f)
    f = click.option("--digits", default=50, show_default=True, type=click.IntRange(min=1),
                     help="Target decimal digits of absolute accuracy.")(f)
    f = click.option("--format", "output_format", type=FORMATS, default="table", show_default=True)(f)
    return f


@click.group()
def main():
    """Deformed exponential f(x) = sum x^n/n! q^(n(n-1)/2): values, zeros, identity checks."""


@main.command("eval")
@_common
@click.option("--x", "x", required=True, help="Evaluation point, as a decimal.")
def cmd_eval(q, digits, output_format, x):
    """Evaluate f(x) with an error bound."""
    params = _params(q)
    ctx = _context(digits)
    try:
        Decimal(x)
    except InvalidOperation:
        raise click.BadParameter(f"not a decimal literal: {x!r}", param_hint="--x") from None
    try:
        sv = eval_f(to_mpf(x, ctx.working_bits + 4 * len(x)), params, ctx)
    except ConfigurationError as exc:
        _fail(exc, 2)
    except DefExpError as exc:
        _fail(exc)
    row = {
        "x": x,
        "value": fmt(sv.result, digits),
        "abs_err": fmt(sv.abs_err, 3),
        "terms_used": sv.terms_used,
        "cancellation_bits": sv.cancellation_bits,
        "working_bits": sv.working_bits,
    }
    _emit([row], output_format)


@main.command("zeros")
@_common
@click.option("--n-max", default=30, show_default=True, type=click.IntRange(min=1))
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), default=None,
              help="Zero cache file to reuse and update.")
@click.option("--tol-bits", default=128, show_default=True, type=click.IntRange(min=8))
def cmd_zeros(q, digits, output_format, n_max, cache_path, tol_bits):
    """Enumerate the zeros x_1 > x_2 > ... > x_n_max."""
    params = _params(q)
    ctx = _context(digits)
    try:
        source = ZeroSource(params, ctx, cache_path, tol_bits)
        zs = source.get(n_max)
    except (ConfigurationError, CacheError) as exc:
        _fail(exc, 2)
    except DefExpError as exc:
        _fail(exc)
    rows = [
        {
            "n": z.n,
            "x_n": fmt(z.x, 40),
            "err": fmt(z.x.abs_err, 3),
            "residual": fmt(z.residual.value, 3),
            "newton_iters": z.newton_iters,
            "bracket_source": "theorem-interval" if z.bracket_source == "theorem" else "fallback",
        }
        for z in zs
    ]
    _emit(rows, output_format)


@main.command("verify")
@click.argument("suite", type=click.Choice(list(SUITES) + ["all"]))
@_common
@click.option("--n-max", default=30, show_default=True, type=click.IntRange(min=3))
@click.option("--tol", default=None, help="Tolerance for the q-series identities (default 10^-digits).")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), default=None)
def cmd_verify(suite, q, digits, output_format, n_max, tol, cache_path):
    """Run a verification suite; exit status 1 if any check fails."""
    params = _params(q)
    ctx = _context(digits)
    tol = _tol(tol, digits)
    try:
        zeros = ZeroSource(params, ctx, cache_path)
        report = run_suite(suite, params, ctx, n_max=n_max, digits=digits, tol=tol, zeros=zeros)
    except (ConfigurationError, CacheError) as exc:
        _fail(exc, 2)
    except DefExpError as exc:
        _fail(exc)
    click.echo(report.render(output_format))
    sys.exit(0 if report.ok else 1)


@main.command("gq")
@_common
@click.option("--tol", default=None, help="Absolute tolerance (default 10^-digits).")
def cmd_gq(q, digits, output_format, tol):
    """g(q) = sum sigma(k) q^k by its power series and by its Lambert series."""
    params = _params(q)
    ctx = _context(digits)
    tol = _tol(tol, digits)
    try:
        gs = g_series(params, tol, ctx)
        gl = g_lambert(params, tol, ctx)
    except DomainError as exc:
        _fail(exc, 2)
    except ConfigurationError as exc:
        _fail(exc, 2)
    diff = abs(mpmath.fsub(gs.value, gl.value, exact=True))
    bound = mpmath.fadd(gs.abs_err, gl.abs_err, exact=True)
    row = {
        "g_series": fmt(gs, digits),
        "g_lambert": fmt(gl, digits),
        "diff": fmt(diff, 3),
        "bound": fmt(bound, 3),
    }
    _emit([row], output_format)
    sys.exit(0 if diff <= bound else 1)


def _emit(rows: list[dict], output_format: str) -> None:
    if output_format == "json":
        click.echo(json.dumps(rows, indent=1))
    elif output_format == "csv":
        import csv
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        click.echo(buf.getvalue(), nl=False)
    else:
        keys = list(rows[0])
        widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in keys}
        click.echo("  ".join(k.ljust(widths[k]) for k in keys))
        for r in rows:
            click.echo("  ".join(str(r[k]).ljust(widths[k]) for k in keys))


if __name__ == "__main__":
    main()
