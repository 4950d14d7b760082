"""Command-line front end.

Every subcommand emits JSON by default (``--format text`` for a plain
rendering).  Computed scalar values are serialized as decimal strings so
that arbitrarily large integers survive any JSON reader; echoed inputs
and group shapes stay plain numbers.

Exit codes: 0 on success (and on a verification run with zero failures),
1 when a computation is undefined on the inputs or a verification run
records failures, 2 on malformed input.
"""

from __future__ import annotations

import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .classgroups import ClassGroup, ClassGroupError, cl_prime
from .growth import (
    ElementaryModule,
    GrowthError,
    fit_invariants,
    fit_with_known_mu,
    gold_lambda,
    quotient_order_exponent,
)
from .localfields import (
    AbelianLocalField,
    LocalFieldError,
    indices,
    subgroup_from_generators,
)
from .padic import (
    DEFAULT_PRECISION,
    PadicError,
    divisor_degree,
    log_valuation,
    principal_divisor,
)
from .series import DistinguishedPoly, LambdaElem, SeriesError, weierstrass
from .tables import TableParseError, parse_tables
from .verify import CHECK_NAMES, VerificationReport, verify

_DOMAIN_ERRORS = (PadicError, SeriesError, GrowthError, LocalFieldError,
                  ClassGroupError)


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(1)


def _emit(data: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(data, indent=2, sort_keys=True))
        return
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        click.echo(f"{key}: {value}")


class _FractionType(click.ParamType):
    name = "fraction"

    def convert(self, value, param, ctx):
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational (use NUM or NUM/DEN)",
                      param, ctx)


class _IntListType(click.ParamType):
    name = "ints"

    def convert(self, value, param, ctx):
        text = str(value).strip()
        if not text:
            return ()
        try:
            return tuple(int(part) for part in text.split(","))
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated integer list",
                      param, ctx)


_FRACTION = _FractionType()
_INT_LIST = _IntListType()


def _parse_poly(text: str, ell: int) -> DistinguishedPoly:
    """A polynomial in T like ``T^2+3*T+3`` (the * is optional)."""
    import sympy

    t = sympy.Symbol("T")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"T": t})
        poly = sympy.Poly(expr, t)
        coeffs = list(reversed(poly.all_coeffs()))
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise click.BadParameter(f"cannot read polynomial {text!r}: {exc}")
    if not all(c.is_integer for c in coeffs):
        raise click.BadParameter(f"polynomial {text!r} has non-integer coefficients")
    try:
        return DistinguishedPoly(ell, tuple(int(c) for c in coeffs))
    except ValueError as exc:
        raise click.BadParameter(f"polynomial {text!r}: {exc}")


def _format_option(fn):
    return click.option("--format", "fmt", type=click.Choice(["json", "text"]),
                        default="json", show_default=True,
                        help="Output rendering.")(fn)


@click.group()
@click.version_option(package_name="iwalog")
def main() -> None:
    """Arithmetic of logarithmic divisors, Iwasawa-module growth laws, and
    verification of layered class-group tables."""


@main.command()
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--p", "p", required=True, type=int, help="Place to evaluate at.")
@click.option("--x", "x", required=True, type=_FRACTION, help="Rational NUM/DEN.")
@click.option("--prec", type=int, default=DEFAULT_PRECISION, show_default=True)
@_format_option
def logval(ell: int, p: int, x: Fraction, prec: int, fmt: str) -> None:
    """Logarithmic valuation of a rational at one prime."""
    try:
        value = log_valuation(x, p, ell, prec)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"ell": ell, "p": p, "x": str(x), "prec": value.prec,
           "valuation": str(value.value)}, fmt)


@main.command()
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--x", "x", required=True, type=_FRACTION, help="Rational NUM/DEN.")
@click.option("--prec", type=int, default=DEFAULT_PRECISION, show_default=True)
@_format_option
def divisor(ell: int, x: Fraction, prec: int, fmt: str) -> None:
    """Principal logarithmic divisor of a rational, and its degree."""
    try:
        div = principal_divisor(x, ell, prec)
        degree = divisor_degree(div)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"ell": ell, "x": str(x), "prec": prec,
           "divisor": div.to_json_list(), "degree": str(degree.value)}, fmt)


@main.command()
@click.option("--p", "p", required=True, type=int, help="Odd residue prime.")
@click.option("--m", "m", required=True, type=int, help="Conductor-style modulus.")
@click.option("--subgroup", type=_INT_LIST, default="",
              help="Comma-separated generators of H inside (Z/m)*; empty = trivial.")
@_format_option
def localidx(p: int, m: int, subgroup: tuple, fmt: str) -> None:
    """Ramification/inertia indices e, f and their logarithmic variants."""
    try:
        h = subgroup_from_generators(p, m, subgroup)
        quad = indices(AbelianLocalField(p, m, h))
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit(quad.to_json_dict(), fmt)


@main.command(name="weierstrass")
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--coeffs", required=True, type=_INT_LIST,
              help="Series coefficients c0,c1,... (low to high).")
@click.option("--prec", type=int, default=DEFAULT_PRECISION, show_default=True)
@click.option("--order", type=int, default=None,
              help="Truncation order in T (default: number of coefficients + 8).")
@_format_option
def weierstrass_cmd(ell: int, coeffs: tuple, prec: int, order: int | None,
                    fmt: str) -> None:
    """Factor a series as ell^mu * (distinguished polynomial) * unit."""
    if order is None:
        order = len(coeffs) + 8
    try:
        f = LambdaElem.from_ints(coeffs, ell, prec, order)
        fact = weierstrass(f)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"ell": ell, "prec": prec, "order": order,
           "mu": str(fact.mu), "lambda": str(fact.lam),
           "poly": [str(c) for c in fact.poly.coeffs],
           "unit": fact.unit.to_json_list()}, fmt)


@main.command()
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--ell-parts", type=_INT_LIST, default="",
              help="Exponents m_i of the Lambda/(ell^m_i) summands.")
@click.option("--polys", type=str, default="",
              help="Distinguished polynomials, ';'-separated, e.g. \"T^2+3;T-3\".")
@click.option("--max-n", required=True, type=int, help="Last layer to compute.")
@_format_option
def growth(ell: int, ell_parts: tuple, polys: str, max_n: int, fmt: str) -> None:
    """Layerwise quotient orders of an elementary module, with a fitted
    growth law once three layers are available."""
    if max_n < 0:
        raise click.BadParameter("--max-n must be >= 0")
    poly_parts = tuple(_parse_poly(part, ell)
                       for part in polys.split(";") if part.strip())
    try:
        module = ElementaryModule(ell, ell_parts, poly_parts)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    try:
        exponents = [quotient_order_exponent(module, n) for n in range(max_n + 1)]
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    out = {"ell": ell, "max_n": max_n, "ell_parts": list(ell_parts),
           "exponents": [str(e) for e in exponents], "fit": None}
    if len(exponents) >= 3:
        try:
            out["fit"] = fit_invariants(exponents, ell).to_json_dict()
        except GrowthError:
            pass  # not stabilized yet; exponents alone are still the answer
    _emit(out, fmt)


@main.command()
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--orders", required=True, type=_INT_LIST,
              help="Order exponents e_0,e_1,...")
@click.option("--mu", type=int, default=None,
              help="Known mu; switches to the two-point fit.")
@click.option("--stable-from", type=int, default=0, show_default=True,
              help="First layer the growth law must cover (with --mu).")
@_format_option
def fit(ell: int, orders: tuple, mu: int | None, stable_from: int, fmt: str) -> None:
    """Fit e_n = mu*ell^n + lambda*n + nu to an exponent sequence."""
    try:
        if mu is None:
            triple = fit_invariants(orders, ell)
        else:
            triple = fit_with_known_mu(orders, ell, mu, stable_from)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"ell": ell, "orders": list(orders), **triple.to_json_dict()}, fmt)


@main.command()
@click.option("--ell", required=True, type=int, help="Odd base prime.")
@click.option("--orders", required=True, type=_INT_LIST,
              help="Quotient-group order exponents e'_0,e'_1,...")
@_format_option
def gold(ell: int, orders: tuple, fmt: str) -> None:
    """Lambda from the first early stabilization of quotient orders."""
    try:
        lam = gold_lambda(orders, ell)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"ell": ell, "orders": list(orders),
           "lambda": None if lam is None else str(lam)}, fmt)


@main.command()
@click.option("--d", "d", required=True, type=int,
              help="Squarefree negative integer defining Q(sqrt(d)).")
@click.option("--ell", required=True, type=int, help="Odd prime.")
@_format_option
def classgroup(d: int, ell: int, fmt: str) -> None:
    """Form class number, its ell-part, and the quotient by the classes of
    primes above ell."""
    try:
        group = ClassGroup(d)
        part = group.ell_part(ell)
        quot = cl_prime(d, ell)
    except _DOMAIN_ERRORS as exc:
        _emit_error(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    _emit({"d": d, "ell": ell, "h": str(group.h),
           "ell_part": part.to_list(), "cl_prime": quot.to_list()}, fmt)


def _report_text(report: VerificationReport) -> list:
    lines = []
    for row in report.rows:
        head = (f"ell={row['ell']} d={row['d']} {row['tower']}"
                f" (ell {row['ell_splitting']})")
        states = "  ".join(f"{c['name']}={c['status']}" for c in row["checks"])
        lines.append(f"{head}: {states}")
        for check in row["checks"]:
            if check["status"] == "fail":
                detail = {k: check[k] for k in ("expected", "computed", "reason")
                          if k in check}
                lines.append(f"  FAIL {check['name']}: "
                             f"{json.dumps(detail, sort_keys=True)}")
    s = report.summary
    lines.append(f"rows={s['rows']} checks={s['checks']} passed={s['passed']} "
                 f"failed={s['failed']} skipped={s['skipped']}")
    return lines


def _write_checks_csv(report: VerificationReport, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ell", "d", "tower", "check", "status", "reason"])
        for row in report.rows:
            for check in row["checks"]:
                writer.writerow([row["ell"], row["d"], row["tower"],
                                 check["name"], check["status"],
                                 check.get("reason", "")])


def _write_figures(rows, report: VerificationReport, fig_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups = {}
    for row in rows:
        groups.setdefault((row.ell, row.tower), []).append(row)
    if groups:
        fig, axes = plt.subplots(1, len(groups),
                                 figsize=(4.5 * len(groups), 3.6),
                                 squeeze=False)
        for ax, (key, members) in zip(axes[0], sorted(groups.items())):
            ell, tower = key
            for row in members:
                exps = row.clog_exponents()
                ax.plot(range(len(exps)), exps, marker="o", linewidth=1,
                        label=f"d={row.d}")
            ax.set_title(f"ell={ell}, {tower}")
            ax.set_xlabel("layer n")
            ax.set_ylabel("order exponent")
            ax.xaxis.get_major_locator().set_params(integer=True)
            ax.legend(fontsize=6, ncol=2)
        fig.tight_layout()
        fig.savefig(fig_dir / "growth_curves.png", dpi=120)
        plt.close(fig)

    by_check = report.summary["by_check"]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    xs = range(len(CHECK_NAMES))
    for offset, status, color in ((-0.25, "pass", "#2a9d2a"),
                                  (0.0, "fail", "#cc2222"),
                                  (0.25, "skip", "#999999")):
        ax.bar([x + offset for x in xs],
               [by_check[name][status] for name in CHECK_NAMES],
               width=0.25, label=status, color=color)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(CHECK_NAMES, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("checks")
    ax.legend()
    fig.tight_layout()
    fig.savefig(fig_dir / "check_outcomes.png", dpi=120)
    plt.close(fig)


@main.command(name="verify-tables")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Table file (JSON array or CSV).")
@click.option("--report", "report_path", type=click.Path(dir_okay=False),
              default=None, help="Also write the JSON report here.")
@click.option("--outdir", type=click.Path(file_okay=False), default=None,
              help="Write report.json, checks.csv and figures/*.png here.")
@_format_option
def verify_tables(input_path: str, report_path: str | None,
                  outdir: str | None, fmt: str) -> None:
    """Run all table checks; exit 0 only if nothing failed."""
    try:
        rows = parse_tables(input_path)
    except TableParseError as exc:
        click.echo(json.dumps({"error": type(exc).__name__,
                               "message": str(exc)}, sort_keys=True), err=True)
        sys.exit(2)
    report = verify(rows)
    payload = report.to_json()
    if report_path is not None:
        Path(report_path).write_text(payload)
    if outdir is not None:
        out = Path(outdir)
        fig_dir = out / "figures"
        fig_dir.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(payload)
        _write_checks_csv(report, out / "checks.csv")
        _write_figures(rows, report, fig_dir)
    if fmt == "json":
        click.echo(payload, nl=False)
    else:
        for line in _report_text(report):
            click.echo(line)
    sys.exit(0 if report.failure_count == 0 else 1)


if __name__ == "__main__":  # pragma: no cover
    main()
