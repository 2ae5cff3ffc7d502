"""Command-line front end: ``deglap eval|gamma|transform|verify``.

Exit codes: 0 ok, 2 parse error, 3 domain or divergence, 4 unsupported
shape, 5 unknown check id, 1 anything else.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import degenfun, numlap, symlap, verify
from .errors import DomainError, ParseError, ToleranceNotReached, UnknownCheckId, UnsupportedShape
from .expr import eval_at, parse

EXIT_PARSE, EXIT_DOMAIN, EXIT_UNSUPPORTED, EXIT_UNKNOWN_CHECK = 2, 3, 4, 5


def fmt(x) -> str:
    return format(float(x), ".9g")


def jnum(x):
    """Round to 9 significant digits so JSON output is platform stable."""
    return None if x is None else float(format(float(x), ".9g"))


def _dump(obj):
    click.echo(json.dumps(obj, indent=2))


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            _fail(EXIT_PARSE, f"parse error {exc}")
        except UnsupportedShape as exc:
            message = str(exc).replace("use the numeric path", "rerun with --numeric --s S")
            if "--numeric" not in message:
                message += "; rerun with --numeric --s S"
            _fail(EXIT_UNSUPPORTED, message)
        except UnknownCheckId as exc:
            _fail(EXIT_UNKNOWN_CHECK, str(exc))
        except (DomainError, OverflowError) as exc:
            _fail(EXIT_DOMAIN, str(exc))
        except ToleranceNotReached as exc:
            _fail(1, f"tolerance not reached: {exc}")

    return wrapper


lambda_option = click.option("--lambda", "lam", type=float, required=True, help="degeneracy parameter, >= 0")
json_option = click.option("--json", "as_json", is_flag=True, help="machine-readable output")


@click.group()
def cli():
    """Degenerate Laplace transform and degenerate gamma toolkit."""


@cli.command("eval")
@click.option("--expr", "text", required=True)
@lambda_option
@click.option("--t", type=float, required=True)
@json_option
@_guarded
def cmd_eval(text, lam, t, as_json):
    """Evaluate an expression in t."""
    lam = degenfun.lam_value(lam)
    value = float(eval_at(parse(text), lam, t))
    if as_json:
        _dump({"expr": text, "lambda": jnum(lam), "t": jnum(t), "value": jnum(value)})
    else:
        click.echo(fmt(value))


@cli.command("gamma")
@lambda_option
@click.option("--s", type=float, required=True)
@click.option("--method", type=click.Choice(["beta", "quadrature", "product"]), default="beta", show_default=True)
@click.option("--tol", type=float, default=numlap.DEFAULT_TOL, show_default=True)
@json_option
@_guarded
def cmd_gamma(lam, s, method, tol, as_json):
    """Degenerate gamma function Gamma_lambda(s)."""
    degenfun.check_gamma_domain(lam, s)
    err = None
    if method == "beta":
        value = degenfun.deg_gamma(lam, s)
    elif method == "product":
        if s != int(s):
            raise DomainError(f"--method product needs an integer s, got {s:.9g}")
        value = degenfun.deg_gamma_int(lam, int(s))
    else:
        q = numlap.num_deg_gamma(lam, s, tol)
        value, err = q.value, q.abs_error_estimate
    if as_json:
        _dump({"lambda": jnum(lam), "s": jnum(s), "method": method, "value": jnum(value),
               "abs_error_estimate": jnum(err)})
    else:
        click.echo(fmt(value))


@cli.command("transform")
@click.option("--expr", "text", required=True)
@lambda_option
@click.option("--s", type=float, default=None)
@click.option("--numeric", is_flag=True, help="force the quadrature path")
@click.option("--tol", type=float, default=numlap.DEFAULT_TOL, show_default=True)
@json_option
@_guarded
def cmd_transform(text, lam, s, numeric, tol, as_json):
    """Degenerate Laplace transform, closed form or quadrature."""
    lam = degenfun.lam_value(lam)
    f = parse(text)
    out = {"closed_form": None, "sigma_min": None, "trace": [], "value": None, "abs_error_estimate": None}
    if numeric:
        if s is None:
            raise click.UsageError("--numeric needs --s")
        try:
            result = symlap.transform(f, lam)
            out["closed_form"], out["trace"] = result.text, list(result.trace)
        except UnsupportedShape:
            pass
        out["sigma_min"] = symlap.convergence_threshold(f, lam)
        q = numlap.num_transform(f, lam, s, tol)
        out["trace"].append("quadrature")
        out["value"], out["abs_error_estimate"] = q.value, q.abs_error_estimate
    else:
        result = symlap.transform(f, lam)
        out["closed_form"], out["sigma_min"], out["trace"] = result.text, result.sigma_min, list(result.trace)
        if s is not None:
            out["value"] = result.evaluate(s)
    if as_json:
        for key in ("sigma_min", "value", "abs_error_estimate"):
            out[key] = jnum(out[key])
        if out["value"] is None:
            del out["value"]
        if out["abs_error_estimate"] is None:
            del out["abs_error_estimate"]
        _dump(out)
        return
    if out["closed_form"] is not None:
        click.echo(f"closed_form: {out['closed_form']}")
    click.echo(f"sigma_min: {fmt(out['sigma_min'])}")
    click.echo(f"trace: {', '.join(out['trace'])}")
    if out["value"] is not None:
        click.echo(f"value: {fmt(out['value'])}")
    if out["abs_error_estimate"] is not None:
        click.echo(f"abs_error_estimate: {fmt(out['abs_error_estimate'])}")


@cli.command("verify")
@click.option("--check", "checks", multiple=True, help="check id; repeatable")
@click.option("--all", "run_all", is_flag=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@json_option
@_guarded
def cmd_verify(checks, run_all, jobs, as_json):
    """Run the numeric verification checks."""
    if not checks and not run_all:
        raise click.UsageError("give --check ID or --all")
    ids = None if run_all else list(dict.fromkeys(checks))
    reports = verify.run_all(ids=ids, jobs=jobs)
    if as_json:
        _dump([r.to_json() for r in reports])
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            if verify.REGISTRY[r.check_id].informational:
                status += " (informational)"
            click.echo(f"{r.check_id:<15} {len(r.parameter_grid):>5} {fmt(r.max_rel_error):>16}  {status}")
    if not verify.all_passed(reports):
        sys.exit(1)


def main(argv=None):
    cli.main(args=argv, prog_name="deglap")


if __name__ == "__main__":
    main()
