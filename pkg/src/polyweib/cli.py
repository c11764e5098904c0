"""Command line client for the fitting service.

Every subcommand speaks to the HTTP API.  By default the service runs
in-process; --server points the same commands at a remote instance.

Exit codes: 0 success, 2 bad input or unsupported request, 3 numerical
failure, 4 one or more per-value failures in `eval`.
"""

import asyncio
import math
import sys
from dataclasses import dataclass
from types import SimpleNamespace
from typing import Optional

import click
import httpx

from . import dataio
from .errors import InputError, PolyweibError
from .model import DEFAULT_RANGE, model_from_dict

_KIND_EXIT = {"input": 2, "unsupported": 2, "numerical": 3}


@dataclass
class RunConfig:
    """Validated bundle of the options shared by the fitting commands."""

    degree: int = 20
    lam: float = 1.0
    shape_k: Optional[float] = None
    grid: Optional[int] = None
    audit_grid: int = 10_000
    range_lo: float = DEFAULT_RANGE[0]
    range_hi: float = DEFAULT_RANGE[1]
    seed: Optional[int] = None
    strict: bool = False

    def __post_init__(self):
        if self.degree < 0:
            _fail(2, "degree must be >= 0")
        if not (0.0 < self.range_lo < self.range_hi < 1.0):
            _fail(2, "range bounds must satisfy 0 < lo < hi < 1")
        if self.audit_grid < 2:
            _fail(2, "audit grid must contain at least 2 points")
        if self.grid is not None and self.grid < self.degree + 1:
            _fail(2, "grid must contain at least degree+1 points")
        if self.shape_k is not None and self.shape_k <= 0.0:
            _fail(2, "shape k must be positive")
        if self.lam <= 0.0:
            _fail(2, "lambda must be positive")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)

    async def _go():
        from .service import app
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
                transport=transport, base_url="http://service.local",
                timeout=None) as client:
            return await client.post(path, json=payload)

    return asyncio.run(_go())


def _call(server: Optional[str], path: str, payload: dict) -> dict:
    try:
        resp = _post(server, path, payload)
    except httpx.HTTPError as exc:
        _fail(3, f"cannot reach service: {exc}")
    if resp.status_code == 200:
        return resp.json()
    if resp.status_code == 400:
        body = resp.json()
        _fail(_KIND_EXIT.get(body.get("kind"), 3), body.get("message", "unknown error"))
    if resp.status_code == 422:
        _fail(2, f"invalid request: {resp.text}")
    _fail(3, f"service returned HTTP {resp.status_code}: {resp.text[:500]}")


def _report_view(payload: dict) -> SimpleNamespace:
    summary = payload["summary"]
    return SimpleNamespace(
        grid=payload["u"], target_values=payload["x_target"],
        model_values=payload["x_model"], rel_errors=payload["rel_err_pct"],
        average=summary["average_pct"], minimum=summary["minimum_pct"],
        maximum=summary["maximum_pct"], skipped=summary["skipped"])


def _echo_summary(report: SimpleNamespace):
    click.echo(
        "rel err %%: avg=%.6e  min=%.6e  max=%.6e  (points=%d, skipped=%d)"
        % (report.average, report.minimum, report.maximum,
           len(report.grid), report.skipped))


def _write_report_files(report_payload: dict, out_report: str, extra: dict):
    view = _report_view(report_payload)
    dataio.write_report_csv(view, out_report, summary_extra=extra)
    click.echo(f"report -> {out_report}")
    click.echo(f"summary -> {dataio.summary_path_for(out_report)}")
    return view


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx, server):
    """Polynomial quantile models over a Weibull basis."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


def _fit_options(fn):
    fn = click.option("--degree", type=int, default=20, show_default=True)(fn)
    fn = click.option("--lambda", "lam", type=float, default=1.0,
                      show_default=True, help="Basis scale.")(fn)
    fn = click.option("--shape-k", type=float, default=None,
                      help="Basis shape; default 4 (6 for t targets).")(fn)
    fn = click.option("--range-lo", type=float, default=DEFAULT_RANGE[0],
                      show_default=True)(fn)
    fn = click.option("--range-hi", type=float, default=DEFAULT_RANGE[1],
                      show_default=True)(fn)
    return fn


@main.command("quantile-fit")
@click.argument("spec")
@_fit_options
@click.option("--grid", type=int, default=None,
              help="Fit grid size; default degree+1 (141 for t targets).")
@click.option("--audit-grid", type=int, default=10_000, show_default=True)
@click.option("--out-model", default="model.json", show_default=True)
@click.option("--out-report", default="report.csv", show_default=True)
@click.pass_context
def quantile_fit(ctx, spec, degree, lam, shape_k, range_lo, range_hi, grid,
                 audit_grid, out_model, out_report):
    """Fit a named quantile function, e.g. 'normal(mu=0,sigma=1)'."""
    cfg = RunConfig(degree=degree, lam=lam, shape_k=shape_k, grid=grid,
                    audit_grid=audit_grid, range_lo=range_lo,
                    range_hi=range_hi)
    body = _call(ctx.obj["server"], "/fit/quantile", {
        "spec": spec, "degree": cfg.degree, "lambda": cfg.lam,
        "shape_k": cfg.shape_k, "grid": cfg.grid, "range_lo": cfg.range_lo,
        "range_hi": cfg.range_hi, "audit_grid": cfg.audit_grid})
    fitted = model_from_dict(body["model"])
    dataio.write_model(out_model, fitted)
    click.echo(f"model -> {out_model}")
    view = _write_report_files(body["report"], out_report, body["metadata"])
    click.echo("distribution: %s" % body["metadata"].get("distribution", spec))
    _echo_summary(view)


@main.command("audit")
@click.argument("model_path")
@click.argument("spec")
@click.option("--audit-grid", type=int, default=10_000, show_default=True)
@click.option("--out-report", default="report.csv", show_default=True)
@click.pass_context
def audit_cmd(ctx, model_path, spec, audit_grid, out_report):
    """Re-check a stored model against its target distribution."""
    if audit_grid < 2:
        _fail(2, "audit grid must contain at least 2 points")
    fitted = _read_model(model_path)
    body = _call(ctx.obj["server"], "/audit", {
        "model": _model_payload(fitted), "spec": spec,
        "audit_grid": audit_grid})
    view = _write_report_files(body["report"], out_report, body["metadata"])
    _echo_summary(view)


@main.command("data-fit")
@click.argument("input_path")
@_fit_options
@click.option("--audit-grid", type=int, default=10_000, show_default=True,
              help="Number of points on the written density curve.")
@click.option("--out-model", default="model.json", show_default=True)
@click.option("--out-report", default="curve.csv", show_default=True)
@click.pass_context
def data_fit(ctx, input_path, degree, lam, shape_k, range_lo, range_hi,
             audit_grid, out_model, out_report):
    """Fit a model to raw observations by probability-weighted moments."""
    cfg = RunConfig(degree=degree, lam=lam, shape_k=shape_k,
                    audit_grid=audit_grid, range_lo=range_lo,
                    range_hi=range_hi)
    try:
        data = dataio.read_samples(input_path)
    except InputError as exc:
        _fail(2, str(exc))
    body = _call(ctx.obj["server"], "/fit/data", {
        "data": data, "degree": cfg.degree, "lambda": cfg.lam,
        "shape_k": cfg.shape_k if cfg.shape_k is not None else 4.0,
        "range_lo": cfg.range_lo, "range_hi": cfg.range_hi,
        "curve_points": cfg.audit_grid})
    fitted = model_from_dict(body["model"])
    dataio.write_model(out_model, fitted)
    click.echo(f"model -> {out_model}")
    curve = body["curve"]
    dens = [float("nan") if f is None else f for f in curve["f"]]
    dataio.write_curve_csv(out_report, curve["x"], dens)
    click.echo(f"density curve -> {out_report}")
    diag_path = dataio.diagnostics_path_for(out_report)
    dataio.write_json(diag_path, body["diagnostics"])
    click.echo(f"diagnostics -> {diag_path}")
    diag = body["diagnostics"]
    mono = diag["monotonicity"]
    click.echo(
        "n=%d degree=%d residual=%.3e cond=%.3e monotone=%s"
        % (diag["sample_size"], diag["degree"], diag["residual"],
           diag["condition_estimate"], "yes" if mono["ok"] else
           "NO (%d violating subintervals)" % mono["n_violations"]))


@main.command("sample")
@click.argument("model_path")
@click.argument("count", type=int)
@click.option("--seed", type=int, default=None)
@click.option("--strict", is_flag=True,
              help="Refuse to sample without an explicit --seed.")
@click.option("--out", default=None, metavar="PATH",
              help="Write samples to a file instead of stdout.")
@click.pass_context
def sample_cmd(ctx, model_path, count, seed, strict, out):
    """Draw COUNT pseudo-random variates from a stored model."""
    if strict and seed is None:
        _fail(2, "--strict requires --seed")
    if count < 0:
        _fail(2, "count must be >= 0")
    fitted = _read_model(model_path)
    body = _call(ctx.obj["server"], "/sample", {
        "model": _model_payload(fitted), "count": count, "seed": seed})
    values = body["values"]
    if out:
        dataio.write_samples(out, values)
        click.echo(f"samples -> {out} ({len(values)} values)")
    else:
        for v in values:
            click.echo(f"{v:.16e}")


@main.command("eval")
@click.argument("model_path")
@click.argument("values", nargs=-1)
@click.option("--direction", type=click.Choice(["quantile", "cdf", "pdf"]),
              required=True)
@click.option("--in", "in_path", default=None, metavar="PATH",
              help="Read one input value per line ('-' for stdin).")
@click.option("--strict", is_flag=True,
              help="Treat values outside the validated range as errors.")
@click.pass_context
def eval_cmd(ctx, model_path, values, direction, in_path, strict):
    """Evaluate the model's quantile, cdf or pdf at the given points."""
    fitted = _read_model(model_path)
    entries = _collect_eval_inputs(values, in_path)
    if not entries:
        _fail(2, "no input values; pass them as arguments or via --in")
    good = [(lineno, val) for lineno, val, err in entries if err is None]
    results = []
    if good:
        body = _call(ctx.obj["server"], "/eval", {
            "model": _model_payload(fitted), "direction": direction,
            "values": [val for _, val in good]})
        results = body["results"]
    by_line = {lineno: res for (lineno, _), res in zip(good, results)}
    failures = 0
    for lineno, _, err in entries:
        if err is not None:
            failures += 1
            click.echo(f"line {lineno}: {err}", err=True)
            continue
        res = by_line[lineno]
        if not res["ok"]:
            failures += 1
            click.echo(f"line {lineno}: {res['error']}", err=True)
            continue
        if res["flagged"]:
            if strict:
                failures += 1
                click.echo(f"line {lineno}: value outside validated range",
                           err=True)
                continue
            click.echo(f"line {lineno}: outside validated range", err=True)
        click.echo(f"{res['value']:.16e}")
    if failures:
        sys.exit(4)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn
    uvicorn.run("polyweib.service:app", host=host, port=port)


def _read_model(path: str):
    try:
        return dataio.read_model(path)
    except PolyweibError as exc:
        _fail(2, str(exc))


def _model_payload(model) -> dict:
    return {
        "lambda": model.base.lam, "k": model.base.k, "degree": model.degree,
        "coeffs": list(model.coeffs), "u_lo": model.valid_range[0],
        "u_hi": model.valid_range[1]}


def _collect_eval_inputs(args, in_path):
    """Returns [(lineno, value, error)] with error set for unparseable lines."""
    entries = []
    if in_path:
        if args:
            _fail(2, "pass values either as arguments or via --in, not both")
        if in_path == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(in_path, "r") as handle:
                    text = handle.read()
            except OSError as exc:
                _fail(2, f"cannot read {in_path}: {exc}")
        raw_lines = [(i, line) for i, line in
                     enumerate(text.splitlines(), start=1)]
    else:
        raw_lines = [(i, tok) for i, tok in enumerate(args, start=1)]
    for lineno, raw in raw_lines:
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            value = float(stripped)
        except ValueError:
            entries.append((lineno, None, f"not a number: {stripped!r}"))
            continue
        if not math.isfinite(value):
            entries.append((lineno, None, f"non-finite value: {stripped}"))
            continue
        entries.append((lineno, value, None))
    return entries


if __name__ == "__main__":
    main()
