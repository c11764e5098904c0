"""HTTP service exposing fitting, auditing, sampling and evaluation.

Error contract: any library error surfaces as HTTP 400 with a body
{"kind": ..., "message": ...} where kind is "input", "unsupported" or
"numerical".  Validation failures of the request body itself use
FastAPI's standard 422 response.
"""

import math
import warnings

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import model as model_mod
from . import percentile, pwm, refdist
from .errors import (DomainError, InputError, NonMonotoneError, NumericalError,
                     OutOfRangeWarning, PolyweibError,
                     UnsupportedOperationError)
from .schemas import (AuditRequest, AuditResponse, CurvePayload,
                      DataFitRequest, DataFitResponse, DiagnosticsPayload,
                      EvalItem, EvalRequest, EvalResponse,
                      MonotonicityPayload, ModelPayload, QuantileFitRequest,
                      QuantileFitResponse, ReportPayload, SampleRequest,
                      SampleResponse)
from .weibull import WeibullBase

__version__ = "0.1.0"


def _error_kind(exc: PolyweibError) -> str:
    if isinstance(exc, UnsupportedOperationError):
        return "unsupported"
    if isinstance(exc, (InputError, DomainError)):
        return "input"
    if isinstance(exc, NumericalError):
        return "numerical"
    return "internal"


def _json_safe(obj):
    """Replace non-finite floats with strings so the JSON encoder accepts them."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {key: _json_safe(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(val) for val in obj]
    return obj


def create_app() -> FastAPI:
    app = FastAPI(title="polyweib", version=__version__)

    @app.exception_handler(PolyweibError)
    async def _polyweib_error(request: Request, exc: PolyweibError):
        return JSONResponse(
            status_code=400,
            content={"kind": _error_kind(exc), "message": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/fit/quantile", response_model=QuantileFitResponse)
    async def fit_quantile(req: QuantileFitRequest):
        fitted, report, meta = percentile.fit_named_detailed(
            req.spec, degree=req.degree, lam=req.lam, k=req.shape_k,
            grid_count=req.grid, range_lo=req.range_lo, range_hi=req.range_hi,
            audit_count=req.audit_grid)
        return QuantileFitResponse(
            model=ModelPayload.from_model(fitted),
            report=ReportPayload.from_report(report),
            metadata=_json_safe(meta))

    @app.post("/audit", response_model=AuditResponse)
    async def audit_model(req: AuditRequest):
        fitted = req.model.to_model()
        dist = refdist.parse_spec(req.spec)
        target = refdist.quantile_target(dist, base=fitted.base)
        report = percentile.audit(fitted, target, grid_count=req.audit_grid)
        meta = {"distribution": target.label, "audit_count": req.audit_grid}
        return AuditResponse(
            report=ReportPayload.from_report(report), metadata=_json_safe(meta))

    @app.post("/fit/data", response_model=DataFitResponse)
    async def fit_data(req: DataFitRequest):
        base = WeibullBase(req.lam, req.shape_k)
        data = np.asarray(req.data, dtype=float)
        fitted, diag = pwm.fit_pwm(
            data, base=base, degree=req.degree,
            valid_range=(req.range_lo, req.range_hi))
        mono = diag.monotonicity
        grid = percentile.pm_grid(
            req.curve_points, fitted.valid_range[0], fitted.valid_range[1])
        xs = model_mod.quantile_array(fitted, grid)
        ds = model_mod.derivative_array(fitted, grid)
        dens = [1.0 / d if d > 0.0 else None for d in ds]
        return DataFitResponse(
            model=ModelPayload.from_model(fitted),
            diagnostics=DiagnosticsPayload(
                sample_size=diag.sample_size, degree=diag.degree,
                condition_estimate=diag.condition_estimate,
                residual=diag.residual, pwms=list(diag.pwms.values),
                monotonicity=MonotonicityPayload(
                    grid_size=mono.grid_size, n_violations=mono.n_violations,
                    violations=[list(iv) for iv in mono.violations],
                    ok=mono.ok)),
            curve=CurvePayload(x=[float(x) for x in xs], f=dens))

    @app.post("/sample", response_model=SampleResponse)
    async def sample_model(req: SampleRequest):
        fitted = req.model.to_model()
        values = model_mod.sample(fitted, req.count, seed=req.seed)
        return SampleResponse(values=[float(v) for v in values])

    @app.post("/eval", response_model=EvalResponse)
    async def eval_model(req: EvalRequest):
        fitted = req.model.to_model()
        if req.direction in ("cdf", "pdf"):
            check = model_mod.check_monotone(fitted, 2048)
            if not check.ok:
                lo, hi = check.violations[0]
                raise NonMonotoneError(
                    "model is not increasing on [%.6g, %.6g]; %s is undefined"
                    % (lo, hi, req.direction), interval=(lo, hi))
        results = []
        for value in req.values:
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    if req.direction == "quantile":
                        out = model_mod.quantile(fitted, value)
                    elif req.direction == "cdf":
                        out = model_mod.cdf_at(fitted, value)
                    else:
                        out = model_mod.pdf_at(fitted, value)
                flagged = any(
                    issubclass(w.category, OutOfRangeWarning) for w in caught)
                results.append(EvalItem(ok=True, value=float(out),
                                        flagged=flagged))
            except PolyweibError as exc:
                results.append(EvalItem(ok=False, error=str(exc)))
        return EvalResponse(results=results)

    return app


app = create_app()
