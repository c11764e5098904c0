"""Request/response schemas for the HTTP service.

The wire format for models mirrors the on-disk interchange document:
{lambda, k, degree, coeffs[], u_lo, u_hi}.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from .model import PolynomialQuantileModel, model_from_dict


class ModelPayload(BaseModel):
    model_config = {"populate_by_name": True}

    lam: float = Field(alias="lambda")
    k: float
    degree: int
    coeffs: List[float]
    u_lo: float
    u_hi: float

    @classmethod
    def from_model(cls, model: PolynomialQuantileModel) -> "ModelPayload":
        return cls(
            lam=model.base.lam, k=model.base.k, degree=model.degree,
            coeffs=list(model.coeffs), u_lo=model.valid_range[0],
            u_hi=model.valid_range[1])

    def to_model(self) -> PolynomialQuantileModel:
        return model_from_dict({
            "lambda": self.lam, "k": self.k, "degree": self.degree,
            "coeffs": self.coeffs, "u_lo": self.u_lo, "u_hi": self.u_hi})


class ReportSummary(BaseModel):
    average_pct: float
    minimum_pct: float
    maximum_pct: float
    skipped: int
    points: int


class ReportPayload(BaseModel):
    u: List[float]
    x_target: List[float]
    x_model: List[float]
    rel_err_pct: List[float]
    summary: ReportSummary

    @classmethod
    def from_report(cls, report) -> "ReportPayload":
        return cls(
            u=list(report.grid), x_target=list(report.target_values),
            x_model=list(report.model_values),
            rel_err_pct=list(report.rel_errors),
            summary=ReportSummary(
                average_pct=report.average, minimum_pct=report.minimum,
                maximum_pct=report.maximum, skipped=report.skipped,
                points=len(report.grid)))


class QuantileFitRequest(BaseModel):
    spec: str
    degree: int = 20
    lam: float = Field(default=1.0, alias="lambda")
    model_config = {"populate_by_name": True}
    shape_k: Optional[float] = None
    grid: Optional[int] = None
    range_lo: float = 1e-4
    range_hi: float = 1.0 - 1e-4
    audit_grid: int = 10_000


class QuantileFitResponse(BaseModel):
    model: ModelPayload
    report: ReportPayload
    metadata: dict


class AuditRequest(BaseModel):
    model: ModelPayload
    spec: str
    audit_grid: int = 10_000


class AuditResponse(BaseModel):
    report: ReportPayload
    metadata: dict


class DataFitRequest(BaseModel):
    data: List[float]
    degree: int = 20
    lam: float = Field(default=1.0, alias="lambda")
    model_config = {"populate_by_name": True}
    shape_k: float = 4.0
    range_lo: float = 1e-4
    range_hi: float = 1.0 - 1e-4
    curve_points: int = 10_000

    @field_validator("data")
    @classmethod
    def _data_nonempty(cls, v):
        if not v:
            raise ValueError("data must not be empty")
        return v


class MonotonicityPayload(BaseModel):
    grid_size: int
    n_violations: int
    violations: List[List[float]]
    ok: bool


class DiagnosticsPayload(BaseModel):
    sample_size: int
    degree: int
    condition_estimate: float
    residual: float
    pwms: List[float]
    monotonicity: MonotonicityPayload


class CurvePayload(BaseModel):
    x: List[float]
    f: List[Optional[float]]  # None where the density is undefined


class DataFitResponse(BaseModel):
    model: ModelPayload
    diagnostics: DiagnosticsPayload
    curve: CurvePayload


class SampleRequest(BaseModel):
    model: ModelPayload
    count: int
    seed: Optional[int] = None


class SampleResponse(BaseModel):
    values: List[float]


class EvalRequest(BaseModel):
    model: ModelPayload
    direction: Literal["quantile", "cdf", "pdf"]
    values: List[float]


class EvalItem(BaseModel):
    ok: bool
    value: Optional[float] = None
    flagged: bool = False
    error: Optional[str] = None


class EvalResponse(BaseModel):
    results: List[EvalItem]


class ErrorPayload(BaseModel):
    kind: Literal["input", "numerical", "unsupported", "internal"]
    message: str
