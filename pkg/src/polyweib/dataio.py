"""File formats and atomic writes.

Sample input is one numeric value per line; '#' starts a comment. A
single-column CSV with an optional header row is accepted too (a lone
non-numeric first row is treated as the header). All writers go through a
temp-file-then-rename so failures never leave partial artifacts.
"""

import json
import math
import os
import tempfile
from typing import List

from .errors import InputError
from .model import PolynomialQuantileModel, model_from_json, model_to_json


def atomic_write_text(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".polyweib-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def parse_sample_text(text: str, origin: str = "<input>") -> List[float]:
    values: List[float] = []
    header_allowed = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        fields = [f for f in fields if f]
        if len(fields) != 1:
            raise InputError(
                f"{origin}:{lineno}: expected a single column, got {len(fields)} fields")
        token = fields[0]
        try:
            value = float(token)
        except ValueError:
            if header_allowed and not values:
                header_allowed = False
                continue
            raise InputError(f"{origin}:{lineno}: not a number: {token!r}")
        if not math.isfinite(value):
            raise InputError(f"{origin}:{lineno}: non-finite value: {token!r}")
        header_allowed = False
        values.append(value)
    return values


def read_samples(path: str) -> List[float]:
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_sample_text(text, origin=path)


def write_samples(path: str, values):
    lines = [f"{float(v):.16e}" for v in values]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_model(path: str) -> PolynomialQuantileModel:
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return model_from_json(text)


def write_model(path: str, model: PolynomialQuantileModel):
    atomic_write_text(path, model_to_json(model))


def summary_path_for(report_path: str) -> str:
    root, ext = os.path.splitext(report_path)
    if ext.lower() == ".csv":
        return root + ".summary.json"
    return report_path + ".summary.json"


def write_report_csv(report, path: str, summary_extra: dict = None):
    """FitReport as CSV (u, x_target, x_model, rel_err_pct) plus a JSON
    summary document alongside."""
    lines = ["u,x_target,x_model,rel_err_pct"]
    for u, xt, xm, err in zip(report.grid, report.target_values,
                              report.model_values, report.rel_errors):
        lines.append(f"{u:.16e},{xt:.16e},{xm:.16e},{err:.16e}")
    atomic_write_text(path, "\n".join(lines) + "\n")

    summary = {
        "average_pct": report.average,
        "minimum_pct": report.minimum,
        "maximum_pct": report.maximum,
        "skipped": report.skipped,
        "points": len(report.grid),
    }
    if summary_extra:
        summary.update(summary_extra)
    atomic_write_text(summary_path_for(path), json.dumps(summary, indent=2) + "\n")


def write_curve_csv(path: str, xs, fs):
    lines = ["x,f(x)"]
    for x, f in zip(xs, fs):
        lines.append(f"{x:.16e},{f:.16e}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def diagnostics_path_for(report_path: str) -> str:
    root, ext = os.path.splitext(report_path)
    if ext.lower() in (".csv", ".json"):
        return root + ".diagnostics.json"
    return report_path + ".diagnostics.json"


def write_json(path: str, payload: dict):
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")
