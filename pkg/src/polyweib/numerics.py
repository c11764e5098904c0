"""Dense numerical kernels.

Log-gamma, Gauss-Legendre rules on [-1, 1], and orthogonal-factorization
solvers for square and overdetermined systems with a spectral condition
estimate. The solvers equilibrate columns before factorizing because the
monomial bases used elsewhere in this package span many orders of magnitude
across columns.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, InputError, SingularityError


@dataclass(frozen=True)
class DenseMatrix:
    """Dense real matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DomainError("matrix dimensions must be at least 1x1")
        if len(self.entries) != self.rows * self.cols:
            raise InputError("entry count does not match rows*cols")
        if not all(math.isfinite(e) for e in self.entries):
            raise InputError("matrix entries must be finite")

    @classmethod
    def from_array(cls, a) -> "DenseMatrix":
        arr = np.asarray(a, dtype=float)
        if arr.ndim != 2:
            raise InputError("expected a 2-D array")
        return cls(arr.shape[0], arr.shape[1], tuple(arr.ravel().tolist()))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float).reshape(self.rows, self.cols)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes/weights on the open interval (-1, 1)."""

    nodes: tuple
    weights: tuple
    order: int


def log_gamma(x) -> float:
    """ln Gamma(x) for x > 0."""
    try:
        xf = float(x)
    except (TypeError, ValueError):
        raise DomainError("log_gamma argument must be a real number")
    if not math.isfinite(xf) or xf <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(xf)


_GL_CACHE: dict = {}


def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule of the given order (1..2048)."""
    if not isinstance(order, int) or isinstance(order, bool):
        raise DomainError("order must be an integer")
    if not 1 <= order <= 2048:
        raise DomainError(f"order must be in [1, 2048], got {order}")
    rule = _GL_CACHE.get(order)
    if rule is None:
        x, w = leggauss(order)
        if not (np.all(np.abs(x) < 1.0) and np.all(w > 0.0)):
            raise SingularityError("Gauss-Legendre construction produced invalid nodes")
        if abs(math.fsum(w.tolist()) - 2.0) > 1e-12:
            raise SingularityError("Gauss-Legendre weights do not sum to 2")
        rule = QuadratureRule(tuple(x.tolist()), tuple(w.tolist()), order)
        _GL_CACHE[order] = rule
    return rule


def _as_matrix(A) -> np.ndarray:
    if isinstance(A, DenseMatrix):
        return A.to_array()
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise InputError("expected a matrix")
    if not np.isfinite(arr).all():
        raise InputError("matrix entries must be finite")
    return arr


def _as_vector(b, length: int) -> np.ndarray:
    vec = np.asarray(b, dtype=float).reshape(-1)
    if vec.size != length:
        raise InputError(f"right-hand side length {vec.size} != {length}")
    if not np.isfinite(vec).all():
        raise InputError("right-hand side must be finite")
    return vec


def _equilibrated_qr(A: np.ndarray):
    """Column-equilibrate, then Householder QR (reduced)."""
    scale = np.max(np.abs(A), axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    Q, R = np.linalg.qr(A / scale, mode="reduced")
    return Q, R, scale

def _start_vector(n: int) -> np.ndarray:
    # deterministic, not axis-aligned, no zero components
    v = 1.0 + 0.5 * np.sin(1.0 + np.arange(n))
    return v / np.linalg.norm(v)


def _sigma_extremes(R: np.ndarray, scale: np.ndarray, iters: int = 40):
    """Extreme singular values of R @ diag(scale), which shares the singular
    spectrum of the equilibrated-then-unscaled input matrix."""
    B = R * scale[None, :]
    n = B.shape[1]
    v = _start_vector(n)
    smax = 0.0
    for _ in range(iters):
        z = B.T @ (B @ v)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0, 0.0
        smax = math.sqrt(nz)
        v = z / nz

    d = np.abs(np.diag(R))
    if (d == 0.0).any() or not np.isfinite(d).all():
        return smax, 0.0
    v = _start_vector(n)
    growth = 0.0
    for _ in range(iters):
        # w = B^{-T} B^{-1} v, accumulated through triangular factors
        t = np.linalg.solve(R, v) / scale
        t = np.linalg.solve(R.T, t / scale)
        growth = np.linalg.norm(t)
        if not np.isfinite(growth) or growth == 0.0:
            return smax, 0.0
        v = t / growth
    smin = 1.0 / math.sqrt(growth)
    return smax, smin


def condition_estimate(A) -> float:
    """Spectral condition number estimate of a matrix with rows >= cols.

    Power iteration for the largest singular value and inverse iteration
    through the R factor for the smallest. Returns ``inf`` for matrices that
    are exactly rank-deficient in floating point.
    """
    arr = _as_matrix(A)
    if arr.shape[0] < arr.shape[1]:
        raise DomainError("condition estimate requires rows >= cols")
    _, R, scale = _equilibrated_qr(arr)
    smax, smin = _sigma_extremes(R, scale)
    if smin == 0.0:
        return float("inf")
    return smax / smin


def _compensated_residual(A: np.ndarray, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows = []
    for j in range(A.shape[0]):
        terms = (A[j, :] * x).tolist()
        terms.append(-b[j])
        rows.append(math.fsum(terms))
    return np.asarray(rows)


def solve_linear(A, b) -> Tuple[np.ndarray, float]:
    """Solve a square system by equilibrated Householder QR.

    Returns ``(solution, condition_estimate)``. A couple of compensated
    iterative-refinement passes polish the solution. Raises
    :class:`SingularityError` only when the factorization collapses outright
    (zero or non-finite pivot, non-finite solution); very ill-conditioned but
    numerically solvable systems go through, with the estimate as the caller's
    warning.
    """
    arr = _as_matrix(A)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError("solve_linear requires a square matrix")
    vec = _as_vector(b, arr.shape[0])

    Q, R, scale = _equilibrated_qr(arr)
    d = np.abs(np.diag(R))
    if (d == 0.0).any() or not np.isfinite(d).all():
        raise SingularityError(
            "matrix is singular to working precision", float("inf"))

    def factor_solve(rhs):
        return np.linalg.solve(R, Q.T @ rhs) / scale

    x = factor_solve(vec)
    if not np.isfinite(x).all():
        raise SingularityError(
            "solution overflowed; matrix is singular to working precision",
            float("inf"))

    # compensated iterative refinement, keep the best iterate
    r = _compensated_residual(arr, x, vec)
    best_x, best_norm = x, np.linalg.norm(r)
    for _ in range(3):
        if best_norm == 0.0:
            break
        dx = factor_solve(r)
        if not np.isfinite(dx).all():
            break
        x = x - dx
        r = _compensated_residual(arr, x, vec)
        norm = np.linalg.norm(r)
        if norm < best_norm:
            best_x, best_norm = x, norm
        else:
            break

    smax, smin = _sigma_extremes(R, scale)
    cond = smax / smin if smin > 0.0 else float("inf")
    if not math.isfinite(cond):
        raise SingularityError("matrix is singular to working precision", cond)
    return best_x, cond


def solve_least_squares(A, b) -> Tuple[np.ndarray, float, float]:
    """Minimize ||Ax - b|| for rows >= cols via equilibrated Householder QR.

    Returns ``(solution, residual_norm, condition_estimate)`` where the
    residual is evaluated directly from the returned solution with
    compensated summation.
    """
    arr = _as_matrix(A)
    if arr.shape[0] < arr.shape[1]:
        raise DomainError("solve_least_squares requires rows >= cols")
    vec = _as_vector(b, arr.shape[0])

    Q, R, scale = _equilibrated_qr(arr)
    d = np.abs(np.diag(R))
    if (d == 0.0).any() or not np.isfinite(d).all():
        raise SingularityError(
            "matrix is rank deficient to working precision", float("inf"))

    x = np.linalg.solve(R, Q.T @ vec) / scale
    if not np.isfinite(x).all():
        raise SingularityError(
            "solution overflowed; matrix is rank deficient to working precision",
            float("inf"))

    residual = float(np.linalg.norm(_compensated_residual(arr, x, vec)))
    smax, smin = _sigma_extremes(R, scale)
    cond = smax / smin if smin > 0.0 else float("inf")
    if not math.isfinite(cond):
        raise SingularityError("matrix is rank deficient to working precision", cond)
    return x, residual, cond
