"""Ordinary least squares with rank diagnostics.

The solve goes through an orthogonal factorization (LAPACK SVD), never the
normal equations. Numerical rank is judged against a column-norm-based
tolerance; a rank-deficient design still yields the minimum-norm solution
but flags ``rank_warning``.
"""

from dataclasses import dataclass

import numpy as np

from modlearn._validation import check_matrix

#: Singular values below RANK_RTOL * (largest column norm) count as zero.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    """Coefficients and diagnostics of a least-squares fit.

    ``coefficients`` has one entry per design column; when the fit included
    an intercept it is the last entry. ``r_squared`` is 1 - SSE/SST with SST
    centered at the target mean.
    """

    coefficients: np.ndarray
    has_intercept: bool
    r_squared: float
    residual_norm: float
    condition_estimate: float
    rank: int
    rank_warning: bool


def _with_intercept(X):
    return np.concatenate([X, np.ones((X.shape[0], 1))], axis=1)


def fit(X, y, *, intercept=False):
    """Minimize ||y - X b|| (plus an appended intercept column when asked)."""
    X = check_matrix(X, name="X")
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"y must be one-dimensional, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y must contain only finite values")
    if y.size != X.shape[0]:
        raise ValueError(f"dimension mismatch: X has {X.shape[0]} rows, y has {y.size}")

    A = _with_intercept(X) if intercept else X
    n, k = A.shape
    if n < k:
        raise ValueError(f"need at least as many rows as columns, got {n} rows for {k} columns")

    sst = float(np.sum((y - y.mean()) ** 2))
    if sst <= 0.0:
        raise ValueError("targets are constant; r_squared is undefined")

    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    tol = RANK_RTOL * float(np.max(np.linalg.norm(A, axis=0)))
    rank = int(np.count_nonzero(s > tol))
    if rank == 0:
        raise ValueError("design matrix is numerically zero")
    coef = Vt[:rank].T @ ((U[:, :rank].T @ y) / s[:rank])

    residual = y - A @ coef
    residual_norm = float(np.linalg.norm(residual))
    r_squared = 1.0 - residual_norm**2 / sst
    condition = float(s[0] / s[-1]) if s[-1] > 0.0 else float("inf")
    return OlsFit(
        coefficients=coef,
        has_intercept=bool(intercept),
        r_squared=r_squared,
        residual_norm=residual_norm,
        condition_estimate=condition,
        rank=rank,
        rank_warning=rank < k,
    )


def predict(fit_result, X):
    """Apply fitted coefficients to new design rows."""
    X = check_matrix(X, name="X")
    coef = fit_result.coefficients
    expected = coef.size - 1 if fit_result.has_intercept else coef.size
    if X.shape[1] != expected:
        raise ValueError(f"dimension mismatch: fit expects {expected} columns, got {X.shape[1]}")
    if fit_result.has_intercept:
        return X @ coef[:-1] + coef[-1]
    return X @ coef
