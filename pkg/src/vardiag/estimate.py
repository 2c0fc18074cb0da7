"""Conditional least-squares estimation of VAR(p) models.

Order p = 0 means "demean only": the residuals are the series minus its
column means (or the raw series when no intercept is requested).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, SingularDesign, TooShort
from .linalg import cholesky_lower


@dataclass(frozen=True)
class FittedVar:
    """Result of a least-squares VAR fit.

    ``residuals`` has ``n - order`` rows; ``gamma0_hat`` is the residual
    covariance averaged over that effective sample size.
    """

    order: int
    phi_hat: tuple
    intercept: np.ndarray
    with_intercept: bool
    residuals: np.ndarray
    gamma0_hat: np.ndarray

    @property
    def k(self) -> int:
        return self.residuals.shape[1]

    @property
    def n_eff(self) -> int:
        return self.residuals.shape[0]


def _as_series(series) -> np.ndarray:
    values = np.asarray(series, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError(f"series must be a 2-D (n, k) array, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise ValueError("series contains non-finite values")
    return values


def fit_var(series, p: int, with_intercept: bool = True) -> FittedVar:
    """Fit a VAR(p) by multivariate conditional least squares.

    Parameters
    ----------
    series : (n, k) array_like
        Observations, one row per time point.
    p : int
        Autoregressive order, ``p >= 0``.
    with_intercept : bool
        Fit an intercept term (default).  With ``p = 0`` the fit reduces to
        demeaning the series; with the intercept disabled the residuals are
        the raw series.

    Raises
    ------
    TooShort
        When ``n - p <= k * p + 1``.
    SingularDesign
        When the regressor Gram matrix is not positive definite.
    """
    values = _as_series(series)
    n, k = values.shape
    if p < 0:
        raise ValueError("order must be nonnegative")
    if n - p <= k * p + 1:
        raise TooShort(
            f"need n - p > k*p + 1 observations (n={n}, p={p}, k={k})")

    if p == 0:
        intercept = values.mean(axis=0) if with_intercept else np.zeros(k)
        residuals = values - intercept
        gamma0 = residuals.T @ residuals / n
        return FittedVar(0, (), intercept, with_intercept, residuals, gamma0)

    target = values[p:]
    blocks = []
    if with_intercept:
        blocks.append(np.ones((n - p, 1)))
    for lag in range(1, p + 1):
        blocks.append(values[p - lag:n - lag])
    design = np.hstack(blocks)

    gram = design.T @ design
    rhs = design.T @ target
    try:
        lower = cholesky_lower(gram)
    except NotPositiveDefinite as exc:
        raise SingularDesign(f"regressor Gram matrix is singular: {exc}") from None
    coef = np.linalg.solve(lower.T, np.linalg.solve(lower, rhs))

    offset = 1 if with_intercept else 0
    intercept = coef[0] if with_intercept else np.zeros(k)
    phi_hat = tuple(
        coef[offset + (lag - 1) * k:offset + lag * k].T for lag in range(1, p + 1))
    residuals = target - design @ coef
    gamma0 = residuals.T @ residuals / (n - p)
    return FittedVar(p, phi_hat, intercept, with_intercept, residuals, gamma0)


def implied_mean(fit: FittedVar) -> np.ndarray:
    """Stationary mean implied by the fitted intercept and AR coefficients."""
    if not fit.with_intercept:
        return np.zeros(fit.k)
    if fit.order == 0:
        return fit.intercept.copy()
    total = np.eye(fit.k)
    for mat in fit.phi_hat:
        total = total - mat
    return np.linalg.solve(total, fit.intercept)
