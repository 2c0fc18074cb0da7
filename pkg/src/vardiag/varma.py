"""VARMA(p, q) models: representation, validity checks, weights, simulation.

The model convention for a k-dimensional series z_t with mean mu is

    (z_t - mu) = sum_i phi_i (z_{t-i} - mu) + a_t - sum_j theta_j a_{t-j},

with innovations a_t ~ N(0, innov_cov).  Note the minus sign in front of the
moving-average coefficients; the built-in catalog stores coefficients under
this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidModel, UnknownModel
from .linalg import cholesky_lower

#: Stationarity/invertibility margin: spectral radius must stay below 1 - this.
STATIONARITY_MARGIN = 1e-6

_GELFAND_SQUARINGS = 6


@dataclass
class VarmaModel:
    """Full VARMA(p, q) parameterization.

    Parameters
    ----------
    phi : sequence of (k, k) arrays
        Autoregressive coefficient matrices, lag 1 first.
    theta : sequence of (k, k) arrays
        Moving-average coefficient matrices, lag 1 first.
    innov_cov : (k, k) array
        Innovation covariance matrix; must be symmetric positive definite.
    mean : (k,) array, optional
        Process mean, zero by default.
    """

    phi: tuple = ()
    theta: tuple = ()
    innov_cov: np.ndarray = None
    mean: np.ndarray = None
    _innov_chol: np.ndarray = field(default=None, repr=False, compare=False)
    _check: "ModelCheck" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.innov_cov is None:
            raise DimensionMismatch("innov_cov is required")
        self.innov_cov = np.asarray(self.innov_cov, dtype=float)
        if self.innov_cov.ndim != 2 or self.innov_cov.shape[0] != self.innov_cov.shape[1]:
            raise DimensionMismatch("innov_cov must be square")
        k = self.innov_cov.shape[0]
        self.phi = tuple(np.asarray(m, dtype=float) for m in self.phi)
        self.theta = tuple(np.asarray(m, dtype=float) for m in self.theta)
        for name, mats in (("phi", self.phi), ("theta", self.theta)):
            for i, m in enumerate(mats, start=1):
                if m.shape != (k, k):
                    raise DimensionMismatch(
                        f"{name}[{i}] has shape {m.shape}, expected ({k}, {k})")
                if not np.isfinite(m).all():
                    raise DimensionMismatch(f"{name}[{i}] has non-finite entries")
        if self.mean is None:
            self.mean = np.zeros(k)
        else:
            self.mean = np.asarray(self.mean, dtype=float)
            if self.mean.shape != (k,):
                raise DimensionMismatch(f"mean must have length {k}")
        if not np.isfinite(self.innov_cov).all():
            raise DimensionMismatch("innov_cov has non-finite entries")
        # Also establishes positive definiteness.
        self._innov_chol = cholesky_lower(self.innov_cov)

    @property
    def k(self) -> int:
        return self.innov_cov.shape[0]

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class ModelCheck:
    """Stationarity/invertibility verdict with spectral-radius estimates."""

    stationary: bool
    invertible: bool
    spectral_radius_ar: float
    spectral_radius_ma: float


def companion_matrix(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Companion matrix of a matrix polynomial I - m1 B - ... - ms B^s."""
    mats = [np.asarray(m, dtype=float) for m in mats]
    s = len(mats)
    if s == 0:
        return np.zeros((0, 0))
    k = mats[0].shape[0]
    comp = np.zeros((k * s, k * s))
    comp[:k, :] = np.hstack(mats)
    if s > 1:
        comp[k:, :-k] = np.eye(k * (s - 1))
    return comp


def spectral_radius(mat: np.ndarray, squarings: int = _GELFAND_SQUARINGS) -> float:
    """Spectral radius estimate by Gelfand's formula with repeated squaring.

    Computes ||A^(2^j)||_F ** (1 / 2^j) with per-step normalization so that
    neither overflow nor underflow occurs; avoids complex eigenvalue
    computations entirely.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return 0.0
    log_scale = 0.0
    power = 1
    cur = mat
    for _ in range(squarings):
        norm = float(np.linalg.norm(cur))
        if norm == 0.0:
            return 0.0
        cur = cur / norm
        cur = cur @ cur
        log_scale = 2.0 * (log_scale + math.log(norm))
        power *= 2
    norm = float(np.linalg.norm(cur))
    if norm == 0.0:
        return 0.0
    return math.exp((log_scale + math.log(norm)) / power)


def validate_model(model: VarmaModel) -> ModelCheck:
    """Check stationarity (AR side) and invertibility (MA side) of a model."""
    if model._check is None:
        rho_ar = spectral_radius(companion_matrix(model.phi))
        rho_ma = spectral_radius(companion_matrix(model.theta))
        limit = 1.0 - STATIONARITY_MARGIN
        model._check = ModelCheck(
            stationary=rho_ar < limit,
            invertible=rho_ma < limit,
            spectral_radius_ar=rho_ar,
            spectral_radius_ma=rho_ma,
        )
    return model._check


def ma_weights(model: VarmaModel, count: int) -> list:
    """Moving-average representation weights of the model.

    Returns the first ``count`` coefficient matrices of the expansion of
    phi(B)^{-1} theta(B); the leading weight is the identity and subsequent
    weights obey the convolution recursion implied by phi(B) psi(B) = theta(B).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    k = model.k
    psi = [np.eye(k)]
    for j in range(1, count):
        acc = -model.theta[j - 1] if j <= model.q else np.zeros((k, k))
        for i in range(1, min(j, model.p) + 1):
            acc = acc + model.phi[i - 1] @ psi[j - i]
        psi.append(acc)
    return psi


def inverse_ma_weights(model: VarmaModel, count: int) -> list:
    """Weights of the inverted moving-average operator theta(B)^{-1}."""
    if count < 1:
        raise ValueError("count must be at least 1")
    k = model.k
    pi = [np.eye(k)]
    for j in range(1, count):
        acc = np.zeros((k, k))
        for i in range(1, min(j, model.q) + 1):
            acc = acc + model.theta[i - 1] @ pi[j - i]
        pi.append(acc)
    return pi


def burn_in_length(p: int, q: int) -> int:
    """Discarded transient length used by the simulator."""
    return 100 + 10 * (p + q)


def innovation_recursion(phi: tuple, theta: tuple, innovations: np.ndarray) -> np.ndarray:
    """Run the VARMA difference equation in deviation-from-mean form.

    Pre-sample states and innovations are treated as zero; callers discard an
    adequate burn-in prefix.
    """
    steps = innovations.shape[0]
    out = np.empty_like(innovations)
    p = len(phi)
    q = len(theta)
    for t in range(steps):
        acc = innovations[t].copy()
        for i in range(1, min(t, p) + 1):
            acc += phi[i - 1] @ out[t - i]
        for j in range(1, min(t, q) + 1):
            acc -= theta[j - 1] @ innovations[t - j]
        out[t] = acc
    return out


def simulate(model: VarmaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Simulate ``n`` observations of a validated VARMA model.

    Innovations are Gaussian with covariance ``model.innov_cov``; the state is
    initialized at the mean and a burn-in of ``burn_in_length(p, q)`` steps is
    discarded.  The same generator state always yields the same output.

    Returns an (n, k) array.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    check = validate_model(model)
    if not (check.stationary and check.invertible):
        raise InvalidModel(
            "model must be stationary and invertible to simulate "
            f"(AR radius {check.spectral_radius_ar:.6f}, "
            f"MA radius {check.spectral_radius_ma:.6f})")
    burn = burn_in_length(model.p, model.q)
    noise = rng.standard_normal((burn + n, model.k))
    innovations = noise @ model._innov_chol.T
    path = innovation_recursion(model.phi, model.theta, innovations)
    return model.mean + path[burn:]


def _bivariate_unit_cov() -> np.ndarray:
    # unit variances with covariance one half
    return np.array([[1.0, 0.5], [0.5, 1.0]])


def _catalog_entries() -> dict:
    return {
        "phi1": lambda: VarmaModel(
            phi=([[0.9, 0.1], [-0.6, 0.4]],),
            innov_cov=_bivariate_unit_cov()),
        "phi2": lambda: VarmaModel(
            phi=([[-1.5, 1.2], [-0.9, 0.5]],),
            innov_cov=_bivariate_unit_cov()),
        "phi3": lambda: VarmaModel(
            phi=([[0.4, 0.1], [-1.0, 0.5]],),
            innov_cov=_bivariate_unit_cov()),
        "phi4": lambda: VarmaModel(
            phi=([[0.3, 0.5], [0.0, 0.3]],),
            innov_cov=_bivariate_unit_cov()),
        "model1": lambda: VarmaModel(
            phi=([[0.5, 0.1], [0.4, 0.5]], [[0.0, 0.0], [0.3, 0.0]]),
            innov_cov=[[1.0, 0.71], [0.71, 1.0]]),
        "model2": lambda: VarmaModel(
            phi=([[0.7, 0.0], [0.0, 0.6]],),
            theta=([[0.5, 0.6], [-0.7, 0.8]],),
            innov_cov=[[1.0, 0.71], [0.71, 2.0]]),
        "model3": lambda: VarmaModel(
            phi=([[1.2, -0.5], [0.6, 0.3]],),
            theta=([[-0.6, 0.3], [0.3, 0.6]],),
            innov_cov=[[1.0, 0.5], [0.5, 1.25]]),
        "model4": lambda: VarmaModel(
            phi=([[0.8, -2.0], [0.0, 0.0]],),
            theta=([[-0.5, 0.0], [0.0, 0.0]],),
            innov_cov=[[1.0, 0.71], [0.71, 1.0]]),
        "model5": lambda: VarmaModel(
            theta=([[0.8, 0.7], [-0.4, 0.6]],),
            innov_cov=[[4.0, 1.0], [1.0, 2.0]]),
        "model6": lambda: VarmaModel(
            theta=([[0.2, 0.3], [-0.6, 1.1]],),
            innov_cov=[[2.0, 1.0], [1.0, 1.0]]),
        "model7": lambda: VarmaModel(
            phi=([[0.5, 0.1], [0.4, 0.5]], [[0.0, 0.0], [0.25, 0.0]]),
            theta=([[0.6, 0.2], [0.0, 0.3]],),
            innov_cov=[[1.0, 0.3], [0.3, 1.0]]),
        "model8": lambda: VarmaModel(
            phi=([[0.4, 0.3, -0.6], [0.0, 0.8, 0.4], [0.3, 0.0, 0.0]],),
            theta=([[0.7, 0.0, 0.0], [0.1, 0.2, 0.0], [-0.4, 0.5, -0.1]],),
            innov_cov=[[1.0, 0.5, 0.4], [0.5, 1.0, 0.7], [0.4, 0.7, 1.0]]),
    }


_CATALOG = _catalog_entries()

#: Stable CLI-visible identifiers of the built-in models.
CATALOG_NAMES = tuple(_CATALOG)


def catalog(name: str) -> VarmaModel:
    """Return a fresh instance of a built-in model by its stable name."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise UnknownModel(
            f"unknown model {name!r}; choose one of {', '.join(CATALOG_NAMES)}"
        ) from None
    return builder()
