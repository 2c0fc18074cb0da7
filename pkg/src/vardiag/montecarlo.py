"""Monte-Carlo significance test for portmanteau statistics.

The test fits a VAR(p) to the observed series, computes the chosen statistic
at each requested lag, then simulates the fitted model N times, refits, and
rescores.  The p-value at each lag is the add-one exceedance proportion

    p_hat = (#{replicate statistic >= observed} + 1) / (N + 1).

Replicates are seeded individually from a 64-bit mix of (master seed,
replicate index, attempt), so the report is identical whatever the worker
count; aggregation is a commutative exceedance count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .diagnostics import (
    TRANSFORMS,
    racf,
    gv_stat,
    residual_transform,
    sample_acov,
    _q_lag_terms,
)
from .errors import (
    DegenerateResiduals,
    NotPositiveDefinite,
    ReplicateFailure,
    SingularDesign,
    TooShort,
)
from .estimate import FittedVar, fit_var, implied_mean
from .linalg import cholesky_lower
from .varma import burn_in_length, innovation_recursion

STATISTICS = ("gv", "q_classic", "q_modified")
INNOVATION_MODES = ("gaussian", "bootstrap")

_MAX_ATTEMPTS = 10
_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(master: int, *words: int) -> int:
    """Fixed 64-bit mixing of a master seed with integer context words."""
    key = _splitmix64(master & _MASK64)
    for word in words:
        key = _splitmix64(key ^ _splitmix64(word & _MASK64))
    return key


def derive_seed(master: int, replicate_index: int, attempt: int = 0) -> np.random.Generator:
    """Independent generator for one replicate, stable across platforms."""
    return np.random.Generator(np.random.PCG64(derive_key(master, replicate_index, attempt)))


@dataclass(frozen=True)
class McConfig:
    """Configuration of one Monte-Carlo test run.

    ``workers`` is advisory parallelism; results do not depend on it.
    """

    replicates: int = 199
    master_seed: int = 0
    innovations: str = "gaussian"
    transform: str = "identity"
    statistic: str = "gv"
    lags: tuple = (5,)
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 19:
            raise ValueError("replicates must be at least 19")
        if self.innovations not in INNOVATION_MODES:
            raise ValueError(f"innovations must be one of {INNOVATION_MODES}")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"transform must be one of {TRANSFORMS}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}")
        lags = tuple(int(l) for l in self.lags)
        if not lags or any(l < 1 for l in lags) or list(lags) != sorted(set(lags)):
            raise ValueError("lags must be a nonempty ascending tuple of positive integers")
        object.__setattr__(self, "lags", lags)
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class LagResult:
    """Outcome of the test at a single lag."""

    lag: int
    observed: float
    p_value: float
    margin_of_error: float
    exceedances: int
    nonpd_replicates: int


@dataclass(frozen=True)
class TestReport:
    """Full result of one Monte-Carlo test.

    Serializes without timing or worker-count fields, so reports from runs
    that differ only in parallelism are byte-identical.
    """

    statistic: str
    replicates: int
    master_seed: int
    innovations: str
    transform: str
    order: int
    with_intercept: bool
    n_eff: int
    lags: tuple
    version: str = field(default=None)

    def __post_init__(self):
        if self.version is None:
            object.__setattr__(self, "version", __version__)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "innovations": self.innovations,
            "transform": self.transform,
            "order": self.order,
            "with_intercept": self.with_intercept,
            "n_eff": self.n_eff,
            "version": self.version,
            "lags": [
                {
                    "lag": r.lag,
                    "observed": r.observed,
                    "p_value": r.p_value,
                    "margin_of_error": r.margin_of_error,
                    "exceedances": r.exceedances,
                    "nonpd_replicates": r.nonpd_replicates,
                }
                for r in self.lags
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def p_hat(exceedances: int, n_reps: int) -> float:
    """Add-one Monte-Carlo p-value estimate."""
    if not 0 <= exceedances <= n_reps:
        raise ValueError("exceedances must lie in 0..n_reps")
    return (exceedances + 1) / (n_reps + 1)


def margin_of_error(p: float, n_reps: int) -> float:
    """Approximate 95% margin of error of a Monte-Carlo p-value."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return 1.96 * math.sqrt(p * (1.0 - p) / n_reps)


def evaluate_statistics(residuals, statistics, lags, transform: str = "identity") -> np.ndarray:
    """Statistic values for every (statistic, lag) pair, one row per statistic.

    The generalized-variance statistic is ``+inf`` at lags where the
    block-Toeplitz correlation matrix is not positive definite.
    """
    work = residual_transform(residuals, transform)
    n_eff = work.shape[0]
    max_lag = max(lags)
    acf = sample_acov(work, max_lag)
    out = np.empty((len(statistics), len(lags)))
    q_terms = None
    for row, stat in enumerate(statistics):
        if stat == "gv":
            rs = racf(acf, "hosking")
            for col, lag in enumerate(lags):
                out[row, col] = gv_stat(rs, lag, n_eff)
        else:
            if q_terms is None:
                q_terms = _q_lag_terms(acf, max_lag)
            if stat == "q_classic":
                weights = np.full(max_lag, float(n_eff))
            else:
                weights = n_eff * n_eff / (n_eff - np.arange(1, max_lag + 1, dtype=float))
            partial = np.cumsum(weights * q_terms)
            for col, lag in enumerate(lags):
                out[row, col] = partial[lag - 1]
    return out


@dataclass(frozen=True)
class _ReplicatePlan:
    """Everything a worker needs to generate and score one replicate."""

    phi: tuple
    mean: np.ndarray
    innov_chol: np.ndarray
    pool: np.ndarray
    n: int
    order: int
    with_intercept: bool
    transform: str
    statistics: tuple
    lags: tuple
    master_seed: int


def _simulate_plan(plan: _ReplicatePlan, rng: np.random.Generator) -> np.ndarray:
    burn = burn_in_length(plan.order, 0)
    steps = burn + plan.n
    if plan.pool is not None:
        rows = rng.integers(0, plan.pool.shape[0], size=steps)
        innovations = plan.pool[rows]
    else:
        k = plan.innov_chol.shape[0]
        innovations = rng.standard_normal((steps, k)) @ plan.innov_chol.T
    path = innovation_recursion(plan.phi, (), innovations)
    return plan.mean + path[burn:]


def _one_replicate(plan: _ReplicatePlan, index: int) -> np.ndarray:
    last_error = None
    for attempt in range(_MAX_ATTEMPTS):
        rng = derive_seed(plan.master_seed, index, attempt)
        try:
            sim = _simulate_plan(plan, rng)
            refit = fit_var(sim, plan.order, plan.with_intercept)
            return evaluate_statistics(
                refit.residuals, plan.statistics, plan.lags, plan.transform)
        except (SingularDesign, TooShort, DegenerateResiduals,
                NotPositiveDefinite, ValueError) as err:
            # ValueError covers non-finite paths from a numerically explosive
            # fitted model; a fresh sub-seed is drawn and the replicate redone.
            last_error = err
    raise ReplicateFailure(
        f"replicate {index} failed after {_MAX_ATTEMPTS} attempts: {last_error}")


def _replicate_chunk(args) -> list:
    plan, start, stop = args
    return [_one_replicate(plan, index) for index in range(start, stop)]


def _run_replicates(plan: _ReplicatePlan, n_reps: int, workers: int) -> list:
    if workers <= 1:
        return [_one_replicate(plan, index) for index in range(1, n_reps + 1)]
    chunk = max(1, -(-n_reps // (4 * workers)))
    jobs = [(plan, start, min(start + chunk, n_reps + 1))
            for start in range(1, n_reps + 1, chunk)]
    results: list = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_replicate_chunk, jobs):
            results.extend(part)
    return results


def _build_plan(fitted: FittedVar, n: int, config: McConfig, statistics) -> _ReplicatePlan:
    if config.innovations == "bootstrap":
        pool = fitted.residuals - fitted.residuals.mean(axis=0)
        innov_chol = None
    else:
        pool = None
        innov_chol = cholesky_lower(fitted.gamma0_hat)
    return _ReplicatePlan(
        phi=fitted.phi_hat,
        mean=implied_mean(fitted),
        innov_chol=innov_chol,
        pool=pool,
        n=n,
        order=fitted.order,
        with_intercept=fitted.with_intercept,
        transform=config.transform,
        statistics=tuple(statistics),
        lags=config.lags,
        master_seed=config.master_seed,
    )


def mc_pvalues(series, order: int, config: McConfig, statistics=None,
               with_intercept: bool = True):
    """Shared engine: observed statistics and Monte-Carlo p-values.

    Runs one replicate set and scores every statistic in ``statistics``
    against it (defaults to the single statistic in ``config``).  Returns
    ``(fitted, observed, p_values, exceedances, nonpd_counts)`` where the
    array-valued entries have one row per statistic and one column per lag.
    """
    if statistics is None:
        statistics = (config.statistic,)
    series = np.asarray(series, dtype=float)
    fitted = fit_var(series, order, with_intercept=with_intercept)
    observed = evaluate_statistics(
        fitted.residuals, statistics, config.lags, config.transform)
    plan = _build_plan(fitted, series.shape[0], config, statistics)
    replicate_stats = _run_replicates(plan, config.replicates, config.workers)

    exceed = np.zeros(observed.shape, dtype=int)
    nonpd = np.zeros(observed.shape, dtype=int)
    for stats in replicate_stats:
        exceed += stats >= observed
        nonpd += np.isinf(stats)
    pvals = (exceed + 1) / (config.replicates + 1)
    return fitted, observed, pvals, exceed, nonpd


def mc_test(series, order: int, config: McConfig,
            with_intercept: bool = True) -> TestReport:
    """Monte-Carlo significance test of a VAR(p) fit at the configured lags."""
    fitted, observed, pvals, exceed, nonpd = mc_pvalues(
        series, order, config, with_intercept=with_intercept)
    results = tuple(
        LagResult(
            lag=lag,
            observed=float(observed[0, col]),
            p_value=float(pvals[0, col]),
            margin_of_error=margin_of_error(float(pvals[0, col]), config.replicates),
            exceedances=int(exceed[0, col]),
            nonpd_replicates=int(nonpd[0, col]),
        )
        for col, lag in enumerate(config.lags)
    )
    return TestReport(
        statistic=config.statistic,
        replicates=config.replicates,
        master_seed=config.master_seed,
        innovations=config.innovations,
        transform=config.transform,
        order=order,
        with_intercept=fitted.with_intercept,
        n_eff=fitted.n_eff,
        lags=results,
    )
