"""Size and power experiment harnesses.

Both harnesses draw many independent trial series from built-in models, run
the diagnostic test on every trial, and tabulate empirical rejection rates at
a fixed nominal level.  Trials are seeded individually from the master seed,
so results do not depend on the worker count, and every cell is regenerable
from the metadata embedded in the result.

Default scale (trials=500, replicates=199) finishes in minutes on a
multi-core desktop; the full reference scale (trials=10^4, replicates=10^3)
needs a cluster.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ._version import __version__
from .asymptotics import ab_params, approx_pvalue
from .estimate import fit_var
from .montecarlo import McConfig, derive_key, derive_seed, evaluate_statistics, mc_pvalues
from .varma import CATALOG_NAMES, catalog, simulate

DEFAULT_TRIALS = 500
DEFAULT_REPLICATES = 199
NOMINAL_LEVEL = 0.05

_SIZE_COLUMNS = ("chi2", "mc")
_POWER_COLUMNS = ("gv", "q_modified")


@dataclass(frozen=True)
class StudyCell:
    """Rejection count for one (model, n, lag, column) combination."""

    model: str
    n: int
    lag: int
    column: str
    rejections: int
    trials: int

    @property
    def rate_percent(self) -> float:
        return 100.0 * self.rejections / self.trials


@dataclass(frozen=True)
class StudyResult:
    """Tabulated rejection rates plus everything needed to regenerate them."""

    kind: str
    models: tuple
    ns: tuple
    lags: tuple
    trials: int
    replicates: int
    master_seed: int
    level: float
    columns: tuple
    cells: tuple
    skipped: tuple
    version: str = __version__

    def rate(self, model: str, n: int, lag: int, column: str):
        for cell in self.cells:
            if (cell.model, cell.n, cell.lag, cell.column) == (model, n, lag, column):
                return cell.rate_percent
        return None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "models": list(self.models),
            "ns": list(self.ns),
            "lags": list(self.lags),
            "trials": self.trials,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "level": self.level,
            "columns": list(self.columns),
            "version": self.version,
            "cells": [
                {
                    "model": c.model,
                    "n": c.n,
                    "lag": c.lag,
                    "column": c.column,
                    "rejections": c.rejections,
                    "trials": c.trials,
                    "rate_percent": c.rate_percent,
                }
                for c in self.cells
            ],
            "skipped": [list(s) for s in self.skipped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def format_table(self) -> str:
        lines = [
            f"{self.kind}  nominal {100 * self.level:g}%  trials={self.trials}"
            f"  replicates={self.replicates}  seed={self.master_seed}",
            "rates in percent" + ("  (NA: lag refused by the m-guard)" if self.skipped else ""),
            "",
        ]
        header = f"{'model':<8}{'m':>4}"
        for n in self.ns:
            for col in self.columns:
                header += f"{f'{col}@{n}':>14}"
        lines.append(header)
        for model in self.models:
            for lag in self.lags:
                row = f"{model:<8}{lag:>4}"
                for n in self.ns:
                    for col in self.columns:
                        rate = self.rate(model, n, lag, col)
                        row += f"{'NA':>14}" if rate is None else f"{rate:>14.1f}"
                lines.append(row)
        return "\n".join(lines)


def _model_code(name: str) -> int:
    return CATALOG_NAMES.index(name)


def _usable_lags(lags, n: int, order: int, k: int):
    ok, refused = [], []
    for lag in lags:
        if n - order > (lag + 1) * k:
            ok.append(lag)
        else:
            refused.append(lag)
    return tuple(ok), tuple(refused)


def _size_trial(args) -> dict:
    (name, n, trial, master_seed, lags, replicates, method, order) = args
    model = catalog(name)
    code = _model_code(name)
    data_rng = derive_seed(derive_key(master_seed, code, n, trial), 0)
    series = simulate(model, n, data_rng)
    usable, _ = _usable_lags(lags, n, order, model.k)
    if not usable:
        return {}
    mc_master = derive_key(master_seed, code, n, trial, 1)
    rejections = {}
    config = McConfig(replicates=replicates, master_seed=mc_master,
                      statistic="gv", lags=usable)
    if method in ("mc", "both"):
        _, observed, pvals, _, _ = mc_pvalues(series, order, config)
    else:
        fitted = fit_var(series, order)
        observed = evaluate_statistics(fitted.residuals, ("gv",), usable)
        pvals = None
    for col, lag in enumerate(usable):
        if pvals is not None:
            rejections[(lag, "mc")] = bool(pvals[0, col] <= NOMINAL_LEVEL)
        if method in ("chi2", "both") and lag > order:
            # the scaled chi-square approximation needs m > p
            pv = approx_pvalue(float(observed[0, col]),
                               ab_params(model.k, lag, order, 0))
            rejections[(lag, "chi2")] = bool(pv <= NOMINAL_LEVEL)
    return rejections


def _power_trial(args) -> dict:
    (name, n, trial, master_seed, lags, replicates, fit_order) = args
    model = catalog(name)
    code = _model_code(name)
    data_rng = derive_seed(derive_key(master_seed, code, n, trial), 0)
    series = simulate(model, n, data_rng)
    usable, _ = _usable_lags(lags, n, fit_order, model.k)
    if not usable:
        return {}
    mc_master = derive_key(master_seed, code, n, trial, 1)
    config = McConfig(replicates=replicates, master_seed=mc_master,
                      statistic="gv", lags=usable)
    _, _, pvals, _, _ = mc_pvalues(series, fit_order, config,
                                   statistics=_POWER_COLUMNS)
    rejections = {}
    for row, stat in enumerate(_POWER_COLUMNS):
        for col, lag in enumerate(usable):
            rejections[(lag, stat)] = bool(pvals[row, col] <= NOMINAL_LEVEL)
    return rejections


def _run_trials(task_fn, task_args, workers: int) -> list:
    if workers <= 1:
        return [task_fn(args) for args in task_args]
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for out in pool.map(task_fn, task_args, chunksize=max(1, len(task_args) // (8 * workers))):
            results.append(out)
    return results


def _tabulate(kind, models, ns, lags, trials, replicates, master_seed,
              columns, per_stratum_flags, skipped) -> StudyResult:
    cells = []
    for (model, n), flag_dicts in per_stratum_flags.items():
        for lag in lags:
            for column in columns:
                key = (lag, column)
                if not any(key in flags for flags in flag_dicts):
                    continue
                count = sum(1 for flags in flag_dicts if flags.get(key, False))
                cells.append(StudyCell(model, n, lag, column, count, trials))
    return StudyResult(kind, tuple(models), tuple(ns), tuple(lags), trials,
                       replicates, master_seed, NOMINAL_LEVEL, tuple(columns),
                       tuple(cells), tuple(skipped))


def size_study(models=("phi1", "phi2", "phi3", "phi4"), ns=(100, 200, 500),
               lags=(5, 10, 15, 20, 25, 30), trials: int = DEFAULT_TRIALS,
               replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
               method: str = "both", workers: int = 1) -> StudyResult:
    """Empirical rejection rate of a nominal-5% test under the null.

    Each trial simulates a catalog VAR(1) model, refits a VAR(1), and tests
    the residuals with the generalized-variance statistic, evaluating the
    p-value by the scaled chi-square approximation, the Monte-Carlo method,
    or both.
    """
    if method not in ("mc", "chi2", "both"):
        raise ValueError("method must be 'mc', 'chi2' or 'both'")
    columns = {"mc": ("mc",), "chi2": ("chi2",), "both": _SIZE_COLUMNS}[method]
    per_stratum = {}
    skipped = []
    for name in models:
        model = catalog(name)
        for n in ns:
            _, refused = _usable_lags(lags, n, 1, model.k)
            skipped.extend((name, n, lag) for lag in refused)
            tasks = [(name, n, trial, master_seed, tuple(lags), replicates, method, 1)
                     for trial in range(trials)]
            per_stratum[(name, n)] = _run_trials(_size_trial, tasks, workers)
    return _tabulate("size-study", models, ns, lags, trials, replicates,
                     master_seed, columns, per_stratum, skipped)


def power_study(models=tuple(f"model{i}" for i in range(1, 9)), ns=(50, 100, 200),
                lags=(5, 10, 15, 20, 30), trials: int = DEFAULT_TRIALS,
                replicates: int = DEFAULT_REPLICATES, master_seed: int = 0,
                fit_order: int = 1, workers: int = 1) -> StudyResult:
    """Empirical power of nominal-5% Monte-Carlo tests under misspecification.

    Each trial simulates a catalog model, fits a (generally wrong) VAR of
    ``fit_order``, and runs the Monte-Carlo test once, scoring both the
    generalized-variance statistic and the modified classical statistic
    against the same replicate set.
    """
    per_stratum = {}
    skipped = []
    for name in models:
        model = catalog(name)
        for n in ns:
            _, refused = _usable_lags(lags, n, fit_order, model.k)
            skipped.extend((name, n, lag) for lag in refused)
            tasks = [(name, n, trial, master_seed, tuple(lags), replicates, fit_order)
                     for trial in range(trials)]
            per_stratum[(name, n)] = _run_trials(_power_trial, tasks, workers)
    return _tabulate("power-study", models, ns, lags, trials, replicates,
                     master_seed, _POWER_COLUMNS, per_stratum, skipped)
