import numpy as np
import pytest

from vardiag import SingularDesign, TooShort, catalog, fit_var, implied_mean, simulate
from vardiag.montecarlo import derive_seed


class TestOrderZero:
    def test_demeaning_is_exact(self):
        rng = np.random.default_rng(0)
        data = rng.standard_normal((40, 3)) + [5.0, -1.0, 2.0]
        fit = fit_var(data, 0)
        assert np.abs(fit.residuals.mean(axis=0)).max() < 1e-13
        assert np.abs(fit.residuals - (data - data.mean(axis=0))).max() < 1e-12

    def test_without_intercept_returns_raw(self):
        rng = np.random.default_rng(1)
        data = rng.standard_normal((30, 2)) + 3.0
        fit = fit_var(data, 0, with_intercept=False)
        assert np.array_equal(fit.residuals, data)
        assert np.array_equal(fit.intercept, np.zeros(2))


class TestVarFit:
    def test_consistency_on_simulated_var1(self):
        model = catalog("phi1")
        data = simulate(model, 5000, derive_seed(2024, 0))
        fit = fit_var(data, 1)
        assert np.abs(fit.phi_hat[0] - model.phi[0]).max() < 0.05
        assert np.abs(fit.gamma0_hat - model.innov_cov).max() < 0.1

    def test_constant_series_is_singular(self):
        data = np.ones((30, 2))
        with pytest.raises(SingularDesign):
            fit_var(data, 1)

    def test_too_short(self):
        with pytest.raises(TooShort):
            fit_var(np.random.default_rng(0).standard_normal((4, 2)), 1)

    def test_orthogonality_of_residuals(self):
        rng = np.random.default_rng(3)
        data = simulate(catalog("model1"), 300, derive_seed(5, 0))
        fit = fit_var(data, 2)
        n = data.shape[0]
        design = np.hstack([np.ones((n - 2, 1)), data[1:-1], data[:-2]])
        cross = design.T @ fit.residuals
        scale = np.abs(data).max()
        assert np.abs(cross).max() < 1e-8 * n * scale

    def test_reconstruction_identity(self):
        data = simulate(catalog("phi3"), 120, derive_seed(8, 0))
        p = 1
        fit = fit_var(data, p)
        rebuilt = fit.intercept + data[:-1] @ fit.phi_hat[0].T + fit.residuals
        assert np.abs(rebuilt - data[p:]).max() < 1e-10

    def test_gamma0_matches_average_outer_product(self):
        data = simulate(catalog("phi4"), 150, derive_seed(9, 0))
        fit = fit_var(data, 1)
        direct = sum(np.outer(r, r) for r in fit.residuals) / fit.n_eff
        assert np.abs(direct - fit.gamma0_hat).max() < 1e-12

    def test_no_intercept_var(self):
        data = simulate(catalog("phi2"), 400, derive_seed(10, 0))
        fit = fit_var(data, 1, with_intercept=False)
        assert np.array_equal(fit.intercept, np.zeros(2))
        assert fit.n_eff == 399

    def test_residual_length(self):
        data = simulate(catalog("model1"), 100, derive_seed(11, 0))
        for p in (0, 1, 2, 3):
            assert fit_var(data, p).residuals.shape == (100 - p, 2)


class TestImpliedMean:
    def test_matches_simulated_mean(self):
        model = VarmaModelWithMean()
        data = simulate(model, 20_000, derive_seed(12, 0))
        fit = fit_var(data, 1)
        assert np.abs(implied_mean(fit) - model.mean).max() < 0.2

    def test_order_zero(self):
        data = np.random.default_rng(4).standard_normal((50, 2)) + [1.0, 2.0]
        fit = fit_var(data, 0)
        assert np.abs(implied_mean(fit) - [1.0, 2.0]).max() < 0.5


def VarmaModelWithMean():
    from vardiag import VarmaModel

    return VarmaModel(
        phi=([[0.5, 0.0], [0.1, 0.3]],),
        innov_cov=np.eye(2),
        mean=[3.0, -1.0],
    )
