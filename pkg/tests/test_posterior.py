import math

import numpy as np
import pytest

from errors import DomainError
from model_space import DataSummary, ModelPair, marginal_log_likelihood
from posterior import (AtJumpBoundary, Exact, InsideJump, bayes_factor_01, conditional_quantile,
                       incredibility_interval, model_averaged_posterior, model_conditional_cdf,
                       posterior_cdf, posterior_cdf_array, posterior_density, posterior_density_series,
                       posterior_model_probs, posterior_quantile)


@pytest.fixture
def mixture():
    return ModelPair.mixture(0.02, 1.0, 0.5)


@pytest.fixture
def point_null():
    return ModelPair.point_null(0.0, 1.0, 0.5)


class TestBayesFactor:
    def test_equal_priors(self):
        bf = bayes_factor_01(ModelPair.mixture(1.0, 1.0), DataSummary(5.0, 2.0))
        assert bf.bf01 == pytest.approx(1.0)
        assert posterior_model_probs(ModelPair.mixture(1.0, 1.0), DataSummary(5.0, 2.0)).pm0 == pytest.approx(0.5)

    def test_point_null_closed_form(self, point_null):
        bf = bayes_factor_01(point_null, DataSummary(10.0, 1.645))
        expected = math.sqrt(11.0) * math.exp(-10.0 * 1.645 ** 2 / 22.0)
        assert bf.bf01 == pytest.approx(expected, rel=1e-12)
        assert bf.bf01 == pytest.approx(0.9667, abs=5e-3)

    @pytest.mark.parametrize("pair", [ModelPair.mixture(0.02, 1.0), ModelPair.point_null(0.0, 2.0),
                                      ModelPair.point_null(0.25, 1.0), ModelPair.mixture(0.3, 0.1)])
    @pytest.mark.parametrize("n, z", [(1.0, 0.0), (10.0, 1.645), (300.0, -2.2), (1e6, 4.0)])
    def test_ratio_of_marginals(self, pair, n, z):
        data = DataSummary(n, z)
        expected = marginal_log_likelihood(pair.prior0, data) - marginal_log_likelihood(pair.prior1, data)
        assert bayes_factor_01(pair, data).log_bf01 == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_reciprocal(self, mixture):
        data = DataSummary(40.0, 1.3)
        bf = bayes_factor_01(mixture, data)
        assert bf.log_bf10 == -bf.log_bf01
        assert bayes_factor_01(mixture.swapped(), data).log_bf01 == pytest.approx(-bf.log_bf01)

    def test_overflow_kept_in_log_space(self):
        pair = ModelPair.mixture(1.0, 0.02)
        data = DataSummary(10.0, 100.0)
        bf = bayes_factor_01(pair, data)
        assert bf.overflow
        assert math.isinf(bf.bf01)
        assert bf.log_bf01 > 709.0
        probs = posterior_model_probs(pair, data, bf)
        assert probs.pm0 == 1.0
        assert probs.pm1 == pytest.approx(0.0, abs=1e-300)


class TestPosteriorModelProbs:
    def test_cmd_example(self, point_null):
        assert posterior_model_probs(point_null, DataSummary(10.0, 1.645)).pm0 == pytest.approx(0.4916, abs=1e-3)

    def test_mixture_limit(self, mixture):
        assert posterior_model_probs(mixture, DataSummary(1e10, 1.645)).pm1 == pytest.approx(0.124, abs=1e-3)

    def test_point_null_large_n(self, point_null):
        assert posterior_model_probs(point_null, DataSummary(1e8, 1.645)).pm0 > 0.999

    def test_prior_odds(self):
        pair = ModelPair.mixture(0.02, 1.0, 0.8)
        data = DataSummary(10.0, 1.0)
        bf = bayes_factor_01(pair, data).bf01
        probs = posterior_model_probs(pair, data)
        assert probs.pm0 == pytest.approx(0.8 * bf / (0.8 * bf + 0.2))
        assert probs.pm0 + probs.pm1 == pytest.approx(1.0)


class TestModelAveragedPosterior:
    def test_conjugate_components(self, mixture):
        post = model_averaged_posterior(mixture, DataSummary(10.0, 1.645))
        g, n, ybar = 1.0, 10.0, 1.645 / math.sqrt(10.0)
        assert post.component1.mean == pytest.approx(n * g * ybar / (1.0 + n * g))
        assert post.component1.variance == pytest.approx(g / (1.0 + n * g))
        assert not post.has_atom
        assert post.atom_mass == 0.0

    def test_point_null_atom(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        assert post.has_atom
        assert post.atom_location == 0.0
        assert post.atom_mass == post.weights.pm0

    def test_moments_against_draws(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        draws = post.sample(np.random.default_rng(7), 400_000)
        se = math.sqrt(post.variance / draws.size)
        assert abs(draws.mean() - post.mean) < 5 * se
        assert draws.var() == pytest.approx(post.variance, rel=0.02)
        assert np.mean(draws == 0.0) == pytest.approx(post.atom_mass, abs=5e-3)

    def test_density_series(self, mixture):
        post = model_averaged_posterior(mixture, DataSummary.from_ybar(10, 0.52))
        grid = np.linspace(-1, 1.5, 11)
        series = posterior_density_series(post, grid)
        np.testing.assert_allclose(series['posterior_averaged'], [posterior_density(post, t) for t in grid])


class TestPosteriorCdf:
    def test_mixture_values(self, mixture):
        post = model_averaged_posterior(mixture, DataSummary(10.0, 1.645))
        assert posterior_cdf(post, 0.0) == pytest.approx(0.160, abs=5e-4)
        post = model_averaged_posterior(mixture, DataSummary(10000.0, 1.645))
        assert posterior_cdf(post, 0.0) == pytest.approx(0.050, abs=5e-4)

    @pytest.mark.parametrize("n, open_, closed", [(3.0, 0.045, 0.465), (10.0, 0.030, 0.522)])
    def test_point_null_open_and_closed(self, point_null, n, open_, closed):
        post = model_averaged_posterior(point_null, DataSummary(n, 1.645))
        assert posterior_cdf(post, 0.0) == pytest.approx(open_, abs=5e-4)
        assert posterior_cdf(post, 0.0, closed=True) == pytest.approx(closed, abs=5e-4)

    def test_large_n_open_cdf(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(1000.0, 1.645))
        assert posterior_cdf(post, 0.0) == pytest.approx(0.005, abs=5e-4)

    def test_jump_is_atom_mass(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(25.0, 2.1))
        jump = posterior_cdf(post, 0.0, closed=True) - posterior_cdf(post, 0.0)
        assert jump == pytest.approx(post.weights.pm0, abs=1e-15)
        assert incredibility_interval(post).mass == post.weights.pm0
        # away from the atom both flavours agree
        assert posterior_cdf(post, 0.3, closed=True) == posterior_cdf(post, 0.3)

    def test_jump_mass_is_exact(self):
        rng = np.random.default_rng(31)
        for _ in range(500):
            pair = ModelPair.point_null(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.2, 4.0)),
                                        float(rng.uniform(0.05, 0.95)))
            data = DataSummary(float(np.exp(rng.uniform(0.0, 12.0))), float(rng.uniform(-4.0, 4.0)))
            post = model_averaged_posterior(pair, data)
            jump = incredibility_interval(post)
            assert jump.mass == post.weights.pm0
            gap = posterior_cdf(post, jump.atom_location, closed=True) - posterior_cdf(post, jump.atom_location)
            assert abs(gap - jump.mass) <= 4 * np.spacing(1.0)

    @pytest.mark.parametrize("pair", [ModelPair.mixture(), ModelPair.point_null(), ModelPair.point_null(0.2, 3.0)])
    def test_monotone_and_bounded(self, pair):
        post = model_averaged_posterior(pair, DataSummary(30.0, 1.9))
        grid = np.linspace(-3, 3, 3001)
        for closed in (False, True):
            cdf = posterior_cdf_array(post, grid, closed=closed)
            assert np.all(np.diff(cdf) >= 0.0)
            assert np.all((cdf >= 0.0) & (cdf <= 1.0))
        assert posterior_cdf(post, -50.0) == 0.0
        assert posterior_cdf(post, 50.0) == pytest.approx(1.0)

    def test_array_matches_scalar(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        grid = np.array([-0.5, 0.0, 0.2])
        np.testing.assert_allclose(posterior_cdf_array(post, grid, closed=True),
                                   [posterior_cdf(post, t, closed=True) for t in grid])

    def test_model_conditional(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        assert model_conditional_cdf(post, 0.0, 0) == 0.0
        assert model_conditional_cdf(post, 0.0, 1) == pytest.approx(post.component1.cdf(0.0))
        with pytest.raises(DomainError):
            model_conditional_cdf(post, 0.0, 2)


class TestIncredibilityInterval:
    def test_n_10(self, point_null):
        jump = incredibility_interval(model_averaged_posterior(point_null, DataSummary(10.0, 1.645)))
        assert jump.lower == pytest.approx(0.030, abs=5e-4)
        assert jump.upper == pytest.approx(0.522, abs=5e-4)

    def test_ybar_form(self, point_null):
        jump = incredibility_interval(model_averaged_posterior(point_null, DataSummary.from_ybar(100, 0.2054)))
        assert jump.lower == pytest.approx(0.009, abs=5e-4)
        assert jump.upper == pytest.approx(0.564, abs=5e-4)

    def test_atomless_collapses(self, mixture):
        post = model_averaged_posterior(mixture, DataSummary(10.0, 1.645))
        jump = incredibility_interval(post)
        assert jump.lower == jump.upper == posterior_cdf(post, 0.0)
        assert jump.mass == 0.0


class TestPosteriorQuantile:
    def test_exact_below_jump(self, point_null):
        result = posterior_quantile(model_averaged_posterior(point_null, DataSummary(2.0, 1.645)), 0.05)
        assert isinstance(result, Exact)
        assert result.exists
        assert result.theta == pytest.approx(-0.0163, abs=5e-4)

    def test_inside_jump(self, point_null):
        result = posterior_quantile(model_averaged_posterior(point_null, DataSummary(3.0, 1.645)), 0.05)
        assert isinstance(result, InsideJump)
        assert not result.exists
        assert result.interval.lower == pytest.approx(0.045, abs=5e-4)
        assert result.interval.upper == pytest.approx(0.465, abs=5e-4)

    def test_at_jump_boundary(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        jump = incredibility_interval(post)
        lower = posterior_quantile(post, jump.lower)
        upper = posterior_quantile(post, jump.upper)
        assert isinstance(lower, AtJumpBoundary) and lower.closed and lower.theta == 0.0
        assert isinstance(upper, AtJumpBoundary) and not upper.closed

    @pytest.mark.parametrize("pair", [ModelPair.mixture(), ModelPair.point_null(), ModelPair.mixture(0.001, 50.0)])
    @pytest.mark.parametrize("alpha", [1e-6, 0.005, 0.05, 0.5, 0.9, 0.999])
    def test_hits_level(self, pair, alpha):
        post = model_averaged_posterior(pair, DataSummary(50.0, 3.2))
        result = posterior_quantile(post, alpha)
        if isinstance(result, Exact):
            assert abs(posterior_cdf(post, result.theta) - alpha) <= 1e-9

    @pytest.mark.parametrize("n", [1.0, 10.0, 1e4])
    def test_median_of_symmetric_posterior(self, mixture, n):
        result = posterior_quantile(model_averaged_posterior(mixture, DataSummary(n, 0.0)), 0.5)
        assert isinstance(result, Exact)
        assert result.theta == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5])
    def test_alpha_range(self, mixture, alpha):
        with pytest.raises(DomainError):
            posterior_quantile(model_averaged_posterior(mixture, DataSummary(10.0, 1.0)), alpha)

    def test_conditional_quantile(self, point_null):
        post = model_averaged_posterior(point_null, DataSummary(10.0, 1.645))
        theta = conditional_quantile(post, 0.05)
        assert model_conditional_cdf(post, theta) == pytest.approx(0.05, abs=1e-10)
        assert conditional_quantile(post, 0.05, model=0) == 0.0
