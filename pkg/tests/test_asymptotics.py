import math

import numpy as np
import pytest
from scipy import optimize, stats

from errors import DomainError, PreconditionError
from model_space import DataSummary, ModelPair
from posterior import bayes_factor_01, model_averaged_posterior, posterior_cdf, posterior_model_probs
from asymptotics import (AsymptoticRegime, appendix_content_monte_carlo, appendix_limit,
                         appendix_posterior_content, jl_exclusion_curve, limit_posterior_model_prob,
                         log_bf_curve, model_prob_curve, psi_curve, quadrature_bayes_factor,
                         quadrature_posterior_cdf, quantile_existence_limit)
from settings import APPENDIX_K


class TestLimitModelProb:
    def test_mixture(self):
        assert limit_posterior_model_prob(ModelPair.mixture(0.02, 1.0)) == pytest.approx(0.124, abs=1e-3)

    def test_point_null(self):
        assert limit_posterior_model_prob(ModelPair.point_null()) == 0.0

    def test_prior_odds(self):
        pair = ModelPair.mixture(0.02, 1.0, 0.25)
        expected = 0.75 * math.sqrt(0.02) / (0.75 * math.sqrt(0.02) + 0.25 * 1.0)
        assert limit_posterior_model_prob(pair) == pytest.approx(expected)

    def test_matches_large_n(self):
        pair = ModelPair.mixture(0.02, 1.0, 0.5)
        far = posterior_model_probs(pair, DataSummary(1e12, 1.645)).pm1
        assert far == pytest.approx(limit_posterior_model_prob(pair), abs=1e-4)


class TestAppendixContent:
    @pytest.mark.parametrize("n, expected", [(10.0, 0.160), (10000.0, 0.050)])
    def test_reference_values(self, n, expected):
        regime = AsymptoticRegime(0.0, 1.645, 1.645)
        pair = ModelPair.mixture()
        assert appendix_posterior_content(regime, pair, n, 'closed') == pytest.approx(expected, abs=5e-4)
        assert appendix_posterior_content(regime, pair, n, 'quadrature') == pytest.approx(expected, abs=5e-4)

    @pytest.mark.parametrize("k", APPENDIX_K)
    def test_converges_to_phi_minus_k(self, k):
        regime = AsymptoticRegime(0.0, 1.645, k)
        pair = ModelPair.mixture()
        limit = appendix_limit(regime)
        assert limit == pytest.approx(stats.norm.cdf(-k), abs=1e-15)
        for method in ('closed', 'quadrature'):
            assert abs(appendix_posterior_content(regime, pair, 1e8, method) - limit) < 1e-3

    @pytest.mark.parametrize("k", APPENDIX_K)
    @pytest.mark.parametrize("n", [10.0, 1e8])
    def test_monte_carlo_agrees(self, k, n):
        regime = AsymptoticRegime(0.0, 1.645, k)
        pair = ModelPair.mixture()
        quad = appendix_posterior_content(regime, pair, n, 'quadrature')
        mc = appendix_content_monte_carlo(regime, pair, n, draws=1_000_000, seed=5)
        assert abs(mc.value - quad) <= 3 * mc.std_error

    @pytest.mark.parametrize("n", [3.0, 50.0, 2000.0])
    def test_quadrature_matches_closed_form(self, n):
        regime = AsymptoticRegime(0.1, 2.054, 1.282)
        pair = ModelPair.mixture(0.05, 2.0, 0.4)
        assert appendix_posterior_content(regime, pair, n, 'quadrature') == pytest.approx(
            appendix_posterior_content(regime, pair, n, 'closed'), abs=1e-6)

    def test_point_null_warns(self):
        regime = AsymptoticRegime()
        with pytest.warns(RuntimeWarning, match="atom"):
            appendix_posterior_content(regime, ModelPair.point_null(), 100.0, 'closed')

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            appendix_posterior_content(AsymptoticRegime(), ModelPair.mixture(), 10.0, 'simpson')

    def test_bad_multiplier(self):
        with pytest.raises(PreconditionError):
            AsymptoticRegime(0.0, 1.645, 0.0)

    def test_ci_lower(self):
        regime = AsymptoticRegime(0.0, 1.645, 1.282)
        assert regime.ci_lower(1.0) == pytest.approx(0.363)


def _oracle_cases():
    rng = np.random.default_rng(99)
    cases = []
    for i in range(200):
        if i % 2:
            pair = ModelPair.point_null(float(rng.choice([0.0, 0.15])), float(rng.uniform(0.3, 3.0)),
                                        float(rng.uniform(0.2, 0.8)))
        else:
            pair = ModelPair.mixture(float(rng.uniform(0.005, 0.2)), float(rng.uniform(0.5, 3.0)),
                                     float(rng.uniform(0.2, 0.8)))
        n = float(np.exp(rng.uniform(0.0, math.log(1e4))))
        z = float(rng.uniform(-3.0, 4.0))
        post = model_averaged_posterior(pair, DataSummary(n, z))
        t = post.mean + float(rng.uniform(-3.0, 3.0)) * math.sqrt(post.variance)
        cases.append((pair, n, z, t))
    return cases


class TestQuadratureOracle:
    @pytest.mark.parametrize("pair, n, z, t", _oracle_cases())
    def test_posterior_cdf(self, pair, n, z, t):
        data = DataSummary(n, z)
        post = model_averaged_posterior(pair, data)
        assert abs(quadrature_posterior_cdf(pair, data, t) - posterior_cdf(post, t)) < 1e-6

    @pytest.mark.parametrize("n", [1.0, 10.0, 250.0])
    def test_at_the_atom(self, n):
        pair = ModelPair.point_null(0.0, 1.0, 0.5)
        data = DataSummary(n, 1.645)
        post = model_averaged_posterior(pair, data)
        for closed in (False, True):
            assert quadrature_posterior_cdf(pair, data, 0.0, closed) == pytest.approx(
                posterior_cdf(post, 0.0, closed), abs=1e-6)

    @pytest.mark.parametrize("pair", [ModelPair.mixture(), ModelPair.point_null(), ModelPair.point_null(0.2, 2.0)])
    @pytest.mark.parametrize("n, z", [(1.0, 0.5), (10.0, 1.645), (800.0, -2.5)])
    def test_bayes_factor(self, pair, n, z):
        data = DataSummary(n, z)
        assert quadrature_bayes_factor(pair, data).log_bf01 == pytest.approx(
            bayes_factor_01(pair, data).log_bf01, abs=1e-6)


class TestCurves:
    def test_existence_limit_fig7(self):
        limit = quantile_existence_limit(ModelPair.point_null(), 2.575, 0.005, 100)
        assert limit.largest_n in range(18, 22)
        assert limit.first_undefined_n == limit.largest_n + 1

    def test_existence_limit_small(self):
        assert quantile_existence_limit(ModelPair.point_null(), 1.645, 0.05, 50).largest_n == 2

    def test_gamma_limit(self):
        row = jl_exclusion_curve(ModelPair.point_null(), 0.05, 0.05, [1e8])[0]
        assert row.defined
        assert abs((1.0 - row.value) - 0.95) < 1e-3

    def test_psi_limit(self):
        row = psi_curve(ModelPair.point_null(), 0.05, 0.05, [1e8])[0]
        assert row.defined
        assert abs(row.value - 0.95) < 1e-3

    def test_undefined_rows_are_nan(self):
        rows = jl_exclusion_curve(ModelPair.point_null(), 0.05, 0.05, [1.0, 2.0, 10.0])
        assert not rows[0].defined and math.isnan(rows[0].value)
        assert rows[2].defined

    def test_curves_need_point_null(self):
        with pytest.raises(PreconditionError):
            psi_curve(ModelPair.mixture(), 0.05, 0.05, [10.0])

    def test_model_prob_curve(self):
        rows = model_prob_curve(ModelPair.mixture(), 1.645, [10.0, 1e4])
        assert rows[0].lower == pytest.approx(0.160, abs=5e-4)
        assert rows[1].lower == pytest.approx(0.050, abs=5e-4)

    def test_point_null_probability_crossing(self):
        pair = ModelPair.point_null()
        root = optimize.brentq(lambda n: posterior_model_probs(pair, DataSummary(n, 1.645)).pm0 - 0.99, 1e3, 1e7)
        assert 1.3e5 < root < 1.6e5

    def test_log_bf_curve(self):
        values = log_bf_curve(ModelPair.point_null(), 1.645, [10.0, 100.0])
        assert values[0] == pytest.approx(bayes_factor_01(ModelPair.point_null(), DataSummary(10.0, 1.645)).log_bf01)
        assert values[1] > values[0]
