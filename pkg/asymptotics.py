"""Large-n limits, the fixed-p regime and the quadrature oracles.

In the fixed-p regime the data are ybar = a + b / sqrt(n), so the one-sided
p-value against H0: theta < a stays put while n grows. Writing
theta = ybar + S / sqrt(n) turns every posterior probability into a ratio of
expectations over S ~ N(0, 1) weighted by the prior density; the quadrature
and Monte Carlo paths below evaluate exactly that ratio, independently of
the conjugate formulas in ``posterior``.
"""
from __future__ import annotations
from settings import *
from errors import DomainError, PreconditionError, NumericalError
from kernels import normal_pdf, std_pdf, std_cdf
from model_space import ModelPair, DataSummary, ZeroMeanNormal
from posterior import (BayesFactorResult, model_averaged_posterior, posterior_cdf, incredibility_interval,
                       bayes_factor_01)
from scipy import integrate
from dataclasses import dataclass
from typing import Iterable, List, Optional
import logging
import warnings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AsymptoticRegime:
    a: float = 0.0
    b: float = Z_P05
    k: float = Z_P05

    def __post_init__(self):
        if not self.k > 0.0:
            raise PreconditionError(f"CI multiplier k must be positive, got {self.k!r}")

    def data(self, n: float) -> DataSummary:
        return DataSummary.from_ybar(n, self.a + self.b / math.sqrt(n))

    def ci_lower(self, n: float) -> float:
        return self.a + (self.b - self.k) / math.sqrt(n)


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    draws: int
    seed: int


@dataclass(frozen=True)
class CurvePoint:
    n: float
    value: float
    lower: float
    upper: float
    defined: bool


@dataclass(frozen=True)
class ExistenceLimit:
    """Largest n (scanning 1..n_max) at which the alpha-quantile exists."""
    largest_n: Optional[int]
    first_undefined_n: Optional[int]
    alpha: float
    z: float


def limit_posterior_model_prob(pair: ModelPair) -> float:
    """lim Pr(M1 | data) as n grows with z fixed.

    BF01 tends to sqrt(g1/g0) for two normal priors, so with equal prior odds
    the limit is (1 + sqrt(g1/g0))^-1; a point null drives it to 0.
    """
    if pair.is_point_null:
        return 0.0
    odds01 = pair.prior_prob_m0 / pair.prior_prob_m1 * math.sqrt(pair.prior1.variance / pair.prior0.variance)
    return 1.0 / (1.0 + odds01)


def _slab_density(pair: ModelPair, theta: float) -> float:
    """Continuous part of the mixture prior, atom excluded."""
    dens = pair.prior_prob_m1 * normal_pdf(theta, 0.0, pair.prior1.variance)
    if isinstance(pair.prior0, ZeroMeanNormal):
        dens += pair.prior_prob_m0 * normal_pdf(theta, 0.0, pair.prior0.variance)
    return dens


def _s_breakpoints(pair: ModelPair, data: DataSummary, lo: float, hi: float) -> List[float]:
    # where each prior component's posterior sits, in S units
    post = model_averaged_posterior(pair, data)
    centers = [post.component1.mean]
    if not post.has_atom:
        centers.append(post.component0.mean)
    pts = [data.sqrt_n * (c - data.ybar) for c in centers]
    return sorted(p for p in pts if lo < p < hi)


def _s_integral(pair: ModelPair, data: DataSummary, lo: float, hi: float) -> float:
    """int_lo^hi phi(s) pi(ybar + s / sqrt(n)) ds over the continuous prior part."""
    if hi <= lo:
        return 0.0
    ybar, root_n = data.ybar, data.sqrt_n

    def integrand(s):
        return std_pdf(s) * _slab_density(pair, ybar + s / root_n)

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        value, abserr = integrate.quad(integrand, lo, hi, points=_s_breakpoints(pair, data, lo, hi) or None,
                                       limit=QUAD_LIMIT, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
    if abserr > QUAD_MAX_ERROR * max(1.0, abs(value)):
        raise NumericalError(f"quadrature over S in [{lo:.6g}, {hi:.6g}] failed (error estimate {abserr:.3g})")
    if abserr > QUAD_EPSREL * max(1.0, abs(value)):
        logger.debug("quadrature over [%.6g, %.6g] reached only %.3g", lo, hi, abserr)
    return value


def _s_range(data: DataSummary):
    half = abs(data.z) + QUAD_SIGMAS
    return -half, half


def quadrature_marginals(pair: ModelPair, data: DataSummary):
    """Atom and continuous contributions to int phi(z - theta sqrt(n)) pi(theta) dtheta (per sqrt(n))."""
    lo, hi = _s_range(data)
    continuous = _s_integral(pair, data, lo, hi)
    atom = 0.0
    if pair.is_point_null:
        atom = pair.prior_prob_m0 * std_pdf(data.z - data.sqrt_n * pair.prior0.location) * data.sqrt_n
    return atom, continuous


def quadrature_posterior_cdf(pair: ModelPair, data: DataSummary, t: float, closed: bool = False) -> float:
    """Pr(theta < t | data) as a ratio of integrals of likelihood times mixture prior."""
    lo, hi = _s_range(data)
    atom, continuous = quadrature_marginals(pair, data)
    s_t = data.sqrt_n * (t - data.ybar)
    numerator = _s_integral(pair, data, lo, min(s_t, hi)) if s_t > lo else 0.0
    if pair.is_point_null:
        theta0 = pair.prior0.location
        if t > theta0 or (closed and t == theta0):
            numerator += atom
    return numerator / (atom + continuous)


def quadrature_bayes_factor(pair: ModelPair, data: DataSummary) -> BayesFactorResult:
    """BF01 from marginal likelihoods of ybar integrated numerically."""
    lo, hi = _s_range(data)
    one = ModelPair(pair.prior1, pair.prior1, 0.5)
    m1 = _s_integral(one, data, lo, hi)
    if pair.is_point_null:
        m0 = std_pdf(data.z - data.sqrt_n * pair.prior0.location) * data.sqrt_n
    else:
        zero = ModelPair(pair.prior0, pair.prior0, 0.5)
        m0 = _s_integral(zero, data, lo, hi)
    log_bf = math.log(m0) - math.log(m1)
    return BayesFactorResult(log_bf, math.exp(log_bf))


def _check_appendix_prior(pair: ModelPair, regime: AsymptoticRegime) -> bool:
    if pair.is_point_null:
        warnings.warn("the prior has an atom; the fixed-p limit theorem needs a continuous prior",
                      RuntimeWarning, stacklevel=3)
        return False
    if _slab_density(pair, regime.a) <= 0.0:
        warnings.warn(f"prior density vanishes at a = {regime.a!r}; the limit Phi(-k) need not hold",
                      RuntimeWarning, stacklevel=3)
        return False
    return True


def appendix_posterior_content(regime: AsymptoticRegime, pair: ModelPair, n: float,
                               method: str = 'quadrature') -> float:
    """Pr(theta < a + (b - k)/sqrt(n) | ybar = a + b/sqrt(n)).

    ``method='closed'`` uses the conjugate posterior, ``'quadrature'`` the ratio
    E*{1(S < -k) pi(a + (b + S)/sqrt(n))} / E*{pi(a + (b + S)/sqrt(n))}.
    Monte Carlo lives in :func:`appendix_content_monte_carlo`.
    """
    _check_appendix_prior(pair, regime)
    data = regime.data(n)
    if method == 'closed':
        return posterior_cdf(model_averaged_posterior(pair, data), regime.ci_lower(n))
    if method == 'quadrature':
        if pair.is_point_null:
            raise PreconditionError("the S-quadrature path needs a continuous prior")
        lo, hi = -QUAD_SIGMAS, QUAD_SIGMAS
        numerator = _s_integral(pair, data, lo, -regime.k) if -regime.k > lo else 0.0
        return numerator / _s_integral(pair, data, lo, hi)
    raise DomainError(f"unknown method {method!r}; use 'closed' or 'quadrature'")


def appendix_content_monte_carlo(regime: AsymptoticRegime, pair: ModelPair, n: float,
                                 draws: int = DEFAULT_REPS, seed: int = DEFAULT_SEED) -> MonteCarloEstimate:
    """Self-normalized importance estimate of the same ratio with S ~ N(0, 1)."""
    if pair.is_point_null:
        raise PreconditionError("the Monte Carlo path needs a continuous prior")
    _check_appendix_prior(pair, regime)
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(draws)
    theta = regime.a + (regime.b + s) / math.sqrt(n)
    w = pair.prior_prob_m1 * np.exp(-0.5 * theta * theta / pair.prior1.variance) / math.sqrt(pair.prior1.variance)
    w += pair.prior_prob_m0 * np.exp(-0.5 * theta * theta / pair.prior0.variance) / math.sqrt(pair.prior0.variance)
    hit = (s < -regime.k).astype(np.float64)
    estimate = float(np.sum(w * hit) / np.sum(w))
    # delta method for a ratio of means
    resid = w * (hit - estimate)
    se = float(np.std(resid, ddof=1) / np.mean(w) / math.sqrt(draws))
    return MonteCarloEstimate(estimate, se, draws, seed)


def appendix_limit(regime: AsymptoticRegime) -> float:
    """Phi(-k), the content every continuous prior with pi(a) > 0 converges to."""
    return std_cdf(-regime.k)


def _require_point_null(pair: ModelPair):
    if not pair.is_point_null:
        raise PreconditionError("this curve is defined for a point-null M0 only")


def jl_exclusion_curve(pair: ModelPair, p: float, alpha: float, n_grid: Iterable[float]) -> List[CurvePoint]:
    """1 - gamma(n) for data held at one-sided p-value p; gamma is undefined outside the jump."""
    _require_point_null(pair)
    rows = []
    for n in n_grid:
        data = DataSummary.from_p_value(float(n), p, pair.prior0.location)
        jump = incredibility_interval(model_averaged_posterior(pair, data))
        defined = jump.lower <= alpha <= jump.upper
        value = 1.0 - (alpha - jump.upper) / (jump.lower - jump.upper) if defined else math.nan
        if not defined:
            logger.debug("alpha=%g outside jump [%g, %g] at n=%g", alpha, jump.lower, jump.upper, n)
        rows.append(CurvePoint(float(n), value, jump.lower, jump.upper, defined))
    return rows


def psi_curve(pair: ModelPair, p: float, alpha: float, n_grid: Iterable[float]) -> List[CurvePoint]:
    """psi(n); defined where both alpha/2 and 1 - alpha/2 sit inside the jump."""
    _require_point_null(pair)
    rows = []
    for n in n_grid:
        data = DataSummary.from_p_value(float(n), p, pair.prior0.location)
        jump = incredibility_interval(model_averaged_posterior(pair, data))
        defined = (jump.lower <= alpha / 2.0 <= jump.upper and jump.lower <= 1.0 - alpha / 2.0 <= jump.upper
                   and jump.mass != 0.5)
        value = (jump.mass - alpha) / (2.0 * jump.mass - 1.0) if defined else math.nan
        rows.append(CurvePoint(float(n), value, jump.lower, jump.upper, defined))
    return rows


def quantile_existence_limit(pair: ModelPair, z: float, alpha: float, n_max: int = FIG7_N_MAX) -> ExistenceLimit:
    """Scan integer n and report where an exact alpha-quantile stops existing."""
    _require_point_null(pair)
    largest = None
    first_undefined = None
    for n in range(1, int(n_max) + 1):
        jump = incredibility_interval(model_averaged_posterior(pair, DataSummary(float(n), z)))
        if jump.contains(alpha):
            if first_undefined is None:
                first_undefined = n
        else:
            largest = n
    return ExistenceLimit(largest, first_undefined, alpha, z)


def model_prob_curve(pair: ModelPair, z: float, n_grid: Iterable[float]) -> List[CurvePoint]:
    """Pr(M1 | data) along n at fixed z; lower/upper carry Pr(theta < 0) and its closed version."""
    rows = []
    for n in n_grid:
        post = model_averaged_posterior(pair, DataSummary(float(n), z))
        rows.append(CurvePoint(float(n), post.weights.pm1, posterior_cdf(post, 0.0),
                               posterior_cdf(post, 0.0, closed=True), True))
    return rows


def log_bf_curve(pair: ModelPair, z: float, n_grid: Iterable[float]) -> np.ndarray:
    return np.array([bayes_factor_01(pair, DataSummary(float(n), z)).log_bf01 for n in n_grid])
