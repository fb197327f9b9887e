"""Bayes factors, posterior model probabilities and the model-averaged posterior.

The model-averaged posterior is a two-component mixture whose first
component may be an atom. Its CDF therefore has two flavours, Pr(theta < t)
(``closed=False``) and Pr(theta <= t) (``closed=True``), which differ by the
atom mass at the atom location and nowhere else.
"""
from __future__ import annotations
from settings import *
from errors import DomainError, NumericalError
from kernels import normal_cdf, normal_pdf, normal_pdf_array, normal_cdf_array, normal_quantile
from model_space import ModelPair, DataSummary, PointMass
from scipy.special import expit
from dataclasses import dataclass
from typing import Optional, Union
import logging

logger = logging.getLogger(__name__)

# largest argument exp() takes without overflowing a double
_LOG_MAX_FLOAT = 709.78


@dataclass(frozen=True)
class BayesFactorResult:
    log_bf01: float
    bf01: float
    overflow: bool = False

    @property
    def log_bf10(self) -> float:
        return -self.log_bf01


@dataclass(frozen=True)
class PosteriorModelProbs:
    pm0: float
    pm1: float


@dataclass(frozen=True)
class NormalComponent:
    mean: float
    variance: float

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def cdf(self, t: float) -> float:
        return normal_cdf(t, self.mean, self.variance)


@dataclass(frozen=True)
class Atom:
    location: float

    def cdf(self, t: float, closed: bool = False) -> float:
        if t > self.location or (closed and t == self.location):
            return 1.0
        return 0.0


Component = Union[NormalComponent, Atom]


@dataclass(frozen=True)
class IncredibilityInterval:
    """The jump of the posterior CDF at the atom.

    ``mass`` is Pr(theta = theta0 | data) itself. ``upper - lower`` and the
    difference of the two CDF flavours are rounded sums and can be off from it
    by an ulp, so code that needs the jump size reads ``mass``.
    """
    lower: float
    upper: float
    atom_location: float
    mass: float = 0.0

    @property
    def width(self) -> float:
        return self.mass

    def contains(self, level: float) -> bool:
        """True when ``level`` lies strictly inside the jump."""
        return self.lower < level < self.upper


@dataclass(frozen=True)
class ModelAveragedPosterior:
    weights: PosteriorModelProbs
    component0: Component
    component1: NormalComponent

    @property
    def has_atom(self) -> bool:
        return isinstance(self.component0, Atom)

    @property
    def atom_location(self) -> Optional[float]:
        return self.component0.location if self.has_atom else None

    @property
    def atom_mass(self) -> float:
        return self.weights.pm0 if self.has_atom else 0.0

    @property
    def mean(self) -> float:
        m0 = self.component0.location if self.has_atom else self.component0.mean
        return self.weights.pm0 * m0 + self.weights.pm1 * self.component1.mean

    @property
    def variance(self) -> float:
        if self.has_atom:
            m0, v0 = self.component0.location, 0.0
        else:
            m0, v0 = self.component0.mean, self.component0.variance
        c1 = self.component1
        second = self.weights.pm0 * (v0 + m0 * m0) + self.weights.pm1 * (c1.variance + c1.mean ** 2)
        return max(second - self.mean ** 2, 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw from the mixture: the M0 component with probability pm0."""
        from_m0 = rng.random(size) < self.weights.pm0
        draws = rng.normal(self.component1.mean, self.component1.sd, size)
        if self.has_atom:
            draws[from_m0] = self.component0.location
        else:
            draws[from_m0] = rng.normal(self.component0.mean, self.component0.sd, int(from_m0.sum()))
        return draws


@dataclass(frozen=True)
class Exact:
    theta: float

    exists = True


@dataclass(frozen=True)
class InsideJump:
    interval: IncredibilityInterval

    exists = False


@dataclass(frozen=True)
class AtJumpBoundary:
    """alpha equals an end of the jump: theta* is the atom, open or closed."""
    theta: float
    closed: bool
    level: float

    exists = True


QuantileResult = Union[Exact, InsideJump, AtJumpBoundary]


def bayes_factor_01(pair: ModelPair, data: DataSummary) -> BayesFactorResult:
    n, z = data.n, data.z
    g1 = pair.prior1.variance
    if pair.is_point_null:
        theta0 = pair.prior0.location
        if theta0 == 0.0:
            log_bf = 0.5 * math.log1p(n * g1) - n * g1 * z * z / (2.0 * (1.0 + n * g1))
        else:
            z0 = z - data.sqrt_n * theta0
            log_bf = 0.5 * math.log1p(n * g1) - 0.5 * z0 * z0 + 0.5 * z * z / (1.0 + n * g1)
    else:
        g0 = pair.prior0.variance
        log_bf = (0.5 * (math.log1p(n * g1) - math.log1p(n * g0)) +
                  (g0 - g1) * n * z * z / (2.0 * (1.0 + n * g0) * (1.0 + n * g1)))

    if log_bf > _LOG_MAX_FLOAT:
        logger.debug("BF01 overflows a double (log BF01 = %.6g)", log_bf)
        return BayesFactorResult(log_bf, math.inf, overflow=True)
    return BayesFactorResult(log_bf, math.exp(log_bf))


def posterior_model_probs(pair: ModelPair, data: DataSummary,
                          bf: Optional[BayesFactorResult] = None) -> PosteriorModelProbs:
    """Pr(M0|data) = Pr(M0) / (Pr(M1)/BF01 + Pr(M0)), evaluated as a logistic in log space."""
    if bf is None:
        bf = bayes_factor_01(pair, data)
    log_odds = bf.log_bf01 + math.log(pair.prior_prob_m0) - math.log(pair.prior_prob_m1)
    return PosteriorModelProbs(float(expit(log_odds)), float(expit(-log_odds)))


def conjugate_component(g: float, data: DataSummary) -> NormalComponent:
    n = data.n
    mean = data.z * g / (data.sqrt_n * (1.0 / n + g))
    return NormalComponent(mean, g / (1.0 + g * n))


def model_averaged_posterior(pair: ModelPair, data: DataSummary) -> ModelAveragedPosterior:
    weights = posterior_model_probs(pair, data)
    if isinstance(pair.prior0, PointMass):
        component0 = Atom(pair.prior0.location)
    else:
        component0 = conjugate_component(pair.prior0.variance, data)
    return ModelAveragedPosterior(weights, component0, conjugate_component(pair.prior1.variance, data))


def posterior_cdf(post: ModelAveragedPosterior, t: float, closed: bool = False) -> float:
    """Pr(theta < t | data), or Pr(theta <= t | data) when ``closed``."""
    w = post.weights
    part1 = w.pm1 * post.component1.cdf(t)
    if post.has_atom:
        part0 = w.pm0 if post.component0.cdf(t, closed) else 0.0
    else:
        part0 = w.pm0 * post.component0.cdf(t)
    return min(part0 + part1, 1.0)


def posterior_cdf_array(post: ModelAveragedPosterior, ts, closed: bool = False) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.float64)
    w = post.weights
    c1 = post.component1
    out = w.pm1 * normal_cdf_array(ts, c1.mean, c1.variance)
    if post.has_atom:
        loc = post.component0.location
        hit = (ts >= loc) if closed else (ts > loc)
        out = out + w.pm0 * hit
    else:
        c0 = post.component0
        out = out + w.pm0 * normal_cdf_array(ts, c0.mean, c0.variance)
    return np.minimum(out, 1.0)


def posterior_density(post: ModelAveragedPosterior, theta: float) -> float:
    """Continuous part of the posterior density; an atom is not included."""
    w = post.weights
    dens = w.pm1 * normal_pdf(theta, post.component1.mean, post.component1.variance)
    if not post.has_atom:
        dens += w.pm0 * normal_pdf(theta, post.component0.mean, post.component0.variance)
    return dens


def posterior_density_series(post: ModelAveragedPosterior, grid) -> dict:
    grid = np.asarray(grid, dtype=np.float64)
    c1 = post.component1
    m1 = normal_pdf_array(grid, c1.mean, c1.variance)
    if post.has_atom:
        m0 = np.zeros_like(grid)
    else:
        m0 = normal_pdf_array(grid, post.component0.mean, post.component0.variance)
    averaged = post.weights.pm0 * m0 + post.weights.pm1 * m1
    return {'theta': grid, 'posterior_m0': m0, 'posterior_m1': m1, 'posterior_averaged': averaged}


def model_conditional_cdf(post: ModelAveragedPosterior, t: float, model: int = 1) -> float:
    """Pr(theta < t | data, M_model)."""
    if model == 1:
        return post.component1.cdf(t)
    if model == 0:
        return post.component0.cdf(t)
    raise DomainError(f"model must be 0 or 1, got {model!r}")


def conditional_quantile(post: ModelAveragedPosterior, alpha: float, model: int = 1) -> float:
    """alpha-quantile of theta given data and M_model alone (no averaging)."""
    component = post.component1 if model == 1 else post.component0
    if isinstance(component, Atom):
        return component.location
    return normal_quantile(alpha, component.mean, component.variance)


def incredibility_interval(post: ModelAveragedPosterior,
                           location: float = DEFAULT_THETA0) -> IncredibilityInterval:
    """[Pr(theta < theta0 | data), Pr(theta <= theta0 | data)].

    For an atomless posterior the interval collapses to [c, c] at ``location``.
    """
    if not post.has_atom:
        c = posterior_cdf(post, location)
        return IncredibilityInterval(c, c, location, 0.0)
    theta0 = post.component0.location
    lower = post.weights.pm1 * post.component1.cdf(theta0)
    mass = post.weights.pm0
    return IncredibilityInterval(lower, min(lower + mass, 1.0), theta0, mass)


def _bracket(post: ModelAveragedPosterior, alpha: float):
    comps = [post.component1]
    if not post.has_atom:
        comps.append(post.component0)
    wide = max(comps, key=lambda c: c.sd)
    lo_edge = min(c.mean - BRACKET_SIGMAS * c.sd for c in comps)
    hi_edge = max(c.mean + BRACKET_SIGMAS * c.sd for c in comps)
    if post.has_atom:
        lo_edge = min(lo_edge, post.component0.location)
        hi_edge = max(hi_edge, post.component0.location)

    half = BRACKET_SIGMAS * wide.sd
    for _ in range(BRACKET_MAX_WIDENINGS):
        if posterior_cdf(post, lo_edge) < alpha < posterior_cdf(post, hi_edge):
            return lo_edge, hi_edge
        half *= BRACKET_GROWTH
        lo_edge -= half
        hi_edge += half
        logger.debug("widening quantile bracket to [%.6g, %.6g]", lo_edge, hi_edge)
    raise NumericalError(f"could not bracket the {alpha!r}-quantile of the posterior")


def _bisect(post: ModelAveragedPosterior, alpha: float) -> float:
    lo, hi = _bracket(post, alpha)
    narrowest = post.component1.sd if post.has_atom else min(post.component0.sd, post.component1.sd)
    mid = 0.5 * (lo + hi)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        diff = posterior_cdf(post, mid) - alpha
        if abs(diff) <= QUANTILE_CDF_TOL or mid in (lo, hi):
            return mid
        if diff < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECTION_TOL * narrowest:
            return 0.5 * (lo + hi)
    raise NumericalError(f"bisection for the {alpha!r}-quantile did not converge (last {mid!r})")


def posterior_quantile(post: ModelAveragedPosterior, alpha: float) -> QuantileResult:
    """theta* with Pr(theta < theta* | data) = alpha, or the reason none exists."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if post.has_atom:
        jump = incredibility_interval(post)
        if jump.contains(alpha):
            return InsideJump(jump)
        if alpha == jump.lower:
            return AtJumpBoundary(jump.atom_location, closed=True, level=alpha)
        if alpha == jump.upper:
            return AtJumpBoundary(jump.atom_location, closed=False, level=alpha)
    return Exact(_bisect(post, alpha))
