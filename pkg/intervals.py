"""Confidence intervals, credible intervals and their stochastic versions.

Interval levels are credibility (content) levels, 1 - alpha. An "open"
boundary stands for the arbitrarily small epsilon next to the atom: it is
never a number.
"""
from __future__ import annotations
from settings import *
from errors import PreconditionError
from kernels import normal_quantile
from model_space import DataSummary
from posterior import (ModelAveragedPosterior, IncredibilityInterval, QuantileResult, Exact, InsideJump,
                       AtJumpBoundary, posterior_quantile, incredibility_interval, posterior_cdf,
                       conditional_quantile)
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union
import logging

logger = logging.getLogger(__name__)


class Degenerate(Enum):
    NO = 0
    SINGLE_POINT = 1
    EMPTY = 2


@dataclass(frozen=True)
class OneSidedInterval:
    """[lower, inf), or (lower, inf) when ``lower_open``."""
    lower: float
    lower_open: bool
    level: float

    def contains(self, theta: float) -> bool:
        return theta > self.lower or (not self.lower_open and theta == self.lower)


@dataclass(frozen=True)
class TwoSidedInterval:
    """Equal-tailed interval, [lower, upper) by default."""
    lower: float
    upper: float
    level: float
    degenerate: Degenerate = Degenerate.NO
    lower_open: bool = False
    upper_open: bool = True

    def contains(self, theta: float) -> bool:
        if self.degenerate is Degenerate.EMPTY:
            return False
        if self.degenerate is Degenerate.SINGLE_POINT:
            return theta == self.lower
        above = theta > self.lower or (not self.lower_open and theta == self.lower)
        below = theta < self.upper or (not self.upper_open and theta == self.upper)
        return above and below


@dataclass(frozen=True)
class StochasticBound:
    """theta* = atom with probability gamma, atom + epsilon otherwise.

    ``side`` says which end of an interval theta* is: the lower end of
    [theta*, inf) or the (excluded) upper end of [theta_l, theta*).
    """
    location: float
    prob_a: float
    alpha: float
    side: str = 'lower'

    @property
    def gamma(self) -> float:
        return self.prob_a

    @property
    def value_a(self) -> Tuple[float, bool]:
        # theta* = atom: a lower end includes it, an excluded upper end leaves it out
        return self.location, self.side == 'upper'

    @property
    def value_b(self) -> Tuple[float, bool]:
        return self.location, self.side == 'lower'

    def content_identity(self, jump: IncredibilityInterval) -> float:
        """gamma Pr(theta < theta0) + (1 - gamma) Pr(theta <= theta0); equals alpha."""
        return self.prob_a * jump.lower + (1.0 - self.prob_a) * jump.upper

    def expected_content(self, post: ModelAveragedPosterior) -> float:
        """Expected posterior content of [theta*, inf)."""
        below_open = posterior_cdf(post, self.location)
        below_closed = posterior_cdf(post, self.location, closed=True)
        return self.prob_a * (1.0 - below_open) + (1.0 - self.prob_a) * (1.0 - below_closed)

    def draw_is_a(self, rng: np.random.Generator) -> bool:
        return bool(rng.random() < self.prob_a)

    def realize(self, rng: np.random.Generator) -> OneSidedInterval:
        if self.side != 'lower':
            raise PreconditionError("only a lower stochastic bound realizes as a one-sided interval")
        value, is_open = self.value_a if self.draw_is_a(rng) else self.value_b
        return OneSidedInterval(value, is_open, 1.0 - self.alpha)


@dataclass(frozen=True)
class StochasticTwoSided:
    """[point] with probability psi, the empty set otherwise."""
    prob_point: float
    point: float
    alpha: float
    atom_mass: float

    @property
    def psi(self) -> float:
        return self.prob_point

    @property
    def valid(self) -> bool:
        return 0.0 <= self.prob_point <= 1.0

    @property
    def content_gap(self) -> float:
        """Expected content psi * Pr(theta = theta0) minus the target 1 - alpha."""
        return self.prob_point * self.atom_mass - (1.0 - self.alpha)

    def realize(self, rng: np.random.Generator) -> TwoSidedInterval:
        if not self.valid:
            raise PreconditionError(f"psi = {self.prob_point:.6g} is not a probability for these data")
        level = 1.0 - self.alpha
        if rng.random() < self.prob_point:
            return TwoSidedInterval(self.point, self.point, level, Degenerate.SINGLE_POINT, False, False)
        return TwoSidedInterval(self.point, self.point, level, Degenerate.EMPTY)


@dataclass(frozen=True)
class UndefinedOneSided:
    """No theta* exists for alpha; the achievable neighbours and the stochastic bound."""
    alpha: float
    incredibility: IncredibilityInterval
    nearest_closed: OneSidedInterval
    nearest_open: OneSidedInterval
    stochastic: StochasticBound


@dataclass(frozen=True)
class MixedTwoSided:
    """One exact tail and one stochastic tail."""
    alpha: float
    lower: Union[float, StochasticBound]
    upper: Union[float, StochasticBound]
    lower_open: bool = False
    upper_open: bool = True

    def realize(self, rng: np.random.Generator) -> TwoSidedInterval:
        lower, upper = self.lower, self.upper
        lower_open, upper_open = self.lower_open, self.upper_open
        if isinstance(lower, StochasticBound):
            lower, lower_open = lower.value_a if lower.draw_is_a(rng) else lower.value_b
        if isinstance(upper, StochasticBound):
            upper, upper_open = upper.value_a if upper.draw_is_a(rng) else upper.value_b
        return TwoSidedInterval(lower, upper, 1.0 - self.alpha, Degenerate.NO, lower_open, upper_open)


@dataclass(frozen=True)
class UndefinedTwoSided:
    alpha: float
    lower_tail: QuantileResult
    upper_tail: QuantileResult
    incredibility: IncredibilityInterval
    composition: Optional[Union[MixedTwoSided, StochasticTwoSided]] = None


OneSidedResult = Union[OneSidedInterval, UndefinedOneSided]
TwoSidedResult = Union[TwoSidedInterval, UndefinedTwoSided]


def frequentist_ci_lower(data: DataSummary, a: float) -> float:
    """Lower bound ybar - Q(1 - A)/sqrt(n) of the upper one-sided (1 - A) CI."""
    return data.ybar - normal_quantile(1.0 - a) / data.sqrt_n


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"alpha must lie in (0, 1), got {alpha!r}")


def _gamma(jump: IncredibilityInterval, level: float) -> float:
    return (level - jump.upper) / (jump.lower - jump.upper)


def _stochastic_endpoint(jump: IncredibilityInterval, level: float, side: str) -> StochasticBound:
    if not jump.lower <= level <= jump.upper or jump.mass == 0.0:
        raise PreconditionError(
            f"level {level:.6g} is outside the incredibility interval "
            f"[{jump.lower:.6g}, {jump.upper:.6g}]; use credible_one_sided for an exact bound")
    return StochasticBound(jump.atom_location, _gamma(jump, level), level, side)


def nearest_levels(post: ModelAveragedPosterior) -> Tuple[OneSidedInterval, OneSidedInterval]:
    """The two achievable one-sided intervals at the atom: [theta0, inf) and (theta0, inf)."""
    jump = incredibility_interval(post)
    closed = OneSidedInterval(jump.atom_location, False, 1.0 - jump.lower)
    opened = OneSidedInterval(jump.atom_location, True, 1.0 - jump.upper)
    return closed, opened


def stochastic_bound(post: ModelAveragedPosterior, alpha: float) -> StochasticBound:
    """gamma = (alpha - Pr(theta <= theta0)) / (Pr(theta < theta0) - Pr(theta <= theta0))."""
    _check_alpha(alpha)
    return _stochastic_endpoint(incredibility_interval(post), alpha, 'lower')


def credible_one_sided(post: ModelAveragedPosterior, alpha: float) -> OneSidedResult:
    _check_alpha(alpha)
    result = posterior_quantile(post, alpha)
    if isinstance(result, Exact):
        return OneSidedInterval(result.theta, False, 1.0 - alpha)
    if isinstance(result, AtJumpBoundary):
        return OneSidedInterval(result.theta, not result.closed, 1.0 - alpha)
    closed, opened = nearest_levels(post)
    return UndefinedOneSided(alpha, result.interval, closed, opened,
                             _stochastic_endpoint(result.interval, alpha, 'lower'))


def conditional_credible_one_sided(post: ModelAveragedPosterior, alpha: float,
                                   model: int = 1) -> OneSidedInterval:
    """The interval one gets by conditioning on M_model alone and ignoring the other model."""
    _check_alpha(alpha)
    return OneSidedInterval(conditional_quantile(post, alpha, model), False, 1.0 - alpha)


def _lower_end(result: QuantileResult) -> Tuple[float, bool]:
    if isinstance(result, AtJumpBoundary):
        return result.theta, not result.closed
    return result.theta, False


def _upper_end(result: QuantileResult) -> Tuple[float, bool]:
    # [theta_l, theta_u): the upper end is excluded when Pr(theta < theta_u) hits the level
    if isinstance(result, AtJumpBoundary):
        return result.theta, result.closed
    return result.theta, True


def stochastic_two_sided(post: ModelAveragedPosterior, alpha: float) -> StochasticTwoSided:
    """psi = (Pr(theta = theta0) - alpha) / (2 Pr(theta = theta0) - 1)."""
    _check_alpha(alpha)
    jump = incredibility_interval(post)
    failing = [name for name, level in (('lower', alpha / 2.0), ('upper', 1.0 - alpha / 2.0))
               if not (jump.mass > 0.0 and jump.lower <= level <= jump.upper)]
    if failing:
        raise PreconditionError(
            f"{' and '.join(failing)} tail level(s) outside the incredibility interval "
            f"[{jump.lower:.6g}, {jump.upper:.6g}]")
    mass = jump.mass
    denom = 2.0 * mass - 1.0
    if denom == 0.0:
        raise PreconditionError("psi is undefined when Pr(theta = theta0 | data) = 1/2")
    psi = (mass - alpha) / denom
    out = StochasticTwoSided(psi, jump.atom_location, alpha, mass)
    if not out.valid:
        logger.warning("psi = %.6g falls outside [0, 1] (Pr(theta=theta0|data) = %.6g)", psi, mass)
    return out


def mixed_two_sided(post: ModelAveragedPosterior, alpha: float) -> MixedTwoSided:
    """Per-tail composition when exactly one tail level lies in the jump."""
    _check_alpha(alpha)
    jump = incredibility_interval(post)
    lo_res = posterior_quantile(post, alpha / 2.0)
    hi_res = posterior_quantile(post, 1.0 - alpha / 2.0)
    if isinstance(lo_res, InsideJump) == isinstance(hi_res, InsideJump):
        raise PreconditionError("mixed composition needs exactly one tail inside the incredibility interval")
    lower_open, upper_open = False, True
    if isinstance(lo_res, InsideJump):
        lower = _stochastic_endpoint(jump, alpha / 2.0, 'lower')
    else:
        lower, lower_open = _lower_end(lo_res)
    if isinstance(hi_res, InsideJump):
        upper = _stochastic_endpoint(jump, 1.0 - alpha / 2.0, 'upper')
    else:
        upper, upper_open = _upper_end(hi_res)
    return MixedTwoSided(alpha, lower, upper, lower_open, upper_open)


def credible_two_sided(post: ModelAveragedPosterior, alpha: float) -> TwoSidedResult:
    """Equal-tailed interval [theta_l, theta_u) at alpha/2 and 1 - alpha/2."""
    _check_alpha(alpha)
    lo_res = posterior_quantile(post, alpha / 2.0)
    hi_res = posterior_quantile(post, 1.0 - alpha / 2.0)
    lo_in = isinstance(lo_res, InsideJump)
    hi_in = isinstance(hi_res, InsideJump)
    if not (lo_in or hi_in):
        lower, lower_open = _lower_end(lo_res)
        upper, upper_open = _upper_end(hi_res)
        return TwoSidedInterval(lower, upper, 1.0 - alpha, Degenerate.NO, lower_open, upper_open)

    jump = incredibility_interval(post)
    if lo_in and hi_in:
        composition = stochastic_two_sided(post, alpha)
    else:
        composition = mixed_two_sided(post, alpha)
    return UndefinedTwoSided(alpha, lo_res, hi_res, jump, composition)
