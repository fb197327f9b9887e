"""Repeated-sampling checks of the stochastic credible bound.

Replications are split into chunks of at most SIM_CHUNK_SIZE, each with its
own child of ``SeedSequence(seed)``, so the hit count does not depend on how
many workers run the chunks or in which order they finish.
"""
from __future__ import annotations
from settings import *
from errors import PreconditionError
from model_space import ModelPair, DataSummary
from posterior import model_averaged_posterior, incredibility_interval
from intervals import OneSidedInterval, StochasticBound, UndefinedOneSided, credible_one_sided
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import List, Optional, Union
import logging

logger = logging.getLogger(__name__)

LowerBound = Union[OneSidedInterval, StochasticBound]


@dataclass(frozen=True)
class CoverageReport:
    replications: int
    target: float
    empirical: float
    std_error: float
    seed: int
    passed: bool
    alpha: float
    mode: str = 'posterior'
    gamma: Optional[float] = None
    draws: Optional[int] = None

    @property
    def deviation(self) -> float:
        return self.empirical - self.target

    def to_dict(self) -> dict:
        return asdict(self)


def _chunk_sizes(total: int) -> List[int]:
    full, rest = divmod(total, SIM_CHUNK_SIZE)
    return [SIM_CHUNK_SIZE] * full + ([rest] if rest else [])


def _lower_bound(pair: ModelPair, data: DataSummary, alpha: float) -> LowerBound:
    result = credible_one_sided(model_averaged_posterior(pair, data), alpha)
    if isinstance(result, UndefinedOneSided):
        return result.stochastic
    return result


def _hits(theta: np.ndarray, bound: LowerBound, rng: np.random.Generator) -> int:
    """How many draws land in [theta*, inf) (or (theta*, inf) when open)."""
    if isinstance(bound, StochasticBound):
        # bound a is [theta0, inf), bound b is (theta0, inf); only the atom itself tells them apart
        pick_a = rng.random(theta.size) < bound.prob_a
        hit = (theta > bound.location) | ((theta == bound.location) & pick_a)
    elif bound.lower_open:
        hit = theta > bound.lower
    else:
        hit = theta >= bound.lower
    return int(np.count_nonzero(hit))


def _report(hits: int, reps: int, target: float, seed: int, alpha: float, mode: str,
            bound: LowerBound, draws: Optional[int] = None) -> CoverageReport:
    empirical = hits / reps
    se = math.sqrt(target * (1.0 - target) / reps)
    gamma = bound.gamma if isinstance(bound, StochasticBound) else None
    passed = abs(empirical - target) <= SE_MULTIPLIER * se
    logger.info("%s coverage %.6f vs %.6f (se %.2g, %s)", mode, empirical, target, se,
                'pass' if passed else 'FAIL')
    return CoverageReport(reps, target, empirical, se, seed, passed, alpha, mode, gamma, draws)


def _check_reps(reps: int):
    if reps < MIN_REPS:
        raise PreconditionError(f"at least {MIN_REPS} replications are needed for a 3-SE check, got {reps}")


def simulate_stochastic_content(pair: ModelPair, data: DataSummary, alpha: float = DEFAULT_ALPHA,
                                reps: int = DEFAULT_REPS, seed: int = DEFAULT_SEED,
                                workers: int = 1) -> CoverageReport:
    """Fraction of posterior draws inside the (possibly stochastic) lower bound.

    Each replication draws theta from the model-averaged posterior and,
    independently, which of the two bounds theta* takes. The expected
    fraction is 1 - alpha whenever alpha lies in the incredibility interval;
    outside it the exact bound is used.
    """
    _check_reps(reps)
    post = model_averaged_posterior(pair, data)
    bound = _lower_bound(pair, data, alpha)
    sizes = _chunk_sizes(reps)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    logger.debug("simulating %d replications in %d chunk(s) on %d worker(s)", reps, len(sizes), workers)

    def run(job):
        size, stream = job
        rng = np.random.default_rng(stream)
        return _hits(post.sample(rng, size), bound, rng)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, zip(sizes, streams)))
    else:
        counts = [run(job) for job in zip(sizes, streams)]
    return _report(sum(counts), reps, 1.0 - alpha, seed, alpha, 'posterior', bound)


def _prior_predictive(pair: ModelPair, n: float, rng: np.random.Generator, size: int):
    from_m0 = rng.random(size) < pair.prior_prob_m0
    theta = rng.normal(0.0, math.sqrt(pair.prior1.variance), size)
    if pair.is_point_null:
        theta[from_m0] = pair.prior0.location
    else:
        theta[from_m0] = rng.normal(0.0, math.sqrt(pair.prior0.variance), int(from_m0.sum()))
    z = math.sqrt(n) * theta + rng.standard_normal(size)
    return theta, z


def simulate_joint_coverage(pair: ModelPair, n: float, z: float, alpha: float = DEFAULT_ALPHA,
                            reps: int = DEFAULT_REPS, seed: int = DEFAULT_SEED,
                            bin_width: float = DEFAULT_BIN_WIDTH) -> CoverageReport:
    """Coverage over the joint distribution of (M, theta, data), conditioned on a z bin.

    Draws are generated until ``reps`` of them fall within bin_width/2 of z;
    every kept draw is scored against the interval computed at z itself, so
    the bin width adds a small bias of its own.
    """
    _check_reps(reps)
    if not bin_width > 0.0:
        raise PreconditionError(f"bin width must be positive, got {bin_width!r}")
    bound = _lower_bound(pair, DataSummary(n, z), alpha)
    parent = np.random.SeedSequence(seed)
    kept = hits = drawn = 0
    while kept < reps:
        if drawn >= JOINT_MAX_DRAWS:
            raise PreconditionError(
                f"only {kept} of {reps} prior-predictive draws fell in the z bin after {drawn} draws; "
                f"widen --bin-width or lower --reps")
        rng = np.random.default_rng(parent.spawn(1)[0])
        theta, zs = _prior_predictive(pair, n, rng, SIM_CHUNK_SIZE)
        drawn += SIM_CHUNK_SIZE
        inside = theta[np.abs(zs - z) < 0.5 * bin_width][:reps - kept]
        hits += _hits(inside, bound, rng)
        kept += inside.size
    logger.debug("joint simulation kept %d of %d draws", kept, drawn)
    return _report(hits, kept, 1.0 - alpha, seed, alpha, 'joint', bound, drawn)


def content_identity_residual(pair: ModelPair, data: DataSummary, alpha: float) -> float:
    """gamma Pr(theta < theta0) + (1 - gamma) Pr(theta <= theta0) - alpha."""
    jump = incredibility_interval(model_averaged_posterior(pair, data))
    bound = _lower_bound(pair, data, alpha)
    if not isinstance(bound, StochasticBound):
        raise PreconditionError(f"alpha = {alpha!r} is not inside the incredibility interval")
    return bound.content_identity(jump) - alpha
