"""Priors, the two-model setup and the unit-variance Gaussian data summary."""
from __future__ import annotations
from settings import *
from errors import ConfigError
from kernels import normal_pdf, normal_pdf_array, normal_sf, normal_quantile, log_normal_pdf, log_normal_cdf
from dataclasses import dataclass
from typing import Optional, Sequence, Union


@dataclass(frozen=True)
class ZeroMeanNormal:
    variance: float

    def __post_init__(self):
        if not (self.variance > 0.0 and math.isfinite(self.variance)):
            raise ConfigError(f"normal prior variance must be positive, got {self.variance!r}")

    def density(self, theta: float) -> float:
        return normal_pdf(theta, 0.0, self.variance)


@dataclass(frozen=True)
class PointMass:
    """Dirac mass 1 at ``location``; an exact atom, never a narrow normal."""
    location: float = DEFAULT_THETA0

    def __post_init__(self):
        if not math.isfinite(self.location):
            raise ConfigError(f"point mass location must be finite, got {self.location!r}")


Prior = Union[ZeroMeanNormal, PointMass]


@dataclass(frozen=True)
class ModelPair:
    prior0: Prior
    prior1: ZeroMeanNormal
    prior_prob_m0: float = DEFAULT_PRIOR_PROB_M0

    def __post_init__(self):
        if not isinstance(self.prior1, ZeroMeanNormal):
            raise ConfigError("the alternative model M1 must carry a zero-mean normal prior")
        if not isinstance(self.prior0, (ZeroMeanNormal, PointMass)):
            raise ConfigError(f"unsupported prior for M0: {self.prior0!r}")
        if not 0.0 < self.prior_prob_m0 < 1.0:
            raise ConfigError(f"Pr(M0) must lie in (0, 1), got {self.prior_prob_m0!r}")

    @classmethod
    def mixture(cls, g0: float = DEFAULT_G0, g1: float = DEFAULT_G1,
                prior_prob_m0: float = DEFAULT_PRIOR_PROB_M0) -> 'ModelPair':
        return cls(ZeroMeanNormal(g0), ZeroMeanNormal(g1), prior_prob_m0)

    @classmethod
    def point_null(cls, theta0: float = DEFAULT_THETA0, g1: float = DEFAULT_G1,
                   prior_prob_m0: float = DEFAULT_PRIOR_PROB_M0) -> 'ModelPair':
        return cls(PointMass(theta0), ZeroMeanNormal(g1), prior_prob_m0)

    @property
    def prior_prob_m1(self) -> float:
        return 1.0 - self.prior_prob_m0

    @property
    def is_point_null(self) -> bool:
        return isinstance(self.prior0, PointMass)

    @property
    def atom_location(self) -> Optional[float]:
        return self.prior0.location if self.is_point_null else None

    def swapped(self) -> 'ModelPair':
        """Exchange the roles of M0 and M1 (two-normal pairs only)."""
        if self.is_point_null:
            raise ConfigError("a point-null model cannot play the role of M1")
        return ModelPair(self.prior1, self.prior0, self.prior_prob_m1)


@dataclass(frozen=True)
class DataSummary:
    """n unit-variance observations reduced to z = sqrt(n) * ybar.

    n is a positive real so asymptotic sweeps can be smooth; integer n is
    the usual case.
    """
    n: float
    z: float

    def __post_init__(self):
        if not (self.n >= 1.0 and math.isfinite(self.n)):
            raise ConfigError(f"sample size must be a finite number >= 1, got {self.n!r}")
        if not math.isfinite(self.z):
            raise ConfigError(f"z statistic must be finite, got {self.z!r}")

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)

    @property
    def ybar(self) -> float:
        return self.z / self.sqrt_n

    @classmethod
    def from_ybar(cls, n: float, ybar: float) -> 'DataSummary':
        return cls(n, math.sqrt(n) * ybar)

    @classmethod
    def from_observations(cls, values: Sequence[float]) -> 'DataSummary':
        y = np.asarray(values, dtype=np.float64)
        if y.size == 0:
            raise ConfigError("no observations supplied")
        if not np.all(np.isfinite(y)):
            raise ConfigError("observations must be finite numbers")
        return cls.from_ybar(float(y.size), float(np.mean(y)))

    @classmethod
    def from_p_value(cls, n: float, p: float, null_location: float = 0.0) -> 'DataSummary':
        """Data whose one-sided p-value against H0: theta < null_location is p."""
        z = normal_quantile(1.0 - p) + math.sqrt(n) * null_location
        return cls(n, z)


@dataclass(frozen=True)
class PriorDensity:
    continuous: float
    atom_mass: float = 0.0
    atom_location: Optional[float] = None

    @property
    def is_infinite(self) -> bool:
        return self.atom_mass > 0.0


def mixture_prior_density(pair: ModelPair, theta: float) -> PriorDensity:
    """Pr(M0) pi0(theta) + Pr(M1) pi1(theta), with a point-null M0 kept as an atom."""
    slab = pair.prior_prob_m1 * pair.prior1.density(theta)
    if pair.is_point_null:
        location = pair.prior0.location
        mass = pair.prior_prob_m0 if theta == location else 0.0
        return PriorDensity(slab, mass, location)
    return PriorDensity(pair.prior_prob_m0 * pair.prior0.density(theta) + slab)


def prior_density_series(pair: ModelPair, grid) -> dict:
    """M0, M1 and mixture prior densities on a theta grid (continuous parts)."""
    grid = np.asarray(grid, dtype=np.float64)
    m1 = normal_pdf_array(grid, 0.0, pair.prior1.variance)
    if pair.is_point_null:
        m0 = np.zeros_like(grid)
    else:
        m0 = normal_pdf_array(grid, 0.0, pair.prior0.variance)
    mixture = pair.prior_prob_m0 * m0 + pair.prior_prob_m1 * m1
    return {'theta': grid, 'prior_m0': m0, 'prior_m1': m1, 'prior_mixture': mixture}


def marginal_log_likelihood(prior: Prior, data: DataSummary) -> float:
    """log density of ybar under one model: N(0, 1/n + g) or N(theta0, 1/n)."""
    if isinstance(prior, PointMass):
        return log_normal_pdf(data.ybar, prior.location, 1.0 / data.n)
    return log_normal_pdf(data.ybar, 0.0, 1.0 / data.n + prior.variance)


def p_value_one_sided(data: DataSummary, null_location: float = 0.0) -> float:
    """p-value against H0: theta < null_location."""
    return normal_sf(data.z - data.sqrt_n * null_location)


def log_p_value_one_sided(data: DataSummary, null_location: float = 0.0) -> float:
    """log of the one-sided p-value; stays finite where the p-value underflows to 0."""
    return log_normal_cdf(data.sqrt_n * null_location - data.z)


def p_value_two_sided(data: DataSummary, null_location: float = 0.0) -> float:
    """p-value against H0: theta = null_location."""
    return 2.0 * normal_sf(abs(data.z - data.sqrt_n * null_location))
