"""Data series behind each figure.

Builders return a :class:`FigureSeries` whose first column is the grid the
rows were computed at. Every figure fixes its model type (two-normal mixture
or point null) and its data; the variances, prior probability and z from the
run configuration override the defaults when given.
"""
from __future__ import annotations
from settings import *
from errors import ConfigError
from model_space import ModelPair, DataSummary, prior_density_series
from posterior import model_averaged_posterior, posterior_cdf_array, posterior_density_series, incredibility_interval
from asymptotics import (AsymptoticRegime, appendix_posterior_content, appendix_limit, jl_exclusion_curve,
                         model_prob_curve, quantile_existence_limit, limit_posterior_model_prob)
from run_config import RunConfig
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence
import logging

logger = logging.getLogger(__name__)


@dataclass
class FigureSeries:
    figure_id: str
    columns: Dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"columns of {self.figure_id} differ in length: {lengths}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def rows(self):
        names = list(self.columns)
        for i in range(self.n_rows):
            yield {name: self.columns[name][i] for name in names}


@dataclass(frozen=True)
class FigureOverrides:
    grid: Optional[Sequence[float]] = None
    p_values: Optional[Sequence[float]] = None


def log_grid(n_max: float, n_min: float = N_GRID_MIN, points: int = N_GRID_POINTS) -> np.ndarray:
    return np.logspace(math.log10(n_min), math.log10(n_max), points)


def theta_grid() -> np.ndarray:
    lo, hi, points = THETA_GRID
    grid = np.linspace(lo, hi, points)
    # the atom must be a grid point so both CDF flavours are reported at it
    return np.union1d(grid, [0.0])


def _n_grid(overrides: FigureOverrides, default_max: float) -> np.ndarray:
    if overrides.grid is None:
        return log_grid(default_max)
    grid = np.asarray(sorted(float(v) for v in overrides.grid), dtype=np.float64)
    if grid.size == 0 or grid[0] < 1.0:
        raise ConfigError("--grid needs sample sizes >= 1")
    return grid


def _mixture(config: RunConfig) -> ModelPair:
    return ModelPair.mixture(config.g0 if config.g0 is not None else DEFAULT_G0, config.g1, config.prior_prob_m0)


def _point_null(config: RunConfig) -> ModelPair:
    return ModelPair.point_null(config.theta0, config.g1, config.prior_prob_m0)


def _z(config: RunConfig, default: float) -> float:
    return config.z if config.z is not None else default


def _panels(figure_id: str, pair: ModelPair, config: RunConfig) -> FigureSeries:
    ybar = config.ybar if config.ybar is not None else PANEL_YBAR
    n = config.n if config.n is not None else PANEL_N
    data = DataSummary.from_ybar(n, ybar)
    post = model_averaged_posterior(pair, data)
    grid = theta_grid()
    columns = prior_density_series(pair, grid)
    columns.update({k: v for k, v in posterior_density_series(post, grid).items() if k != 'theta'})
    meta = {'n': n, 'ybar': ybar, 'z': data.z, 'posterior_pm0': post.weights.pm0,
            'posterior_pm1': post.weights.pm1}
    if pair.is_point_null:
        meta.update(prior_atom_mass=pair.prior_prob_m0, posterior_atom_mass=post.atom_mass,
                    atom_location=pair.prior0.location)
    return FigureSeries(figure_id, columns, meta)


def prior_posterior_panels(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """Prior and posterior densities for the two-normal mixture at n=10, ybar=0.520."""
    return _panels('prior_posterior_panels', _mixture(config), config)


def point_null_panels(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """Same panels with a point-null M0; densities are the continuous parts, atoms go to metadata."""
    return _panels('point_null_panels', _point_null(config), config)


def alpha_vs_n(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """alpha such that [0, inf) is a 100(1 - alpha)% credible interval, against n."""
    pair = _mixture(config)
    b = _z(config, Z_P05)
    grid = _n_grid(overrides, N_GRID_MAX_LIMITS)
    columns = {'n': grid}
    limits = {}
    for a, k in zip(APPENDIX_A, APPENDIX_K):
        regime = AsymptoticRegime(0.0, b, k)
        columns[f'alpha_A{a:g}'] = np.array([appendix_posterior_content(regime, pair, n, 'closed') for n in grid])
        limits[f'limit_A{a:g}'] = appendix_limit(regime)
    return FigureSeries('alpha_vs_n', columns, {'z': b, **limits})


def model_prob_vs_n(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    pair = _mixture(config)
    z = _z(config, Z_P05)
    rows = model_prob_curve(pair, z, _n_grid(overrides, N_GRID_MAX_MODEL_PROB))
    columns = {
        'n': np.array([r.n for r in rows]),
        'pm0': np.array([1.0 - r.value for r in rows]),
        'pm1': np.array([r.value for r in rows]),
        'prob_theta_below_0': np.array([r.lower for r in rows]),
    }
    return FigureSeries('model_prob_vs_n', columns, {'z': z, 'limit_pm1': limit_posterior_model_prob(pair)})


def jump_bounds_vs_n(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """Pr(theta < 0 | data) and Pr(theta <= 0 | data) for the point null."""
    pair = _point_null(config)
    z = _z(config, Z_P05)
    rows = model_prob_curve(pair, z, _n_grid(overrides, N_GRID_MAX))
    columns = {
        'n': np.array([r.n for r in rows]),
        'lower': np.array([r.lower for r in rows]),
        'upper': np.array([r.upper for r in rows]),
        'pm0': np.array([1.0 - r.value for r in rows]),
    }
    return FigureSeries('jump_bounds_vs_n', columns, {'z': z})


def posterior_cdf_series(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    pair = _point_null(config)
    n = config.n if config.n is not None else PANEL_N
    z = _z(config, Z_P05)
    post = model_averaged_posterior(pair, DataSummary(n, z))
    grid = np.asarray(overrides.grid, dtype=np.float64) if overrides.grid is not None else theta_grid()
    columns = {
        'theta': grid,
        'cdf_open': posterior_cdf_array(post, grid),
        'cdf_closed': posterior_cdf_array(post, grid, closed=True),
    }
    return FigureSeries('posterior_cdf', columns, {'n': n, 'z': z, 'atom_mass': post.atom_mass})


def lower_bound_alpha0005(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """Lower end of the jump at z = 2.575 for n = 1..100 against alpha = 0.005."""
    pair = _point_null(config)
    z = _z(config, Z_P005)
    alpha = 0.005
    if overrides.grid is not None:
        grid = np.asarray(sorted(int(v) for v in overrides.grid), dtype=np.int64)
    else:
        grid = np.arange(1, FIG7_N_MAX + 1)
    jumps = [incredibility_interval(model_averaged_posterior(pair, DataSummary(float(n), z))) for n in grid]
    columns = {
        'n': grid.astype(np.float64),
        'lower': np.array([j.lower for j in jumps]),
        'upper': np.array([j.upper for j in jumps]),
        'alpha': np.full(grid.size, alpha),
        'quantile_exists': np.array([0.0 if j.contains(alpha) else 1.0 for j in jumps]),
    }
    limit = quantile_existence_limit(pair, z, alpha, int(grid.max()))
    return FigureSeries('lower_bound_alpha0005', columns,
                        {'z': z, 'largest_n': limit.largest_n, 'first_undefined_n': limit.first_undefined_n})


def gamma_curves(config: RunConfig, overrides: FigureOverrides) -> FigureSeries:
    """1 - gamma against n, one curve per p-value, in long format."""
    pair = _point_null(config)
    p_values = tuple(overrides.p_values) if overrides.p_values is not None else FIG8_P_VALUES
    grid = _n_grid(overrides, N_GRID_MAX_LIMITS)
    ps, ns, values, defined = [], [], [], []
    for p in p_values:
        if not 0.0 < p < 1.0:
            raise ConfigError(f"--p-values entries must lie in (0, 1), got {p!r}")
        for row in jl_exclusion_curve(pair, p, config.alpha, grid):
            ps.append(p)
            ns.append(row.n)
            values.append(row.value)
            defined.append(1.0 if row.defined else 0.0)
    columns = {'p': np.array(ps), 'n': np.array(ns), 'one_minus_gamma': np.array(values),
               'defined': np.array(defined)}
    return FigureSeries('gamma_curves', columns, {'alpha': config.alpha, 'p_values': list(p_values)})


BUILDERS: Dict[str, Callable[[RunConfig, FigureOverrides], FigureSeries]] = {
    'prior_posterior_panels': prior_posterior_panels,
    'alpha_vs_n': alpha_vs_n,
    'point_null_panels': point_null_panels,
    'model_prob_vs_n': model_prob_vs_n,
    'jump_bounds_vs_n': jump_bounds_vs_n,
    'posterior_cdf': posterior_cdf_series,
    'lower_bound_alpha0005': lower_bound_alpha0005,
    'gamma_curves': gamma_curves,
}
ALIASES = {f'fig{i}': name for i, name in enumerate(BUILDERS, start=1)}


def resolve_figure_id(figure_id: str) -> str:
    name = ALIASES.get(figure_id, figure_id)
    if name not in BUILDERS:
        valid = ', '.join(f'{k} ({a})' for a, k in ALIASES.items())
        raise ConfigError(f"unknown figure {figure_id!r}; valid ids: {valid}")
    return name


def build_figure(figure_id: str, config: RunConfig, overrides: Optional[FigureOverrides] = None) -> FigureSeries:
    name = resolve_figure_id(figure_id)
    logger.debug("building %s", name)
    series = BUILDERS[name](config, overrides or FigureOverrides())
    series.metadata = {'config': config.to_dict(), **series.metadata}
    return series
