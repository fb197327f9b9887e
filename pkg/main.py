from settings import *
from errors import ModelError, NumericalError
from run_config import RunConfig
from model_space import DataSummary, log_p_value_one_sided, p_value_one_sided, p_value_two_sided
from posterior import bayes_factor_01, posterior_model_probs, model_averaged_posterior
from intervals import (OneSidedInterval, TwoSidedInterval, MixedTwoSided,
                       StochasticBound, StochasticTwoSided, credible_one_sided, credible_two_sided,
                       conditional_credible_one_sided, frequentist_ci_lower)
from asymptotics import (AsymptoticRegime, limit_posterior_model_prob, appendix_limit, quantile_existence_limit,
                         jl_exclusion_curve, psi_curve)
from simulation import simulate_stochastic_content, simulate_joint_coverage
from figures import FigureOverrides, FigureSeries, build_figure, BUILDERS, ALIASES
from reports import encode_report, encode_series, write_output, summarize
from typing import List, Optional, Sequence
import argparse
import logging
import sys
import time

logger = logging.getLogger(__name__)


def cmd_bf(config: RunConfig) -> dict:
    pair, data = config.model_pair(), config.data_summary()
    bf = bayes_factor_01(pair, data)
    probs = posterior_model_probs(pair, data, bf)
    null_location = config.theta0 if config.point_null else 0.0
    return {
        'config': config.to_dict(),
        'n': data.n, 'z': data.z, 'ybar': data.ybar,
        'log_bf01': bf.log_bf01, 'bf01': bf.bf01, 'log_bf10': bf.log_bf10, 'bf_overflow': bf.overflow,
        'pm0': probs.pm0, 'pm1': probs.pm1,
        'p_value_one_sided': p_value_one_sided(data, null_location),
        'log_p_value_one_sided': log_p_value_one_sided(data, null_location),
        'p_value_two_sided': p_value_two_sided(data, null_location),
    }


def _stochastic_dict(bound: StochasticBound) -> dict:
    return {'location': bound.location, 'gamma': bound.gamma, 'side': bound.side, 'level': bound.alpha}


def _one_sided_report(post, alpha: float) -> dict:
    result = credible_one_sided(post, alpha)
    if isinstance(result, OneSidedInterval):
        return {'status': 'interval', 'lower': result.lower, 'lower_open': result.lower_open,
                'level': result.level}
    jump = result.incredibility
    return {
        'status': 'undefined',
        'incredibility_lower': jump.lower, 'incredibility_upper': jump.upper, 'atom_mass': jump.mass,
        'nearest_closed_level': result.nearest_closed.level,
        'nearest_open_level': result.nearest_open.level,
        'stochastic': _stochastic_dict(result.stochastic),
    }


def _two_sided_report(post, alpha: float) -> dict:
    result = credible_two_sided(post, alpha)
    if isinstance(result, TwoSidedInterval):
        return {'status': 'interval', 'lower': result.lower, 'upper': result.upper,
                'lower_open': result.lower_open, 'upper_open': result.upper_open, 'level': result.level}
    jump = result.incredibility
    out = {
        'status': 'undefined',
        'incredibility_lower': jump.lower, 'incredibility_upper': jump.upper, 'atom_mass': jump.mass,
        'lower_tail': type(result.lower_tail).__name__, 'upper_tail': type(result.upper_tail).__name__,
    }
    comp = result.composition
    if isinstance(comp, StochasticTwoSided):
        out['stochastic'] = {'point': comp.point, 'psi': comp.psi, 'valid': comp.valid,
                             'content_gap': comp.content_gap}
    elif isinstance(comp, MixedTwoSided):
        out['mixed'] = {
            'lower': _stochastic_dict(comp.lower) if isinstance(comp.lower, StochasticBound) else comp.lower,
            'upper': _stochastic_dict(comp.upper) if isinstance(comp.upper, StochasticBound) else comp.upper,
            'lower_open': comp.lower_open, 'upper_open': comp.upper_open,
        }
    return out


def cmd_cri(config: RunConfig) -> dict:
    pair, data = config.model_pair(), config.data_summary()
    post = model_averaged_posterior(pair, data)
    alpha = config.alpha
    report = {'config': config.to_dict(), 'n': data.n, 'z': data.z, 'ybar': data.ybar,
              'pm0': post.weights.pm0, 'pm1': post.weights.pm1}
    if config.two_sided:
        report['interval'] = _two_sided_report(post, alpha)
    else:
        report['interval'] = _one_sided_report(post, alpha)
        report['m1_only_lower'] = conditional_credible_one_sided(post, alpha).lower
        report['frequentist_lower'] = frequentist_ci_lower(data, alpha)
    return report


def cmd_figure(figure_id: str, config: RunConfig, overrides: Optional[FigureOverrides] = None) -> FigureSeries:
    return build_figure(figure_id, config, overrides)


def cmd_simulate(config: RunConfig, joint: bool = False, bin_width: float = DEFAULT_BIN_WIDTH,
                 workers: int = 1) -> dict:
    pair, data = config.model_pair(), config.data_summary()
    if joint:
        report = simulate_joint_coverage(pair, data.n, data.z, config.alpha, config.reps, config.seed, bin_width)
    else:
        report = simulate_stochastic_content(pair, data, config.alpha, config.reps, config.seed, workers)
    return {'config': config.to_dict(), **report.to_dict()}


def cmd_limits(config: RunConfig, n_max: int = FIG7_N_MAX) -> dict:
    """Large-n limits and the last n with an exact alpha-quantile."""
    pair = config.model_pair()
    z = config.z if config.z is not None else Z_P05
    report = {'config': config.to_dict(), 'z': z, 'limit_pm1': limit_posterior_model_prob(pair),
              'appendix_limits': {f'A{a:g}': appendix_limit(AsymptoticRegime(0.0, z, k))
                                  for a, k in zip(APPENDIX_A, APPENDIX_K)}}
    if pair.is_point_null:
        limit = quantile_existence_limit(pair, z, config.alpha, n_max)
        p = p_value_one_sided(DataSummary(1.0, z))
        far = [N_GRID_MAX_LIMITS]
        report.update({
            'largest_n_with_quantile': limit.largest_n,
            'first_n_without_quantile': limit.first_undefined_n,
            'gamma_at_n_max': 1.0 - jl_exclusion_curve(pair, p, config.alpha, far)[0].value,
            'psi_at_n_max': psi_curve(pair, p, config.alpha, far)[0].value,
            'n_max': N_GRID_MAX_LIMITS,
            'target': 1.0 - config.alpha,
        })
    return report


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(',', ' ').split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


class CredibleIntervalApp:
    def __init__(self):
        self.parser = self.build_parser()

    @staticmethod
    def build_parser() -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        model = common.add_argument_group('model')
        model.add_argument('--g0', type=float, default=None, help=f"M0 prior variance (default {DEFAULT_G0})")
        model.add_argument('--point-null', action='store_true', help="M0 is a point mass at --theta0")
        model.add_argument('--theta0', type=float, default=DEFAULT_THETA0)
        model.add_argument('--g1', type=float, default=DEFAULT_G1, help="M1 prior variance")
        model.add_argument('--prior-prob-m0', type=float, default=DEFAULT_PRIOR_PROB_M0)
        data = common.add_argument_group('data')
        data.add_argument('--n', type=float, default=None, help="sample size (1e10 style accepted)")
        form = data.add_mutually_exclusive_group()
        form.add_argument('--z', type=float, default=None, help="z = sqrt(n) * ybar")
        form.add_argument('--ybar', type=float, default=None)
        form.add_argument('--data', dest='data_file', default=None, metavar='FILE',
                          help="one observation per line, '#' starts a comment")
        common.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
        sides = common.add_mutually_exclusive_group()
        sides.add_argument('--two-sided', action='store_true')
        sides.add_argument('--one-sided', action='store_false', dest='two_sided', default=False)
        common.add_argument('--seed', type=int, default=DEFAULT_SEED)
        common.add_argument('--reps', type=lambda s: int(float(s)), default=DEFAULT_REPS)
        common.add_argument('--format', choices=('csv', 'json'), default='csv')
        common.add_argument('--out', default=None, metavar='PATH', help="output file (stdout when omitted)")
        common.add_argument('-v', '--verbose', action='store_true', help="debug logging")

        parser = argparse.ArgumentParser(
            prog='main.py', description="Model-averaged credible intervals for nested Gaussian models")
        sub = parser.add_subparsers(dest='command', required=True)
        sub.add_parser('bf', parents=[common], help="Bayes factor and posterior model probabilities")
        sub.add_parser('cri', parents=[common], help="credible interval, or why none exists")
        fig = sub.add_parser('figure', parents=[common], help="data series behind a figure")
        fig.add_argument('figure_id', help=', '.join(list(BUILDERS) + list(ALIASES)))
        fig.add_argument('--grid', type=_float_list, default=None, help="n grid (theta grid for posterior_cdf)")
        fig.add_argument('--p-values', type=_float_list, default=None)
        sim = sub.add_parser('simulate', parents=[common], help="repeated-sampling content check")
        sim.add_argument('--joint', action='store_true', help="prior-predictive draws binned on z")
        sim.add_argument('--bin-width', type=float, default=DEFAULT_BIN_WIDTH)
        sim.add_argument('--workers', type=int, default=1)
        lim = sub.add_parser('limits', parents=[common], help="large-n limits and quantile existence")
        lim.add_argument('--n-max', type=int, default=FIG7_N_MAX)
        return parser

    @staticmethod
    def to_config(args: argparse.Namespace) -> RunConfig:
        return RunConfig(point_null=args.point_null, g0=args.g0, theta0=args.theta0, g1=args.g1,
                         prior_prob_m0=args.prior_prob_m0, n=args.n, z=args.z, ybar=args.ybar,
                         data_file=args.data_file, alpha=args.alpha, two_sided=args.two_sided,
                         seed=args.seed, reps=args.reps, format=args.format, out=args.out)

    def dispatch(self, args: argparse.Namespace) -> int:
        needs_data = args.command in ('bf', 'cri', 'simulate')
        config = self.to_config(args).validate(require_data=needs_data)
        logger.debug("resolved config: %s", config.to_dict())

        if args.command == 'figure':
            series = cmd_figure(args.figure_id, config, FigureOverrides(args.grid, args.p_values))
            write_output(encode_series(series, config.format), config.out)
            if config.out:
                print(f"{series.figure_id}: {series.n_rows} rows written to {config.out}")
            return EXIT_OK

        if args.command == 'bf':
            report = cmd_bf(config)
            keys = ('n', 'z', 'log_bf01', 'bf01', 'pm0', 'pm1', 'p_value_one_sided')
        elif args.command == 'cri':
            report = cmd_cri(config)
            keys = ('n', 'z', 'pm0', 'pm1')
        elif args.command == 'simulate':
            report = cmd_simulate(config, args.joint, args.bin_width, args.workers)
            keys = ('replications', 'target', 'empirical', 'std_error', 'passed', 'gamma')
        else:
            report = cmd_limits(config, args.n_max)
            keys = ('limit_pm1', 'largest_n_with_quantile', 'first_n_without_quantile')
        write_output(encode_report(report, config.format), config.out)
        if config.out:
            print(summarize(args.command, {k: report[k] for k in keys if k in report}))
            if args.command == 'cri':
                print(summarize('interval', report['interval']))
        return EXIT_OK

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format='%(levelname)s %(name)s: %(message)s')
        logging.captureWarnings(True)
        start_time = time.time()
        try:
            code = self.dispatch(args)
        except NumericalError as e:
            print(f"numerical failure: {e}", file=sys.stderr)
            return EXIT_NUMERICAL
        except ModelError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        logger.debug("%s finished in %.2f s", args.command, time.time() - start_time)
        return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return CredibleIntervalApp().run(argv)


if __name__ == '__main__':
    sys.exit(main())
