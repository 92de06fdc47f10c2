# Command-line front end: run, verify, norms and sweep subcommands
import argparse
import csv
import dataclasses
import itertools
import json
import logging
import os
import sys

import numpy as np

from .Common import *
from .Config import RunConfig
from .Harness import (BoundReport, mc_expectation, try_enumerate, bound_curves, evaluate_bounds, applicable_bounds,
                      lower_bound_curve, rate_fit, recursion_check, write_csv, write_report, append_trajectory_log,
                      json_ready, format_value)
from .Measure import RandomStream
from .Solver import run_variant
from .Spectral import class_report
from .Suite import suites, verify

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'
sweep_keys = ['s', 'beta', 'sigma', 'skew']
summary_bounds = ['ec2', 'ec2a', 'cg1', 'ecvr']


def configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level = level, format = LOG_FORMAT)
    logging.getLogger().setLevel(level)
    logging.captureWarnings(True)


def load_config(path):
    if path is None:
        return RunConfig()
    return RunConfig.from_json(path)


def execute(config):
    # one configured experiment: MC curve, optional oracle, class norms and evaluated bounds
    instance, problem = config.build_problem()
    solver = config.solver
    variant = solver['variant']
    noise = config.build_noise()
    beta = solver.get('beta', 1.0)
    curve = mc_expectation(problem, instance.measure, variant, config.m_max, config.runs, config.seed, config.threads,
                           noise, beta, solver.get('candidate_pool'))
    oracle = None
    if config.enumerate and variant != 'greedy':
        oracle = try_enumerate(problem, instance.measure, variant, config.m_max, noise)

    s = config.smoothness_index()
    s_list = [0.5] if s is None or s == 0.5 else [0.5, s]
    norms = class_report(instance, problem.target, s_list)
    records = bound_curves(instance, problem, norms, config.m_max, beta, s)
    report = BoundReport(instance.descriptor, config.seed, config.runs)
    evaluate_bounds(curve, records, report, applicable_bounds(variant, noise))
    if variant == 'noisy' and noise.xi_schedule == 'optimal' and noise.injection == 'iterate' \
            and norms.a2_norm is not None:
        constant = (instance.lambda_bound() * norms.a2_norm + problem.target_norm) ** 2
        report.add(recursion_check(curve, constant, noise.sigma, name = 'noisy-recursion'))
    lower = lower_bound_curve(instance, problem.target, config.m_max) if instance.orthonormal else None
    return dict(instance = instance, problem = problem, curve = curve, oracle = oracle, norms = norms,
                records = records, report = report, lower = lower)


def cmd_run(args):
    config = load_config(args.config).override(seed = args.seed, runs = args.runs, m_max = args.m_max,
                                               threads = args.threads)
    outputs = dict(config.outputs)
    for key in ['csv', 'json', 'log']:
        if getattr(args, key) is not None:
            outputs[key] = getattr(args, key)
    config = dataclasses.replace(config, outputs = outputs).validate()

    result = execute(config)
    curve = result['curve']
    if outputs.get('csv'):
        write_csv(outputs['csv'], curve, result['records'], result['lower'], result['oracle'])
    if outputs.get('json'):
        extra = dict(config = config.to_dict(), norms = result['norms'].to_dict())
        write_report(outputs['json'], result['report'], extra)
    if outputs.get('log'):
        trajectory = run_variant(result['problem'], result['instance'].measure, config.solver['variant'], config.m_max,
                                 RandomStream(config.seed).for_run(0), config.build_noise(),
                                 config.solver.get('beta', 1.0), config.solver.get('candidate_pool'))
        append_trajectory_log(outputs['log'], trajectory)

    print('m\tmean_sq_error\tstderr')
    for m in range(curve.m_max + 1):
        print(str(m) + '\t' + format_value(curve.means[m]) + '\t' + format_value(curve.stderrs[m]))
    print(result['report'])
    return 0


def cmd_verify(args):
    overrides = dict()
    if args.config is not None:
        try:
            with open(args.config, 'r') as f:
                overrides = json.load(f)
        except (OSError, ValueError) as err:
            raise ConfigError('Cannot read suite overrides ' + str(args.config) + ': ' + str(err))
        if not isinstance(overrides, dict):
            raise ConfigError('Suite overrides must be a JSON object')
    for key in ['runs', 'm_max', 'seed', 'threads']:
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    report = verify(args.suite, overrides)
    print(report)
    deviations = report.to_dict()['deviations']
    if deviations:
        print('deviations: ' + ', '.join(deviations))
    print('satisfied: ' + str(report.satisfied).lower())
    if args.json is not None:
        write_report(args.json, report)
    return 0 if report.satisfied else 4


def parse_s_list(text):
    if text is None:
        return [0.5]
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ConfigError('--s must be a comma-separated list of numbers, got ' + repr(text))


def cmd_norms(args):
    config = load_config(args.config).validate()
    instance = config.build_instance()
    if args.vector is not None:
        try:
            u = np.loadtxt(args.vector, ndmin = 1)
        except (OSError, ValueError) as err:
            raise ConfigError('Cannot read vector ' + str(args.vector) + ': ' + str(err))
        u = instance.space.check_vector(u.ravel(), 'vector')
    else:
        u = config.build_target(instance)
    report = class_report(instance, u, parse_s_list(args.s))
    content = dict(instance = instance.descriptor, norms = report.to_dict(), lemma_chain = report.lemma_chain_holds())
    text = json.dumps(json_ready(content), indent = 2, allow_nan = False)
    print(text)
    if args.json is not None:
        write_report(args.json, content)
    return 0


def load_grid(text):
    if os.path.isfile(text):
        with open(text, 'r') as f:
            text = f.read()
    try:
        grid = json.loads(text)
    except ValueError as err:
        raise ConfigError('--grid is neither a JSON file nor a JSON object: ' + str(err))
    if not isinstance(grid, dict) or not grid:
        raise ConfigError('--grid must be a nonempty JSON object')
    unknown = sorted(set(grid) - set(sweep_keys))
    if unknown:
        raise ConfigError('Unknown sweep keys ' + ', '.join(unknown) + ', expected ' + str(sweep_keys))
    for key, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ConfigError('Sweep values for ' + key + ' must be a nonempty list')
    return grid


def sweep_config(base, point):
    config = RunConfig.from_dict(json.loads(json.dumps(base.to_dict())))
    if 's' in point:
        config.s = point['s']
        if config.target.get('kind') == 'hs_element':
            config.target['s'] = point['s']
    if 'beta' in point:
        config.solver['beta'] = point['beta']
    if 'sigma' in point:
        config.solver['sigma'] = point['sigma']
        if point['sigma'] > 0.0 and config.solver['variant'] == 'random':
            config.solver['variant'] = 'noisy'
    if 'skew' in point:
        config.instance['weights'] = dict(preset = 'skewed', skew = point['skew'])
    return config.validate()


def cmd_sweep(args):
    base = load_config(args.config).override(seed = args.seed, runs = args.runs, m_max = args.m_max,
                                             threads = args.threads)
    if base.seed is None:
        base = base.override(seed = 0)
    base = dataclasses.replace(base, enumerate = False)
    grid = load_grid(args.grid)
    keys = [key for key in sweep_keys if key in grid]
    header = keys + ['slope', 'intercept'] + ['margin_' + name for name in summary_bounds] + ['satisfied', 'final_mean']

    rows = []
    for values in itertools.product(*[grid[key] for key in keys]):
        point = dict(zip(keys, values))
        config = sweep_config(base, point)
        result = execute(config)
        curve = result['curve']
        try:
            slope, intercept = rate_fit(curve, max(1, config.m_max // 8), config.m_max)
        except ArgumentError:
            slope, intercept = None, None
        report = result['report']
        margins = []
        for name in summary_bounds:
            try:
                margins.append(report.get(name).worst_margin_sigma)
            except IndexLookupError:
                margins.append(None)
        row = [format_value(value) for value in values] + [format_value(slope), format_value(intercept)]
        row += [format_value(margin) for margin in margins]
        row += [str(report.satisfied).lower(), format_value(curve.means[-1])]
        rows.append(row)
        logger.info('Sweep point %s: slope %s', point, row[len(keys)])

    if args.csv is not None:
        check_folder(os.path.dirname(args.csv))
        f = open(args.csv, 'w', newline = '')
    else:
        f = sys.stdout
    try:
        writer = csv.writer(f, lineterminator = '\n')
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if f is not sys.stdout:
            f.close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog = 'schwarz-rand',
                                     description = 'Randomized, greedy and OMP subspace correction experiments')
    parser.add_argument('-v', '--verbose', action = 'store_true', help = 'debug logging')
    parser.add_argument('-q', '--quiet', action = 'store_true', help = 'warnings and errors only')
    parser.add_argument('--threads', type = int, default = None,
                        help = 'thread cap for Monte-Carlo runs (default $' + THREADS_ENV + ' or 1)')
    subparsers = parser.add_subparsers(dest = 'command')
    subparsers.required = True

    run = subparsers.add_parser('run', help = 'run a configured experiment')
    run.add_argument('--config', help = 'JSON run configuration')
    run.add_argument('--seed', type = int, required = True)
    run.add_argument('--runs', type = int)
    run.add_argument('--m-max', dest = 'm_max', type = int)
    run.add_argument('--csv', help = 'per-m CSV output')
    run.add_argument('--json', help = 'JSON bound report')
    run.add_argument('--log', help = 'tab-separated log of the first trajectory (appended)')
    run.set_defaults(func = cmd_run)

    check = subparsers.add_parser('verify', help = 'run a verification suite')
    check.add_argument('suite', choices = sorted(suites) + ['all'])
    check.add_argument('--config', help = 'JSON object of suite overrides (runs, m_max, seed, threads, ...)')
    check.add_argument('--seed', type = int)
    check.add_argument('--runs', type = int)
    check.add_argument('--m-max', dest = 'm_max', type = int)
    check.add_argument('--json', help = 'JSON report output')
    check.set_defaults(func = cmd_verify)

    norms = subparsers.add_parser('norms', help = 'smoothness class norms of a vector')
    norms.add_argument('--config', help = 'JSON run configuration (instance and target)')
    norms.add_argument('--vector', help = 'text file with the coefficients of u (numpy.loadtxt)')
    norms.add_argument('--s', help = 'comma-separated smoothness indices, default 0.5')
    norms.add_argument('--json', help = 'JSON output file')
    norms.set_defaults(func = cmd_norms)

    sweep = subparsers.add_parser('sweep', help = 'parameter sweep over s, beta, sigma and skew')
    sweep.add_argument('--config', help = 'JSON run configuration')
    sweep.add_argument('--grid', required = True, help = 'JSON object or file, e.g. {"s": [0.25, 0.5]}')
    sweep.add_argument('--seed', type = int)
    sweep.add_argument('--runs', type = int)
    sweep.add_argument('--m-max', dest = 'm_max', type = int)
    sweep.add_argument('--csv', help = 'summary CSV output (default stdout)')
    sweep.set_defaults(func = cmd_sweep)
    return parser


def main(argv = None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)
    try:
        return args.func(args)
    except (ConfigError, ArgumentError, IndexLookupError, UnsupportedError, BudgetError) as err:
        logger.error('Configuration error: %s', err)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as err:
        logger.error('Numerical error: %s', err)
        return 3


if __name__ == '__main__':
    sys.exit(main())
