# Experiment engine: Monte-Carlo and enumerated expectations of delta_m^2,
# bound curves, lower bounds, rate fits and the CSV / JSON / log outputs

import csv
import json
import logging
import os
from multiprocessing.pool import ThreadPool

import numpy as np

from .Common import *
from .HilbertSpace import CollectiveFamily
from .Measure import RandomStream
from .Solver import CorrectionStepper, OmpStepper, NoisyStepper, alpha, alpha_bar, run_greedy, run_variant, variants

logger = logging.getLogger(__name__)

RECONSTRUCTION_CONSTANT = (2.0 * (1.0 + np.sqrt(2.0))) ** 2     # interpolation-rate constant, < 24
CHUNK_SIZE = 64                                                 # runs per parallel task

csv_columns = ['m', 'mean_sq_error', 'stderr', 'bound_ec2', 'bound_ec2a', 'bound_cg1', 'bound_ecvr',
               'lower_bound', 'oracle_mean']


class ExpectationCurve:
    supported = ['monte_carlo', 'enumeration']
    def __init__(self, means, stderrs, runs, mode):
        assert(mode in self.supported)
        self.means     = np.asarray(means, dtype = float)      # E(delta_m^2), m = 0..m_max
        self.stderrs   = np.asarray(stderrs, dtype = float)    # standard errors, 0 for enumeration
        self.runs      = runs                                  # trajectories averaged (sequences for enumeration)
        self.mode      = mode
        self.low_power = mode == 'monte_carlo' and runs < 2

    @property
    def m_max(self):
        return self.means.shape[0] - 1

    def __str__(self):  # overide for print function
        return 'Expectation curve (' + self.mode + ', ' + str(self.runs) + ' runs): ' + str(self.means)


class BoundRecord:
    supported = ['pending', 'ok', 'failed', 'skipped', 'low power', 'deviation']
    def __init__(self, name, values = None, satisfied = None, worst_margin_sigma = None, status = 'pending', detail = ''):
        assert(status in self.supported)
        self.name               = name               # bound or check name
        self.values             = values             # bound curve over m, None for scalar checks
        self.satisfied          = satisfied          # None until evaluated or when skipped
        self.worst_margin_sigma = worst_margin_sigma # min_m (bound - mean) / stderr
        self.status             = status
        self.detail             = detail             # human-readable note

    def to_dict(self):
        return dict(name = self.name, satisfied = self.satisfied, worst_margin_sigma = self.worst_margin_sigma,
                    status = self.status, detail = self.detail)

    def __str__(self):  # overide for print function
        margin = '' if self.worst_margin_sigma is None else ', worst margin ' + \
                 '{:.3g}'.format(self.worst_margin_sigma) + ' sigma'
        return self.name + ': ' + self.status + margin + ('' if not self.detail else ' (' + self.detail + ')')


class BoundReport:
    def __init__(self, descriptor = None, seed = None, runs = None):
        self.descriptor = dict() if descriptor is None else dict(descriptor)   # instance description
        self.seed       = seed
        self.runs       = runs
        self.records    = []

    def add(self, record):
        self.records.append(record)
        logger.info('%s', record)
        return record

    def extend(self, other):
        for record in other.records:
            self.records.append(record)

    def get(self, name):
        for record in self.records:
            if record.name == name:
                return record
        raise IndexLookupError('No record named ' + repr(name))

    @property
    def satisfied(self):
        # deviations are reported, not judged
        return all(record.satisfied for record in self.records if record.status not in ['skipped', 'deviation'])

    def to_dict(self):
        deviations = [record.name for record in self.records if record.status == 'deviation']
        return dict(instance = self.descriptor, seed = self.seed, runs = self.runs, satisfied = self.satisfied,
                    deviations = deviations, bounds = [record.to_dict() for record in self.records])

    def __str__(self):  # overide for print function
        return '\n'.join(str(record) for record in self.records)


def make_stepper(problem, variant, noise = None, noise_stream = None):
    if variant == 'random':
        return CorrectionStepper(problem)
    elif variant == 'omp':
        return OmpStepper(problem)
    elif variant == 'noisy':
        if noise is None:
            raise ArgumentError('The noisy variant needs a NoiseSpec')
        return NoisyStepper(problem, noise, noise_stream)
    raise ArgumentError('No stepper for solver variant ' + repr(variant))


def combine_moments(parts):
    # ordered (count, mean, M2) merge, independent of how chunks were scheduled
    count, mean, M2 = parts[0]
    for n_b, mean_b, M2_b in parts[1:]:
        total = count + n_b
        delta = mean_b - mean
        mean = mean + delta * (n_b / total)
        M2 = M2 + M2_b + delta ** 2 * (count * n_b / total)
        count = total
    return count, mean, M2


def mc_expectation(problem, measure, variant, m_max, runs, seed, threads = None, noise = None,
                   beta = 1.0, candidate_pool = None):
    if variant not in variants:
        raise ArgumentError('Solver variant must be one of ' + str(variants) + ', got ' + repr(variant))
    if runs < 1:
        raise ArgumentError('Monte-Carlo needs runs >= 1, got ' + str(runs))
    if variant == 'greedy':
        # greedy selection is deterministic, one trajectory is its exact expectation
        return enumerate_expectation(problem, measure, variant, m_max, beta = beta, candidate_pool = candidate_pool)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ArgumentError('threads must be positive, got ' + str(threads))
    root = RandomStream(seed)

    def run_chunk(start):
        stop = min(start + CHUNK_SIZE, runs)
        errors = np.zeros((stop - start, m_max + 1))
        for r in range(start, stop):
            trajectory = run_variant(problem, measure, variant, m_max, root.for_run(r), noise = noise)
            errors[r - start] = trajectory.sq_errors
        return stop - start, np.mean(errors, axis = 0), np.sum((errors - np.mean(errors, axis = 0)) ** 2, axis = 0)

    starts = list(range(0, runs, CHUNK_SIZE))
    if threads == 1 or len(starts) == 1:
        parts = [run_chunk(start) for start in starts]
    else:
        with ThreadPool(processes = min(threads, len(starts))) as pool:
            parts = list(pool.map(run_chunk, starts))

    count, mean, M2 = combine_moments(parts)
    if runs > 1:
        stderrs = np.sqrt(np.maximum(M2, 0.0) / (runs - 1)) / np.sqrt(runs)
    else:
        stderrs = np.full(m_max + 1, np.inf)
        warn('Monte-Carlo with a single run has no error estimate (low power)')
    logger.info('Monte-Carlo %s: %d runs, m_max = %d, final mean %.6g', variant, runs, m_max, mean[-1])
    return ExpectationCurve(mean, stderrs, runs, 'monte_carlo')


def enumerate_expectation(problem, measure, variant, m_max, noise = None, beta = 1.0, candidate_pool = None):
    # exact sum of delta_m^2 prod rho_{omega_k} over all index sequences
    if variant == 'greedy':
        trajectory = run_greedy(problem, beta, m_max, candidate_pool)
        return ExpectationCurve(trajectory.sq_errors, np.zeros(m_max + 1), 1, 'enumeration')
    if variant == 'noisy' and (noise is None or noise.sigma > 0.0):
        raise UnsupportedError('Noisy runs with sigma > 0 cannot be enumerated')
    if len(measure) != len(problem.family):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, family has '
                            + str(len(problem.family)) + ' subspaces')
    n = len(measure)
    required = n ** m_max
    if required > ENUM_BUDGET:
        raise BudgetError('Enumeration needs ' + str(n) + '^' + str(m_max) + ' = ' + str(required)
                          + ' sequences, budget is ' + str(ENUM_BUDGET))

    stepper = make_stepper(problem, variant, noise)
    weights = measure.weights
    means = np.zeros(m_max + 1)

    def visit(state, m, prob):
        means[m] += prob * problem.sq_error(stepper.iterate(state))
        if m == m_max:
            return
        for omega in range(n):
            next_state, xi = stepper.step(state, m, omega)
            visit(next_state, m + 1, prob * weights[omega])

    visit(stepper.start(), 0, 1.0)
    logger.debug('Enumerated %d sequences of length %d', required, m_max)
    return ExpectationCurve(means, np.zeros(m_max + 1), required, 'enumeration')


def try_enumerate(problem, measure, variant, m_max, noise = None):
    # the oracle column; None when the budget does not allow it
    try:
        return enumerate_expectation(problem, measure, variant, m_max, noise)
    except (BudgetError, UnsupportedError) as err:
        logger.info('No enumeration oracle: %s', err)
        return None


def truncation_terms(decomp, U, m_max):
    # (||u - h_m||^2, ||h_m||^2, sum mu^{-1} c^2 over h_m) with h_m the truncation at mu >= 1/(m+1)
    c_sq = np.zeros(decomp.rank)
    u_sq = 0.0
    for u_i in U:
        c_sq += decomp.coefficients(u_i) ** 2
        u_sq += decomp.space.inner(u_i, u_i)
    ms = np.arange(m_max + 1)
    keep = decomp.eigenvalues[None, :] >= 1.0 / (ms[:, None] + 1.0)
    h_sq = keep @ c_sq
    h_a2_sq = keep @ (c_sq / decomp.eigenvalues)
    return np.maximum(u_sq - h_sq, 0.0), h_sq, h_a2_sq


def components(instance, u):
    if isinstance(instance.family, CollectiveFamily):
        return instance.family.space.blocks(u)
    return [u]


def bound_curves(instance, problem, norms, m_max, beta = 1.0, s = None):
    # name -> BoundRecord holding the bound curve, or a skipped record when a norm is missing
    lam = instance.lambda_bound()
    u_norm = problem.target_norm
    m1 = np.arange(m_max + 1) + 1.0
    collective = isinstance(instance.family, CollectiveFamily)
    records = dict()

    def add(name, values, missing):
        if values is None:
            records[name] = BoundRecord(name, status = 'skipped', detail = 'missing ' + missing)
        else:
            records[name] = BoundRecord(name, values)

    add('ec2', None if norms.a2_norm is None else (lam * norms.a2_norm + u_norm) ** 2 / m1, 'A_2 norm')
    hs_half = norms.hs_norms.get(0.5)
    add('ec2b' if collective else 'ec2a', None if hs_half is None else hs_half ** 2 / m1, 'H^1/2_L norm')
    add('cg1', None if norms.a1_upper is None else 2.0 * ((lam / beta) ** 2 * norms.a1_upper ** 2 + u_norm ** 2) / m1,
        'A_1 upper bound')
    hs_s = None if s is None else norms.hs_norms.get(float(s))
    add('ecvr', None if hs_s is None else RECONSTRUCTION_CONSTANT * m1 ** (-2.0 * s) * hs_s ** 2, 'H^s_L norm')

    U = components(instance, problem.target)
    rest_sq, h_sq, h_a2_sq = truncation_terms(instance.induced_decomposition(), U, m_max)
    add('ecv', 4.0 * (np.sqrt(rest_sq) + np.sqrt((lam * np.sqrt(h_a2_sq) + np.sqrt(h_sq)) ** 2 + u_norm ** 2)
                      / np.sqrt(m1)) ** 2, '')
    cov = instance.covariance_decomposition()
    name = 'ecvb' if collective else 'ecva'
    if cov is None:
        add(name, None, 'covariance operator')
    else:
        rest_sq, h_sq, h_a2_sq = truncation_terms(cov, U, m_max)
        add(name, 4.0 * (np.sqrt(rest_sq) + np.sqrt(h_a2_sq + u_norm ** 2) / np.sqrt(m1)) ** 2, '')
    return records


def applicable_bounds(variant, noise = None):
    # greedy is covered by the A_1 bound only; noisy updates by none of the noiseless bounds
    if variant == 'greedy':
        return ['cg1']
    if variant == 'noisy' and (noise is None or noise.sigma > 0.0 or noise.xi_schedule != 'optimal'):
        return []
    return ['ec2', 'ec2a', 'ec2b', 'ecv', 'ecva', 'ecvb', 'ecvr']


def check_bound(curve, record, m_min = 0, sigma_rule = SIGMA_RULE):
    # satisfied iff mean <= bound + sigma_rule * stderr for every m >= m_min
    if record.values is None:
        record.status = 'skipped'
        return record
    ms = np.arange(m_min, curve.m_max + 1)
    means = curve.means[ms]
    stderrs = curve.stderrs[ms]
    bound = np.asarray(record.values, dtype = float)[ms]
    slack = 1e-12 * np.maximum(1.0, np.abs(bound))
    record.satisfied = bool(np.all(means <= bound + sigma_rule * stderrs + slack))
    with np.errstate(divide = 'ignore', invalid = 'ignore'):
        margins = np.where(stderrs > 0.0, (bound - means) / stderrs,
                           np.where(means <= bound + slack, np.inf, -np.inf))
    record.worst_margin_sigma = float(np.min(margins))
    if not record.satisfied:
        record.status = 'failed'
    elif curve.low_power:
        record.status = 'low power'
    else:
        record.status = 'ok'
    return record


def evaluate_bounds(curve, records, report = None, names = None, m_min = 0):
    report = BoundReport() if report is None else report
    for name, record in records.items():
        if names is not None and name not in names:
            continue
        report.add(check_bound(curve, record, m_min))
    return report


def lower_bound_curve(instance, u, m_max):
    # sum_j (u, e_j)^2 (1 - rho_j)^m, valid for any method using at most m atoms
    if not instance.orthonormal:
        raise UnsupportedError('The lower bound curve needs an orthonormal instance')
    c = instance.atoms.T @ instance.space.apply_gram(u)
    ms = np.arange(m_max + 1)
    return ((1.0 - instance.measure.weights)[None, :] ** ms[:, None]) @ (c ** 2)


def worst_case_curve(weights, r, m_max):
    # sup_j rho_j^{2r} (1 - rho_j)^m, worst case over the unit ball of H^r_L
    weights = np.asarray(weights, dtype = float)
    ms = np.arange(m_max + 1)
    return np.max(weights[None, :] ** (2.0 * r) * (1.0 - weights[None, :]) ** ms[:, None], axis = 1)


def worst_case_peak(m, r):
    # maximizer of t^{2r} (1 - t)^m on [0, 1]; of order 1 / (m + 2r)
    return 2.0 * r / (m + 2.0 * r)


def rate_fit(curve, m_min, m_max):
    # least-squares slope and intercept of log E(delta_m^2) against log(m + 1)
    values = curve.means if isinstance(curve, ExpectationCurve) else np.asarray(curve, dtype = float)
    m_max = min(m_max, values.shape[0] - 1)
    ms = np.arange(m_min, m_max + 1)
    window = values[ms]
    bad = np.flatnonzero(~(window > 0.0))
    if bad.shape[0] > 0:
        ms = ms[:bad[0]]
        warn('Rate fit window shrunk to m in [' + str(m_min) + ', ' + str(m_min + bad[0] - 1)
             + '] because of nonpositive entries')
    if ms.shape[0] < 2:
        raise ArgumentError('Rate fit needs at least two positive entries')
    slope, intercept = np.polyfit(np.log(ms + 1.0), np.log(values[ms]), 1)
    return float(slope), float(intercept)


def recursion_check(curve, constant, sigma = 0.0, sigma_rule = SIGMA_RULE, name = 'recursion'):
    # E(delta_{m+1}^2) <= alpha_m^2 E(delta_m^2) + bar alpha_m^2 constant + sigma^2
    m_max = curve.m_max
    rhs = np.zeros(m_max + 1)
    rhs[0] = curve.means[0]
    tolerance = np.zeros(m_max + 1)
    for m in range(m_max):
        rhs[m + 1] = alpha(m) ** 2 * curve.means[m] + alpha_bar(m) ** 2 * constant + sigma ** 2
        # both sides are estimates: stderr of the mean at m + 1 plus that of alpha_m^2 times the mean at m
        tolerance[m + 1] = sigma_rule * (curve.stderrs[m + 1] + alpha(m) ** 2 * curve.stderrs[m])
    slack = 1e-12 * np.maximum(1.0, rhs)
    excess = curve.means - rhs - tolerance - slack
    record = BoundRecord(name, rhs, detail = 'tolerance ' + str(sigma_rule) + ' (stderr_{m+1} + alpha_m^2 stderr_m)')
    record.satisfied = bool(np.all(excess[1:] <= 0.0))
    with np.errstate(divide = 'ignore', invalid = 'ignore'):
        margins = np.where(tolerance[1:] > 0.0, sigma_rule * (rhs[1:] - curve.means[1:]) / tolerance[1:],
                           np.where(excess[1:] <= 0.0, np.inf, -np.inf))
    record.worst_margin_sigma = float(np.min(margins)) if m_max > 0 else None
    record.status = 'ok' if record.satisfied else 'failed'
    return record


def format_value(value):
    if value is None:
        return ''
    return repr(float(value))


def write_csv(path, curve, bounds = None, lower_bound = None, oracle = None):
    # one row per m; identical inputs give byte-identical files
    bounds = dict() if bounds is None else bounds
    check_folder(os.path.dirname(path))

    def column(values, m):
        if values is None:
            return ''
        return format_value(values[m])

    with open(path, 'w', newline = '') as f:
        writer = csv.writer(f, lineterminator = '\n')
        writer.writerow(csv_columns)
        for m in range(curve.m_max + 1):
            row = [str(m), format_value(curve.means[m]), format_value(curve.stderrs[m])]
            for name in ['ec2', 'ec2a', 'cg1', 'ecvr']:
                record = bounds.get(name)
                if name == 'ec2a' and record is None:
                    record = bounds.get('ec2b')
                row.append(column(None if record is None else record.values, m))
            row.append(column(lower_bound, m))
            row.append(column(None if oracle is None else oracle.means, m))
            writer.writerow(row)


def json_ready(value):
    # non-finite floats become null
    if isinstance(value, dict):
        return {str(key): json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(item) for item in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    return value


def write_report(path, report, extra = None):
    content = report.to_dict() if isinstance(report, BoundReport) else dict(report)
    if extra:
        content.update(extra)
    check_folder(os.path.dirname(path))
    with open(path, 'w') as f:
        json.dump(json_ready(content), f, indent = 2, allow_nan = False)
        f.write('\n')


def append_trajectory_log(path, trajectory):
    check_folder(os.path.dirname(path))
    trajectory.save_log(path)


if __name__ == '__main__':
    from .Instance import orthonormal_instance

    instance = orthonormal_instance(2)
    problem = instance.make_problem([1.0, 0.0])
    print(enumerate_expectation(problem, instance.measure, 'random', 2))
    print(mc_expectation(problem, instance.measure, 'random', 2, 1000, 42))
