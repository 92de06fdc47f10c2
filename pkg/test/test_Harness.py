import json

import numpy as np
import pytest

from SchwarzRand.Common import ArgumentError, BudgetError, UnsupportedError, IndexLookupError, SchwarzWarning
from SchwarzRand.Harness import (RECONSTRUCTION_CONSTANT, ExpectationCurve, BoundRecord, BoundReport, mc_expectation,
                                 enumerate_expectation, try_enumerate, bound_curves, applicable_bounds, check_bound,
                                 evaluate_bounds, lower_bound_curve, worst_case_curve, worst_case_peak, rate_fit,
                                 recursion_check, write_csv, write_report, append_trajectory_log, combine_moments)
from SchwarzRand.HilbertSpace import InnerProductSpace
from SchwarzRand.Instance import orthonormal_instance, unit_dictionary_instance
from SchwarzRand.Measure import RandomStream
from SchwarzRand.Solver import NoiseSpec, run_random
from SchwarzRand.Spectral import class_report, make_hs_element

seed = 17
nruns = 10000
atol = 1e-12


@pytest.fixture
def unit_problem():
    instance = orthonormal_instance(2)
    return instance, instance.make_problem([1.0, 0.0])


def test_enumeration_values(unit_problem):
    instance, problem = unit_problem
    curve = enumerate_expectation(problem, instance.measure, 'random', 2)
    assert np.allclose(curve.means, [1.0, 0.5, 11.0 / 36.0], atol = atol)
    assert np.all(curve.stderrs == 0.0)
    assert curve.mode == 'enumeration'


def test_enumeration_omp(unit_problem):
    instance, problem = unit_problem
    curve = enumerate_expectation(problem, instance.measure, 'omp', 6)
    assert np.allclose(curve.means, 0.5 ** np.arange(7), atol = atol)


def test_enumeration_greedy():
    instance = orthonormal_instance(2)
    problem = instance.make_problem([1.0, 0.5])
    curve = mc_expectation(problem, instance.measure, 'greedy', 2, 10, seed)
    assert np.allclose(curve.means, [1.25, 0.25, 1.0 / 9.0], atol = atol)
    assert curve.mode == 'enumeration'


def test_enumeration_budget(unit_problem):
    instance, problem = unit_problem
    with pytest.raises(BudgetError):
        enumerate_expectation(problem, instance.measure, 'random', 30)
    assert try_enumerate(problem, instance.measure, 'random', 30) is None


def test_noisy_enumeration(unit_problem):
    instance, problem = unit_problem
    with pytest.raises(UnsupportedError):
        enumerate_expectation(problem, instance.measure, 'noisy', 2, NoiseSpec(0.1))
    curve = enumerate_expectation(problem, instance.measure, 'noisy', 2, NoiseSpec(0.0))
    assert np.allclose(curve.means, [1.0, 0.5, 11.0 / 36.0], atol = atol)


def test_mc_matches_enumeration(unit_problem):
    instance, problem = unit_problem
    exact = enumerate_expectation(problem, instance.measure, 'random', 2)
    curve = mc_expectation(problem, instance.measure, 'random', 2, nruns, seed)
    assert np.all(np.abs(curve.means - exact.means) <= 4.0 * curve.stderrs + atol)


def test_mc_point_mass():
    # exact after one step; the zero-residual step then damps the iterate to alpha_1 u
    instance = orthonormal_instance(1)
    curve = mc_expectation(instance.make_problem([2.0]), instance.measure, 'random', 3, 100, seed)
    assert np.allclose(curve.means, [4.0, 0.0, 4.0 / 9.0, 0.0], atol = atol)
    assert np.allclose(curve.stderrs, 0.0, atol = atol)


def test_mc_zero_target():
    instance = orthonormal_instance(3)
    curve = mc_expectation(instance.make_problem(np.zeros(3)), instance.measure, 'random', 5, 50, seed)
    assert np.all(curve.means == 0.0)


def test_mc_bad_runs(unit_problem):
    instance, problem = unit_problem
    with pytest.raises(ArgumentError):
        mc_expectation(problem, instance.measure, 'random', 2, 0, seed)
    with pytest.raises(ArgumentError):
        mc_expectation(problem, instance.measure, 'sideways', 2, 10, seed)


def test_mc_single_run(unit_problem):
    instance, problem = unit_problem
    with pytest.warns(SchwarzWarning):
        curve = mc_expectation(problem, instance.measure, 'random', 2, 1, seed)
    assert curve.low_power
    assert np.all(np.isinf(curve.stderrs))
    record = check_bound(curve, BoundRecord('ec2', np.full(3, 10.0)))
    assert record.status == 'low power'


def test_stderr_shrinks(unit_problem):
    instance, problem = unit_problem
    small = mc_expectation(problem, instance.measure, 'random', 1, 2000, seed)
    large = mc_expectation(problem, instance.measure, 'random', 1, 8000, seed)
    assert 0.4 <= large.stderrs[1] / small.stderrs[1] <= 0.6


def test_mc_deterministic():
    instance = orthonormal_instance(4, [0.1, 0.2, 0.3, 0.4])
    problem = instance.make_problem([1.0, -1.0, 0.5, 2.0])
    first = mc_expectation(problem, instance.measure, 'random', 10, 300, seed, threads = 1)
    again = mc_expectation(problem, instance.measure, 'random', 10, 300, seed, threads = 4)
    other = mc_expectation(problem, instance.measure, 'random', 10, 300, seed + 1, threads = 1)
    assert np.array_equal(first.means, again.means)
    assert np.array_equal(first.stderrs, again.stderrs)
    assert not np.array_equal(first.means, other.means)


def test_combine_moments():
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(100)
    parts = [(len(chunk), np.mean(chunk), np.sum((chunk - np.mean(chunk)) ** 2))
             for chunk in [x[:30], x[30:64], x[64:]]]
    count, mean, M2 = combine_moments(parts)
    assert count == 100
    assert np.isclose(mean, np.mean(x))
    assert np.isclose(M2, np.sum((x - np.mean(x)) ** 2))


def test_reconstruction_constant():
    assert np.isclose(RECONSTRUCTION_CONSTANT, 23.313708498984756)
    assert RECONSTRUCTION_CONSTANT < 24.0


def test_bound_curves_orthonormal(unit_problem):
    instance, problem = unit_problem
    norms = class_report(instance, problem.target, [0.5])
    records = bound_curves(instance, problem, norms, 4, s = 0.5)
    assert np.isclose(records['ec2a'].values[1], 1.0)
    assert records['ec2'].values[0] >= problem.target_norm ** 2
    assert np.isclose(records['ecvr'].values[0], RECONSTRUCTION_CONSTANT * 2.0)
    assert records['ecva'].values is not None
    curve = enumerate_expectation(problem, instance.measure, 'random', 4)
    report = evaluate_bounds(curve, records, names = applicable_bounds('random'))
    assert report.satisfied
    assert report.get('ec2').status == 'ok'
    with pytest.raises(IndexLookupError):
        report.get('cg1')


def test_bound_skipped_without_norm(unit_problem):
    instance, problem = unit_problem
    norms = class_report(instance, problem.target)
    records = bound_curves(instance, problem, norms, 4)
    assert records['ecvr'].status == 'skipped'
    report = evaluate_bounds(ExpectationCurve(np.ones(5), np.zeros(5), 1, 'enumeration'), records,
                             names = ['ecvr'])
    assert report.get('ecvr').status == 'skipped'


def test_applicable_bounds():
    assert applicable_bounds('greedy') == ['cg1']
    assert applicable_bounds('noisy', NoiseSpec(0.1)) == []
    assert 'ec2' in applicable_bounds('noisy', NoiseSpec(0.0))
    assert 'ec2' in applicable_bounds('omp')


def test_check_bound_failure():
    curve = ExpectationCurve([1.0, 0.6], [0.0, 0.01], 100, 'monte_carlo')
    record = check_bound(curve, BoundRecord('ec2', [1.0, 0.5]))
    assert not record.satisfied
    assert record.status == 'failed'
    assert np.isclose(record.worst_margin_sigma, -10.0)
    report = BoundReport()
    report.add(record)
    assert not report.satisfied


def test_rate_bounds_hold_small():
    instance = orthonormal_instance(4)
    u = make_hs_element(instance.covariance_decomposition(), 0.5, stream = RandomStream(seed))
    problem = instance.make_problem(u)
    norms = class_report(instance, u, [0.5])
    curve = mc_expectation(problem, instance.measure, 'random', 32, 500, seed)
    records = bound_curves(instance, problem, norms, 32, s = 0.5)
    report = evaluate_bounds(curve, records, names = ['ec2', 'ec2a'])
    assert report.satisfied


def test_lower_bound_curve(unit_problem):
    instance, problem = unit_problem
    assert np.allclose(lower_bound_curve(instance, problem.target, 4), 0.5 ** np.arange(5))
    single = orthonormal_instance(1)
    assert np.allclose(lower_bound_curve(single, [3.0], 2), [9.0, 0.0, 0.0])
    frame = unit_dictionary_instance(InnerProductSpace.identity(2),
                                     [[1.0, 1.0 / np.sqrt(2.0)], [0.0, 1.0 / np.sqrt(2.0)]])
    with pytest.raises(UnsupportedError):
        lower_bound_curve(frame, [1.0, 0.0], 2)


def test_lower_bound_dominated():
    instance = orthonormal_instance(3, [0.2, 0.3, 0.5])
    problem = instance.make_problem([1.0, -2.0, 0.5])
    lower = lower_bound_curve(instance, problem.target, 4)
    rec = enumerate_expectation(problem, instance.measure, 'random', 4)
    omp = enumerate_expectation(problem, instance.measure, 'omp', 4)
    assert np.all(rec.means >= lower - atol)
    assert np.allclose(omp.means, lower, atol = atol)


@pytest.mark.parametrize("m,r", [(1, 0.5), (4, 0.25), (10, 1.0), (50, 0.5)])
def test_worst_case_peak(m, r):
    grid = np.linspace(0.0, 1.0, 200001)[1:-1]
    values = grid ** (2.0 * r) * (1.0 - grid) ** m
    assert abs(grid[np.argmax(values)] - worst_case_peak(m, r)) <= 1e-5
    assert np.isclose(worst_case_curve(grid, r, m)[m], np.max(values))


@pytest.mark.parametrize("exponent", [-1.0, -0.5, -2.0])
def test_rate_fit(exponent):
    ms = np.arange(65)
    slope, intercept = rate_fit(3.0 * (ms + 1.0) ** exponent, 1, 64)
    assert np.isclose(slope, exponent)
    assert np.isclose(intercept, np.log(3.0))


def test_rate_fit_constant_and_zeros():
    slope, intercept = rate_fit(np.full(10, 2.0), 0, 9)
    assert np.isclose(slope, 0.0, atol = 1e-12)
    with pytest.warns(SchwarzWarning):
        slope, intercept = rate_fit([1.0, 0.5, 0.25, 0.0, 0.0], 0, 4)
    with pytest.raises(ArgumentError):
        rate_fit([1.0, 0.0, 0.0], 0, 2)


def test_recursion_check(unit_problem):
    instance, problem = unit_problem
    curve = enumerate_expectation(problem, instance.measure, 'random', 8)
    a2 = class_report(instance, problem.target).a2_norm
    constant = (instance.lambda_bound() * a2 + problem.target_norm) ** 2
    assert recursion_check(curve, constant).satisfied
    assert not recursion_check(curve, 0.0).satisfied


def test_recursion_check_tolerance():
    # one step from 1: rhs = alpha_0^2 + alpha_bar_0^2 = 0.5, tolerance 3 (0.01 + 0.25 * 0.02) = 0.045
    rhs = 0.5
    inside = ExpectationCurve([1.0, rhs + 0.04], [0.02, 0.01], 100, 'monte_carlo')
    record = recursion_check(inside, 1.0)
    assert record.satisfied
    assert np.isclose(record.worst_margin_sigma, 3.0 * (-0.04) / 0.045)
    outside = ExpectationCurve([1.0, rhs + 0.05], [0.02, 0.01], 100, 'monte_carlo')
    assert not recursion_check(outside, 1.0).satisfied
    assert recursion_check(outside, 1.0, sigma = 0.1).satisfied


def test_write_csv(tmp_path, unit_problem):
    instance, problem = unit_problem
    curve = mc_expectation(problem, instance.measure, 'random', 3, 100, seed)
    oracle = enumerate_expectation(problem, instance.measure, 'random', 3)
    records = bound_curves(instance, problem, class_report(instance, problem.target, [0.5]), 3, s = 0.5)
    lower = lower_bound_curve(instance, problem.target, 3)
    first, again = tmp_path / 'a' / 'first.csv', tmp_path / 'again.csv'
    write_csv(str(first), curve, records, lower, oracle)
    write_csv(str(again), curve, records, lower, oracle)
    assert first.read_bytes() == again.read_bytes()
    lines = first.read_text().splitlines()
    assert lines[0] == 'm,mean_sq_error,stderr,bound_ec2,bound_ec2a,bound_cg1,bound_ecvr,lower_bound,oracle_mean'
    assert len(lines) == 5
    assert lines[1].split(',')[-1] == '1.0'


def test_write_report(tmp_path):
    curve = ExpectationCurve([1.0, 0.5], [np.inf, np.inf], 1, 'monte_carlo')
    report = BoundReport(dict(kind = 'orthonormal', d = 2), seed, 1)
    report.add(check_bound(curve, BoundRecord('ec2', [1.0, 1.0])))
    path = tmp_path / 'report.json'
    write_report(str(path), report, dict(extra = np.float64(np.nan)))
    content = json.loads(path.read_text())
    assert content['satisfied'] is True
    assert content['extra'] is None
    assert content['bounds'][0]['status'] == 'low power'


def test_append_trajectory_log(tmp_path, unit_problem):
    instance, problem = unit_problem
    path = str(tmp_path / 'logs' / 'run.log')
    for r in range(2):
        append_trajectory_log(path, run_random(problem, instance.measure, 2, RandomStream(seed).for_run(r)))
    with open(path) as f:
        assert len(f.read().splitlines()) == 8
