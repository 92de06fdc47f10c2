import numpy as np
import pytest

from conftest import block_family
from SchwarzRand.Common import ArgumentError
from SchwarzRand.Instance import orthonormal_instance, unit_dictionary_instance, random_unit_dictionary
from SchwarzRand.HilbertSpace import InnerProductSpace
from SchwarzRand.Measure import RandomStream, DiscreteMeasure
from SchwarzRand.Solver import (alpha, alpha_bar, Problem, NoiseSpec, NoisyStepper, CorrectionStepper, xi_optimal,
                                run_random, run_omp, run_noisy, run_greedy, run_sequence, run_variant,
                                energy_identity_gap)

seed = 11
m_max = 40
atol = 1e-12


def frame_instance(d = 4, n_atoms = 9):
    space = InnerProductSpace.identity(d)
    atoms = random_unit_dictionary(space, n_atoms, RandomStream(seed))
    return unit_dictionary_instance(space, atoms)


def test_alpha():
    assert alpha(0) == 0.5
    assert np.isclose(alpha(1), 2.0 / 3.0)
    for m in range(50):
        assert np.isclose(alpha(m) + alpha_bar(m), 1.0, atol = atol)
        assert alpha(m) < alpha(m + 1)
    with pytest.raises(ArgumentError):
        alpha(-1)


def test_xi_optimal():
    problem = orthonormal_instance(2).make_problem([1.0, 0.0])
    assert xi_optimal(problem, np.zeros(2), 0, np.array([1.0, 0.0])) == 1.0
    assert xi_optimal(problem, np.zeros(2), 0, np.zeros(2)) == 0.0


@pytest.mark.parametrize("variant", ['random', 'omp', 'greedy'])
def test_zero_target(variant):
    instance = orthonormal_instance(3)
    problem = instance.make_problem(np.zeros(3))
    trajectory = run_variant(problem, instance.measure, variant, 10, RandomStream(seed), keep_iterates = True)
    assert np.all(trajectory.sq_errors == 0.0)
    assert all(not np.any(u_m) for u_m in trajectory.iterates)


def test_initial_error_is_target_norm():
    instance = frame_instance()
    problem = instance.make_problem([1.0, -2.0, 0.5, 3.0])
    trajectory = run_random(problem, instance.measure, 5, RandomStream(seed))
    assert np.isclose(trajectory.sq_errors[0], problem.target_norm ** 2)


def test_one_dimensional_converges_in_one_step():
    instance = orthonormal_instance(1)
    problem = instance.make_problem([2.5])
    trajectory = run_random(problem, instance.measure, 3, RandomStream(seed))
    assert trajectory.sq_errors[1] == pytest.approx(0.0, abs = atol)


def test_greedy_known_sequence():
    problem = orthonormal_instance(2).make_problem([1.0, 0.5])
    trajectory = run_greedy(problem, 1.0, 2)
    assert np.allclose(trajectory.sq_errors, [1.25, 0.25, 1.0 / 9.0], atol = atol)
    assert list(trajectory.chosen) == [0, 1]
    assert np.allclose(trajectory.selected_norms, trajectory.pool_max)


@pytest.mark.parametrize("beta,pool", [(0.0, None), (1.5, None), (1.0, [])])
def test_greedy_bad_arguments(beta, pool):
    problem = orthonormal_instance(2).make_problem([1.0, 0.5])
    with pytest.raises(ArgumentError):
        run_greedy(problem, beta, 2, pool)


def test_greedy_candidate_pool():
    problem = orthonormal_instance(3).make_problem([1.0, 0.5, 4.0])
    trajectory = run_greedy(problem, 0.5, 4, [0, 1])
    assert set(trajectory.chosen) <= {0, 1}


def test_omp_monotone():
    instance = frame_instance()
    problem = instance.make_problem([1.0, -2.0, 0.5, 3.0])
    trajectory = run_omp(problem, instance.measure, m_max, RandomStream(seed))
    assert np.all(np.diff(trajectory.sq_errors) <= 1e-12 * trajectory.sq_errors[0])


def test_omp_beats_single_step():
    # the projection onto W_m is at least as good as one optimal randomized step from the OMP iterate
    instance = frame_instance()
    problem = instance.make_problem([1.0, -2.0, 0.5, 3.0])
    trajectory = run_omp(problem, instance.measure, 12, RandomStream(seed), keep_iterates = True)
    stepper = CorrectionStepper(problem)
    for m in range(12):
        u_next, xi = stepper.step(trajectory.iterates[m], m, trajectory.chosen[m])
        assert trajectory.sq_errors[m + 1] <= problem.sq_error(u_next) + 1e-12


def test_omp_orthonormal_halves():
    instance = orthonormal_instance(2)
    problem = instance.make_problem([1.0, 0.0])
    trajectory = run_omp(problem, instance.measure, 5, RandomStream(seed))
    assert set(trajectory.sq_errors[1:]) <= {0.0, 1.0}


def test_zero_noise_matches_random():
    instance = frame_instance()
    problem = instance.make_problem([1.0, -2.0, 0.5, 3.0])
    plain = run_random(problem, instance.measure, m_max, RandomStream(seed))
    noisy = run_noisy(problem, instance.measure, NoiseSpec(0.0), m_max, RandomStream(seed))
    assert np.array_equal(plain.sq_errors, noisy.sq_errors)
    assert np.array_equal(plain.chosen, noisy.chosen)


def test_noise_spec():
    with pytest.raises(ArgumentError):
        NoiseSpec(-0.1)
    with pytest.raises(ArgumentError):
        NoiseSpec(0.1, 'never')
    assert NoiseSpec(0.1, 'prescribed', 2.0).prescribed_xi(3) == 0.5
    assert NoiseSpec(0.1, 'prescribed', 2.0, 0.5).prescribed_xi(3) == 1.0
    with pytest.raises(ArgumentError):
        NoiseSpec(0.1, 'prescribed', 1.0, 0.0)
    with pytest.raises(ArgumentError):
        NoiseSpec(0.1, injection = 'gradient')
    problem = orthonormal_instance(2).make_problem([1.0, 0.0])
    with pytest.raises(ArgumentError):
        NoisyStepper(problem, NoiseSpec(0.1))


def test_update_injection_scales_noise():
    # u^{(m+1)} = alpha u^{(m)} + xi (direction + eps) against noise added to the iterate
    problem = orthonormal_instance(2).make_problem([1.0, 0.0])
    state = CorrectionStepper(problem).start() + np.array([0.25, 0.5])
    plain, xi = NoisyStepper(problem, NoiseSpec(0.0, 'prescribed', 0.8)).step(state, 2, 0)
    inside, _ = NoisyStepper(problem, NoiseSpec(0.1, 'prescribed', 0.8, 1.0, 'update'), RandomStream(seed)).step(state, 2, 0)
    outside, _ = NoisyStepper(problem, NoiseSpec(0.1, 'prescribed', 0.8), RandomStream(seed)).step(state, 2, 0)
    assert np.isclose(xi, 0.8 / 3.0)
    assert np.allclose(inside - plain, xi * (outside - plain))
    assert not np.allclose(outside, plain)


def test_noisy_run_reproducible():
    instance = orthonormal_instance(4)
    problem = instance.make_problem([1.0, 0.0, 0.0, 0.0])
    noise = NoiseSpec(0.3)
    first = run_noisy(problem, instance.measure, noise, 20, RandomStream(seed))
    again = run_noisy(problem, instance.measure, noise, 20, RandomStream(seed))
    assert np.array_equal(first.sq_errors, again.sq_errors)


def test_functional_mode_matches_direct():
    family = block_family(np.random.default_rng(seed))
    measure = DiscreteMeasure.uniform(len(family))
    target = np.random.default_rng(seed + 1).standard_normal(family.space.dim)
    direct = run_random(Problem(family, target, 'direct'), measure, m_max, RandomStream(seed), True)
    functional = run_random(Problem(family, target, 'functional'), measure, m_max, RandomStream(seed), True)
    for u, v in zip(direct.iterates, functional.iterates):
        assert family.space.norm(u - v) <= 1e-12 * max(1.0, family.space.norm(target))


def test_energy_identity():
    family = block_family(np.random.default_rng(seed))
    target = np.random.default_rng(seed + 1).standard_normal(family.space.dim)
    problem = Problem(family, target)
    measure = DiscreteMeasure.uniform(len(family))
    trajectory = run_random(problem, measure, 20, RandomStream(seed), keep_iterates = True)
    for m in range(20):
        gap = energy_identity_gap(problem, trajectory.iterates[m], m, trajectory.chosen[m])
        assert gap is None or gap <= 1e-10


def test_xi_is_optimal():
    family = block_family(np.random.default_rng(seed))
    target = np.random.default_rng(seed + 1).standard_normal(family.space.dim)
    problem = Problem(family, target)
    stepper = CorrectionStepper(problem)
    rng = np.random.default_rng(seed)
    u_m = rng.standard_normal(family.space.dim)
    for m, omega in enumerate([0, 3, 1, 4]):
        direction = stepper.direction(u_m, omega)
        xi = xi_optimal(problem, u_m, m, direction)
        best = problem.sq_error(alpha(m) * u_m + xi * direction)
        for delta in [1e-3, -1e-3, 0.1, -0.1]:
            assert best <= problem.sq_error(alpha(m) * u_m + (xi + delta) * direction) + 1e-12


def test_run_sequence_replays_random():
    instance = frame_instance()
    problem = instance.make_problem([1.0, -2.0, 0.5, 3.0])
    trajectory = run_random(problem, instance.measure, 15, RandomStream(seed))
    replay = run_sequence(problem, trajectory.chosen)
    assert np.array_equal(trajectory.sq_errors, replay.sq_errors)


def test_measure_mismatch():
    instance = orthonormal_instance(3)
    problem = instance.make_problem([1.0, 0.0, 0.0])
    with pytest.raises(ArgumentError):
        run_random(problem, DiscreteMeasure.uniform(2), 3, RandomStream(seed))


def test_unknown_variant():
    instance = orthonormal_instance(2)
    problem = instance.make_problem([1.0, 0.0])
    with pytest.raises(ArgumentError):
        run_variant(problem, instance.measure, 'sideways', 3, RandomStream(seed))
    with pytest.raises(ArgumentError):
        run_variant(problem, instance.measure, 'noisy', 3, RandomStream(seed))


def test_trajectory_log(tmp_path):
    instance = orthonormal_instance(2)
    trajectory = run_random(instance.make_problem([1.0, 0.0]), instance.measure, 3, RandomStream(seed))
    log_file = tmp_path / 'trajectory.log'
    trajectory.save_log(str(log_file))
    lines = log_file.read_text().splitlines()
    assert lines[0] == 'm\tomega\txi\tsq_error'
    assert len(lines) == 5
