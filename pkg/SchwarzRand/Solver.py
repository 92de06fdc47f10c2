# Incremental subspace correction: randomized, stochastic OMP,
# weak greedy and the noisy-update variant
#
# u^{(m+1)} = alpha_m u^{(m)} + xi_m R_{omega_m} r^{(m)}_{omega_m},
# r^{(m)}_{omega_m} = T_{omega_m}(u - u^{(m)}),   u^{(0)} = 0
import logging

import numpy as np

from .Common import *
from .HilbertSpace import SubspaceFamily

logger = logging.getLogger(__name__)


def alpha(m):
    if m < 0:
        raise ArgumentError('Step index must be nonnegative, got ' + str(m))
    return 1.0 - 1.0 / (m + 2.0)


def alpha_bar(m):
    if m < 0:
        raise ArgumentError('Step index must be nonnegative, got ' + str(m))
    return 1.0 / (m + 2.0)


class Problem:
    supported = ['direct', 'functional']      # how local residuals are computed
    def __init__(self, family, target, rhs_mode = 'direct'):
        assert(isinstance(family, SubspaceFamily))
        if rhs_mode not in self.supported:
            raise ArgumentError('rhs_mode must be one of ' + str(self.supported) + ', got ' + repr(rhs_mode))

        self.family      = family                                  # {V_omega, a_omega, R_omega}
        self.space       = family.space                            # (V, a)
        self.target      = family.space.check_vector(target, 'target')   # exact solution u
        self.rhs_mode    = rhs_mode
        self.rhs         = self.space.apply_gram(self.target)      # F(v) = rhs . v = a(u, v)
        self.target_norm = self.space.norm(self.target)            # ||u||

    def F(self, v):
        return float(self.rhs @ v)

    def residual(self, omega, u_m):
        if self.rhs_mode == 'direct':
            return self.family.apply_T(omega, self.target - u_m)
        # local problem: a_omega(r, v_omega) = F(R v_omega) - a(u_m, R v_omega)
        return self.family.apply_T_dual(omega, self.rhs - self.space.apply_gram(u_m))

    def sq_error(self, u_m):
        e = self.target - u_m
        return max(self.space.inner(e, e), 0.0)

    def __str__(self):  # overide for print function
        return 'Problem with ||u|| = ' + str(self.target_norm) + ', rhs mode ' + self.rhs_mode + '\n' + str(self.family)


class NoiseSpec:
    supported  = ['optimal', 'prescribed']     # xi_m schedules
    injections = ['iterate', 'update']         # noise added to u^{(m+1)} or inside the xi_m-scaled update
    def __init__(self, sigma, xi_schedule = 'optimal', xi0 = 1.0, xi_power = 1.0, injection = 'iterate'):
        if not sigma >= 0.0:
            raise ArgumentError('Noise scale sigma must be nonnegative, got ' + str(sigma))
        if xi_schedule not in self.supported:
            raise ArgumentError('xi_schedule must be one of ' + str(self.supported) + ', got ' + repr(xi_schedule))
        if not xi_power > 0.0:
            raise ArgumentError('xi_power must be positive, got ' + str(xi_power))
        if injection not in self.injections:
            raise ArgumentError('injection must be one of ' + str(self.injections) + ', got ' + repr(injection))
        self.sigma       = float(sigma)       # E ||eps_m||^2 = sigma^2
        self.xi_schedule = xi_schedule
        self.xi0         = float(xi0)         # prescribed xi_m = xi0 / (m + 1)^xi_power
        self.xi_power    = float(xi_power)
        self.injection   = injection

    def prescribed_xi(self, m):
        return self.xi0 / (m + 1.0) ** self.xi_power

    def __str__(self):  # overide for print function
        return 'Noise sigma = ' + str(self.sigma) + ', xi schedule ' + self.xi_schedule + ', ' + self.injection + ' injection'


class SolverTrajectory:
    def __init__(self, m_max, keep_iterates = False):
        self.m_max          = m_max
        self.sq_errors      = np.zeros(m_max + 1)         # delta_m^2, m = 0..m_max
        self.chosen         = np.full(m_max, -1, dtype = int)   # omega_m
        self.xis            = np.zeros(m_max)             # xi_m (OMP: coefficient of the new basis vector)
        self.iterates       = [] if keep_iterates else None     # u^{(m)}
        self.selected_norms = None                        # greedy: ||r_{omega_m}||_{omega_m}
        self.pool_max       = None                        # greedy: max over the pool

    def record(self, m, u_m, sq_error):
        self.sq_errors[m] = sq_error
        if self.iterates is not None:
            self.iterates.append(np.array(u_m, copy = True))

    def save_log(self, log_file):
        with open(log_file, 'a') as g:
            g.write('\t'.join(['m', 'omega', 'xi', 'sq_error']) + '\n')
            g.write('\t'.join(['0', '', '', repr(float(self.sq_errors[0]))]) + '\n')
            for m in range(self.m_max):
                g.write('\t'.join([str(m + 1), str(self.chosen[m]), repr(float(self.xis[m])),
                                   repr(float(self.sq_errors[m + 1]))]) + '\n')

    def __str__(self):  # overide for print function
        return 'Trajectory of ' + str(self.m_max) + ' steps, final squared error ' + str(self.sq_errors[-1])


def xi_optimal(problem, u_m, m, direction):
    # argmin_xi || u - alpha_m u_m - xi direction ||^2
    dd = problem.space.inner(direction, direction)
    if dd <= 0.0:
        return 0.0
    e_norm = np.sqrt(problem.sq_error(u_m))
    if np.sqrt(dd) <= ZERO_TOL * e_norm:
        return 0.0
    return (problem.F(direction) - alpha(m) * problem.space.inner(u_m, direction)) / dd


class CorrectionStepper:
    # state = u^{(m)}
    def __init__(self, problem):
        self.problem = problem
        self.family  = problem.family
        self.space   = problem.space

    def start(self):
        return self.space.zeros()

    def iterate(self, state):
        return state

    def direction(self, state, omega):
        u_m = self.iterate(state)
        return self.family.apply_R(omega, self.problem.residual(omega, u_m))

    def step_xi(self, state, m, direction):
        return xi_optimal(self.problem, self.iterate(state), m, direction)

    def step(self, state, m, omega):
        direction = self.direction(state, omega)
        xi = self.step_xi(state, m, direction)
        return alpha(m) * state + xi * direction, xi


class OmpStepper(CorrectionStepper):
    # state = (u^{(m)}, a-orthonormal basis of W_{m-1} as a tuple)
    def start(self):
        return (self.space.zeros(), ())

    def iterate(self, state):
        return state[0]

    def step(self, state, m, omega):
        u_m, basis = state
        q = self.direction(state, omega)
        # modified Gram-Schmidt in the a-inner product, with one re-orthogonalization pass
        for sweep in range(2):
            for b in basis:
                q = q - self.space.inner(b, q) * b
        norm_q = self.space.norm(q)
        if norm_q == 0.0 or norm_q <= OMP_REJECT_TOL * self.problem.target_norm:
            return state, 0.0
        q = q / norm_q
        coef = self.problem.F(q)
        return (u_m + coef * q, basis + (q,)), coef


class NoisyStepper(CorrectionStepper):
    def __init__(self, problem, noise, noise_stream = None):
        CorrectionStepper.__init__(self, problem)
        assert(isinstance(noise, NoiseSpec))
        self.noise        = noise
        self.noise_stream = noise_stream
        if noise.sigma > 0.0 and noise_stream is None:
            raise ArgumentError('A noise stream is required when sigma > 0')

    def step_xi(self, state, m, direction):
        if self.noise.xi_schedule == 'prescribed':
            return self.noise.prescribed_xi(m)
        return CorrectionStepper.step_xi(self, state, m, direction)

    def step(self, state, m, omega):
        u_next, xi = CorrectionStepper.step(self, state, m, omega)
        if self.noise.sigma > 0.0:
            # isotropic in an a-orthonormal basis, variance sigma^2 / d per coordinate
            z = self.noise_stream.normal(self.space.dim) * (self.noise.sigma / np.sqrt(self.space.dim))
            if self.noise.injection == 'update':
                z = xi * z
            u_next = u_next + self.space.from_orthonormal(z)
        return u_next, xi


def run_stepper(stepper, m_max, next_omega, keep_iterates = False):
    problem = stepper.problem
    trajectory = SolverTrajectory(m_max, keep_iterates)
    state = stepper.start()
    trajectory.record(0, stepper.iterate(state), problem.sq_error(stepper.iterate(state)))
    for m in range(m_max):
        omega = next_omega(state, m)
        state, xi = stepper.step(state, m, omega)
        trajectory.chosen[m] = omega
        trajectory.xis[m] = xi
        u_next = stepper.iterate(state)
        trajectory.record(m + 1, u_next, problem.sq_error(u_next))
    return trajectory


def check_measure(problem, measure):
    if len(measure) != len(problem.family):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, family has '
                            + str(len(problem.family)) + ' subspaces')


def run_random(problem, measure, m_max, stream, keep_iterates = False):
    check_measure(problem, measure)
    return run_stepper(CorrectionStepper(problem), m_max,
                       lambda state, m: measure.sample(stream), keep_iterates)


def run_omp(problem, measure, m_max, stream, keep_iterates = False):
    check_measure(problem, measure)
    return run_stepper(OmpStepper(problem), m_max,
                       lambda state, m: measure.sample(stream), keep_iterates)


def run_noisy(problem, measure, noise, m_max, stream, keep_iterates = False):
    check_measure(problem, measure)
    stepper = NoisyStepper(problem, noise, stream.derive(1))
    return run_stepper(stepper, m_max, lambda state, m: measure.sample(stream), keep_iterates)


def run_sequence(problem, chosen, keep_iterates = False, stepper = None):
    # replays a given index sequence omega_0, omega_1, ...
    chosen = [problem.family.check_index(omega) for omega in chosen]
    stepper = CorrectionStepper(problem) if stepper is None else stepper
    return run_stepper(stepper, len(chosen), lambda state, m: chosen[m], keep_iterates)


def greedy_residual_norms(problem, u_m, pool):
    if problem.rhs_mode == 'direct':
        return problem.family.residual_norms(problem.target - u_m, pool)
    return np.array([problem.family.local_norm(omega, problem.residual(omega, u_m)) for omega in pool])


def run_greedy(problem, beta, m_max, candidate_pool = None, keep_iterates = False):
    # the pool maximum satisfies the weak greedy rule for every beta in (0, 1]
    if not 0.0 < beta <= 1.0:
        raise ArgumentError('beta must lie in (0, 1], got ' + str(beta))
    pool = np.arange(len(problem.family)) if candidate_pool is None else np.asarray(candidate_pool, dtype = int)
    if pool.ndim != 1 or pool.shape[0] == 0:
        raise ArgumentError('Greedy candidate pool is empty')
    for omega in pool:
        problem.family.check_index(omega)

    selected_norms = np.zeros(m_max)
    pool_max = np.zeros(m_max)
    stepper = CorrectionStepper(problem)

    def select(state, m):
        norms = greedy_residual_norms(problem, stepper.iterate(state), pool)
        best = int(np.argmax(norms))
        selected_norms[m] = norms[best]
        pool_max[m] = np.max(norms)
        return int(pool[best])

    trajectory = run_stepper(stepper, m_max, select, keep_iterates)
    trajectory.selected_norms = selected_norms
    trajectory.pool_max = pool_max
    return trajectory


variants = ['random', 'omp', 'greedy', 'noisy']


def run_variant(problem, measure, variant, m_max, stream, noise = None, beta = 1.0,
                candidate_pool = None, keep_iterates = False):
    if variant == 'random':
        return run_random(problem, measure, m_max, stream, keep_iterates)
    elif variant == 'omp':
        return run_omp(problem, measure, m_max, stream, keep_iterates)
    elif variant == 'greedy':
        return run_greedy(problem, beta, m_max, candidate_pool, keep_iterates)
    elif variant == 'noisy':
        if noise is None:
            raise ArgumentError('The noisy variant needs a NoiseSpec')
        return run_noisy(problem, measure, noise, m_max, stream, keep_iterates)
    raise ArgumentError('Solver variant must be one of ' + str(variants) + ', got ' + repr(variant))


def energy_identity_gap(problem, u_m, m, omega):
    # relative gap |delta_{m+1}^2 - (||w||^2 - a(w, psi)^2)|, w = alpha_m e^{(m)} + bar alpha_m u;
    # None when psi_tilde vanishes
    space = problem.space
    e = problem.target - u_m
    psi = problem.family.psi_tilde(omega, e)
    if not np.any(psi):
        return None
    w = alpha(m) * e + alpha_bar(m) * problem.target
    predicted = space.inner(w, w) - space.inner(w, psi) ** 2
    u_next, xi = CorrectionStepper(problem).step(u_m, m, omega)
    actual = problem.sq_error(u_next)
    return abs(actual - predicted) / max(space.inner(w, w), np.finfo(float).tiny)


if __name__ == '__main__':
    from .Instance import orthonormal_instance
    from .Measure import RandomStream

    instance = orthonormal_instance(2, [0.5, 0.5])
    problem = instance.make_problem([1.0, 0.5])
    print(run_greedy(problem, 1.0, 2).sq_errors)
    print(run_random(problem, instance.measure, 5, RandomStream(42)).sq_errors)
