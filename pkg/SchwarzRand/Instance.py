# Builders for the concrete settings: orthonormal bases, unit dictionaries,
# kernel (RKHS) point evaluations and collective approximation in H^n
import logging

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from .Common import *
from .HilbertSpace import InnerProductSpace, SubspaceFamily, CollectiveFamily
from .Measure import DiscreteMeasure
from .Solver import Problem, SolverTrajectory, alpha
from .Spectral import check_unit_atoms, dictionary_synthesis, synthesis_decomp, induced_decomposition

logger = logging.getLogger(__name__)


class Instance:
    supported = ['orthonormal', 'unit_dictionary', 'rkhs', 'collective']
    def __init__(self, kind, family, measure, atoms = None, orthonormal = False, descriptor = None):
        if kind not in self.supported:
            raise ArgumentError('Instance kind must be one of ' + str(self.supported) + ', got ' + repr(kind))
        if len(measure) != len(family):
            raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, family has ' + str(len(family)) + ' subspaces')

        self.kind          = kind               # one of supported
        self.family        = family             # SubspaceFamily or CollectiveFamily
        self.measure       = measure            # DiscreteMeasure over the family's indices
        self.atoms         = atoms              # d x N unit atoms in H, None for general families
        self.orthonormal   = orthonormal        # atoms form an a-orthonormal basis
        self.descriptor    = dict() if descriptor is None else dict(descriptor)   # JSON-ready description

        self.default_target = None              # target used when make_problem gets none
        self.kernel_values  = None              # rkhs: kernel Gram on the nodes (jitter included)
        self.nodes          = None              # rkhs: node locations
        self.phi            = None              # collective: d x n orthonormal Phi

        self._induced     = None
        self._covariance  = None

    @property
    def space(self):
        return self.family.space

    def lambda_bound(self):
        return self.family.lambda_bound()

    def make_problem(self, target = None, rhs_mode = 'direct'):
        if target is None:
            if self.default_target is None:
                raise ArgumentError('Instance ' + self.kind + ' has no default target')
            target = self.default_target
        return Problem(self.family, target, rhs_mode)

    def induced_decomposition(self):
        if self._induced is None:
            self._induced = induced_decomposition(self.family, self.measure)
        return self._induced

    def covariance_decomposition(self):
        # spectral decomposition of L on H; None when the family is not a unit dictionary
        if self.atoms is None:
            return None
        if self._covariance is None:
            base = self.family.base_space if isinstance(self.family, CollectiveFamily) else self.family.space
            self._covariance = synthesis_decomp(base, dictionary_synthesis(base, self.atoms, self.measure))
        return self._covariance

    def __str__(self):  # overide for print function
        return 'Instance ' + self.kind + ' ' + str(self.descriptor)


def make_measure(weights, n):
    if weights is None:
        return DiscreteMeasure.uniform(n)
    if isinstance(weights, DiscreteMeasure):
        measure = weights
    else:
        measure = DiscreteMeasure(weights)
    if len(measure) != n:
        raise ArgumentError('Expected ' + str(n) + ' weights, got ' + str(len(measure)))
    return measure


def is_orthonormal(space, atoms, tol = 1e-10):
    if atoms.shape[0] != atoms.shape[1]:
        return False
    cross = atoms.T @ space.gram @ atoms
    return bool(np.max(np.abs(cross - np.eye(atoms.shape[1]))) <= tol)


def orthonormal_instance(d, weights = None):
    if d < 1:
        raise ArgumentError('Dimension must be positive, got ' + str(d))
    space = InnerProductSpace.identity(d)
    atoms = np.eye(d)
    measure = make_measure(weights, d)
    family = SubspaceFamily.natural(space, [atoms[:, j] for j in range(d)])
    instance = Instance('orthonormal', family, measure, atoms, True, dict(kind = 'orthonormal', d = d))
    logger.debug('Built orthonormal instance d = %d', d)
    return instance


def unit_dictionary_instance(space, atoms, weights = None):
    atoms = check_unit_atoms(space, atoms)
    measure = make_measure(weights, atoms.shape[1])
    family = SubspaceFamily.natural(space, [atoms[:, j] for j in range(atoms.shape[1])])
    descriptor = dict(kind = 'unit_dictionary', d = space.dim, n_atoms = atoms.shape[1])
    instance = Instance('unit_dictionary', family, measure, atoms, is_orthonormal(space, atoms), descriptor)
    logger.debug('Built unit dictionary instance d = %d with %d atoms', space.dim, atoms.shape[1])
    return instance


def random_unit_dictionary(space, n_atoms, stream):
    # i.i.d. standard normal coefficient vectors, a-normalized
    if n_atoms < 1:
        raise ArgumentError('Dictionary needs at least one atom, got ' + str(n_atoms))
    Z = stream.normal((space.dim, n_atoms))
    norms = np.sqrt(np.einsum('dj,dj->j', Z, space.gram @ Z))
    return Z / norms


class RkhsSpec:
    supported = ['gaussian', 'min_plus_one', 'grid']     # kernels
    def __init__(self, kernel, nodes, width = 0.1, grid = None, jitter = None):
        if kernel not in self.supported:
            raise ArgumentError('Kernel must be one of ' + str(self.supported) + ', got ' + repr(kernel))
        nodes = np.array(nodes, dtype = float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        if nodes.ndim != 2 or nodes.shape[0] < 1:
            raise ArgumentError('Nodes must be a nonempty array of points')
        if nodes.shape[0] > 1 and np.min(cdist(nodes, nodes) + np.diag(np.full(nodes.shape[0], np.inf))) == 0.0:
            raise ArgumentError('Kernel nodes must be distinct')
        if kernel == 'gaussian' and not width > 0.0:
            raise ArgumentError('Gaussian kernel width must be positive, got ' + str(width))
        if kernel == 'min_plus_one' and nodes.shape[1] != 1:
            raise ArgumentError('min_plus_one kernel needs one-dimensional nodes')
        if kernel == 'grid':
            if grid is None:
                raise ArgumentError('grid kernel needs the matrix of kernel values')
            grid = np.array(grid, dtype = float)
            if grid.shape != (nodes.shape[0], nodes.shape[0]):
                raise ArgumentError('Kernel grid must be ' + str(nodes.shape[0]) + ' x ' + str(nodes.shape[0]))

        self.kernel = kernel              # kernel name
        self.nodes  = nodes               # N x p node locations
        self.width  = float(width)        # gaussian length scale
        self.grid   = grid                # user kernel values K(x_i, x_j)
        self.jitter = jitter              # added to the Gram diagonal, default 1e-10 x max diagonal

    def kernel_matrix(self):
        if self.kernel == 'gaussian':
            return np.exp(-cdist(self.nodes, self.nodes, 'sqeuclidean') / (2.0 * self.width ** 2))
        elif self.kernel == 'min_plus_one':
            x = self.nodes[:, 0]
            return np.minimum.outer(x, x) + 1.0
        return 0.5 * (self.grid + self.grid.T)

    def gram_matrix(self):
        K = self.kernel_matrix()
        jitter = 1e-10 * np.max(np.diag(K)) if self.jitter is None else float(self.jitter)
        return K + jitter * np.eye(K.shape[0])

    def to_dict(self):
        result = dict(kernel = self.kernel, nodes = self.nodes[:, 0].tolist() if self.nodes.shape[1] == 1
                      else self.nodes.tolist(), width = self.width, jitter = self.jitter)
        if self.grid is not None:
            result['grid'] = self.grid.tolist()
        return result

    def __str__(self):  # overide for print function
        return 'RKHS spec: ' + self.kernel + ' kernel on ' + str(self.nodes.shape[0]) + ' nodes'


def rkhs_instance(spec, weights = None):
    # ambient space span{K_{x_i}}; coefficient vectors c give f = sum_i c_i K_{x_i}
    gram = spec.gram_matrix()
    try:
        space = InnerProductSpace(gram)
    except NumericalError as err:
        raise NumericalError('Kernel Gram matrix is indefinite after jitter: ' + str(err))
    N = gram.shape[0]
    atoms = np.diag(1.0 / np.sqrt(np.diag(gram)))
    measure = make_measure(weights, N)
    family = SubspaceFamily.natural(space, [atoms[:, j] for j in range(N)])
    descriptor = dict(kind = 'rkhs', n_nodes = N, kernel = spec.kernel, width = spec.width)
    instance = Instance('rkhs', family, measure, atoms, is_orthonormal(space, atoms), descriptor)
    instance.kernel_values = gram
    instance.nodes = spec.nodes
    logger.debug('Built RKHS instance with %d nodes', N)
    return instance


def point_values(instance, f):
    # f(x_i) = (K c)_i = a(K_{x_i}, f)
    return instance.kernel_values @ f


def kernel_image(instance, g):
    # u = L_K g = sum_j rho_j g(x_j) K_{x_j}
    if instance.kind != 'rkhs':
        raise UnsupportedError('kernel_image needs an RKHS instance, got ' + instance.kind)
    g = as_vector(g, len(instance.measure), 'g')
    return instance.measure.weights * g


def rkhs_point_evaluation_run(instance, target, chosen):
    # randomized correction with optimal xi written with point evaluations and kernel sections only
    if instance.kind != 'rkhs':
        raise UnsupportedError('Point evaluation runs need an RKHS instance, got ' + instance.kind)
    K = instance.kernel_values
    f = instance.space.check_vector(target, 'target')
    f_values = point_values(instance, f)
    trajectory = SolverTrajectory(len(chosen), keep_iterates = True)
    u_m = np.zeros(K.shape[0])
    u_values = np.zeros(K.shape[0])
    e = f - u_m
    trajectory.record(0, u_m, max(float(e @ (f_values - u_values)), 0.0))
    for m, omega in enumerate(chosen):
        omega = instance.family.check_index(omega)
        residual = f_values[omega] - u_values[omega]         # e^{(m)}(omega)
        k_oo = K[omega, omega]
        # direction = (residual / K(omega, omega)) K_omega, ||direction|| = |residual| / sqrt(K(omega, omega))
        e_norm = np.sqrt(max(float((f - u_m) @ (f_values - u_values)), 0.0))
        direction_norm = abs(residual) / np.sqrt(k_oo)
        if direction_norm == 0.0 or direction_norm <= ZERO_TOL * e_norm:
            xi = 0.0
        else:
            xi = (f_values[omega] - alpha(m) * u_values[omega]) / residual
        step = xi * residual / k_oo
        u_m = alpha(m) * u_m
        u_m[omega] += step
        u_values = alpha(m) * u_values + step * K[:, omega]
        trajectory.chosen[m] = omega
        trajectory.xis[m] = xi
        trajectory.record(m + 1, u_m, max(float((f - u_m) @ (f_values - u_values)), 0.0))
    return trajectory


class CollectiveSpec:
    def __init__(self, phi, dictionary, base_space = None):
        phi = np.array(phi, dtype = float)
        if phi.ndim == 1:
            phi = phi[:, None]
        base_space = InnerProductSpace.identity(phi.shape[0]) if base_space is None else base_space
        if phi.shape[0] != base_space.dim:
            raise ArgumentError('Phi must have ' + str(base_space.dim) + ' rows, got ' + str(phi.shape[0]))
        cross = phi.T @ base_space.gram @ phi
        if np.max(np.abs(cross - np.eye(phi.shape[1]))) > 1e-10:
            raise ArgumentError('Columns of Phi must be a-orthonormal')

        self.base_space  = base_space                                   # H
        self.phi         = phi                                          # d x n, orthonormal columns
        self.dictionary  = check_unit_atoms(base_space, dictionary)    # d x N unit atoms
        self.ambient_dim = base_space.dim                               # d
        self.n           = phi.shape[1]                                 # dim V_n

    def __str__(self):  # overide for print function
        return 'Collective spec: n = ' + str(self.n) + ' in dimension ' + str(self.ambient_dim) + \
               ' with ' + str(self.dictionary.shape[1]) + ' atoms'


def random_collective_spec(base_space, n, n_atoms, stream):
    if not 1 <= n <= base_space.dim:
        raise ArgumentError('Need 1 <= n <= d, got n = ' + str(n))
    Q, _ = np.linalg.qr(stream.normal((base_space.dim, n)))
    phi = base_space.from_orthonormal_matrix(Q)
    return CollectiveSpec(phi, random_unit_dictionary(base_space, n_atoms, stream.derive(1)), base_space)


def collective_instance(spec, weights = None):
    measure = make_measure(weights, spec.dictionary.shape[1])
    family = CollectiveFamily(spec.base_space, spec.dictionary, spec.n)
    descriptor = dict(kind = 'collective', d = spec.ambient_dim, n = spec.n, n_atoms = spec.dictionary.shape[1])
    instance = Instance('collective', family, measure, spec.dictionary,
                        is_orthonormal(spec.base_space, spec.dictionary), descriptor)
    instance.phi = spec.phi
    # u = Phi stacked as n rows phi_i
    instance.default_target = spec.phi.T.ravel()
    logger.debug('Built collective instance n = %d, d = %d', spec.n, spec.ambient_dim)
    return instance


def sigma_eps(spec, W_basis):
    # sigma = ||(I - P_W)|_{V_n}||, eps = ||Phi - P_W Phi||_{H^n}; W_basis is a sequence of H vectors
    space = spec.base_space
    phi_y = space.to_orthonormal_matrix(spec.phi)
    W = np.array(W_basis, dtype = float)
    if W.size == 0:
        residual = phi_y
    else:
        if W.ndim == 1:
            W = W[None, :]
        if W.ndim != 2 or W.shape[1] != space.dim:
            raise ArgumentError('W_basis must be a sequence of vectors of length ' + str(space.dim)
                                + ', got shape ' + str(W.shape))
        Q = scipy.linalg.orth(space.to_orthonormal_matrix(W.T))
        residual = phi_y - Q @ (Q.T @ phi_y)
    eps = float(np.linalg.norm(residual))
    sigma = float(scipy.linalg.svdvals(residual)[0])
    return sigma, eps


def collective_sigma_eps_curve(instance, chosen):
    # (sigma_m, eps_m) for W_{m-1} = span{omega_0, ..., omega_{m-1}}, m = 1..len(chosen)
    if instance.kind != 'collective':
        raise UnsupportedError('sigma/eps curves need a collective instance, got ' + instance.kind)
    spec = CollectiveSpec(instance.phi, instance.atoms, instance.family.base_space)
    sigmas = np.zeros(len(chosen))
    epss = np.zeros(len(chosen))
    for m in range(1, len(chosen) + 1):
        sigmas[m - 1], epss[m - 1] = sigma_eps(spec, instance.atoms[:, list(chosen[:m])].T)
    return sigmas, epss


if __name__ == '__main__':
    from .Measure import RandomStream

    spec = RkhsSpec('gaussian', np.linspace(0.0, 1.0, 16), width = 0.2)
    instance = rkhs_instance(spec)
    print(instance, instance.lambda_bound())
    space = InnerProductSpace.identity(3)
    collective = collective_instance(random_collective_spec(space, 2, 6, RandomStream(1)))
    print(collective, sigma_eps(CollectiveSpec(collective.phi, collective.atoms), np.zeros((0, 3))))
