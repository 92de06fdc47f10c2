# Covariance (and induced) operators, their spectral decomposition in the
# a-inner product, the smoothness scale H^s_L and the class norms A_2, A_q^gamma, A_1
import logging

import numpy as np
import scipy.linalg

from .Common import *
from .HilbertSpace import CollectiveFamily, ProductSpace

logger = logging.getLogger(__name__)


class SpectralDecomposition:
    def __init__(self, space, eigenvalues, eigenvectors, kernel_vectors, whitened, range_tol = RANGE_TOL,
                 dual_vectors = None):
        self.space          = space              # space the operator acts on
        self.eigenvalues    = eigenvalues        # retained mu_k > 0, descending
        self.eigenvectors   = eigenvectors       # d x rank, a-orthonormal psi_k
        self.kernel_vectors = kernel_vectors     # d x (d - rank), a-orthonormal basis of Ker(L)
        self.whitened       = whitened           # d x rank, psi_k in orthonormal coordinates
        self.range_tol      = range_tol          # Ker(L) component tolerated, relative to ||u||
        self.dual_vectors   = dual_vectors       # N x rank, psi_k = M v_k / sqrt(mu_k) for L = M M^T G
        self.rank           = eigenvalues.shape[0]

    def coefficients(self, u):
        # a(u, psi_k)
        return self.whitened.T @ self.space.to_orthonormal(u)

    def residual_norm(self, u):
        # a-norm of the Ker(L) component of u
        y = self.space.to_orthonormal(u)
        return float(np.linalg.norm(y - self.whitened @ (self.whitened.T @ y)))

    def least_norm_coefficients(self, u):
        # minimal ||y|| with M y = u, assuming u is in the range
        if self.dual_vectors is None:
            raise UnsupportedError('Decomposition was not built from a synthesis matrix')
        return self.dual_vectors @ (self.coefficients(u) / np.sqrt(self.eigenvalues))

    def reconstruct(self):
        # matrix of sum_k mu_k a(., psi_k) psi_k in the computational basis
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T @ self.space.gram

    def __str__(self):  # overide for print function
        return 'Spectral decomposition of rank ' + str(self.rank) + ', eigenvalues ' + str(self.eigenvalues)


class SmoothnessClassReport:
    def __init__(self, a2_norm = None, a1_upper = None, ainf_rho_norm = None, hs_norms = None):
        self.a2_norm       = a2_norm             # ||u||_{A_2}, None when u is not in A_2
        self.a1_upper      = a1_upper            # upper bound for ||u||_{A_1}
        self.ainf_rho_norm = ainf_rho_norm       # ||u||_{A^rho_inf}, orthonormal instances only
        self.hs_norms      = dict() if hs_norms is None else dict(hs_norms)   # s -> ||u||_{H^s_L}

    def lemma_chain_holds(self, rtol = 1e-12):
        values = [self.a1_upper, self.a2_norm, self.ainf_rho_norm]
        if any(value is None for value in values):
            return None
        return values[0] <= values[1] * (1.0 + rtol) and values[1] <= values[2] * (1.0 + rtol)

    def to_dict(self):
        return dict(a2_norm = self.a2_norm, a1_upper = self.a1_upper, ainf_rho_norm = self.ainf_rho_norm,
                    hs_norms = {repr(float(s)): value for s, value in sorted(self.hs_norms.items())})

    def __str__(self):  # overide for print function
        return 'A_1 <= ' + str(self.a1_upper) + ', A_2 = ' + str(self.a2_norm) + \
               ', A^rho_inf = ' + str(self.ainf_rho_norm) + ', H^s_L = ' + str(self.hs_norms)


def check_unit_atoms(space, atoms):
    atoms = np.array(atoms, dtype = float)
    if atoms.ndim == 1:
        atoms = atoms[:, None]
    if atoms.shape[0] != space.dim:
        raise ArgumentError('Atoms must have ' + str(space.dim) + ' rows, got ' + str(atoms.shape[0]))
    norms = np.sqrt(np.einsum('dj,dj->j', atoms, space.gram @ atoms))
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
    if bad.shape[0] > 0:
        raise ArgumentError('Atom ' + str(bad[0]) + ' has a-norm ' + repr(float(norms[bad[0]])) + ', expected 1')
    return atoms


def covariance_operator(space, atoms, measure):
    # L v = sum_omega rho_omega a(v, omega) omega, as a d x d matrix acting on coefficients
    atoms = check_unit_atoms(space, atoms)
    if atoms.shape[1] != len(measure):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, dictionary has ' + str(atoms.shape[1]))
    return (atoms * measure.weights) @ atoms.T @ space.gram




def dictionary_synthesis(space, atoms, measure):
    # M = [sqrt(rho_omega) omega], so that L = M M^T G
    atoms = check_unit_atoms(space, atoms)
    if atoms.shape[1] != len(measure):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, dictionary has ' + str(atoms.shape[1]))
    return atoms * np.sqrt(measure.weights)


def spectral_decomp(L, space):
    L = np.array(L, dtype = float)
    assert(L.shape == (space.dim, space.dim))
    if space.euclidean:
        L_tilde = L
    else:
        # orthonormal coordinates: chol^T L chol^{-T}
        left = space.chol.T @ L
        L_tilde = scipy.linalg.solve_triangular(space.chol, left.T, lower = True).T
    L_tilde = 0.5 * (L_tilde + L_tilde.T)

    mu, Q = scipy.linalg.eigh(L_tilde)
    mu = mu[::-1]
    Q = Q[:, ::-1]
    mu = np.maximum(mu, 0.0)
    mu_max = mu[0] if mu.shape[0] > 0 else 0.0
    keep = mu > EIG_DROP_TOL * mu_max if mu_max > 0.0 else np.zeros(mu.shape[0], dtype = bool)

    psi = space.from_orthonormal_matrix(Q)
    range_tol = max(RANGE_TOL, RANGE_COND * np.finfo(float).eps * space.condition())
    return SpectralDecomposition(space, mu[keep], psi[:, keep], psi[:, ~keep], Q[:, keep], range_tol)


def synthesis_decomp(space, M):
    # decomposition of L = M M^T G from the SVD of M in orthonormal coordinates;
    # only forward products with the Gram factor, no triangular solves
    M = np.array(M, dtype = float)
    if M.ndim == 1:
        M = M[:, None]
    assert(M.shape[0] == space.dim)
    W = space.to_orthonormal_matrix(M)
    U, sv, Vt = scipy.linalg.svd(W, full_matrices = True)
    sv_max = sv[0] if sv.shape[0] > 0 else 0.0
    rank = int(np.count_nonzero(sv > np.sqrt(NULL_TOL) * sv_max)) if sv_max > 0.0 else 0

    dual = Vt[:rank].T
    psi = (M @ dual) / sv[:rank]
    kernel = space.from_orthonormal_matrix(U[:, rank:])
    cond = sv[0] / sv[rank - 1] if rank > 0 else 1.0
    range_tol = max(RANGE_TOL, RANGE_COND * np.finfo(float).eps * cond)
    return SpectralDecomposition(space, sv[:rank] ** 2, psi, kernel, U[:, :rank], range_tol, dual)


def hs_norm(u, s, decomp):
    u = decomp.space.check_vector(u, 'u')
    c = decomp.coefficients(u)
    residual = decomp.residual_norm(u)
    u_norm = decomp.space.norm(u)
    if residual > decomp.range_tol * u_norm:
        raise NotInClassError('Element is not in H^' + str(s) + '_L: component in Ker(L) of norm '
                              + repr(residual) + ' (||u|| = ' + repr(u_norm) + ')')
    return float(np.sqrt(np.sum(decomp.eigenvalues ** (-2.0 * s) * c ** 2)))


def _hs_norm_components(U, s, decomp):
    # componentwise extension to H^n: (sum_i ||u_i||_{H^s_L}^2)^{1/2}
    return float(np.sqrt(sum(hs_norm(u_i, s, decomp) ** 2 for u_i in U)))


def make_hs_element(decomp, s, coefficients = None, stream = None, norm = 1.0):
    # u = sum_k mu_k^s c_k psi_k, ||u||_{H^s_L} = ||c||
    if s < 0.0:
        raise ArgumentError('Smoothness index s must be nonnegative, got ' + str(s))
    if coefficients is None:
        if stream is None:
            raise ArgumentError('make_hs_element needs coefficients or a random stream')
        c = stream.normal(decomp.rank)
        c = norm * c / np.linalg.norm(c)
    else:
        c = as_vector(coefficients, decomp.rank, 'coefficients')
    return decomp.eigenvectors @ (decomp.eigenvalues ** s * c)


def spectral_truncation(u, decomp, threshold):
    # h = sum over mu_k >= threshold of a(u, psi_k) psi_k
    c = decomp.coefficients(u)
    keep = decomp.eigenvalues >= threshold
    return decomp.eigenvectors[:, keep] @ c[keep]


def induced_operator(family, measure):
    # S v = sum_omega rho_omega R_omega T_omega v; equals L for unit one-dimensional atoms
    if len(measure) != len(family):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, family has ' + str(len(family)) + ' subspaces')
    S = np.zeros((family.space.dim, family.space.dim))
    for omega, subspace in enumerate(family.subspaces):
        S += measure.weights[omega] * (subspace.basis @ family.T_mat[omega])
    return S


def local_factor(subspace):
    # lower factor C of the local Gram matrix, a_omega = C C^T
    return np.tril(subspace.local_chol[0])


def synthesis_matrix(family, measure):
    # M with S = M M^T G: blocks sqrt(rho_omega) R_omega C_omega^{-T};
    # for a collective family the matrix acts on each component in H
    if len(measure) != len(family):
        raise ArgumentError('Measure has ' + str(len(measure)) + ' atoms, family has ' + str(len(family)) + ' subspaces')
    if isinstance(family, CollectiveFamily):
        return family.atoms * np.sqrt(measure.weights / family.atom_sq)
    blocks = []
    for omega, subspace in enumerate(family.subspaces):
        scaled = scipy.linalg.solve_triangular(local_factor(subspace), subspace.basis.T, lower = True).T
        blocks.append(np.sqrt(measure.weights[omega]) * scaled)
    return np.hstack(blocks)


def induced_decomposition(family, measure):
    space = family.base_space if isinstance(family, CollectiveFamily) else family.space
    return synthesis_decomp(space, synthesis_matrix(family, measure))


def check_condition(decomp):
    if decomp.rank > 0 and decomp.eigenvalues[-1] / decomp.eigenvalues[0] < COND_WARN_TOL:
        warn('A_2 operator is ill-conditioned: mu_min / mu_max = '
             + repr(float(decomp.eigenvalues[-1] / decomp.eigenvalues[0])))


def a2_norm(family, measure, u, decomp = None):
    # ||u||_{A_2} = min ||y|| over M y = u, read off the induced decomposition
    if decomp is None:
        decomp = induced_decomposition(family, measure)
    check_condition(decomp)
    u = family.space.check_vector(u, 'u')
    try:
        if isinstance(family, CollectiveFamily):
            return _hs_norm_components(family.space.blocks(u), 0.5, decomp)
        return hs_norm(u, 0.5, decomp)
    except NotInClassError as err:
        raise NotInClassError('Element is not in A_2: ' + str(err))


def a2_representation(family, measure, u, decomp = None):
    # minimizing local coefficients of sum rho ||v_omega||^2 subject to sum rho R v = u
    if decomp is None:
        decomp = induced_decomposition(family, measure)
    a2_norm(family, measure, u, decomp)    # raises when u is not representable
    weights = measure.weights
    if isinstance(family, CollectiveFamily):
        Y = np.array([decomp.least_norm_coefficients(u_i) for u_i in family.space.blocks(u)])
        scale = np.sqrt(weights * family.atom_sq)
        return [Y[:, omega] / scale[omega] for omega in range(len(family))]

    y = decomp.least_norm_coefficients(u)
    v = []
    start = 0
    for omega, subspace in enumerate(family.subspaces):
        y_omega = y[start:start + subspace.k]
        start += subspace.k
        x = scipy.linalg.solve_triangular(local_factor(subspace), y_omega, lower = True, trans = 'T')
        v.append(x / np.sqrt(weights[omega]))
    return v


def aq_gamma_norm_orthonormal(instance, u, q, gamma = 'one'):
    # || {gamma_i^{-1} |c_i|} ||_{l_q}, c_i = a(u, e_i), for orthonormal atoms
    if not getattr(instance, 'orthonormal', False):
        raise UnsupportedError('A_q^gamma norms are only available for orthonormal atom instances')
    space = instance.family.space
    u = space.check_vector(u, 'u')
    c = np.abs(instance.atoms.T @ space.apply_gram(u))
    weights = instance.measure.weights
    if isinstance(gamma, str):
        if gamma == 'one':
            gamma = np.ones_like(c)
        elif gamma == 'rho':
            gamma = weights
        elif gamma == 'sqrt_rho':
            gamma = np.sqrt(weights)
        else:
            raise ArgumentError('gamma must be an array or one of one, rho, sqrt_rho; got ' + repr(gamma))
    gamma = as_vector(gamma, c.shape[0], 'gamma')
    if q == 1:
        return float(np.sum(c / gamma))
    elif q == 2:
        return float(np.sqrt(np.sum((c / gamma) ** 2)))
    elif q == np.inf or q == 'inf':
        return float(np.max(c / gamma))
    raise UnsupportedError('Only q in {1, 2, inf} is supported, got ' + repr(q))


def a1_upper(family, representation, u):
    # sum_j ||v_j||_{omega_j} for a representation u = sum_j R_{omega_j} v_j
    u = family.space.check_vector(u, 'u')
    total = family.space.zeros()
    value = 0.0
    for omega, v_local in representation:
        total = total + family.apply_R(omega, v_local)
        value += family.local_norm(omega, np.asarray(v_local, dtype = float))
    mismatch = family.space.norm(u - total)
    if mismatch > RANGE_TOL * max(family.space.norm(u), 1.0):
        raise ArgumentError('Representation does not reproduce u (mismatch ' + repr(mismatch) + ')')
    return float(value)


def class_report(instance, u, s_list = (), representation = None):
    family = instance.family
    measure = instance.measure
    report = SmoothnessClassReport()

    decomp = instance.induced_decomposition()
    try:
        report.a2_norm = a2_norm(family, measure, u, decomp)
    except NotInClassError as err:
        logger.info(str(err))

    if getattr(instance, 'orthonormal', False):
        report.a1_upper = aq_gamma_norm_orthonormal(instance, u, 1, 'one')
        report.ainf_rho_norm = aq_gamma_norm_orthonormal(instance, u, np.inf, 'rho')
    elif representation is not None:
        report.a1_upper = a1_upper(family, representation, u)
    elif report.a2_norm is not None:
        v = a2_representation(family, measure, u, decomp)
        scaled = [(omega, measure.weights[omega] * v[omega]) for omega in range(len(family))]
        report.a1_upper = a1_upper(family, scaled, u)

    cov = instance.covariance_decomposition()
    if cov is not None:
        for s in s_list:
            try:
                if isinstance(family.space, ProductSpace):
                    report.hs_norms[float(s)] = _hs_norm_components(family.space.blocks(u), s, cov)
                else:
                    report.hs_norms[float(s)] = hs_norm(u, s, cov)
            except NotInClassError as err:
                logger.info(str(err))
    return report


if __name__ == '__main__':
    from .HilbertSpace import InnerProductSpace
    from .Measure import DiscreteMeasure

    space = InnerProductSpace.identity(2)
    atoms = np.array([[1.0, 1.0 / np.sqrt(2.0)], [0.0, 1.0 / np.sqrt(2.0)]])
    L = covariance_operator(space, atoms, DiscreteMeasure.uniform(2))
    decomp = spectral_decomp(L, space)
    print(L)
    print(decomp)
    print(hs_norm([0.0, 1.0], 0.5, decomp) ** 2)
    print(synthesis_decomp(space, dictionary_synthesis(space, atoms, DiscreteMeasure.uniform(2))))
