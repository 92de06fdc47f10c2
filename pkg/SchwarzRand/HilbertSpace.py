# Finite-dimensional realization of the ambient Hilbert space (V, a),
# of the local spaces (V_omega, a_omega) and of the operators R_omega, T_omega
import logging

import numpy as np
import scipy.linalg

from .Common import *

logger = logging.getLogger(__name__)


class InnerProductSpace:
    def __init__(self, gram):
        gram = np.array(gram, dtype = float, ndmin = 2)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] < 1:
            raise ArgumentError('Gram matrix must be square and nonempty, got shape ' + str(gram.shape))
        scale = np.max(np.abs(gram))
        asym = np.max(np.abs(gram - gram.T))
        if asym > SYM_TOL * scale:
            raise NumericalError('Gram matrix is not symmetric (relative asymmetry ' + str(asym / scale) + ')')

        self.dim       = gram.shape[0]             # d
        self.gram      = 0.5 * (gram + gram.T)     # a(u, v) = u^T gram v
        self.chol      = None                      # lower Cholesky factor, gram = chol chol^T
        self.euclidean = bool(np.array_equal(self.gram, np.eye(self.dim)))
        self._condition = None                      # cached by condition()

        self.factorize()

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d))

    def factorize(self):
        try:
            chol = scipy.linalg.cholesky(self.gram, lower = True)
        except np.linalg.LinAlgError as err:
            raise NumericalError('Gram matrix is not positive definite: ' + str(err))
        pivots = np.diag(chol) ** 2
        max_diag = np.max(np.diag(self.gram))
        if not np.all(pivots > PIVOT_TOL * max_diag):
            raise NumericalError('Gram matrix is numerically indefinite (smallest pivot '
                                 + str(np.min(pivots)) + ', max diagonal ' + str(max_diag) + ')')
        self.chol = chol

    def check_vector(self, v, name = 'vector'):
        return as_vector(v, self.dim, name)

    def inner(self, u, v):
        u = self.check_vector(u, 'u')
        v = self.check_vector(v, 'v')
        if self.euclidean:
            return float(u @ v)
        return float(u @ (self.gram @ v))

    def norm(self, v):
        return np.sqrt(max(self.inner(v, v), 0.0))

    def apply_gram(self, v):
        # dual (functional) representation of v
        v = self.check_vector(v)
        if self.euclidean:
            return v.copy()
        return self.gram @ v

    def to_orthonormal(self, v):
        # y with a(u, v) = y_u . y_v
        v = self.check_vector(v)
        if self.euclidean:
            return v.copy()
        return self.chol.T @ v

    def from_orthonormal(self, y):
        y = self.check_vector(y, 'y')
        if self.euclidean:
            return y.copy()
        return scipy.linalg.solve_triangular(self.chol.T, y, lower = False)

    def from_orthonormal_matrix(self, Y):
        # columnwise from_orthonormal
        if self.euclidean:
            return np.array(Y, dtype = float)
        return scipy.linalg.solve_triangular(self.chol.T, Y, lower = False)

    def to_orthonormal_matrix(self, X):
        if self.euclidean:
            return np.array(X, dtype = float)
        return self.chol.T @ X

    def condition(self):
        # spectral condition number of the Gram matrix
        if self._condition is None:
            if self.euclidean:
                self._condition = 1.0
            else:
                sv = scipy.linalg.svdvals(self.chol)
                self._condition = float((sv[0] / sv[-1]) ** 2)
        return self._condition

    def zeros(self):
        return np.zeros(self.dim)

    def __str__(self):  # overide for print function
        return 'Inner product space of dimension ' + str(self.dim) + \
               (' (Euclidean)' if self.euclidean else '')


class ProductSpace(InnerProductSpace):
    # H^n with a(u, v) = sum_i (u_i, v_i); vectors are n stacked H-vectors, flattened row-major
    def __init__(self, base, n):
        assert(isinstance(base, InnerProductSpace))
        if n < 1:
            raise ArgumentError('ProductSpace needs n >= 1, got ' + str(n))
        self.base      = base                      # the factor space H
        self.n         = int(n)                    # number of components
        self.dim       = self.n * base.dim
        self.euclidean = base.euclidean
        self._gram     = None                      # assembled lazily, only for generic code paths
        self._chol     = None

    @property
    def gram(self):
        if self._gram is None:
            self._gram = np.kron(np.eye(self.n), self.base.gram)
        return self._gram

    @property
    def chol(self):
        if self._chol is None:
            self._chol = np.kron(np.eye(self.n), self.base.chol)
        return self._chol

    def condition(self):
        return self.base.condition()

    def blocks(self, v):
        return self.check_vector(v).reshape(self.n, self.base.dim)

    def inner(self, u, v):
        U = self.blocks(u)
        V = self.blocks(v)
        if self.euclidean:
            return float(np.sum(U * V))
        return float(np.sum(U * (V @ self.base.gram)))

    def apply_gram(self, v):
        V = self.blocks(v)
        if self.euclidean:
            return V.ravel().copy()
        return (V @ self.base.gram).ravel()

    def to_orthonormal(self, v):
        V = self.blocks(v)
        if self.euclidean:
            return V.ravel().copy()
        return (V @ self.base.chol).ravel()

    def from_orthonormal(self, y):
        Y = self.blocks(y)
        if self.euclidean:
            return Y.ravel().copy()
        return scipy.linalg.solve_triangular(self.base.chol.T, Y.T, lower = False).T.ravel()

    def __str__(self):  # overide for print function
        return 'Product space H^' + str(self.n) + ' over ' + str(self.base)


class LocalSubspace:
    def __init__(self, basis, local_gram):
        basis = np.array(basis, dtype = float)
        if basis.ndim == 1:
            basis = basis[:, None]
        local_gram = np.array(local_gram, dtype = float, ndmin = 2)
        if basis.ndim != 2 or basis.shape[1] < 1:
            raise ArgumentError('Local basis must be a d x k matrix with k >= 1, got shape ' + str(basis.shape))
        k = basis.shape[1]
        if local_gram.shape != (k, k):
            raise ArgumentError('Local Gram matrix must be ' + str(k) + ' x ' + str(k) + ', got ' + str(local_gram.shape))

        singular_values = scipy.linalg.svdvals(basis)
        if not singular_values[-1] > RANK_TOL * singular_values[0]:
            raise ArgumentError('Local basis does not have full column rank (Ker(R_omega) must be {0})')

        self.basis      = basis                           # d x k, columns span R_omega(V_omega)
        self.k          = k                               # dim V_omega
        self.local_gram = 0.5 * (local_gram + local_gram.T)   # realizes a_omega
        self.local_chol = None

        try:
            self.local_chol = scipy.linalg.cho_factor(self.local_gram, lower = True)
        except np.linalg.LinAlgError as err:
            raise NumericalError('Local Gram matrix is not positive definite: ' + str(err))

    @classmethod
    def restriction(cls, space, basis):
        # a_omega = restriction of a to the span, R_omega = natural injection
        basis = np.array(basis, dtype = float)
        if basis.ndim == 1:
            basis = basis[:, None]
        return cls(basis, basis.T @ space.gram @ basis)

    def solve(self, rhs):
        return scipy.linalg.cho_solve(self.local_chol, rhs)

    def __str__(self):  # overide for print function
        return 'Local subspace of dimension ' + str(self.k)


class SubspaceFamily:
    def __init__(self, space, subspaces, labels = None):
        assert(isinstance(space, InnerProductSpace))
        subspaces = list(subspaces)
        if not subspaces:
            raise ArgumentError('SubspaceFamily needs at least one subspace')
        for subspace in subspaces:
            if subspace.basis.shape[0] != space.dim:
                raise ArgumentError('Local basis has ' + str(subspace.basis.shape[0])
                                    + ' rows, ambient dimension is ' + str(space.dim))

        self.space     = space               # InnerProductSpace (V, a)
        self.subspaces = subspaces           # omega -> LocalSubspace, omega = 0, ..., N - 1
        self.labels    = labels              # optional display labels of the indices
        self.lam       = None                # cached Lambda

        self.T_dual    = None                # omega -> a_omega^{-1} basis^T   (k x d)
        self.T_mat     = None                # omega -> a_omega^{-1} basis^T gram
        self.stacked   = None                # (N, k, d) stack of T_mat when all k agree
        self.stacked_gram = None             # (N, k, k) stack of local Gram matrices

        self.precompute()

    @classmethod
    def natural(cls, space, bases, labels = None):
        return cls(space, [LocalSubspace.restriction(space, basis) for basis in bases], labels)

    def precompute(self):
        self.T_dual = [subspace.solve(subspace.basis.T) for subspace in self.subspaces]
        self.T_mat = [T @ self.space.gram for T in self.T_dual]
        if len(set(subspace.k for subspace in self.subspaces)) == 1:
            self.stacked = np.stack(self.T_mat)
            self.stacked_gram = np.stack([subspace.local_gram for subspace in self.subspaces])

    def __len__(self):
        return len(self.subspaces)

    def check_index(self, omega):
        try:
            omega = int(omega)
        except (TypeError, ValueError):
            raise IndexLookupError('Unknown subspace index ' + repr(omega))
        if not -1 < omega < len(self.subspaces):
            raise IndexLookupError('Unknown subspace index ' + repr(omega))
        return omega

    def local_dim(self, omega):
        return self.subspaces[self.check_index(omega)].k

    def apply_R(self, omega, v_local):
        subspace = self.subspaces[self.check_index(omega)]
        v_local = as_vector(v_local, subspace.k, 'v_local')
        return subspace.basis @ v_local

    def apply_T_dual(self, omega, g):
        # local_gram t = basis^T g, g the dual of the right-hand side
        omega = self.check_index(omega)
        g = as_vector(g, self.space.dim, 'g')
        return self.T_dual[omega] @ g

    def apply_T(self, omega, v):
        omega = self.check_index(omega)
        v = self.space.check_vector(v)
        return self.T_mat[omega] @ v

    def local_inner(self, omega, s, t):
        subspace = self.subspaces[self.check_index(omega)]
        return float(s @ (subspace.local_gram @ t))

    def local_norm(self, omega, t):
        return np.sqrt(max(self.local_inner(omega, t, t), 0.0))

    def residual_norms(self, v, pool = None):
        # ||T_omega v||_omega for every omega in pool
        v = self.space.check_vector(v)
        pool = np.arange(len(self)) if pool is None else np.asarray(pool, dtype = int)
        if self.stacked is not None:
            T = np.einsum('pkd,d->pk', self.stacked[pool], v)
            sq = np.einsum('pk,pkl,pl->p', T, self.stacked_gram[pool], T)
            return np.sqrt(np.maximum(sq, 0.0))
        return np.array([self.local_norm(omega, self.apply_T(omega, v)) for omega in pool])

    def lambda_bound(self):
        if self.lam is None:
            lam_sq = 0.0
            for subspace in self.subspaces:
                B = subspace.basis
                ambient = B.T @ self.space.gram @ B
                ambient = 0.5 * (ambient + ambient.T)
                top = scipy.linalg.eigh(ambient, subspace.local_gram, eigvals_only = True)[-1]
                lam_sq = max(lam_sq, top)
            self.lam = float(np.sqrt(lam_sq))
        return self.lam

    def psi_tilde(self, omega, e):
        e = self.space.check_vector(e, 'e')
        direction = self.apply_R(omega, self.apply_T(omega, e))
        norm_direction = self.space.norm(direction)
        if norm_direction == 0.0 or norm_direction <= ZERO_TOL * self.space.norm(e):
            return self.space.zeros()
        return direction / norm_direction

    def __str__(self):  # overide for print function
        return 'Subspace family with ' + str(len(self)) + ' subspaces in ' + str(self.space)


class CollectiveFamily(SubspaceFamily):
    # V = H^n, V_omega = {c omega : c in R^n}, T_omega v = a(v, omega) omega componentwise
    def __init__(self, base_space, atoms, n, labels = None):
        atoms = np.array(atoms, dtype = float)
        if atoms.ndim == 1:
            atoms = atoms[:, None]
        if atoms.shape[0] != base_space.dim or atoms.shape[1] < 1:
            raise ArgumentError('Atoms must be a ' + str(base_space.dim) + ' x N matrix, got ' + str(atoms.shape))

        self.base_space = base_space                        # H
        self.n          = int(n)                            # number of components
        self.atoms      = atoms                             # d x N dictionary
        self.gram_atoms = base_space.gram @ atoms           # G omega, one column per atom
        self.atom_sq    = np.einsum('dj,dj->j', atoms, self.gram_atoms)   # ||omega||^2
        if not np.all(self.atom_sq > 0.0):
            raise ArgumentError('Zero atom in collective dictionary')

        space = ProductSpace(base_space, self.n)
        eye = np.eye(self.n)
        subspaces = [LocalSubspace(np.kron(eye, atoms[:, [j]]), self.atom_sq[j] * eye)
                     for j in range(atoms.shape[1])]
        SubspaceFamily.__init__(self, space, subspaces, labels)

    def precompute(self):
        # blockwise formulas replace the assembled dn x n matrices
        pass

    def apply_R(self, omega, v_local):
        omega = self.check_index(omega)
        v_local = as_vector(v_local, self.n, 'v_local')
        return np.outer(v_local, self.atoms[:, omega]).ravel()

    def apply_T_dual(self, omega, g):
        omega = self.check_index(omega)
        G = as_vector(g, self.space.dim, 'g').reshape(self.n, self.base_space.dim)
        return G @ self.atoms[:, omega] / self.atom_sq[omega]

    def apply_T(self, omega, v):
        omega = self.check_index(omega)
        return self.space.blocks(v) @ self.gram_atoms[:, omega] / self.atom_sq[omega]

    def local_inner(self, omega, s, t):
        omega = self.check_index(omega)
        return float(self.atom_sq[omega] * (s @ t))

    def residual_norms(self, v, pool = None):
        pool = np.arange(len(self)) if pool is None else np.asarray(pool, dtype = int)
        T = self.space.blocks(v) @ self.gram_atoms[:, pool] / self.atom_sq[pool]
        return np.sqrt(np.sum(T ** 2, axis = 0) * self.atom_sq[pool])

    def lambda_bound(self):
        if self.lam is None:
            # ||c omega|| / ||c omega||_omega = 1 for every atom
            self.lam = 1.0
        return self.lam

    def __str__(self):  # overide for print function
        return 'Collective family of ' + str(len(self)) + ' atoms in ' + str(self.space)


if __name__ == '__main__':
    space = InnerProductSpace([[2.0, 1.0], [1.0, 2.0]])
    print(space.inner([1.0, 0.0], [0.0, 1.0]))
    family = SubspaceFamily.natural(InnerProductSpace.identity(2), [[1.0, 1.0]])
    print(family.lambda_bound(), family.psi_tilde(0, [3.0, 4.0]))
