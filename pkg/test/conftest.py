import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from SchwarzRand.HilbertSpace import InnerProductSpace, SubspaceFamily, LocalSubspace
from SchwarzRand.Instance import orthonormal_instance, unit_dictionary_instance


def block_family(rng, d = 6, k = 2, n_blocks = 5):
    # non-Euclidean space, two-dimensional local spaces, local Gram matrices not equal to the restriction
    A = rng.standard_normal((d, d))
    space = InnerProductSpace(A @ A.T + d * np.eye(d))
    subspaces = []
    for omega in range(n_blocks):
        B = rng.standard_normal((d, k))
        C = rng.standard_normal((k, k))
        subspaces.append(LocalSubspace(B, C @ C.T + np.eye(k)))
    return SubspaceFamily(space, subspaces)


@pytest.fixture
def orthonormal2():
    return orthonormal_instance(2)


@pytest.fixture
def two_atoms():
    # atoms e_1 and (e_1 + e_2) / sqrt(2), uniform weights
    atoms = np.array([[1.0, 1.0 / np.sqrt(2.0)], [0.0, 1.0 / np.sqrt(2.0)]])
    return unit_dictionary_instance(InnerProductSpace.identity(2), atoms)


@pytest.fixture
def random_blocks():
    return block_family(np.random.default_rng(7))
