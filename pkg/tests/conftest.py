import itertools

import numpy as np
import pytest


def brute_force_pfaffian(M):
    """Permutation-sum definition over perfect matchings; only for tiny matrices."""
    M = np.asarray(M)
    dim = M.shape[0]
    if dim == 0:
        return 1.0
    total = 0.0
    for perm in itertools.permutations(range(dim)):
        pairs = [perm[2 * k: 2 * k + 2] for k in range(dim // 2)]
        if any(a > b for a, b in pairs):
            continue
        if any(pairs[k][0] > pairs[k + 1][0] for k in range(len(pairs) - 1)):
            continue
        inv = sum(1 for i in range(dim) for j in range(i + 1, dim) if perm[i] > perm[j])
        term = (-1) ** inv
        for a, b in pairs:
            term = term * M[a, b]
        total = total + term
    return total


def random_antisymmetric(rng, dim, dtype=float):
    M = rng.standard_normal((dim, dim))
    if dtype is complex:
        M = M + 1j * rng.standard_normal((dim, dim))
    return M - M.T


def max_abs(a):
    return float(np.max(np.abs(a), initial=0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
