import numpy as np
import pytest

from biham import check_admissible, check_compatible

S_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def standard_triple(n: int):
    """Admissible triple with g = I and the standard symplectic blocks."""
    triple = check_admissible(np.eye(2 * n), np.kron(np.eye(n), S_BLOCK))
    assert not isinstance(triple, tuple)
    return triple


def diag_triple(rho1: float, rho2: float, sign: float = 1.0):
    """The 2-dimensional triple with g = diag(rho1, rho2) and the unique
    admissible symplectic form (up to sign)."""
    root = sign * np.sqrt(rho1 * rho2)
    return check_admissible(np.diag([rho1, rho2]),
                            [[0.0, root], [-root, 0.0]])


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


def random_symplectic_form(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random nondegenerate antisymmetric matrix of even size n."""
    while True:
        a = rng.standard_normal((n, n))
        w = a - a.T
        if np.linalg.svd(w, compute_uv=False)[-1] > 1e-3:
            return w


@pytest.fixture
def ref2d_pair():
    """Compatible diagonal pair: metric ratios 4 = 4, eigenvalue 2."""
    t1 = diag_triple(1.0, 4.0)
    t2 = diag_triple(2.0, 8.0)
    pair = check_compatible(t1, t2)
    assert pair
    return pair


@pytest.fixture
def incompatible_triples():
    """Diagonal triples with metric ratios 4 vs 3: not compatible."""
    return diag_triple(1.0, 4.0), diag_triple(2.0, 6.0)


@pytest.fixture
def ref4d_pair():
    """Two-block reference pair: (lambda=2, +) and (lambda=3, -)."""
    g1 = np.eye(4)
    w1 = np.kron(np.eye(2), S_BLOCK)
    g2 = np.diag([2.0, 2.0, 3.0, 3.0])
    w2 = np.kron(np.diag([2.0, -3.0]), S_BLOCK)
    t1 = check_admissible(g1, w1)
    t2 = check_admissible(g2, w2)
    pair = check_compatible(t1, t2)
    assert pair
    return pair
