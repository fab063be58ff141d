import numpy as np
import pytest

from ssrbell import states
from ssrbell.fock import DensityMatrix, FockSpace, LocalSpace, Operator


def random_density(space: FockSpace, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    d = space.dim
    k = rank or d
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    return DensityMatrix.from_matrix(space, g @ g.conj().T)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def block_diag_from(space: LocalSpace, make) -> np.ndarray:
    """Fill each sector block with ``make(size)``."""
    m = np.zeros((space.dim, space.dim), dtype=complex)
    for idx in space.blocks():
        m[np.ix_(idx, idx)] = make(len(idx))
    return m


def allowed_hermitian(space: LocalSpace, rng) -> Operator:
    return Operator(space, block_diag_from(space, lambda n: random_hermitian(n, rng)))


def allowed_unitary(space: LocalSpace, rng) -> np.ndarray:
    return block_diag_from(space, lambda n: random_unitary(n, rng))


SPACES = {
    "single": lambda: states.two_mode_space(1),
    "bosonic-5": lambda: states.two_mode_space(5),
    "ep": states.ep_space,
    "yurke-distinct": lambda: states.yurke_space(False),
    "yurke-identical": lambda: states.yurke_space(True),
    "dist-2": lambda: states.distinguishable_space(2),
    "schmidt-3": lambda: states.schmidt_space(3),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
