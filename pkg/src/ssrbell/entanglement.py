"""A|B entanglement diagnostics: Schmidt decomposition, partial transpose, negativity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import DensityMatrix, FockSpace, Operator

PURITY_TOL = 1e-10
NEGATIVE_TOL = 1e-10


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns are |phi_k>_A
    right_vectors: np.ndarray  # columns are |chi_k>_B

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.sum(self.coefficients > tol))

    def reconstruct(self) -> np.ndarray:
        amp = (self.left_vectors * self.coefficients) @ self.right_vectors.T
        return amp.ravel()


def _pure_vector(psi, space: FockSpace | None) -> tuple[np.ndarray, FockSpace]:
    if isinstance(psi, DensityMatrix):
        if psi.purity() < 1 - PURITY_TOL:
            raise ValueError(f"state is mixed (purity {psi.purity():.12g})")
        w, v = np.linalg.eigh(psi.matrix)
        return v[:, -1], psi.space
    if space is None:
        raise ValueError("a bare state vector needs its FockSpace")
    vec = np.asarray(psi, dtype=complex)
    return vec / np.linalg.norm(vec), space


def schmidt_decompose(psi, space: FockSpace | None = None) -> SchmidtDecomposition:
    """Schmidt form of a pure state across the A|B cut.

    ``psi`` is either a pure ``DensityMatrix`` or a state vector together with
    its ``space``.  Coefficients are the singular values of the amplitude
    matrix, in non-increasing order.
    """
    vec, space = _pure_vector(psi, space)
    da, db = space.dims
    u, s, vh = np.linalg.svd(vec.reshape(da, db))
    return SchmidtDecomposition(s, u[:, : s.size], vh[: s.size].T)


def partial_transpose(rho: DensityMatrix) -> Operator:
    """Transpose the B factor in the canonical product basis."""
    da, db = rho.space.dims
    m = rho.matrix.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)
    return Operator(rho.space, m)


def _pt_spectrum(rho: DensityMatrix) -> np.ndarray:
    return np.linalg.eigvalsh(partial_transpose(rho).matrix)


def negativity(rho: DensityMatrix, tol: float = NEGATIVE_TOL) -> float:
    """Sum of |negative eigenvalues| of the partial transpose; eigenvalues above ``-tol`` are ignored."""
    lam = _pt_spectrum(rho)
    return max(0.0, float(-lam[lam < -tol].sum()))


def is_ppt(rho: DensityMatrix, tol: float = NEGATIVE_TOL) -> bool:
    return bool(_pt_spectrum(rho).min() >= -tol)
