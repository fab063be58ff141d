"""Grid-search CHSH oracles, independent of the see-saw iteration.

Both searches enumerate one party's settings exhaustively on a finite grid.
They give lower bounds on the true maximum that are exact whenever the grid
contains an optimal setting.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .bell import PAULI, correlation_matrix, qubit_block
from .fock import DensityMatrix, LocalSpace


def _block_candidates(size: int, n_angles: int) -> list[np.ndarray]:
    if size == 1:
        return [np.array([[1.0]]), np.array([[-1.0]])]
    if size == 2:
        out = [np.eye(2), -np.eye(2)]
        for phi in np.arange(n_angles) * 2 * np.pi / n_angles:
            out.append(math.cos(phi) * PAULI[2].real + math.sin(phi) * PAULI[0].real)
        return out
    return [np.diag(signs) for signs in itertools.product((1.0, -1.0), repeat=size)]


def block_candidates(space: LocalSpace, n_angles: int = 24, ssr: bool = True) -> np.ndarray:
    """Stack of block-diagonal dichotomic observables on ``space``.

    Per block: +-1 for one level; +-identity or a real-plane Pauli direction
    on a grid of ``n_angles`` for two levels; diagonal sign patterns for
    larger blocks.  Without ``ssr`` the whole space is one block.
    """
    if ssr:
        blocks = space.blocks()
    else:
        blocks = [np.arange(space.dim)]
    per_block = [_block_candidates(len(idx), n_angles) for idx in blocks]
    out = []
    for choice in itertools.product(*per_block):
        m = np.zeros((space.dim, space.dim))
        for idx, sub in zip(blocks, choice):
            m[np.ix_(idx, idx)] = sub
        out.append(m)
    return np.array(out)


def block_grid_chsh(rho: DensityMatrix, n_angles: int = 24, ssr: bool = True) -> float:
    """Exhaustive CHSH maximum over ``block_candidates`` on both sides.

    All four settings range over the full candidate sets; for each pair
    ``(A0, A1)`` the two B maximizations decouple and are taken exactly over
    the candidate list.
    """
    da, db = rho.space.dims
    cand_a = block_candidates(rho.space.local_a, n_angles, ssr)
    cand_b = block_candidates(rho.space.local_b, n_angles, ssr)
    r = rho.matrix.reshape(da, db, da, db)
    # corr[x, y] = tr[rho (A_x (x) B_y)]
    partial = np.einsum("xji,ibjd->xbd", cand_a, r)
    corr = np.real(np.einsum("xbd,ydb->xy", partial, cand_b))
    best = -np.inf
    for x0 in range(len(cand_a)):
        plus = (corr[x0] + corr).max(axis=1)
        minus = (corr[x0] - corr).max(axis=1)
        best = max(best, float((plus + minus).max()))
    return best


def planar_grid_chsh(
    rho: DensityMatrix,
    n_grid: int = 720,
    a_indices: tuple[int, int] | None = None,
    b_indices: tuple[int, int] | None = None,
    plane: tuple[int, int] = (0, 2),
) -> float:
    """Dense grid over A's two settings in one Bloch plane of a two-level block.

    ``plane`` picks two Pauli axes (0=x, 1=y, 2=z).  For each grid pair the
    best B setting is either a unit Bloch vector or +-identity, whichever wins;
    both are evaluated from the state's correlations and B marginal.
    """
    block = qubit_block(rho, a_indices, b_indices)
    t = correlation_matrix(block)
    rho_b = np.einsum("ibic->bc", block.reshape(2, 2, 2, 2))
    r_b = np.array([np.real(np.trace(rho_b @ PAULI[k])) for k in range(3)])
    rho_a = np.einsum("ibjb->ij", block.reshape(2, 2, 2, 2))
    r_a = np.array([np.real(np.trace(rho_a @ PAULI[k])) for k in range(3)])

    phi = np.arange(n_grid) * 2 * np.pi / n_grid
    dirs = np.zeros((n_grid, 3))
    dirs[:, plane[0]] = np.cos(phi)
    dirs[:, plane[1]] = np.sin(phi)
    # options for each A setting: the grid directions, then +-identity
    ta = dirs @ t  # rows: T^T a
    ma = dirs @ r_a
    vec = np.vstack([ta, np.zeros((2, 3))])
    marg = np.concatenate([ma, [1.0, -1.0]])
    # <A (x) B> for B = b.sigma is a.T b (or marginal r_B.b if A = +-1)
    vec[n_grid] = r_b
    vec[n_grid + 1] = -r_b

    def best_b(v, m):
        # max over B in {unit b, +1, -1} of <(A + A') (x) B>
        return np.maximum(np.linalg.norm(v, axis=-1), np.abs(m))

    best = -np.inf
    for k in range(len(vec)):
        plus = best_b(vec[k] + vec, marg[k] + marg)
        minus = best_b(vec[k] - vec, marg[k] - marg)
        best = max(best, float((plus + minus).max()))
    return best
