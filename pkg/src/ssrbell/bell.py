"""CHSH evaluation and see-saw maximization over local dichotomic observables.

The CHSH functional is linear in each party's pair of observables, so with one
side fixed the best response is exact: ``A_x = sign(F_x)`` where ``F_x`` is
the effective operator left after tracing out the other region.  Under the
superselection constraint the effective operator is first projected onto the
sector blocks and the sign is taken block by block, which keeps every
iterate block-diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import DensityMatrix, LocalSpace, Operator, Region

TSIRELSON = 2 * math.sqrt(2)
DICHOTOMIC_TOL = 1e-10
DEFAULT_RESTARTS = 32
MAX_SWEEPS = 500
CONVERGENCE_TOL = 1e-10

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class DichotomicObservable(Operator):
    """Local observable with spectrum in {+1, -1}."""

    def __post_init__(self):
        super().__post_init__()
        if not isinstance(self.space, LocalSpace):
            raise ValueError("a dichotomic observable acts on one region's local space")
        m = self.matrix
        if np.max(np.abs(m - m.conj().T), initial=0.0) > DICHOTOMIC_TOL:
            raise ValueError("observable is not Hermitian")
        if np.max(np.abs(m @ m - np.eye(self.dim)), initial=0.0) > DICHOTOMIC_TOL:
            raise ValueError("observable does not square to the identity")


@dataclass(frozen=True)
class ChshSettings:
    a0: DichotomicObservable
    a1: DichotomicObservable
    b0: DichotomicObservable
    b1: DichotomicObservable

    def __post_init__(self):
        for name, want in (("a0", Region.A), ("a1", Region.A), ("b0", Region.B), ("b1", Region.B)):
            if getattr(self, name).region is not want:
                raise ValueError(f"setting {name} must act on region {want.value}")


@dataclass(frozen=True)
class ChshResult:
    value: float
    settings: ChshSettings
    iterations: int
    restarts_used: int
    converged: bool
    trajectory: tuple[float, ...] = field(default=(), repr=False)


def _reshaped(rho: DensityMatrix) -> np.ndarray:
    da, db = rho.space.dims
    return rho.matrix.reshape(da, db, da, db)


def _reduce_to_a(r: np.ndarray, b_op: np.ndarray) -> np.ndarray:
    """``Tr_B[rho (1 (x) b_op)]``."""
    f = np.einsum("ibjd,db->ij", r, b_op)
    return (f + f.conj().T) / 2


def _reduce_to_b(r: np.ndarray, a_op: np.ndarray) -> np.ndarray:
    """``Tr_A[rho (a_op (x) 1)]``."""
    f = np.einsum("ibkd,ki->bd", r, a_op)
    return (f + f.conj().T) / 2


def _correlator(r: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    return np.einsum("ibjd,ji,db->", r, a, b)


def chsh_value(rho: DensityMatrix, s: ChshSettings) -> float:
    """``<A0 B0> + <A0 B1> + <A1 B0> - <A1 B1>``."""
    da, db = rho.space.dims
    if s.a0.dim != da or s.a1.dim != da or s.b0.dim != db or s.b1.dim != db:
        raise ValueError("settings do not match the local dimensions of the state")
    r = _reshaped(rho)
    a0, a1, b0, b1 = (o.matrix for o in (s.a0, s.a1, s.b0, s.b1))
    value = (
        _correlator(r, a0, b0)
        + _correlator(r, a0, b1)
        + _correlator(r, a1, b0)
        - _correlator(r, a1, b1)
    )
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"CHSH expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def _blocks(space: LocalSpace, ssr: bool) -> list[np.ndarray]:
    return space.blocks() if ssr else [np.arange(space.dim)]


def sign_observable(f: np.ndarray, blocks: list[np.ndarray]) -> np.ndarray:
    """Sign function of ``f`` taken within each block; zero eigenvalues map to +1."""
    if len(blocks) == 1 and len(blocks[0]) == f.shape[0]:
        w, v = np.linalg.eigh(f)
        signs = np.where(w >= -1e-14 * max(1.0, np.abs(w).max(initial=0.0)), 1.0, -1.0)
        out = (v * signs) @ v.conj().T
        return (out + out.conj().T) / 2
    out = np.zeros_like(f, dtype=complex)
    for idx in blocks:
        w, v = np.linalg.eigh(f[np.ix_(idx, idx)])
        signs = np.where(w >= -1e-14 * max(1.0, np.abs(w).max(initial=0.0)), 1.0, -1.0)
        out[np.ix_(idx, idx)] = (v * signs) @ v.conj().T
    return (out + out.conj().T) / 2


def _project(f: np.ndarray, blocks: list[np.ndarray]) -> np.ndarray:
    out = np.zeros_like(f)
    for idx in blocks:
        out[np.ix_(idx, idx)] = f[np.ix_(idx, idx)]
    return out


def optimal_response(
    rho: DensityMatrix,
    fixed: tuple[DichotomicObservable, DichotomicObservable],
    ssr: bool = False,
) -> tuple[DichotomicObservable, DichotomicObservable]:
    """Best pair of observables for the other region, given ``fixed`` on one region."""
    x0, x1 = fixed
    region = x0.region
    if x1.region is not region:
        raise ValueError("both fixed observables must act on the same region")
    r = _reshaped(rho)
    target = rho.space.local(region.other)
    reduce = _reduce_to_b if region is Region.A else _reduce_to_a
    f0 = reduce(r, x0.matrix + x1.matrix)
    f1 = reduce(r, x0.matrix - x1.matrix)
    blocks = _blocks(target, ssr)
    return (
        DichotomicObservable(target, sign_observable(f0, blocks)),
        DichotomicObservable(target, sign_observable(f1, blocks)),
    )


def random_dichotomic(space: LocalSpace, rng: np.random.Generator, ssr: bool = False) -> np.ndarray:
    """Sign of a random Hermitian matrix, drawn block by block when ``ssr``."""
    g = rng.normal(size=(space.dim, space.dim)) + 1j * rng.normal(size=(space.dim, space.dim))
    h = g + g.conj().T
    blocks = _blocks(space, ssr)
    return sign_observable(_project(h, blocks) if ssr else h, blocks)


def _seesaw(ops, space_a, space_b, ssr, rng, max_sweeps, tol):
    to_a, to_b = ops
    da, db = space_a.dim, space_b.dim
    blocks_a, blocks_b = _blocks(space_a, ssr), _blocks(space_b, ssr)
    b0 = random_dichotomic(space_b, rng, ssr)
    b1 = random_dichotomic(space_b, rng, ssr)
    trajectory = []
    previous = -np.inf
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        f0, f1 = (to_a @ np.stack([(b0 + b1).ravel(), (b0 - b1).ravel()], axis=1)).T.reshape(2, da, da)
        if ssr:
            f0, f1 = _project(f0, blocks_a), _project(f1, blocks_a)
        a0, a1 = sign_observable(f0, blocks_a), sign_observable(f1, blocks_a)
        trajectory.append(float(np.real(np.vdot(a0, f0) + np.vdot(a1, f1))))

        g0, g1 = (to_b @ np.stack([(a0 + a1).ravel(), (a0 - a1).ravel()], axis=1)).T.reshape(2, db, db)
        if ssr:
            g0, g1 = _project(g0, blocks_b), _project(g1, blocks_b)
        b0, b1 = sign_observable(g0, blocks_b), sign_observable(g1, blocks_b)
        value = float(np.real(np.vdot(b0, g0) + np.vdot(b1, g1)))
        trajectory.append(value)
        if value - previous < tol:
            converged = True
            break
        previous = value
    return value, (a0, a1, b0, b1), sweeps, converged, trajectory


def _reduction_maps(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Matrices sending a flattened local operator to the other side's effective operator."""
    da, db = rho.space.dims
    r = _reshaped(rho)
    # to_a[(i, j), (d, b)] = r[i, b, j, d]; to_b[(b, d), (k, i)] = r[i, b, k, d]
    to_a = r.transpose(0, 2, 3, 1).reshape(da * da, db * db)
    to_b = r.transpose(1, 3, 2, 0).reshape(db * db, da * da)
    return to_a, to_b


def maximize_chsh(
    rho: DensityMatrix,
    ssr: bool = False,
    restarts: int = DEFAULT_RESTARTS,
    seed: int | np.random.SeedSequence | None = None,
    max_sweeps: int = MAX_SWEEPS,
    tol: float = CONVERGENCE_TOL,
) -> ChshResult:
    """Best CHSH value found by see-saw from ``restarts`` random starts.

    With ``ssr`` every observable is restricted to be block-diagonal over the
    local particle-number sectors.  Each restart draws from its own child of
    ``seed``, so the result is reproducible.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    ops = _reduction_maps(rho)
    space_a, space_b = rho.space.local_a, rho.space.local_b
    best = None
    total_sweeps = 0
    for child in ss.spawn(restarts):
        run = _seesaw(ops, space_a, space_b, ssr, np.random.default_rng(child), max_sweeps, tol)
        total_sweeps += run[2]
        if best is None or run[0] > best[0] + 1e-15:
            best = run
    value, (a0, a1, b0, b1), _, converged, trajectory = best
    settings = ChshSettings(
        DichotomicObservable(space_a, a0),
        DichotomicObservable(space_a, a1),
        DichotomicObservable(space_b, b0),
        DichotomicObservable(space_b, b1),
    )
    return ChshResult(
        value=value,
        settings=settings,
        iterations=total_sweeps,
        restarts_used=restarts,
        converged=converged,
        trajectory=tuple(trajectory),
    )


# -- two-qubit oracle -----------------------------------------------------------


def _support(diag: np.ndarray, tol: float = 1e-10) -> list[int]:
    idx = [int(k) for k in np.flatnonzero(diag > tol)]
    if len(idx) > 2:
        raise ValueError(f"local support has {len(idx)} levels; pass explicit qubit indices")
    for k in range(diag.size):
        if len(idx) == 2:
            break
        if k not in idx:
            idx.append(k)
    return sorted(idx)


def qubit_block(
    rho: DensityMatrix,
    a_indices: tuple[int, int] | None = None,
    b_indices: tuple[int, int] | None = None,
    tol: float = 1e-10,
) -> np.ndarray:
    """The 4x4 block of ``rho`` on two chosen levels per region.

    Without explicit indices the levels are read off the support of the
    reduced states.  Raises if ``rho`` has weight outside the block.
    """
    da, db = rho.space.dims
    r = _reshaped(rho)
    if a_indices is None:
        a_indices = _support(np.real(np.einsum("ibib->i", r)), tol)
    if b_indices is None:
        b_indices = _support(np.real(np.einsum("ibib->b", r)), tol)
    glob = [a * db + b for a in a_indices for b in b_indices]
    block = rho.matrix[np.ix_(glob, glob)]
    leak = 1 - np.trace(block).real
    if leak > tol:
        raise ValueError(f"state has weight {leak:.3g} outside the chosen 2x2 block")
    return block


def correlation_matrix(block: np.ndarray) -> np.ndarray:
    """``T_mn = tr[rho sigma_m (x) sigma_n]`` for a 4x4 two-qubit block."""
    t = np.empty((3, 3))
    for m in range(3):
        for n in range(3):
            t[m, n] = np.real(np.trace(block @ np.kron(PAULI[m], PAULI[n])))
    return t


def horodecki_two_qubit(
    rho: DensityMatrix,
    a_indices: tuple[int, int] | None = None,
    b_indices: tuple[int, int] | None = None,
) -> float:
    """Maximal CHSH value of a two-qubit state: ``2 sqrt(t1 + t2)`` from ``T^T T``."""
    t = correlation_matrix(qubit_block(rho, a_indices, b_indices))
    lam = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return float(2 * math.sqrt(max(lam[0] + lam[1], 0.0)))
