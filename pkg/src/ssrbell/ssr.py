"""Particle-number superselection: sector dephasing and SSR-allowed operators.

Local operations may only act within blocks of fixed particle number per
species in their own region.  The dephasing map keeps exactly the matrix
elements that such operations can see: elements between basis states in the
same joint (A sector, B sector) block.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fock import DensityMatrix, FockSpace, LocalSpace, Operator, Region
from .states import (
    SeparableSpec,
    SpecKind,
    binomial_amplitudes,
    distinguishable_space,
    space_for,
)

BLOCK_TOL = 1e-12
MAX_APPENDIX_PARTICLES = 12


@dataclass(frozen=True, eq=False)
class DephasingMap:
    """Projection onto joint sector blocks, stored as a basis partition."""

    space: FockSpace
    sector_ids: np.ndarray

    @classmethod
    def for_space(cls, space: FockSpace) -> "DephasingMap":
        return cls(space, space.sector_ids())

    @property
    def blocks(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.sector_ids == b) for b in np.unique(self.sector_ids)]

    def mask(self) -> np.ndarray:
        return self.sector_ids[:, None] == self.sector_ids[None, :]

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.space is not self.space:
            raise ValueError("state lives on a different space")
        return DensityMatrix(self.space, np.where(self.mask(), rho.matrix, 0))


def ssr_dephase(rho: DensityMatrix) -> DensityMatrix:
    """``sum_k P_k rho P_k`` over joint (A sector, B sector) projectors."""
    return DephasingMap.for_space(rho.space)(rho)


def _local_mask(space: LocalSpace) -> np.ndarray:
    ids = space.sector_ids()
    return ids[:, None] == ids[None, :]


def _check_local(op: Operator, region: Region | str | None) -> LocalSpace:
    space = op.space
    if not isinstance(space, LocalSpace):
        raise ValueError("expected an operator on a single region's local space")
    if region is not None and Region(region) is not space.region:
        raise ValueError(f"operator acts on region {space.region.value}, not {Region(region).value}")
    return space


def is_ssr_allowed(op: Operator, region: Region | str | None = None, tol: float = BLOCK_TOL) -> bool:
    """True iff ``op`` commutes with every local number operator, i.e. is sector block-diagonal."""
    space = _check_local(op, region)
    if not op.is_hermitian(1e-10):
        raise ValueError("is_ssr_allowed expects a Hermitian operator")
    off = np.where(_local_mask(space), 0, op.matrix)
    return bool(np.max(np.abs(off), initial=0.0) < tol)


def project_block_diagonal(op: Operator, region: Region | str | None = None) -> Operator:
    """Frobenius-orthogonal projection onto the SSR-allowed operators."""
    space = _check_local(op, region)
    return Operator(space, np.where(_local_mask(space), op.matrix, 0))


def appendix_effective_state(spec: SeparableSpec) -> DensityMatrix:
    """Effective state of a distinguishable ensemble, built directly.

    Sums over every assignment of the ``N`` particles to the regions; each
    assignment contributes the incoherent projector weighted by
    ``sum_components weight * prod_i |amp_i(region_i)|^2``.  No pure state is
    formed and no off-diagonal element is ever written.
    """
    if spec.kind is not SpecKind.DISTINGUISHABLE:
        raise ValueError("the region-assignment construction covers distinguishable particles")
    n = spec.n_particles
    if n > MAX_APPENDIX_PARTICLES:
        raise ValueError(f"{n} particles exceeds the 2^N enumeration limit ({MAX_APPENDIX_PARTICLES})")
    space = distinguishable_space(n)
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for assignment in itertools.product((Region.A, Region.B), repeat=n):
        occ_a = tuple(int(r is Region.A) for r in assignment)
        occ_b = tuple(int(r is Region.B) for r in assignment)
        k = space.state_index(occ_a + occ_b)
        weight = 0.0
        for comp in spec.components:
            p = comp.weight
            for amp, r in zip(comp.amplitudes, assignment):
                p *= abs(amp.alpha if r is Region.A else amp.beta) ** 2
            weight += p
        rho[k, k] += weight
    return DensityMatrix(space, rho)


def bosonic_effective_state(spec: SeparableSpec) -> DensityMatrix:
    """``sum_components weight * sum_k |C_k|^2 |k><k|_A (x) |n-k><n-k|_B``."""
    if spec.kind is not SpecKind.BOSONIC:
        raise ValueError("expected a bosonic spec")
    space = space_for(spec)
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for comp in spec.components:
        probs = np.abs(binomial_amplitudes(comp.amplitudes[0], comp.n)) ** 2
        for k, p in enumerate(probs):
            idx = space.state_index((k, comp.n - k))
            rho[idx, idx] += comp.weight * p
    return DensityMatrix(space, rho)


def _sector_count_matrix(space: FockSpace) -> np.ndarray:
    """Rows: basis states; columns: (region, species) particle counts."""
    keys = sorted({(m.region.value, m.species) for m in space.modes})
    counts = np.zeros((space.dim, len(keys)))
    for k, label in enumerate(space.sectors()):
        counts[k] = [label[key] for key in keys]
    return counts


def phase_twirl_sample(
    rho: DensityMatrix,
    samples: int,
    seed: int | np.random.SeedSequence | None = None,
    batch: int = 10_000,
) -> DensityMatrix:
    """Average ``U rho U^+`` over random number-phase rotations.

    ``U = exp(i sum theta_{region,species} N_{region,species})`` with
    independent uniform phases.  Converges to ``ssr_dephase(rho)``.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    counts = _sector_count_matrix(rho.space)
    acc = np.zeros((rho.dim, rho.dim), dtype=complex)
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        theta = rng.uniform(0.0, 2 * np.pi, size=(m, counts.shape[1]))
        u = np.exp(1j * theta @ counts.T)
        acc += u.T @ u.conj()
        done += m
    factor = acc / samples
    # diagonal blocks carry identical phases; pin them to exactly 1
    factor[DephasingMap.for_space(rho.space).mask()] = 1.0
    m = rho.matrix * factor
    return DensityMatrix(rho.space, (m + m.conj().T) / 2)
