"""Truncated two-region Fock spaces, local embedding and partial trace.

The global space is the tensor product of two truncated local Fock spaces,
one per region.  Each local space holds every occupation vector over that
region's modes whose per-species total does not exceed the species cap, so
a cap is a *per-region* particle bound.

Basis ordering is canonical and shared by every serializer:

* the modes of a space are stored A-region first, then B-region, each group
  in the order the caller supplied;
* a local basis is the lexicographic order of its occupation vectors;
* the global index of ``(a, b)`` is ``a * dim_B + b``, which is again the
  lexicographic order of the concatenated occupation vector.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_MAX_DIM = 4096

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12


class Region(str, enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Region":
        return Region.B if self is Region.A else Region.A


@dataclass(frozen=True, order=True)
class Mode:
    """A single-particle field mode: where it lives, which input port, which species."""

    region: Region
    port: int
    species: int

    def __post_init__(self):
        object.__setattr__(self, "region", Region(self.region))


@dataclass(frozen=True)
class SectorLabel:
    """Particle counts per ``(region, species)``; hashable, used as an SSR block key."""

    counts: tuple[tuple[tuple[str, int], int], ...]

    @classmethod
    def from_dict(cls, counts: Mapping[tuple[Region | str, int], int]) -> "SectorLabel":
        items = sorted(((Region(r).value, int(s)), int(n)) for (r, s), n in counts.items())
        if any(n < 0 for _, n in items):
            raise ValueError("sector counts must be non-negative")
        return cls(tuple(items))

    def __getitem__(self, key: tuple[Region | str, int]) -> int:
        region, species = key
        return dict(self.counts).get((Region(region).value, species), 0)

    def region(self, region: Region | str) -> dict[int, int]:
        r = Region(region).value
        return {s: n for (rr, s), n in self.counts if rr == r}

    def restrict(self, region: Region | str) -> "SectorLabel":
        r = Region(region).value
        return SectorLabel(tuple(item for item in self.counts if item[0][0] == r))

    def as_json(self) -> dict:
        return {
            reg.value: {str(s): n for s, n in sorted(self.region(reg).items())}
            for reg in Region
        }

    def __str__(self) -> str:
        parts = []
        for reg in Region:
            inner = ",".join(f"{s}:{n}" for s, n in sorted(self.region(reg).items()))
            parts.append(f"{reg.value}{{{inner}}}")
        return "|".join(parts)


def _count_sector(modes: Sequence[Mode], occupations: Sequence[int], species_keys) -> SectorLabel:
    counts = {(r, s): 0 for r, s in species_keys}
    for mode, n in zip(modes, occupations):
        counts[(mode.region, mode.species)] += n
    return SectorLabel.from_dict(counts)


@dataclass(frozen=True, eq=False)
class LocalSpace:
    """Truncated Fock space of the modes living in one region."""

    region: Region
    modes: tuple[Mode, ...]
    caps: tuple[tuple[int, int], ...]
    basis: tuple[tuple[int, ...], ...]
    index: Mapping[tuple[int, ...], int] = field(repr=False)
    sectors: tuple[SectorLabel, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def blocks(self) -> list[np.ndarray]:
        """Basis indices grouped by local sector, in order of first appearance."""
        groups: dict[SectorLabel, list[int]] = {}
        for k, label in enumerate(self.sectors):
            groups.setdefault(label, []).append(k)
        return [np.array(v) for v in groups.values()]

    def sector_ids(self) -> np.ndarray:
        ids = np.empty(self.dim, dtype=int)
        for b, idx in enumerate(self.blocks()):
            ids[idx] = b
        return ids


def _enumerate_local(modes: Sequence[Mode], caps: Mapping[int, int]) -> list[tuple[int, ...]]:
    ranges = [range(caps[m.species] + 1) for m in modes]
    basis = []
    for occ in itertools.product(*ranges):
        totals: dict[int, int] = {}
        for m, n in zip(modes, occ):
            totals[m.species] = totals.get(m.species, 0) + n
        if all(t <= caps[s] for s, t in totals.items()):
            basis.append(tuple(occ))
    return basis


def _build_local(region: Region, modes: Sequence[Mode], caps: Mapping[int, int]) -> LocalSpace:
    basis = _enumerate_local(modes, caps)
    keys = sorted({(region, m.species) for m in modes})
    sectors = tuple(_count_sector(modes, occ, keys) for occ in basis)
    relevant = tuple(sorted((s, caps[s]) for s in {m.species for m in modes}))
    return LocalSpace(
        region=region,
        modes=tuple(modes),
        caps=relevant,
        basis=tuple(basis),
        index={occ: k for k, occ in enumerate(basis)},
        sectors=sectors,
    )


@dataclass(frozen=True, eq=False)
class FockSpace:
    modes: tuple[Mode, ...]
    max_per_species: tuple[tuple[int, int], ...]
    local_a: LocalSpace
    local_b: LocalSpace
    basis: tuple[tuple[int, ...], ...] = field(repr=False)
    index: Mapping[tuple[int, ...], int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def dims(self) -> tuple[int, int]:
        return self.local_a.dim, self.local_b.dim

    def local(self, region: Region | str) -> LocalSpace:
        return self.local_a if Region(region) is Region.A else self.local_b

    def mode_index(self, mode: Mode) -> int:
        return self.modes.index(mode)

    def sectors(self) -> list[SectorLabel]:
        return [sector_of(occ, self) for occ in self.basis]

    def sector_ids(self) -> np.ndarray:
        """Joint (A-sector, B-sector) block id of every global basis state."""
        ida = self.local_a.sector_ids()
        idb = self.local_b.sector_ids()
        return (ida[:, None] * (idb.max() + 1) + idb[None, :]).ravel()

    def state_index(self, occupations: Sequence[int]) -> int:
        occ = tuple(int(n) for n in occupations)
        if occ not in self.index:
            raise KeyError(f"occupation {occ} is not in the basis")
        return self.index[occ]

    def split(self, occupations: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        na = len(self.local_a.modes)
        occ = tuple(occupations)
        return occ[:na], occ[na:]


def build_fock_space(
    modes: Iterable[Mode],
    max_per_species: Mapping[int, int],
    max_dim: int = DEFAULT_MAX_DIM,
) -> FockSpace:
    """Enumerate the truncated two-region Fock space over ``modes``.

    ``max_per_species[s]`` bounds the number of species-``s`` particles held
    by each region.  Raises ``ValueError`` on duplicate modes, negative or
    missing caps, or when the global dimension exceeds ``max_dim``.
    """
    modes = [m if isinstance(m, Mode) else Mode(*m) for m in modes]
    if not modes:
        raise ValueError("a Fock space needs at least one mode")
    if len(set(modes)) != len(modes):
        raise ValueError("duplicate (region, port, species) mode")
    caps = {int(s): int(c) for s, c in max_per_species.items()}
    for m in modes:
        if m.species not in caps:
            raise ValueError(f"no particle cap given for species {m.species}")
    if any(c < 0 for c in caps.values()):
        raise ValueError("particle caps must be non-negative")

    a_modes = [m for m in modes if m.region is Region.A]
    b_modes = [m for m in modes if m.region is Region.B]
    local_a = _build_local(Region.A, a_modes, caps)
    local_b = _build_local(Region.B, b_modes, caps)
    dim = local_a.dim * local_b.dim
    if dim > max_dim:
        raise ValueError(f"Fock space dimension {dim} exceeds the limit {max_dim}")

    basis = tuple(a + b for a in local_a.basis for b in local_b.basis)
    return FockSpace(
        modes=tuple(a_modes + b_modes),
        max_per_species=tuple(sorted(caps.items())),
        local_a=local_a,
        local_b=local_b,
        basis=basis,
        index={occ: k for k, occ in enumerate(basis)},
    )


def sector_of(state: Sequence[int], space: FockSpace) -> SectorLabel:
    if len(state) != len(space.modes):
        raise ValueError(
            f"occupation vector has length {len(state)}, space has {len(space.modes)} modes"
        )
    keys = {(m.region, m.species) for m in space.modes}
    return _count_sector(space.modes, state, keys)


# -- operators ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense matrix over the basis of a ``FockSpace`` or a ``LocalSpace``."""

    space: FockSpace | LocalSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match space dimension {d}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def region(self) -> Region | None:
        return getattr(self.space, "region", None)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.space is not self.space:
            raise ValueError("operators live on different spaces")
        return Operator(self.space, self.matrix @ other.matrix)


class DensityMatrix(Operator):
    """Hermitian, positive semidefinite, unit-trace operator."""

    def __post_init__(self):
        super().__post_init__()
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T), initial=0.0)
        if herm > HERMITIAN_TOL:
            raise ValueError(f"density matrix is not Hermitian (residual {herm:.3g})")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {tr.real:.15g}, expected 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")

    @classmethod
    def from_vector(cls, space, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(space, np.outer(v, v.conj()))

    @classmethod
    def from_matrix(cls, space, matrix) -> "DensityMatrix":
        """Symmetrize and renormalize away round-off before validating."""
        m = np.asarray(matrix, dtype=complex)
        m = (m + m.conj().T) / 2
        return cls(space, m / np.trace(m).real)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expect(self, op: Operator | np.ndarray) -> complex:
        m = op.matrix if isinstance(op, Operator) else op
        return complex(np.trace(self.matrix @ m))


def identity(space) -> Operator:
    return Operator(space, np.eye(space.dim))


def creation(space: FockSpace | LocalSpace, mode: Mode) -> Operator:
    """Bosonic creation operator on ``mode``; states pushed past a cap are dropped."""
    j = space.modes.index(mode)
    m = np.zeros((space.dim, space.dim), dtype=complex)
    for k, occ in enumerate(space.basis):
        raised = list(occ)
        raised[j] += 1
        target = space.index.get(tuple(raised))
        if target is not None:
            m[target, k] = np.sqrt(occ[j] + 1)
    return Operator(space, m)


def number_operator(space: FockSpace | LocalSpace, region: Region | str, species: int) -> Operator:
    region = Region(region)
    cols = [j for j, m in enumerate(space.modes) if m.region is region and m.species == species]
    diag = [sum(occ[j] for j in cols) for occ in space.basis]
    return Operator(space, np.diag(np.asarray(diag, dtype=complex)))


def vacuum(space: FockSpace) -> np.ndarray:
    v = np.zeros(space.dim, dtype=complex)
    v[space.state_index((0,) * len(space.modes))] = 1
    return v


def embed_local(op: Operator, space: FockSpace) -> Operator:
    """Lift a single-region operator to ``op ⊗ 1`` or ``1 ⊗ op`` on ``space``."""
    region = op.region
    if region is None:
        raise ValueError("embed_local expects an operator on a local space")
    local = space.local(region)
    if op.dim != local.dim:
        raise ValueError(
            f"operator dimension {op.dim} does not match local {region.value} dimension {local.dim}"
        )
    other = space.local(region.other)
    if region is Region.A:
        m = np.kron(op.matrix, np.eye(other.dim))
    else:
        m = np.kron(np.eye(other.dim), op.matrix)
    return Operator(space, m)


def partial_trace(rho: DensityMatrix, keep: Region | str) -> DensityMatrix:
    keep = Region(keep)
    space = rho.space
    da, db = space.dims
    r = rho.matrix.reshape(da, db, da, db)
    if keep is Region.A:
        m = np.einsum("ibjb->ij", r)
    else:
        m = np.einsum("aiaj->ij", r)
    return DensityMatrix.from_matrix(space.local(keep), m)
