"""Constructors for the states of the Bell/SSR scenarios.

Separable ensembles are finite mixtures (``SeparableSpec``): a list of
weighted components, each fixing how every particle is split between the two
regions.  Distinguishable particle ``i`` owns species ``i`` and port ``i``;
a bosonic component puts ``n`` identical particles into one A mode and one
B mode of species 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import (
    DensityMatrix,
    FockSpace,
    Mode,
    Region,
    build_fock_space,
    creation,
    vacuum,
)

NORM_TOL = 1e-12

# species / port labels of the electron-proton examples
ELECTRON, PROTON = 0, 1
UP, DOWN = 0, 1


@dataclass(frozen=True)
class SplitAmplitude:
    """Amplitudes sending one particle to region A (``alpha``) or B (``beta``)."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm:.15g}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def balanced(cls) -> "SplitAmplitude":
        return cls(1 / math.sqrt(2), 1 / math.sqrt(2))

    @classmethod
    def from_angles(cls, theta: float, phase: float = 0.0) -> "SplitAmplitude":
        return cls(math.cos(theta), math.sin(theta) * np.exp(1j * phase))


class SpecKind(str, enum.Enum):
    DISTINGUISHABLE = "distinguishable"
    BOSONIC = "bosonic"


@dataclass(frozen=True)
class Component:
    weight: float
    amplitudes: tuple[SplitAmplitude, ...]
    n: int | None = None


@dataclass(frozen=True)
class SeparableSpec:
    kind: SpecKind
    components: tuple[Component, ...]

    def __post_init__(self):
        kind = SpecKind(self.kind)
        object.__setattr__(self, "kind", kind)
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a separable spec needs at least one component")
        weights = np.array([c.weight for c in comps], dtype=float)
        if np.any(weights < 0):
            raise ValueError("mixture weights must be non-negative")
        if abs(weights.sum() - 1) > NORM_TOL:
            raise ValueError(f"mixture weights sum to {weights.sum():.15g}, expected 1")
        if kind is SpecKind.DISTINGUISHABLE:
            sizes = {len(c.amplitudes) for c in comps}
            if len(sizes) != 1 or 0 in sizes:
                raise ValueError("every component must split the same, non-zero number of particles")
        else:
            for c in comps:
                if len(c.amplitudes) != 1:
                    raise ValueError("a bosonic component carries exactly one split amplitude")
                if c.n is None or c.n < 1:
                    raise ValueError("a bosonic component needs a particle count n >= 1")

    @property
    def n_particles(self) -> int:
        if self.kind is SpecKind.DISTINGUISHABLE:
            return len(self.components[0].amplitudes)
        return max(c.n for c in self.components)

    def to_json(self) -> dict:
        comps = []
        for c in self.components:
            item = {
                "weight": c.weight,
                "amplitudes": [
                    {"alpha": [a.alpha.real, a.alpha.imag], "beta": [a.beta.real, a.beta.imag]}
                    for a in c.amplitudes
                ],
            }
            if c.n is not None:
                item["n"] = c.n
            comps.append(item)
        return {"kind": self.kind.value, "components": comps}

    @classmethod
    def from_json(cls, data: dict) -> "SeparableSpec":
        comps = []
        for item in data["components"]:
            amps = tuple(
                SplitAmplitude(complex(*a["alpha"]), complex(*a["beta"])) for a in item["amplitudes"]
            )
            n = item.get("n")
            comps.append(Component(float(item["weight"]), amps, None if n is None else int(n)))
        return cls(SpecKind(data["kind"]), tuple(comps))


def distinguishable(components: Sequence[tuple[float, Sequence[SplitAmplitude]]]) -> SeparableSpec:
    return SeparableSpec(
        SpecKind.DISTINGUISHABLE, tuple(Component(w, tuple(a)) for w, a in components)
    )


def bosonic(components: Sequence[tuple[float, SplitAmplitude, int]]) -> SeparableSpec:
    return SeparableSpec(SpecKind.BOSONIC, tuple(Component(w, (a,), n) for w, a, n in components))


# -- spaces --------------------------------------------------------------------


def two_mode_space(cap: int = 1) -> FockSpace:
    """One species-0 mode in each region."""
    return build_fock_space([Mode(Region.A, 0, 0), Mode(Region.B, 0, 0)], {0: cap})


def distinguishable_space(n_particles: int) -> FockSpace:
    modes = [Mode(r, i, i) for r in Region for i in range(n_particles)]
    return build_fock_space(modes, {i: 1 for i in range(n_particles)})


def space_for(spec: SeparableSpec) -> FockSpace:
    if spec.kind is SpecKind.DISTINGUISHABLE:
        return distinguishable_space(spec.n_particles)
    return two_mode_space(spec.n_particles)


# -- pure states -----------------------------------------------------------------


def single_particle_split(amp: SplitAmplitude) -> DensityMatrix:
    """One particle in ``alpha|1>_A|0>_B + beta|0>_A|1>_B``."""
    if not isinstance(amp, SplitAmplitude):
        amp = SplitAmplitude(*amp)
    space = two_mode_space(1)
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.state_index((1, 0))] = amp.alpha
    psi[space.state_index((0, 1))] = amp.beta
    return DensityMatrix.from_vector(space, psi)


def _split_creator(space, amp: SplitAmplitude, mode_a: Mode, mode_b: Mode) -> np.ndarray:
    return amp.alpha * creation(space, mode_a).matrix + amp.beta * creation(space, mode_b).matrix


def spin_coherent_vector(amp: SplitAmplitude, n: int, space: FockSpace | None = None) -> np.ndarray:
    """``(alpha a_A^+ + beta a_B^+)^n |0> / sqrt(n!)`` built by repeated creation."""
    if n < 1:
        raise ValueError("particle count must be at least 1")
    if space is None:
        space = two_mode_space(n)
    cap = dict(space.max_per_species)[0]
    if n > cap:
        raise ValueError(f"{n} particles exceed the space cap {cap}")
    raise_op = _split_creator(space, amp, Mode(Region.A, 0, 0), Mode(Region.B, 0, 0))
    psi = vacuum(space)
    for _ in range(n):
        psi = raise_op @ psi
    return psi / math.sqrt(math.factorial(n))


def spin_coherent_state(amp: SplitAmplitude, n: int, space: FockSpace | None = None) -> DensityMatrix:
    if space is None:
        space = two_mode_space(n)
    return DensityMatrix.from_vector(space, spin_coherent_vector(amp, n, space))


def binomial_amplitudes(amp: SplitAmplitude, n: int) -> np.ndarray:
    """Closed-form ``C_k = sqrt(binom(n, k)) alpha^k beta^(n-k)`` on ``|k>_A |n-k>_B``."""
    return np.array(
        [math.sqrt(math.comb(n, k)) * amp.alpha**k * amp.beta ** (n - k) for k in range(n + 1)]
    )


def product_vector(amplitudes: Sequence[SplitAmplitude], space: FockSpace) -> np.ndarray:
    """Distinguishable particles, each independently split: ``prod_i (a_i^+ ...)|0>``."""
    psi = vacuum(space)
    for i, amp in enumerate(amplitudes):
        psi = _split_creator(space, amp, Mode(Region.A, i, i), Mode(Region.B, i, i)) @ psi
    return psi


def _check_compatible(spec: SeparableSpec, space: FockSpace) -> None:
    caps = dict(space.max_per_species)
    if spec.kind is SpecKind.DISTINGUISHABLE:
        for i in range(spec.n_particles):
            for r in Region:
                if Mode(r, i, i) not in space.modes:
                    raise ValueError(f"space lacks mode ({r.value}, port {i}, species {i})")
            if caps.get(i, 0) < 1:
                raise ValueError(f"space cap for species {i} is zero")
    else:
        if set(space.modes) != {Mode(Region.A, 0, 0), Mode(Region.B, 0, 0)}:
            raise ValueError("bosonic specs need exactly one species-0 mode per region")
        if caps[0] < spec.n_particles:
            raise ValueError(f"space cap {caps[0]} below particle count {spec.n_particles}")


def ensemble_state(spec: SeparableSpec, space: FockSpace | None = None) -> DensityMatrix:
    """Weighted mixture of the pure particle-product states listed in ``spec``."""
    if space is None:
        space = space_for(spec)
    _check_compatible(spec, space)
    rho = np.zeros((space.dim, space.dim), dtype=complex)
    for comp in spec.components:
        if spec.kind is SpecKind.DISTINGUISHABLE:
            psi = product_vector(comp.amplitudes, space)
        else:
            psi = spin_coherent_vector(comp.amplitudes[0], comp.n, space)
        rho += comp.weight * np.outer(psi, psi.conj())
    return DensityMatrix.from_matrix(space, rho)


def _two_branch(space: FockSpace, occ_1, occ_2) -> DensityMatrix:
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.state_index(occ_1)] = 1 / math.sqrt(2)
    psi[space.state_index(occ_2)] = 1 / math.sqrt(2)
    return DensityMatrix.from_vector(space, psi)


def ep_space() -> FockSpace:
    modes = [
        Mode(Region.A, UP, ELECTRON),
        Mode(Region.A, DOWN, ELECTRON),
        Mode(Region.B, UP, PROTON),
        Mode(Region.B, DOWN, PROTON),
    ]
    return build_fock_space(modes, {ELECTRON: 1, PROTON: 1})


def ep_spin_pair() -> DensityMatrix:
    """Electron in A, proton in B, spins perfectly correlated."""
    # modes: e_up(A), e_down(A), p_up(B), p_down(B)
    return _two_branch(ep_space(), (1, 0, 1, 0), (0, 1, 0, 1))


def pair_vacuum_space() -> FockSpace:
    modes = [Mode(r, s, sp) for r in Region for sp in (ELECTRON, PROTON) for s in (UP, DOWN)]
    return build_fock_space(modes, {ELECTRON: 1, PROTON: 1})


def pair_vacuum_superposition() -> DensityMatrix:
    """Both particles (spin up) in A, or both (spin down) in B."""
    space = pair_vacuum_space()
    # per region: e_up, e_down, p_up, p_down
    both_in_a = (1, 0, 1, 0) + (0, 0, 0, 0)
    both_in_b = (0, 0, 0, 0) + (0, 1, 0, 1)
    return _two_branch(space, both_in_a, both_in_b)


def yurke_space(identical: bool) -> FockSpace:
    si, sj = (0, 0) if identical else (0, 1)
    modes = [Mode(Region.A, 0, si), Mode(Region.A, 1, sj), Mode(Region.B, 0, si), Mode(Region.B, 1, sj)]
    caps = {0: 2} if identical else {0: 1, 1: 1}
    return build_fock_space(modes, caps)


YURKE_BRANCHES = (
    (1, 0, 0, 1),  # i in A, j in B
    (0, 1, 1, 0),  # j in A, i in B
    (1, 1, 0, 0),  # both in A
    (0, 0, 1, 1),  # both in B
)


def yurke_state(identical: bool) -> DensityMatrix:
    """Two particles entering ports i and j, each split evenly between A and B.

    Modes are ``(A, port i), (A, port j), (B, port i), (B, port j)``; with
    ``identical`` both ports carry species 0, otherwise species 0 and 1.
    """
    space = yurke_space(identical)
    psi = np.zeros(space.dim, dtype=complex)
    for occ in YURKE_BRANCHES:
        psi[space.state_index(occ)] = 0.5
    return DensityMatrix.from_vector(space, psi)


def schmidt_space(d: int) -> FockSpace:
    """One particle per region spread over ``d`` ports: a qudit pair plus vacua."""
    modes = [Mode(Region.A, k, 0) for k in range(d)] + [Mode(Region.B, k, 1) for k in range(d)]
    return build_fock_space(modes, {0: 1, 1: 1})


def schmidt_pure_state(coefficients: Sequence[complex]) -> DensityMatrix:
    """``sum_k c_k |k>_A |k>_B`` where ``|k>`` is one particle in port ``k``."""
    c = np.asarray(coefficients, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("need a non-empty list of Schmidt coefficients")
    if abs(np.sum(np.abs(c) ** 2) - 1) > NORM_TOL:
        raise ValueError("Schmidt coefficients are not normalized")
    d = c.size
    space = schmidt_space(d)
    psi = np.zeros(space.dim, dtype=complex)
    for k, ck in enumerate(c):
        occ = [0] * (2 * d)
        occ[k] = 1
        occ[d + k] = 1
        psi[space.state_index(occ)] = ck
    return DensityMatrix(space, np.outer(psi, psi.conj()))


# -- random ensembles -------------------------------------------------------------


def random_amplitude(rng: np.random.Generator) -> SplitAmplitude:
    """Uniform |alpha|^2 in [0, 1] and independent uniform phases."""
    p = rng.uniform()
    phases = rng.uniform(0, 2 * np.pi, size=2)
    alpha = math.sqrt(p) * np.exp(1j * phases[0])
    beta = math.sqrt(1 - p) * np.exp(1j * phases[1])
    return SplitAmplitude(alpha, beta)


def random_spec(
    rng: np.random.Generator,
    kind: SpecKind | str,
    n_particles: int,
    n_components: int = 3,
) -> SeparableSpec:
    """Random finite ensemble: flat-simplex weights, random split amplitudes."""
    kind = SpecKind(kind)
    weights = rng.dirichlet(np.ones(n_components))
    weights = weights / weights.sum()
    comps = []
    for w in weights:
        if kind is SpecKind.DISTINGUISHABLE:
            amps = tuple(random_amplitude(rng) for _ in range(n_particles))
            comps.append(Component(float(w), amps))
        else:
            comps.append(Component(float(w), (random_amplitude(rng),), n_particles))
    # absorb the float residue of the simplex sample into the first weight
    residue = 1.0 - sum(c.weight for c in comps)
    comps[0] = Component(comps[0].weight + residue, comps[0].amplitudes, comps[0].n)
    return SeparableSpec(kind, tuple(comps))
