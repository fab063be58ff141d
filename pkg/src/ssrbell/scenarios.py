"""Named scenarios: each builds a state, runs the CHSH and entanglement checks, and returns verdicts."""
from __future__ import annotations

import logging
import math
import time
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import bell, entanglement, oracles, ssr, states
from .fock import DensityMatrix, Operator, Region, sector_of
from .states import SeparableSpec, SpecKind, SplitAmplitude

log = logging.getLogger(__name__)

LOCAL_BOUND = 2.0
TSIRELSON = bell.TSIRELSON


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    restarts: int = bell.DEFAULT_RESTARTS
    samples: int = 20_000
    n_specs: int = 200
    max_particles: int = 3
    n_angles: int = 24
    grid: int = 720
    specs: tuple[SeparableSpec, ...] | None = None

    def override(self, **kwargs) -> "ScenarioConfig":
        known = {k: v for k, v in kwargs.items() if k in self.__dataclass_fields__ and v is not None}
        return replace(self, **known)


@dataclass
class ScenarioReport:
    scenario: str
    paper_eq: str
    chsh_unconstrained: float
    chsh_ssr: float
    negativity_before: float
    negativity_after_dephase: float
    sector_table: list[tuple[dict, float]]
    verdicts: dict[str, bool]
    seed: int
    runtime_ms: float = 0.0
    details: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.verdicts.items() if not ok]


def scenario_seed(seed: int, name: str) -> np.random.SeedSequence:
    """Per-scenario stream, independent of which other scenarios run."""
    return np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])


def sector_table(rho: DensityMatrix, tol: float = 1e-15) -> list[tuple[dict, float]]:
    """Diagonal weight carried by each joint sector, sorted by label."""
    weights: dict = {}
    for occ, p in zip(rho.space.basis, np.real(np.diag(rho.matrix))):
        label = sector_of(occ, rho.space)
        weights[label] = weights.get(label, 0.0) + p
    return [(lab.as_json(), w) for lab, w in sorted(weights.items(), key=lambda kv: str(kv[0])) if w > tol]


def twirl_matches(rho: DensityMatrix, samples: int, seed, n_sigma: float = 5.0) -> bool:
    """Monte Carlo twirl within ``n_sigma`` standard errors of the exact dephasing, element-wise."""
    twirled = ssr.phase_twirl_sample(rho, samples, seed)
    exact = ssr.ssr_dephase(rho)
    bound = n_sigma * np.abs(rho.matrix) / math.sqrt(samples) + 1e-12
    return bool(np.all(np.abs(twirled.matrix - exact.matrix) <= bound))


def _secondary_restarts(config: ScenarioConfig) -> int:
    """Restart budget for the reference value a sweep scenario does not test."""
    return max(1, config.restarts // 8)


def _chsh_pair(rho, config, ss, free_restarts=None, ssr_restarts=None):
    s_free, s_ssr = ss.spawn(2)
    free = bell.maximize_chsh(rho, ssr=False, restarts=free_restarts or config.restarts, seed=s_free)
    constrained = bell.maximize_chsh(
        rho, ssr=True, restarts=ssr_restarts or config.restarts, seed=s_ssr
    )
    return free, constrained


def _base(name, rho, config, ss, paper_eq) -> tuple[ScenarioReport, np.random.SeedSequence]:
    free, constrained = _chsh_pair(rho, config, ss)
    report = ScenarioReport(
        scenario=name,
        paper_eq=paper_eq,
        chsh_unconstrained=free.value,
        chsh_ssr=constrained.value,
        negativity_before=entanglement.negativity(rho),
        negativity_after_dephase=entanglement.negativity(ssr.ssr_dephase(rho)),
        sector_table=sector_table(rho),
        verdicts={},
        seed=config.seed,
    )
    report.verdicts["ssr_not_above_unconstrained"] = constrained.value <= free.value + 1e-9
    return report, ss.spawn(1)[0]


def run_single_particle(config: ScenarioConfig, ss) -> ScenarioReport:
    rho = states.single_particle_split(SplitAmplitude.balanced())
    rep, rest = _base(
        "single-particle", rho, config, ss,
        "one particle coherently split between A and B; its incoherent effective mixture",
    )
    horo = bell.horodecki_two_qubit(rho)
    effective = ssr.ssr_dephase(rho)
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = 0.5
    rep.verdicts.update(
        chsh_unconstrained_tsirelson=abs(rep.chsh_unconstrained - TSIRELSON) < 1e-6,
        matches_horodecki=abs(rep.chsh_unconstrained - horo) < 1e-6,
        chsh_ssr_local=rep.chsh_ssr <= LOCAL_BOUND + 1e-9,
        entangled_before=abs(rep.negativity_before - 0.5) < 1e-10,
        separable_after_dephase=rep.negativity_after_dephase < 1e-10,
        dephased_is_incoherent_mixture=bool(np.max(np.abs(effective.matrix - expected)) < 1e-12),
        twirl_matches_dephase=twirl_matches(rho, config.samples, rest),
    )
    rep.details.append({"horodecki": horo})
    return rep


def run_ep_spin(config: ScenarioConfig, ss) -> ScenarioReport:
    rho = states.ep_spin_pair()
    rep, _ = _base(
        "ep-spin", rho, config, ss,
        "electron in A and proton in B with correlated spins",
    )
    local_a = rho.space.local_a
    flip = np.zeros((local_a.dim, local_a.dim))
    up, down = local_a.index[(1, 0)], local_a.index[(0, 1)]
    flip[up, down] = flip[down, up] = 1
    branches = [sector_of(occ, rho.space) for occ in ((1, 0, 1, 0), (0, 1, 0, 1))]
    rep.verdicts.update(
        chsh_ssr_tsirelson=abs(rep.chsh_ssr - TSIRELSON) < 1e-6,
        spin_flip_ssr_allowed=ssr.is_ssr_allowed(Operator(local_a, flip)),
        branches_share_sector=branches[0] == branches[1],
    )
    return rep


def run_pair_vacuum(config: ScenarioConfig, ss) -> ScenarioReport:
    rho = states.pair_vacuum_superposition()
    rep, _ = _base(
        "pair-vacuum", rho, config, ss,
        "electron-proton pair wholly in A or wholly in B",
    )
    occ = [rho.space.basis[k] for k in np.flatnonzero(np.abs(np.diag(rho.matrix)) > 1e-12)]
    labels = [sector_of(o, rho.space) for o in occ]
    rep.verdicts.update(
        entangled_before=abs(rep.negativity_before - 0.5) < 1e-10,
        chsh_ssr_local=rep.chsh_ssr <= LOCAL_BOUND + 1e-9,
        separable_after_dephase=rep.negativity_after_dephase < 1e-10,
        branches_in_distinct_sectors=len(set(labels)) == 2,
    )
    return rep


def _yurke(identical: bool, config: ScenarioConfig, ss) -> ScenarioReport:
    name = "yurke-identical" if identical else "yurke-distinct"
    rho = states.yurke_state(identical)
    kind = "identical" if identical else "distinguishable"
    rep, rest = _base(
        name, rho, config, ss,
        f"two {kind} particles from two ports, each split by a beam splitter toward A and B",
    )
    labels = [sector_of(o, rho.space) for o in states.YURKE_BRANCHES]
    schmidt = entanglement.schmidt_decompose(rho).coefficients
    rep.details.append({"schmidt_coefficients": [float(c) for c in schmidt[schmidt > 1e-12]]})
    if identical:
        grid = oracles.block_grid_chsh(rho, n_angles=config.n_angles, ssr=True)
        rep.details.append({"block_grid_chsh": grid})
        rep.verdicts.update(
            chsh_ssr_violates=rep.chsh_ssr >= 2.4,
            matches_block_grid=abs(rep.chsh_ssr - grid) < 1e-3,
            exchange_branches_share_sector=labels[0] == labels[1],
            twirl_matches_dephase=twirl_matches(rho, config.samples, rest),
        )
    else:
        rep.verdicts.update(
            chsh_ssr_local=rep.chsh_ssr <= LOCAL_BOUND + 1e-6,
            chsh_unconstrained_violates=rep.chsh_unconstrained > LOCAL_BOUND + 1e-4,
            separable_after_dephase=rep.negativity_after_dephase < 1e-10,
            branch_sectors_distinct=len(set(labels)) == 4,
            twirl_matches_dephase=twirl_matches(rho, config.samples, rest),
        )
    return rep


def run_yurke_distinct(config, ss):
    return _yurke(False, config, ss)


def run_yurke_identical(config, ss):
    return _yurke(True, config, ss)


GISIN_ANGLES = tuple((k + 0.5) * math.pi / 40 for k in range(20))


def run_gisin_sweep(config: ScenarioConfig, ss) -> ScenarioReport:
    rows = []
    violate_ok = grid_ok = True
    for theta, child in zip(GISIN_ANGLES, ss.spawn(len(GISIN_ANGLES))):
        c = (math.cos(theta), math.sin(theta))
        rho = states.schmidt_pure_state(c)
        free, constrained = _chsh_pair(rho, config, child, ssr_restarts=_secondary_restarts(config))
        grid = oracles.planar_grid_chsh(rho, n_grid=config.grid)
        if min(c) > 0.05 and not free.value > LOCAL_BOUND + 1e-4:
            violate_ok = False
        if abs(free.value - grid) >= 1e-3:
            grid_ok = False
        rows.append(
            {
                "theta": theta,
                "chsh_unconstrained": free.value,
                "chsh_ssr": constrained.value,
                "grid_oracle": grid,
                "horodecki": bell.horodecki_two_qubit(rho),
                "negativity": entanglement.negativity(rho),
            }
        )
    return ScenarioReport(
        scenario="gisin-sweep",
        paper_eq="pure Schmidt states with two non-zero coefficients",
        chsh_unconstrained=min(r["chsh_unconstrained"] for r in rows),
        chsh_ssr=min(r["chsh_ssr"] for r in rows),
        negativity_before=min(r["negativity"] for r in rows),
        negativity_after_dephase=min(
            entanglement.negativity(ssr.ssr_dephase(states.schmidt_pure_state(
                (math.cos(t), math.sin(t))))) for t in GISIN_ANGLES
        ),
        sector_table=[],
        verdicts={
            "all_pure_entangled_violate": violate_ok,
            "matches_dense_grid": grid_ok,
            "ssr_not_above_unconstrained": all(
                r["chsh_ssr"] <= r["chsh_unconstrained"] + 1e-9 for r in rows
            ),
        },
        seed=config.seed,
        details=rows,
    )


def random_specs(n: int, max_particles: int, rng: np.random.Generator) -> list[SeparableSpec]:
    """Alternate distinguishable/bosonic specs with particle counts in 1..max_particles."""
    kinds = (SpecKind.DISTINGUISHABLE, SpecKind.BOSONIC)
    out = []
    for k in range(n):
        n_particles = int(rng.integers(1, max_particles + 1))
        n_components = int(rng.integers(1, 5))
        out.append(states.random_spec(rng, kinds[k % 2], n_particles, n_components))
    return out


def oracle_error(spec: SeparableSpec, rho: DensityMatrix) -> float:
    """Distance between the dephased ensemble and its directly built effective state."""
    if spec.kind is SpecKind.DISTINGUISHABLE:
        direct = ssr.appendix_effective_state(spec)
    else:
        direct = ssr.bosonic_effective_state(spec)
    return float(np.max(np.abs(ssr.ssr_dephase(rho).matrix - direct.matrix)))


def run_separable_random(config: ScenarioConfig, ss) -> ScenarioReport:
    spec_seed, chsh_seed = ss.spawn(2)
    specs = list(config.specs) if config.specs else random_specs(
        config.n_specs, config.max_particles, np.random.default_rng(spec_seed)
    )
    worst = {"chsh_ssr": -np.inf, "chsh_free": -np.inf, "neg_before": 0.0, "neg_after": 0.0, "oracle": 0.0}
    for spec, child in zip(specs, chsh_seed.spawn(len(specs))):
        rho = states.ensemble_state(spec)
        s_free, s_ssr = child.spawn(2)
        worst["chsh_ssr"] = max(
            worst["chsh_ssr"], bell.maximize_chsh(rho, ssr=True, restarts=config.restarts, seed=s_ssr).value
        )
        worst["chsh_free"] = max(
            worst["chsh_free"], bell.maximize_chsh(
                rho, ssr=False, restarts=_secondary_restarts(config), seed=s_free
            ).value
        )
        worst["neg_before"] = max(worst["neg_before"], entanglement.negativity(rho))
        worst["neg_after"] = max(worst["neg_after"], entanglement.negativity(ssr.ssr_dephase(rho)))
        worst["oracle"] = max(worst["oracle"], oracle_error(spec, rho))
    return ScenarioReport(
        scenario="separable-random",
        paper_eq="random particle-separable ensembles of distinguishable particles and of bosons",
        chsh_unconstrained=worst["chsh_free"],
        chsh_ssr=worst["chsh_ssr"],
        negativity_before=worst["neg_before"],
        negativity_after_dephase=worst["neg_after"],
        sector_table=[],
        verdicts={
            "chsh_ssr_local": worst["chsh_ssr"] <= LOCAL_BOUND + 1e-6,
            "separable_after_dephase": worst["neg_after"] < 1e-10,
            "effective_state_oracle": worst["oracle"] < 1e-12,
        },
        seed=config.seed,
        details=[{"n_specs": len(specs), "max_oracle_error": worst["oracle"]}],
    )


def run_bosonic_coherent(config: ScenarioConfig, ss) -> ScenarioReport:
    amp = SplitAmplitude.balanced()
    rho = states.spin_coherent_state(amp, 2)
    rep, _ = _base(
        "bosonic-coherent", rho, config, ss,
        "N bosons in a spin coherent state split between A and B",
    )
    psi = states.spin_coherent_vector(amp, 2)
    closed = states.binomial_amplitudes(amp, 2)
    amps = np.array([psi[rho.space.state_index((k, 2 - k))] for k in range(3)])
    spec = states.bosonic([(1.0, amp, 2)])
    rep.verdicts.update(
        amplitudes_match_binomial=bool(np.max(np.abs(amps - closed)) < 1e-12),
        effective_state_closed_form=oracle_error(spec, rho) < 1e-12,
        chsh_unconstrained_violates=rep.chsh_unconstrained > LOCAL_BOUND + 1e-4,
        chsh_ssr_local=rep.chsh_ssr <= LOCAL_BOUND + 1e-6,
        separable_after_dephase=rep.negativity_after_dephase < 1e-10,
    )
    rep.details.append({"binomial_amplitudes": [float(abs(c)) for c in closed]})
    return rep


SCENARIOS: dict[str, Callable[[ScenarioConfig, np.random.SeedSequence], ScenarioReport]] = {
    "single-particle": run_single_particle,
    "ep-spin": run_ep_spin,
    "pair-vacuum": run_pair_vacuum,
    "yurke-distinct": run_yurke_distinct,
    "yurke-identical": run_yurke_identical,
    "gisin-sweep": run_gisin_sweep,
    "separable-random": run_separable_random,
    "bosonic-coherent": run_bosonic_coherent,
}


def run_scenario(name: str, config: ScenarioConfig | None = None) -> ScenarioReport:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(sorted(SCENARIOS))}")
    config = config or ScenarioConfig()
    start = time.perf_counter()
    report = SCENARIOS[name](config, scenario_seed(config.seed, name))
    report.runtime_ms = (time.perf_counter() - start) * 1e3
    log.info("%s: %s in %.0f ms", name, "pass" if report.passed else "FAIL", report.runtime_ms)
    return report
