"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines bypass
output capture, so ``-s`` is not needed.
"""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ssrbell import states
from ssrbell.bell import horodecki_two_qubit, maximize_chsh
from ssrbell.entanglement import negativity
from ssrbell.fock import DensityMatrix, embed_local
from ssrbell.oracles import block_grid_chsh, planar_grid_chsh
from ssrbell.ssr import (
    appendix_effective_state,
    bosonic_effective_state,
    phase_twirl_sample,
    ssr_dephase,
)
from ssrbell.states import SplitAmplitude

from conftest import SPACES, allowed_hermitian, allowed_unitary, random_density

TSIRELSON = 2 * math.sqrt(2)


@pytest.fixture
def verdict(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def test_01_dephasing_correctness(verdict):
    rng = np.random.default_rng(101)
    names = sorted(SPACES)
    worst = {"idempotence": 0.0, "trace": 0.0, "psd": 0.0, "covariance": 0.0, "expectation": 0.0}
    max_dim = 0
    for k in range(500):
        space = SPACES[names[k % len(names)]]()
        max_dim = max(max_dim, space.dim)
        rho = random_density(space, rng, int(rng.integers(1, space.dim + 1)))
        d = ssr_dephase(rho)
        worst["idempotence"] = max(worst["idempotence"], np.max(np.abs(ssr_dephase(d).matrix - d.matrix)))
        worst["trace"] = max(worst["trace"], abs(np.trace(d.matrix) - 1))
        worst["psd"] = max(worst["psd"], -np.linalg.eigvalsh(d.matrix).min())

        u = np.kron(allowed_unitary(space.local_a, rng), allowed_unitary(space.local_b, rng))
        rotated = DensityMatrix.from_matrix(space, u @ rho.matrix @ u.conj().T)
        cov = np.max(np.abs(ssr_dephase(rotated).matrix - u @ d.matrix @ u.conj().T))
        worst["covariance"] = max(worst["covariance"], cov)

        o = embed_local(allowed_hermitian(space.local_a, rng), space).matrix
        o = o @ embed_local(allowed_hermitian(space.local_b, rng), space).matrix
        worst["expectation"] = max(
            worst["expectation"], abs(np.trace(rho.matrix @ o) - np.trace(d.matrix @ o))
        )
    ok = max_dim <= 36 and all(v < 1e-10 for v in worst.values())
    verdict(1, ok, "500 states, dim<=%d, worst residuals %s" % (
        max_dim, ", ".join(f"{k}={v:.1e}" for k, v in worst.items())))


def test_02_effective_state_oracles(verdict):
    rng = np.random.default_rng(202)
    worst_d = worst_b = 0.0
    for _ in range(200):
        spec = states.random_spec(rng, "distinguishable", int(rng.integers(1, 4)), int(rng.integers(1, 5)))
        diff = appendix_effective_state(spec).matrix - ssr_dephase(states.ensemble_state(spec)).matrix
        worst_d = max(worst_d, np.max(np.abs(diff)))
    for _ in range(200):
        spec = states.random_spec(rng, "bosonic", int(rng.integers(1, 4)), int(rng.integers(1, 5)))
        diff = bosonic_effective_state(spec).matrix - ssr_dephase(states.ensemble_state(spec)).matrix
        worst_b = max(worst_b, np.max(np.abs(diff)))
    verdict(2, worst_d < 1e-12 and worst_b < 1e-12,
            f"distinguishable worst {worst_d:.1e}, bosonic closed form worst {worst_b:.1e} (tol 1e-12)")


def test_03_particle_separable_states_do_not_violate(verdict):
    rng = np.random.default_rng(303)
    seeds = np.random.SeedSequence(303).spawn(200)
    worst_chsh = worst_neg = 0.0
    for k in range(200):
        kind = "distinguishable" if k % 2 == 0 else "bosonic"
        spec = states.random_spec(rng, kind, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        rho = states.ensemble_state(spec)
        worst_neg = max(worst_neg, negativity(ssr_dephase(rho)))
        worst_chsh = max(worst_chsh, maximize_chsh(rho, ssr=True, seed=seeds[k]).value)
    verdict(3, worst_neg < 1e-10 and worst_chsh <= 2 + 1e-6,
            f"200 specs: max CHSH(SSR) {worst_chsh:.10f} (<= 2+1e-6), max dephased negativity {worst_neg:.1e}")


def test_04_single_particle(verdict):
    rho = states.single_particle_split(SplitAmplitude.balanced())
    free = maximize_chsh(rho, seed=4).value
    oracle = horodecki_two_qubit(rho)
    constrained = maximize_chsh(rho, ssr=True, seed=4).value
    ok = abs(free - TSIRELSON) < 1e-6 and abs(free - oracle) < 1e-6 and constrained <= 2 + 1e-9
    verdict(4, ok, f"CHSH {free:.10f}, Horodecki {oracle:.10f}, CHSH(SSR) {constrained:.10f}")


def test_05_spin_pair_unaffected_by_ssr(verdict):
    value = maximize_chsh(states.ep_spin_pair(), ssr=True, seed=5).value
    verdict(5, abs(value - TSIRELSON) < 1e-6, f"CHSH(SSR) {value:.10f}, target 2*sqrt(2)")


def test_06_pair_vacuum(verdict):
    rho = states.pair_vacuum_superposition()
    before = negativity(rho)
    after = negativity(ssr_dephase(rho))
    value = maximize_chsh(rho, ssr=True, seed=6).value
    ok = abs(before - 0.5) < 1e-10 and after < 1e-10 and value <= 2 + 1e-9
    verdict(6, ok, f"negativity {before:.12f} -> {after:.1e}, CHSH(SSR) {value:.10f}")


def test_07_yurke_dichotomy(verdict):
    distinct = maximize_chsh(states.yurke_state(False), ssr=True, seed=7).value
    rho = states.yurke_state(True)
    identical = maximize_chsh(rho, ssr=True, seed=7).value
    grid = block_grid_chsh(rho)
    ok = distinct <= 2 + 1e-6 and identical >= 2.4 and abs(identical - grid) < 1e-3
    verdict(7, ok, f"distinct {distinct:.10f}, identical {identical:.10f}, block grid {grid:.10f}")


def test_08_gisin_sweep(verdict):
    worst_gap = 0.0
    lowest_margin = math.inf
    for k in range(20):
        theta = (k + 0.5) * math.pi / 40
        c = (math.cos(theta), math.sin(theta))
        rho = states.schmidt_pure_state(c)
        value = maximize_chsh(rho, seed=800 + k).value
        worst_gap = max(worst_gap, abs(value - planar_grid_chsh(rho, n_grid=720)))
        if min(c) > 0.05:
            lowest_margin = min(lowest_margin, value - 2)
    verdict(8, lowest_margin > 1e-4 and worst_gap < 1e-3,
            f"20 angles: min CHSH-2 {lowest_margin:.3e}, max |see-saw - grid| {worst_gap:.1e}")


@pytest.mark.parametrize("name", ["single-particle", "yurke-identical"])
def test_09_twirl(name, verdict):
    samples = 100_000
    rho = (states.single_particle_split(SplitAmplitude.balanced()) if name == "single-particle"
           else states.yurke_state(True))
    twirled = phase_twirl_sample(rho, samples, seed=9).matrix
    exact = ssr_dephase(rho).matrix
    # each sample of rho_ij e^{i phi} has modulus |rho_ij|, so its standard error is at most |rho_ij|/sqrt(S)
    se = np.abs(rho.matrix) / math.sqrt(samples)
    ratio = np.max(np.abs(twirled - exact) / np.where(se > 0, se, np.inf))
    ok = bool(np.all(np.abs(twirled - exact) <= 5 * se + 1e-12))
    verdict(9, ok, f"{name}: 1e5 samples, worst deviation {ratio:.2f} standard errors (bound 5)")


@pytest.mark.slow
def test_10_cli_reproducibility(verdict):
    cmd = [sys.executable, "-m", "ssrbell", "run", "all", "--seed", "42", "--format", "json"]
    env = {k: v for k, v in os.environ.items() if k != "SSRBELL_SEED"}
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=env) for _ in range(2)]
    outs = [p.communicate(timeout=600) for p in procs]
    codes = [p.returncode for p in procs]
    same = outs[0][0] == outs[1][0] and len(outs[0][0]) > 0
    verdict(10, same and codes == [0, 0],
            f"two runs of 'run all --seed 42 --format json': exit codes {codes}, "
            f"{len(outs[0][0])} bytes, byte-identical={same}")
