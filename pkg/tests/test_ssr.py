import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssrbell import states
from ssrbell.fock import DensityMatrix, Operator, embed_local, number_operator
from ssrbell.ssr import (
    DephasingMap,
    appendix_effective_state,
    bosonic_effective_state,
    is_ssr_allowed,
    phase_twirl_sample,
    project_block_diagonal,
    ssr_dephase,
)
from ssrbell.states import SplitAmplitude

from conftest import SPACES, allowed_hermitian, allowed_unitary, random_density


def test_single_particle_becomes_incoherent_mixture():
    rho = states.single_particle_split(SplitAmplitude.balanced())
    assert np.max(np.abs(ssr_dephase(rho).matrix - np.diag([0, 0.5, 0.5, 0]))) < 1e-15


def test_sector_diagonal_state_is_fixed_point(rng):
    spec = states.random_spec(rng, "distinguishable", 2, 3)
    eff = appendix_effective_state(spec)
    assert np.array_equal(ssr_dephase(eff).matrix, eff.matrix)


def test_yurke_identical_keeps_exchange_coherence():
    rho = states.yurke_state(True)
    out = ssr_dephase(rho).matrix
    idx = [rho.space.state_index(o) for o in states.YURKE_BRANCHES]
    # exchange branches (i->A, j->B) and (j->A, i->B) share a sector
    assert abs(out[idx[0], idx[1]] - 0.25) < 1e-15
    for k in (2, 3):
        for j in range(4):
            if j != k:
                assert out[idx[k], idx[j]] == 0
    assert abs(out[idx[2], idx[2]] - 0.25) < 1e-15


def test_yurke_distinct_loses_all_coherence():
    rho = states.yurke_state(False)
    out = ssr_dephase(rho).matrix
    assert np.count_nonzero(out - np.diag(np.diag(out))) == 0


def test_partition_covers_basis():
    space = states.yurke_space(True)
    blocks = DephasingMap.for_space(space).blocks
    assert sorted(np.concatenate(blocks).tolist()) == list(range(space.dim))


def test_is_ssr_allowed_cases():
    space = states.two_mode_space(1)
    n_a = number_operator(space.local_a, "A", 0)
    assert is_ssr_allowed(n_a, "A")
    coupling = Operator(space.local_a, np.array([[0, 1], [1, 0]]))
    assert not is_ssr_allowed(coupling, "A")

    local = states.ep_space().local_a
    flip = np.zeros((local.dim, local.dim))
    up, down = local.index[(1, 0)], local.index[(0, 1)]
    flip[up, down] = flip[down, up] = 1
    assert is_ssr_allowed(Operator(local, flip))


def test_is_ssr_allowed_rejects_non_hermitian():
    space = states.two_mode_space(1)
    with pytest.raises(ValueError):
        is_ssr_allowed(Operator(space.local_a, np.array([[0, 1], [0, 0]])))


def test_is_ssr_allowed_wrong_region():
    space = states.two_mode_space(1)
    with pytest.raises(ValueError):
        is_ssr_allowed(Operator(space.local_a, np.eye(2)), "B")


def test_project_block_diagonal(rng):
    space = states.two_mode_space(1)
    flip = Operator(space.local_a, np.array([[0, 1], [1, 0]]))
    assert np.array_equal(project_block_diagonal(flip).matrix, np.zeros((2, 2)))

    local = states.yurke_space(True).local_a
    allowed = allowed_hermitian(local, rng)
    assert np.array_equal(project_block_diagonal(allowed).matrix, allowed.matrix)

    h = rng.normal(size=(local.dim, local.dim))
    op = Operator(local, h + h.T)
    proj = project_block_diagonal(op)
    assert is_ssr_allowed(proj)
    assert np.array_equal(project_block_diagonal(proj).matrix, proj.matrix)
    for _ in range(5):
        x = allowed_hermitian(local, rng).matrix
        assert abs(np.trace(op.matrix @ x) - np.trace(proj.matrix @ x)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), name=st.sampled_from(sorted(SPACES)))
def test_dephasing_properties(seed, name):
    rng = np.random.default_rng(seed)
    space = SPACES[name]()
    rho = random_density(space, rng)
    d = ssr_dephase(rho)
    assert np.max(np.abs(ssr_dephase(d).matrix - d.matrix)) < 1e-12
    assert abs(np.trace(d.matrix) - 1) < 1e-12
    assert np.linalg.eigvalsh(d.matrix).min() > -1e-10

    o_a = embed_local(allowed_hermitian(space.local_a, rng), space).matrix
    o_b = embed_local(allowed_hermitian(space.local_b, rng), space).matrix
    prod = o_a @ o_b
    assert abs(np.trace(rho.matrix @ prod) - np.trace(d.matrix @ prod)) < 1e-12

    u = np.kron(allowed_unitary(space.local_a, rng), allowed_unitary(space.local_b, rng))
    rotated = DensityMatrix.from_matrix(space, u @ rho.matrix @ u.conj().T)
    lhs = ssr_dephase(rotated).matrix
    rhs = u @ d.matrix @ u.conj().T
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_appendix_one_particle():
    amp = SplitAmplitude(0.6, 0.8j)
    eff = appendix_effective_state(states.distinguishable([(1.0, [amp])]))
    assert np.allclose(eff.matrix, np.diag([0, 0.64, 0.36, 0]), atol=1e-15)


def test_appendix_all_in_a_is_pure():
    spec = states.distinguishable([(1.0, [SplitAmplitude(1, 0)] * 3)])
    eff = appendix_effective_state(spec)
    k = eff.space.state_index((1, 1, 1, 0, 0, 0))
    assert eff.matrix[k, k] == 1
    assert abs(eff.purity() - 1) < 1e-15


def test_appendix_rejects_bosonic_and_large_n():
    with pytest.raises(ValueError):
        appendix_effective_state(states.bosonic([(1.0, SplitAmplitude(1, 0), 2)]))
    big = states.distinguishable([(1.0, [SplitAmplitude(1, 0)] * 13)])
    with pytest.raises(ValueError):
        appendix_effective_state(big)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_appendix_equals_dephased_ensemble(seed):
    rng = np.random.default_rng(seed)
    spec = states.random_spec(rng, "distinguishable", int(rng.integers(1, 4)), int(rng.integers(1, 5)))
    direct = appendix_effective_state(spec).matrix
    dephased = ssr_dephase(states.ensemble_state(spec)).matrix
    assert np.max(np.abs(direct - dephased)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_bosonic_closed_form_equals_dephased_ensemble(seed):
    rng = np.random.default_rng(seed)
    spec = states.random_spec(rng, "bosonic", int(rng.integers(1, 4)), int(rng.integers(1, 5)))
    direct = bosonic_effective_state(spec).matrix
    dephased = ssr_dephase(states.ensemble_state(spec)).matrix
    assert np.max(np.abs(direct - dephased)) < 1e-12


def test_twirl_fixed_point_is_exact(rng):
    spec = states.random_spec(rng, "distinguishable", 2, 2)
    eff = appendix_effective_state(spec)
    assert np.array_equal(phase_twirl_sample(eff, 3, seed=1).matrix, eff.matrix)


def test_twirl_converges_on_single_particle():
    rho = states.single_particle_split(SplitAmplitude.balanced())
    n = 10_000
    out = phase_twirl_sample(rho, n, seed=7).matrix
    assert abs(out[1, 2]) < 3 / math.sqrt(n)


def test_twirl_is_reproducible():
    rho = states.yurke_state(True)
    a = phase_twirl_sample(rho, 500, seed=3).matrix
    b = phase_twirl_sample(rho, 500, seed=3).matrix
    assert np.array_equal(a, b)


def test_twirl_rejects_zero_samples():
    with pytest.raises(ValueError):
        phase_twirl_sample(states.yurke_state(True), 0)
