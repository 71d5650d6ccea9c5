import numpy as np
import pytest
from scipy.linalg import expm

from pipsim.evolver import Propagator, diagonalize, evolve, initial_state, trajectory
from pipsim.model import SystemParams, build_blocks, build_coupling_matrix
from pipsim.reduction import reduce_system

P10 = SystemParams(10, 1.0, 0.5, 2.5e-2, seed=3)


def dense_hamiltonian(params, coupling):
    """Full 2N x 2N H in qubit-major ordering, |+> (sz=+1) first."""
    n = params.n_levels
    sz = np.diag([1.0, -1.0])
    h_env = np.diag(params.delta_eps / n * np.arange(1, n + 1))
    return (
        np.kron(0.5 * params.delta_e * sz, np.eye(n))
        + np.kron(np.eye(2), h_env)
        + np.kron(sz, coupling.entries)
    )


def test_initial_state():
    assert np.allclose(initial_state(SystemParams(2, 1.0, 0.5, 0.1)).amplitudes, 0.5)
    psi = initial_state(P10)
    assert np.allclose(psi.amplitudes, 1 / np.sqrt(20))
    assert psi.norm() == pytest.approx(1.0, abs=1e-15)
    assert psi.time == 0.0


def test_diagonalize_simple():
    d = diagonalize(np.diag([0.75, 1.0]))
    assert np.allclose(d.eigenvalues, [0.75, 1.0])
    assert np.allclose(np.abs(d.eigenvectors), np.eye(2))
    assert np.allclose(diagonalize(np.array([[0.0, 1.0], [1.0, 0.0]])).eigenvalues, [-1.0, 1.0])


def test_diagonalize_reconstruction():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    h = x + x.conj().T
    d = diagonalize(h)
    u = d.eigenvectors
    assert np.all(np.diff(d.eigenvalues) >= 0)
    assert np.max(np.abs(u @ np.diag(d.eigenvalues) @ u.conj().T - h)) < 1e-10 * np.max(np.abs(h))
    assert np.max(np.abs(u.conj().T @ u - np.eye(10))) < 1e-10


def test_diagonalize_rejects_non_hermitian():
    with pytest.raises(ValueError):
        diagonalize(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_evolve_t0_identity():
    blocks = build_blocks(P10, build_coupling_matrix(P10))
    psi = initial_state(P10)
    assert np.allclose(evolve(blocks, psi, 0.0).amplitudes, psi.amplitudes, atol=1e-14)


def test_uncoupled_phases():
    p = SystemParams(6, 1.0, 0.5, 0.0)
    blocks = build_blocks(p, build_coupling_matrix(p))
    t = 3.7
    out = evolve(blocks, initial_state(p), t).amplitudes
    n = np.arange(1, 7)
    a0 = 1 / np.sqrt(12)
    env = np.exp(-1j * 0.5 / 6 * n * t)
    expected = np.array([np.exp(-0.5j * t) * env * a0, np.exp(0.5j * t) * env * a0])
    assert np.allclose(out, expected, atol=1e-13)
    assert abs(reduce_system(evolve(blocks, initial_state(p), t))[0, 1]) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", [4, 10, 20])
def test_block_evolution_matches_dense(n):
    p = SystemParams(n, 1.0, 0.5, 0.05, seed=n)
    c = build_coupling_matrix(p)
    prop = Propagator(build_blocks(p, c))
    h = dense_hamiltonian(p, c)
    psi0 = initial_state(p)
    for t in np.random.default_rng(n).uniform(0, 30, size=5):
        dense = (expm(-1j * h * t) @ psi0.amplitudes.reshape(-1)).reshape(2, n)
        assert np.max(np.abs(prop(psi0, t).amplitudes - dense)) < 1e-9


def test_semigroup():
    blocks = build_blocks(P10, build_coupling_matrix(P10))
    prop = Propagator(blocks)
    psi0 = initial_state(P10)
    direct = prop(psi0, 7.5).amplitudes
    composed = prop(prop(psi0, 3.0), 4.5)
    assert composed.time == pytest.approx(7.5)
    assert np.max(np.abs(composed.amplitudes - direct)) < 1e-9


def test_unitarity_energy_populations():
    c = build_coupling_matrix(P10)
    prop = Propagator(build_blocks(P10, c))
    psi0 = initial_state(P10)
    e0 = prop.energy(psi0)
    for t in np.linspace(0, 100, 51):
        psi = prop(psi0, t)
        assert abs(psi.norm() ** 2 - 1) < 1e-10
        assert abs(prop.energy(psi) - e0) < 1e-9 * abs(e0)
        assert np.allclose(np.diag(reduce_system(psi)).real, 0.5, atol=1e-10)


def test_trajectory():
    c = build_coupling_matrix(P10)
    states = trajectory(P10, c, [0.0])
    assert np.array_equal(states[0].amplitudes, initial_state(P10).amplitudes)
    states = trajectory(P10, c, [5.0, 7.0, 10.0])
    assert [s.time for s in states] == [5.0, 7.0, 10.0]
    assert all(abs(s.norm() - 1) < 1e-10 for s in states)


@pytest.mark.parametrize("times", [[], [1.0, 1.0], [2.0, 1.0], [-1.0, 0.0]])
def test_trajectory_rejects_bad_times(times):
    with pytest.raises(ValueError):
        trajectory(P10, build_coupling_matrix(P10), times)
