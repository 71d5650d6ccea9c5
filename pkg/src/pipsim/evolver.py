"""Exact propagation of the joint qubit + band pure state.

Each spin sector evolves under its own N x N block, so one Hermitian
eigendecomposition per block gives the propagator at every time:

    a_s(t) = U_s exp(-i Lambda_s t) U_s^dagger a_s(0),   s = +, -.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from pipsim.model import CouplingMatrix, HamiltonianBlocks, SystemParams, build_blocks

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class JointState:
    """Amplitudes ``a[i, n]``; row 0 is the qubit ``|+>`` sector, row 1 ``|->``."""

    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def n_levels(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def propagate(self, vec: np.ndarray, t: float) -> np.ndarray:
        u = self.eigenvectors
        return u @ (np.exp(-1j * self.eigenvalues * t) * (u.conj().T @ vec))


def initial_state(params: SystemParams) -> JointState:
    """Qubit in (|+> + |->)/sqrt(2), band in the uniform superposition."""
    n = params.n_levels
    amps = np.full((2, n), 1.0 / np.sqrt(2.0 * n), dtype=complex)
    return JointState(amps, 0.0)


def diagonalize(block: np.ndarray) -> SpectralDecomposition:
    """Eigendecompose a Hermitian block (eigenvalues ascending).

    Degenerate eigenvalues are harmless: the propagator does not depend on the
    basis chosen inside a degenerate subspace.
    """
    block = np.asarray(block)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {block.shape}")
    if np.max(np.abs(block - block.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("block is not Hermitian within 1e-12")
    try:
        w, v = np.linalg.eigh(block)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigendecomposition did not converge: {exc}") from exc
    return SpectralDecomposition(w, v)


class Propagator:
    """Cached spectral propagator for a pair of Hamiltonian blocks."""

    def __init__(self, blocks: HamiltonianBlocks):
        self.blocks = blocks
        self.plus = diagonalize(blocks.h_plus)
        self.minus = diagonalize(blocks.h_minus)

    @property
    def n_levels(self) -> int:
        return self.blocks.n_levels

    def __call__(self, state0: JointState, t: float) -> JointState:
        if state0.amplitudes.shape != (2, self.n_levels):
            raise ValueError(
                f"state has shape {state0.amplitudes.shape}, expected (2, {self.n_levels})"
            )
        if t == 0:
            return JointState(state0.amplitudes.copy(), state0.time)
        amps = np.empty_like(state0.amplitudes, dtype=complex)
        amps[0] = self.plus.propagate(state0.amplitudes[0], t)
        amps[1] = self.minus.propagate(state0.amplitudes[1], t)
        return JointState(amps, state0.time + t)

    def energy(self, state: JointState) -> float:
        a = state.amplitudes
        e = a[0].conj() @ self.blocks.h_plus @ a[0] + a[1].conj() @ self.blocks.h_minus @ a[1]
        return float(e.real)


def evolve(blocks: HamiltonianBlocks, state0: JointState, t: float) -> JointState:
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return Propagator(blocks)(state0, t)


def trajectory(
    params: SystemParams, coupling: CouplingMatrix, times: Sequence[float]
) -> list[JointState]:
    """States at each of ``times``, all from one cached decomposition."""
    times = [float(t) for t in times]
    if not times:
        raise ValueError("times must be non-empty")
    if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be non-negative and strictly ascending")
    prop = Propagator(build_blocks(params, coupling))
    psi0 = initial_state(params)
    return [prop(psi0, t) for t in times]
