"""Model construction: parameters, random band coupling, Hamiltonian blocks.

The total Hamiltonian ``H = (dE/2) sz + H_E + sz (x) C`` commutes with
``sz (x) 1``, so it splits into two N x N blocks acting on the band,

    H_+ = +dE/2 + H_E + C,    H_- = -dE/2 + H_E - C,

with ``H_E = diag(delta_eps / N * n)`` for ``n = 1..N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Stream tags for SeedSequence spawn keys; keep stable, they define the seeds.
COUPLING_STREAM = 0
FRAGMENT_STREAM = 1


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a PCG64 generator for ``(seed, *key)``.

    Distinct keys give statistically independent streams (numpy
    ``SeedSequence`` spawning), and the mapping is stable across platforms.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SystemParams:
    n_levels: int
    delta_e: float
    delta_eps: float
    lam: float
    seed: int = 0

    def __post_init__(self):
        if int(self.n_levels) != self.n_levels or self.n_levels < 2:
            raise ValueError(f"n_levels must be an integer >= 2, got {self.n_levels!r}")
        if not self.delta_eps > 0:
            raise ValueError(f"delta_eps must be > 0, got {self.delta_eps!r}")
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if not math.isfinite(self.delta_e):
            raise ValueError(f"delta_e must be finite, got {self.delta_e!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def band_energies(self) -> np.ndarray:
        n = np.arange(1, self.n_levels + 1, dtype=float)
        return self.delta_eps / self.n_levels * n


@dataclass(frozen=True)
class CouplingMatrix:
    """Hermitian N x N coupling operator with zero diagonal (lambda folded in)."""

    entries: np.ndarray

    @property
    def n_levels(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class HamiltonianBlocks:
    h_plus: np.ndarray
    h_minus: np.ndarray

    @property
    def n_levels(self) -> int:
        return self.h_plus.shape[0]


def build_coupling_matrix(params: SystemParams, rng: np.random.Generator | None = None) -> CouplingMatrix:
    """Draw the coupling matrix ``C``.

    Upper-triangle pairs ``n1 < n2`` are visited in row-major order; for each
    pair two standard normals ``(x, y)`` are drawn and
    ``c = (x + i y) / sqrt(2)``, giving ``<c> = 0``, ``<c c> = 0`` and
    ``<c c*> = 1``. The lower triangle is the exact conjugate mirror.

    If ``rng`` is omitted, the coupling stream of realization 0 derived from
    ``params.seed`` is used.
    """
    if rng is None:
        rng = make_rng(params.seed, COUPLING_STREAM, 0)
    n = params.n_levels
    rows, cols = np.triu_indices(n, k=1)
    z = rng.standard_normal((rows.size, 2))
    c = (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)
    entries = np.zeros((n, n), dtype=complex)
    entries[rows, cols] = params.lam * c
    entries[cols, rows] = np.conj(entries[rows, cols])
    return CouplingMatrix(entries)


def build_blocks(params: SystemParams, coupling: CouplingMatrix) -> HamiltonianBlocks:
    n = params.n_levels
    if coupling.entries.shape != (n, n):
        raise ValueError(
            f"coupling has shape {coupling.entries.shape}, expected ({n}, {n})"
        )
    h_env = np.diag(params.band_energies).astype(complex)
    shift = 0.5 * params.delta_e * np.eye(n)
    return HamiltonianBlocks(
        h_plus=shift + h_env + coupling.entries,
        h_minus=-shift + h_env - coupling.entries,
    )


def validity_criteria(params: SystemParams) -> tuple[float, float]:
    """Return ``(c1, c2) = (lam N / delta_eps, lam^2 N / delta_eps^2)``.

    The master-equation limit needs ``c1 >= 1/2`` and ``c2 << 1``.
    """
    n, lam, de = params.n_levels, params.lam, params.delta_eps
    return lam * n / de, lam**2 * n / de**2


def dephasing_rate(params: SystemParams) -> float:
    """``Gamma = 2 pi lam^2 N / delta_eps``; coherences decay as exp(-2 Gamma t)."""
    return 2.0 * math.pi * params.lam**2 * params.n_levels / params.delta_eps
