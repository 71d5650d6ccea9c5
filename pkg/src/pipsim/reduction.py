"""Reduced and conditioned density matrices.

The band is a single quantum system, so a fragment ``F`` of levels is a
direct-sum block of its Hilbert space, not a tensor factor. Restricting the
joint state to ``F`` and renormalizing gives a pure state ``|Psi_SF>``;
``rho_F`` is its partial trace over the qubit. ``rho_SF`` itself is never
built as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from pipsim.evolver import JointState

DENSITY_TOL = 1e-10
CLAMP_TOL = 1e-10
WEIGHT_FLOOR = 1e-12


class DegenerateFragmentError(ValueError):
    """The joint state has (numerically) no support on the fragment."""


class PositivityError(ValueError):
    """A density-matrix eigenvalue is more negative than the clamp tolerance."""


@dataclass(frozen=True)
class Fragment:
    """Subset of band levels, 1-based and strictly ascending."""

    levels: tuple[int, ...]

    def __init__(self, levels: Iterable[int]):
        object.__setattr__(self, "levels", tuple(int(n) for n in levels))
        if not self.levels:
            raise ValueError("fragment must be non-empty")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"fragment levels must be strictly ascending: {self.levels}")
        if self.levels[0] < 1:
            raise ValueError(f"fragment levels are 1-based: {self.levels}")

    def __len__(self) -> int:
        return len(self.levels)

    def check(self, n_levels: int) -> None:
        if self.levels[-1] > n_levels:
            raise ValueError(f"fragment {self.levels} exceeds band size {n_levels}")

    @property
    def indices(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.intp) - 1

    @classmethod
    def full(cls, n_levels: int) -> "Fragment":
        return cls(range(1, n_levels + 1))


def clamp_spectrum(eigenvalues: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues in ``[-1e-10, 0)``; anything more negative raises."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size and eigenvalues.min() < -CLAMP_TOL:
        raise PositivityError(f"eigenvalue {eigenvalues.min():.3e} below -{CLAMP_TOL}")
    return np.where(eigenvalues < 0.0, 0.0, eigenvalues)


def check_density_matrix(rho: np.ndarray, tol: float = DENSITY_TOL) -> np.ndarray:
    """Raise unless ``rho`` is Hermitian, unit-trace and PSD within ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T), initial=0.0)
    if herm > tol:
        raise ValueError(f"density matrix not Hermitian (deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr.real:.12g} != 1")
    lowest = np.linalg.eigvalsh(rho).min()
    if lowest < -tol:
        raise PositivityError(f"density matrix eigenvalue {lowest:.3e} < 0")
    return rho


def reduce_system(state: JointState) -> np.ndarray:
    """``rho_S[i, j] = sum_n a[i, n] conj(a[j, n])``."""
    a = state.amplitudes
    return a @ a.conj().T


def fragment_projection(state: JointState, fragment: Fragment) -> tuple[np.ndarray, float]:
    """Restrict the state to ``fragment`` and renormalize.

    Returns the conditioned ``2 x n_F`` amplitude table and the weight
    ``N_F = sum_{i, n in F} |a[i, n]|^2`` that was divided out.
    """
    fragment.check(state.n_levels)
    sub = state.amplitudes[:, fragment.indices]
    weight = float(np.sum(np.abs(sub) ** 2))
    if weight < WEIGHT_FLOOR:
        raise DegenerateFragmentError(
            f"fragment {fragment.levels} carries weight {weight:.3e} at t={state.time:g}"
        )
    return sub / np.sqrt(weight), weight


def reduce_fragment(conditioned: np.ndarray) -> np.ndarray:
    """``rho_F[n, m] = sum_i b[i, n] conj(b[i, m])``; rank is at most 2."""
    b = np.asarray(conditioned)
    return b.T @ b.conj()


def pure_state_rho(conditioned: np.ndarray) -> np.ndarray:
    """Dense ``rho_SF = |Psi_SF><Psi_SF|`` (qubit-major ordering); for checks only."""
    v = np.asarray(conditioned).reshape(-1)
    return np.outer(v, v.conj())


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))
