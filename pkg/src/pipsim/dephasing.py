"""Closed-form pure-dephasing master equation for the qubit.

    d rho/dt = -i [H_S, rho] + Gamma (sz rho sz - rho),   H_S = (dE/2) sz

Populations are constants of motion; the coherence obeys
``d rho_12/dt = -(i dE + 2 Gamma) rho_12`` and therefore
``rho_12(t) = rho_12(0) exp(-i dE t) exp(-2 Gamma t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from pipsim.infotheory import spectrum_entropy
from pipsim.model import SystemParams, dephasing_rate


@dataclass(frozen=True)
class MasterPrediction:
    time: float
    coherence: complex
    entropy: float


def master_coherence(params: SystemParams, rho12_initial: complex, t: float) -> complex:
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    gamma = dephasing_rate(params)
    return complex(rho12_initial) * complex(np.exp(-1j * params.delta_e * t - 2.0 * gamma * t))


def master_entropy(params: SystemParams, rho12_initial: complex, t: float, base=2) -> float:
    """Entropy of diag(1/2, 1/2) with the predicted coherence (eigenvalues 1/2 +- |rho_12|)."""
    r = abs(master_coherence(params, rho12_initial, t))
    return spectrum_entropy(np.array([0.5 + r, 0.5 - r]), base)


def master_prediction(params: SystemParams, rho12_initial: complex, t: float, base=2) -> MasterPrediction:
    return MasterPrediction(
        t,
        master_coherence(params, rho12_initial, t),
        master_entropy(params, rho12_initial, t, base),
    )


def fit_decay_rate(times: Sequence[float], coherence_magnitudes: Sequence[float]) -> float:
    """Empirical Gamma from a least-squares line through ``ln|rho_12|`` vs ``t``.

    The slope is negated and halved, matching ``|rho_12| ~ exp(-2 Gamma t)``.
    """
    t = np.asarray(times, dtype=float)
    m = np.asarray(coherence_magnitudes, dtype=float)
    if t.shape != m.shape or t.ndim != 1:
        raise ValueError("times and magnitudes must be 1-d and equally long")
    if t.size < 5:
        raise ValueError(f"need at least 5 samples, got {t.size}")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly ascending")
    if np.any(m <= 1e-6):
        raise ValueError("coherence magnitudes must exceed 1e-6 (noise floor)")
    slope = np.polyfit(t, np.log(m), 1)[0]
    return -0.5 * float(slope)
