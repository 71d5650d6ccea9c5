"""Entropies, qubit-fragment mutual information and averaged PIP curves.

Entropies use the standard sign, ``S = -sum_k p_k log p_k``, in bits by
default. Two mutual-information conventions are offered:

``paper``
    ``I = S_S + S_F`` with ``S_S`` from the full joint state and ``S_F``
    from the renormalized fragment state.
``pure_bipartite``
    ``I = 2 S_F``: the fragment-conditioned state is pure, so its qubit and
    fragment marginals share one spectrum.

Both drop ``S_SF``, which is zero because the conditioned state is pure. They
agree when the fragment is the whole band, where ``I = 2 S_S``. Averages over
fragments of a given size need not be symmetric under complementing ``F``,
and single fragments need not be monotone in size.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from pipsim.evolver import JointState
from pipsim.model import FRAGMENT_STREAM, make_rng
from pipsim.reduction import (
    WEIGHT_FLOOR,
    DegenerateFragmentError,
    Fragment,
    clamp_spectrum,
    fragment_projection,
    reduce_fragment,
    reduce_system,
)

CONVENTIONS = ("paper", "pure_bipartite")
_CHUNK = 4096


class EnumerationCapError(ValueError):
    """Too many subsets to enumerate; sample instead."""


def _log_factor(base) -> float:
    if base == 2:
        return math.log(2.0)
    if base in ("e", "natural", math.e):
        return 1.0
    raise ValueError(f"base must be 2 or 'e', got {base!r}")


def spectrum_entropy(eigenvalues, base=2) -> float:
    p = clamp_spectrum(eigenvalues)
    p = p[p > 0.0]
    # eigenvalues rounding to 1 + eps would give -eps
    return max(0.0, float(-np.sum(p * np.log(p)) / _log_factor(base)))


def entropy(rho: np.ndarray, base=2) -> float:
    """Von Neumann entropy of a density matrix (``0 log 0 = 0``)."""
    return spectrum_entropy(np.linalg.eigvalsh(np.asarray(rho)), base)


def _check_convention(convention: str) -> str:
    convention = convention.replace("-", "_")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return convention


def mutual_information(
    state: JointState, fragment: Fragment, base=2, convention: str = "paper"
) -> float:
    """I(S:F) for one fragment, through the explicit ``n_F x n_F`` ``rho_F``."""
    convention = _check_convention(convention)
    conditioned, _ = fragment_projection(state, fragment)
    s_frag = entropy(reduce_fragment(conditioned), base)
    if convention == "paper":
        return entropy(reduce_system(state), base) + s_frag
    return 2.0 * s_frag


def enumerate_fragments(
    n_levels: int, n_fragment: int, cap: int = 100_000
) -> Iterator[Fragment]:
    """All ``n_fragment``-subsets of ``1..n_levels`` in lexicographic order."""
    _check_size(n_levels, n_fragment)
    total = math.comb(n_levels, n_fragment)
    if total > cap:
        raise EnumerationCapError(
            f"C({n_levels}, {n_fragment}) = {total:.3g} exceeds enumeration cap {cap}"
        )
    for combo in itertools.combinations(range(1, n_levels + 1), n_fragment):
        yield Fragment(combo)


def _check_size(n_levels: int, n_fragment: int) -> None:
    if not 1 <= n_fragment <= n_levels:
        raise ValueError(f"need 1 <= n_fragment <= {n_levels}, got {n_fragment}")


def _sample_indices(n_levels: int, n_fragment: int, rng: np.random.Generator, count: int) -> np.ndarray:
    # First n_F entries of a uniform random permutation, sorted per row.
    keys = rng.random((count, n_levels))
    idx = np.argsort(keys, axis=1, kind="stable")[:, :n_fragment]
    return np.sort(idx, axis=1)


def sample_fragments(
    n_levels: int, n_fragment: int, rng: np.random.Generator, count: int
) -> list[Fragment]:
    """``count`` independent uniform draws from the ``n_fragment``-subsets."""
    _check_size(n_levels, n_fragment)
    return [Fragment(row + 1) for row in _sample_indices(n_levels, n_fragment, rng, count)]


@dataclass(frozen=True)
class PipConfig:
    convention: str = "paper"
    base: object = 2
    enumeration_cap: int = 100_000
    batch_size: int = 200
    stderr_tol: float = 1e-3
    max_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "convention", _check_convention(self.convention))
        _log_factor(self.base)
        for name in ("enumeration_cap", "batch_size", "max_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.stderr_tol > 0:
            raise ValueError("stderr_tol must be > 0")


@dataclass(frozen=True)
class PipPoint:
    n_fragment: int
    fraction: float
    mean_mi: float
    stderr: float
    n_samples: int
    method: str


@dataclass(frozen=True)
class PipCurve:
    time: float
    ceiling: float
    convention: str
    points: list[PipPoint] = field(default_factory=list)

    @property
    def fractions(self) -> np.ndarray:
        return np.array([p.fraction for p in self.points])

    @property
    def means(self) -> np.ndarray:
        return np.array([p.mean_mi for p in self.points])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])

    def first_fraction_reaching(self, level: float) -> float:
        """Smallest fraction whose mean reaches ``level * ceiling``."""
        for p in self.points:
            if p.mean_mi >= level * self.ceiling:
                return p.fraction
        return math.nan


class _FragmentEvaluator:
    """Vectorized fragment entropies for one joint state.

    The nonzero spectrum of ``rho_F`` equals that of the 2 x 2 qubit marginal
    of the conditioned pure state, which only needs three band sums.
    """

    def __init__(self, state: JointState, base):
        a = state.amplitudes
        self.time = state.time
        self.pp = np.abs(a[0]) ** 2
        self.mm = np.abs(a[1]) ** 2
        self.pm = a[0] * np.conj(a[1])
        self.log_factor = _log_factor(base)

    def entropies(self, idx: np.ndarray) -> np.ndarray:
        g_pp = self.pp[idx].sum(axis=1)
        g_mm = self.mm[idx].sum(axis=1)
        g_pm = self.pm[idx].sum(axis=1)
        weight = g_pp + g_mm
        bad = np.flatnonzero(weight < WEIGHT_FLOOR)
        if bad.size:
            levels = tuple(int(n) + 1 for n in idx[bad[0]])
            raise DegenerateFragmentError(
                f"fragment {levels} carries weight {weight[bad[0]]:.3e} at t={self.time:g}"
            )
        half_gap = np.hypot(0.5 * (g_pp - g_mm) / weight, np.abs(g_pm) / weight)
        lam = clamp_spectrum(np.concatenate([0.5 + half_gap, 0.5 - half_gap]))
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(lam > 0.0, -lam * np.log(lam), 0.0)
        k = idx.shape[0]
        return np.maximum(terms[:k] + terms[k:], 0.0) / self.log_factor


def _combination_chunks(n_levels: int, n_fragment: int) -> Iterator[np.ndarray]:
    combos = itertools.combinations(range(n_levels), n_fragment)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.intp)


def pip_point(
    state: JointState,
    n_fragment: int,
    config: PipConfig = PipConfig(),
    *,
    t_index: int = 0,
    _evaluator: _FragmentEvaluator | None = None,
    _s_system: float | None = None,
) -> PipPoint:
    """Average I(S:F) over fragments of size ``n_fragment``.

    Exact enumeration when ``C(N, n_F) <= enumeration_cap``; otherwise
    Monte Carlo in batches until the standard error drops below
    ``stderr_tol`` or ``max_samples`` is reached. Batch ``b`` draws from the
    stream ``(seed, FRAGMENT_STREAM, t_index, n_F, b)``, so results do not
    depend on evaluation order.
    """
    n = state.n_levels
    _check_size(n, n_fragment)
    ev = _evaluator or _FragmentEvaluator(state, config.base)
    if _s_system is None:
        _s_system = entropy(reduce_system(state), config.base)

    def info(idx):
        s_frag = ev.entropies(idx)
        if config.convention == "paper":
            return _s_system + s_frag
        return 2.0 * s_frag

    fraction = n_fragment / n
    if math.comb(n, n_fragment) <= config.enumeration_cap:
        values = np.concatenate([info(c) for c in _combination_chunks(n, n_fragment)])
        return PipPoint(n_fragment, fraction, float(values.mean()), 0.0, values.size, "exact")

    chunks: list[np.ndarray] = []
    n_samples = 0
    batch = 0
    stderr = math.inf
    while n_samples < config.max_samples:
        size = min(config.batch_size, config.max_samples - n_samples)
        rng = make_rng(config.seed, FRAGMENT_STREAM, t_index, n_fragment, batch)
        chunks.append(info(_sample_indices(n, n_fragment, rng, size)))
        n_samples += size
        batch += 1
        if n_samples >= 2:
            values = np.concatenate(chunks)
            stderr = float(values.std(ddof=1) / math.sqrt(n_samples))
            if stderr < config.stderr_tol:
                break
    values = np.concatenate(chunks)
    return PipPoint(n_fragment, fraction, float(values.mean()), stderr, n_samples, "monte_carlo")


def pip_curve(
    state: JointState, config: PipConfig = PipConfig(), *, t_index: int = 0, threads: int = 1
) -> PipCurve:
    """Averaged mutual information for ``n_F = 1..N`` plus the ``2 S_S`` ceiling."""
    s_system = entropy(reduce_system(state), config.base)
    ev = _FragmentEvaluator(state, config.base)

    def point(k):
        return pip_point(state, k, config, t_index=t_index, _evaluator=ev, _s_system=s_system)

    sizes = range(1, state.n_levels + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(point, sizes))
    else:
        points = [point(k) for k in sizes]
    return PipCurve(state.time, 2.0 * s_system, config.convention, points)
