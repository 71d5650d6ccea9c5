import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pipsim.model import (
    COUPLING_STREAM,
    SystemParams,
    build_blocks,
    build_coupling_matrix,
    dephasing_rate,
    make_rng,
    validity_criteria,
)

N10 = SystemParams(10, 1.0, 0.5, 2.5e-2, seed=7)
N100 = SystemParams(100, 1.0, 0.5, 1.5e-2, seed=7)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_levels=1), dict(delta_eps=0.0), dict(delta_eps=-1.0), dict(lam=-0.1), dict(seed=-1), dict(seed=2**64)],
)
def test_params_reject_invalid(kwargs):
    base = dict(n_levels=4, delta_e=1.0, delta_eps=0.5, lam=0.1, seed=0)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SystemParams(**base)


def test_zero_coupling_is_zero_matrix():
    c = build_coupling_matrix(SystemParams(2, 1.0, 0.5, 0.0))
    assert np.array_equal(c.entries, np.zeros((2, 2)))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 200), seed=st.integers(0, 2**64 - 1))
def test_coupling_hermitian_zero_diagonal(n, seed):
    c = build_coupling_matrix(SystemParams(n, 1.0, 0.5, 0.3, seed)).entries
    assert np.array_equal(c, c.conj().T)
    assert np.all(np.diag(c) == 0)


def test_coupling_second_moment_n10():
    for seed in range(5):
        c = build_coupling_matrix(SystemParams(10, 1.0, 0.5, 2.5e-2, seed)).entries
        upper = c[np.triu_indices(10, 1)] / 2.5e-2
        assert upper.size == 45
        assert abs(np.mean(np.abs(upper) ** 2) - 1.0) < 3 / math.sqrt(45)


def test_coupling_moments_large_pool():
    p = SystemParams(200, 1.0, 0.5, 1.0, seed=11)
    c = build_coupling_matrix(p).entries[np.triu_indices(200, 1)]
    bound = 4 / math.sqrt(c.size)
    assert c.size == 19900
    assert abs(c.mean()) < bound
    assert abs(np.mean(c * c)) < bound
    assert abs(np.mean(np.abs(c) ** 2) - 1.0) < bound


def test_coupling_is_seed_deterministic():
    a = build_coupling_matrix(N10).entries
    b = build_coupling_matrix(N10).entries
    assert a.tobytes() == b.tobytes()
    other = build_coupling_matrix(N10, make_rng(N10.seed, COUPLING_STREAM, 1)).entries
    assert not np.array_equal(a, other)


def test_blocks_uncoupled_values():
    p = SystemParams(2, 1.0, 0.5, 0.0)
    blocks = build_blocks(p, build_coupling_matrix(p))
    assert np.allclose(blocks.h_plus, np.diag([0.75, 1.0]), atol=0, rtol=0)
    assert np.allclose(blocks.h_minus, np.diag([-0.25, 0.0]), atol=0, rtol=0)


def test_blocks_identity():
    c = build_coupling_matrix(N10)
    b = build_blocks(N10, c)
    diff = b.h_plus - b.h_minus - N10.delta_e * np.eye(10) - 2 * c.entries
    assert np.max(np.abs(diff)) == 0.0
    for h in (b.h_plus, b.h_minus):
        assert np.array_equal(h, h.conj().T)


def test_blocks_degenerate_qubit():
    p = SystemParams(5, 0.0, 0.5, 0.0)
    b = build_blocks(p, build_coupling_matrix(p))
    assert np.array_equal(b.h_plus, b.h_minus)
    assert np.array_equal(b.h_plus.real, np.diag(0.1 * np.arange(1, 6)))


def test_blocks_dimension_mismatch():
    with pytest.raises(ValueError):
        build_blocks(N10, build_coupling_matrix(N100))


def test_validity_criteria_paper_values():
    c1, c2 = validity_criteria(N10)
    assert c1 == pytest.approx(0.5, abs=1e-12) and c2 == pytest.approx(0.025, abs=1e-12)
    c1, c2 = validity_criteria(N100)
    assert c1 == pytest.approx(3.0, abs=1e-12) and c2 == pytest.approx(0.09, abs=1e-12)
    assert validity_criteria(SystemParams(10, 1.0, 0.5, 0.0)) == (0.0, 0.0)


def test_dephasing_rate():
    assert dephasing_rate(N10) == pytest.approx(7.8540e-2, rel=1e-4)
    assert dephasing_rate(N100) == pytest.approx(2.8274e-1, rel=1e-4)
    assert dephasing_rate(SystemParams(10, 1.0, 0.5, 0.0)) == 0.0
    assert dephasing_rate(N10) == dephasing_rate(SystemParams(10, 1.0, 0.5, 2.5e-2, seed=7))
