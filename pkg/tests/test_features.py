import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from cifa.cobe import CobeConfig, cobe
from cifa.errors import SeparatorFailure
from cifa.experiments import cnfe_run, xray_scenario
from cifa.features import AmuseSeparator, cnfe, cnfe_relative_error, linked_bss, split
from cifa.multiblock import SyntheticSpec, generate_synthetic, make_rng
from cifa.preprocess import OrthoFactor, preprocess
from oracles import leading_vector, max_angle, orth, pearson


@pytest.fixture
def exact_split(exact_fixture):
    data, truth = exact_fixture
    factors = preprocess(data)
    basis = cobe(factors, CobeConfig())
    return factors, split(factors, basis), truth


def test_split_invariants(exact_split):
    factors, dec, truth = exact_split
    a = dec.common_basis
    for n, fac in enumerate(factors):
        y = fac.cleaned
        assert np.linalg.norm(dec.common_coeffs[n] - y.T @ a) < 1e-8
        assert np.linalg.norm(y - dec.common_space[n] - dec.individual_space[n]) < 1e-8
        assert np.linalg.norm(a.T @ dec.individual_space[n]) < 1e-8
        assert np.linalg.norm(a.T @ dec.individual_basis[n]) < 1e-6
        assert max_angle(dec.individual_basis[n], truth.individual_bases[n]) < 1e-6


def test_split_full_rank_common():
    q = orth(make_rng(0).standard_normal((20, 3)))
    fac = OrthoFactor(q, make_rng(1).standard_normal((3, 6)))
    dec = split([fac, fac], q)
    assert all(np.linalg.norm(r) < 1e-8 for r in dec.individual_space)
    assert dec.empty_individual == (0, 1)


def test_split_no_common(exact_fixture):
    data, _ = exact_fixture
    factors = preprocess(data)
    dec = split(factors, np.zeros((200, 0)))
    for fac, common, indiv in zip(factors, dec.common_space, dec.individual_space):
        assert not common.any()
        assert np.array_equal(indiv, fac.cleaned)


def _two_sinusoids(t=1000):
    n = np.arange(t)
    return np.column_stack([np.sin(2 * np.pi * n / 17.0), np.sin(2 * np.pi * n / 5.0)])


def _matched_corr(s, est):
    c = np.abs(np.corrcoef(s.T, est.T)[: s.shape[1], s.shape[1]:])
    r, k = linear_sum_assignment(-c)
    return c[r, k]


def test_linked_bss_recovers_sinusoids():
    s = _two_sinusoids()
    a_bar = orth(s @ make_rng(2).standard_normal((2, 2)))
    assert _matched_corr(s, linked_bss(a_bar)).min() > 0.99


def test_linked_bss_single_column():
    a = orth(make_rng(3).standard_normal((50, 1)))
    assert np.array_equal(linked_bss(a), a)


def test_linked_bss_identical_autocovariance():
    n = np.arange(1000)
    s = np.column_stack([np.sin(2 * np.pi * n / 17.0), np.cos(2 * np.pi * n / 17.0)])
    with pytest.raises(SeparatorFailure):
        linked_bss(orth(s @ make_rng(4).standard_normal((2, 2))), AmuseSeparator(gap_tol=1e-3))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_linked_bss_permutation_scaling(seed):
    rng = make_rng(seed)
    s = _two_sinusoids()
    mix = rng.standard_normal((2, 2))
    perm = rng.permutation(2)
    scale = rng.uniform(0.1, 10, 2)
    first = linked_bss(orth(s @ mix))
    second = linked_bss(orth((s[:, perm] * scale) @ mix))
    assert _matched_corr(first, second).min() > 0.99


def test_cnfe_xray_reconstruction():
    out = cnfe_run(seed=0)
    assert out["c"] == 2
    assert out["rel_error"] < 1e-3
    assert out["min_entry"] >= 0


def test_cnfe_multiplicative_recovers_images():
    out = cnfe_run(seed=1, nonnegative_mixing=True, max_iter=5000)
    assert out["rel_error"] < 1e-3
    assert out["source_error"] < 1e-3


def test_cnfe_rank_one_positive():
    rng = make_rng(5)
    s = rng.uniform(0.5, 1.5, size=(60, 2))
    blocks = [s @ rng.uniform(size=(2, 8)) + 0.0 for _ in range(3)]
    factors = preprocess(blocks, 2)
    dec = split(factors, cobe(factors, CobeConfig(epsilon=1e-8)))
    res = cnfe(dec, 1, seed=0)
    lead = leading_vector(np.hstack([dec.common_basis @ b.T for b in dec.common_coeffs]))
    assert abs(pearson(res.f_bar[:, 0], lead)) > 0.99


def test_cnfe_zero_common_space():
    rng = make_rng(6)
    a = np.eye(30)[:, :2]
    y = rng.standard_normal((30, 5))
    y[:2] = 0.0
    q = orth(y)
    fac = OrthoFactor(q, q.T @ y)
    dec = split([fac, fac], a)
    assert not any(b.any() for b in dec.common_coeffs)
    for mixing in (False, True):
        res = cnfe(dec, 2, seed=1, nonnegative_mixing=mixing)
        assert res.objective_trace[-1] == pytest.approx(0.0, abs=1e-20)
        assert all(np.abs(m).max() < 1e-12 for m in res.m_bars)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.booleans(), st.integers(1, 60))
def test_cnfe_monotone_and_nonnegative(seed, mixing, iters):
    data, _ = xray_scenario(seed)
    factors = preprocess(data, 10)
    dec = split(factors, cobe(factors, CobeConfig(epsilon=1e-8)))
    res = cnfe(dec, 2, max_iter=iters, seed=seed, nonnegative_mixing=mixing)
    trace = np.array(res.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9 * max(trace[0], 1.0))
    assert res.f_bar.min() >= 0
    if mixing:
        assert all(m.min() >= 0 for m in res.m_bars)


def test_cnfe_rank_argument(exact_split):
    _, dec, _ = exact_split
    with pytest.raises(ValueError):
        cnfe(dec, 4)
    res = cnfe(dec, 3, max_iter=5)
    assert cnfe_relative_error(dec, res) >= 0
