import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from graphtest.kernels import KernelSpec, PooledSample, kernel_distance, pairwise_matrix
from oracles import naive_distance

FAMILIES = list(KernelSpec)
finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("family", FAMILIES)
def test_identity_is_zero(family):
    assert kernel_distance([1.5, -2], [1.5, -2], family) == 0.0


def test_lin_by_hand():
    assert kernel_distance([0, 0], [2, 4], "lin") == 3.0


def test_log1p_by_hand():
    assert kernel_distance([0], [math.e - 1], "log1p") == pytest.approx(1.0, rel=1e-15)


def test_euclid_scaled_by_hand():
    assert kernel_distance([0, 0, 0, 0], [1, 1, 1, 1], "euclid_scaled") == 1.0


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        kernel_distance([0, 0], [0, 0, 0], "lin")


def test_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        kernel_distance([0, np.nan], [0, 0], "lin")
    with pytest.raises(ValueError, match="non-finite"):
        pairwise_matrix(np.array([[0.0], [np.inf], [1.0]]), "lin")


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown kernel"):
        kernel_distance([0], [1], "cosine")


@pytest.mark.parametrize("family", FAMILIES)
def test_pairwise_identical_points(family):
    dm = pairwise_matrix(np.ones((3, 5)), family)
    assert np.array_equal(dm.values, np.zeros((3, 3)))


def test_pairwise_by_hand():
    dm = pairwise_matrix(np.array([[0.0], [0.0], [2.0]]), "lin").values
    assert dm[0, 1] == 0 and dm[0, 2] == 2 and dm[1, 2] == 2


def test_pooled_sample_invariants():
    with pytest.raises(ValueError):
        PooledSample(np.zeros((2, 3)), 1, 1)
    with pytest.raises(ValueError):
        PooledSample(np.zeros((3, 3)), 3, 0)
    z = PooledSample.from_samples(np.zeros((2, 4)), np.ones((3, 4)))
    assert (z.m, z.n, z.N, z.d) == (2, 3, 5, 4)


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(3, 7), st.integers(1, 9)), elements=finite),
       st.sampled_from(FAMILIES))
def test_matrix_entries_match_single_pair_and_reference(pts, family):
    dm = pairwise_matrix(pts, family).values
    assert np.array_equal(dm, dm.T)
    assert np.all(np.diag(dm) == 0)
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i != j:
                assert dm[i, j] == kernel_distance(pts[i], pts[j], family)
                assert dm[i, j] == pytest.approx(naive_distance(pts[i], pts[j], family.value), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12).flatmap(lambda d: st.tuples(*[arrays(float, d, elements=finite)] * 3)),
       st.sampled_from(FAMILIES))
def test_symmetry_and_triangle_inequality(triple, family):
    u, v, w = triple
    assert kernel_distance(u, v, family) == kernel_distance(v, u, family)
    uv, uw, wv = kernel_distance(u, v, family), kernel_distance(u, w, family), kernel_distance(w, v, family)
    assert uv <= (uw + wv) * (1 + 1e-9) + 1e-300


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10).flatmap(lambda d: st.tuples(arrays(float, d, elements=st.floats(-1e6, 1e6)),
                                                        arrays(float, d, elements=st.floats(-1e6, 1e6)))))
def test_expneg_is_bounded(pair):
    val = kernel_distance(pair[0], pair[1], "expneg")
    assert 0.0 <= val <= 1.0
    # strictly below one whenever some coordinate difference is moderate
    if np.min(np.abs(pair[0] - pair[1])) < 30:
        assert val < 1.0


def test_concentration_of_scaled_euclidean_distance():
    rng = np.random.default_rng(2024)
    d = 4096
    vals = [kernel_distance(rng.standard_normal(d), rng.standard_normal(d), "euclid_scaled") for _ in range(200)]
    assert abs(np.mean(vals) - math.sqrt(2)) <= 0.02 * math.sqrt(2)
    assert np.std(vals) < 0.05


def test_large_dimension_summation_is_accurate():
    # pairwise summation: error stays near machine precision for d = 10**5
    d = 100_000
    u = np.zeros(d)
    v = np.full(d, 0.1)
    assert kernel_distance(u, v, "lin") == pytest.approx(0.1, rel=1e-13)
