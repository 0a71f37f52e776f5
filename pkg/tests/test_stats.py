from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphtest.graphs import knn_digraph, knn_graph_edges, min_weight_matching, mst, shp
from graphtest.kernels import pairwise_matrix
from graphtest.stats import (
    CFForm,
    LabelVector,
    StatName,
    cf_counts,
    cf_moments,
    t_cf,
    t_nbp,
    t_nn,
    t_runs,
)
from oracles import cf_counts_naive, enumerate_cf_moments, labelings, naive_nn, naive_runs, random_symmetric

seeds = st.integers(0, 2**32 - 1)


def line(*xs):
    return pairwise_matrix(np.array(xs, dtype=float)[:, None], "lin").values


def swap(lab):
    return [3 - x for x in lab]


def test_label_vector_validation():
    with pytest.raises(ValueError):
        LabelVector(np.array([1, 1, 1]))
    with pytest.raises(ValueError):
        LabelVector(np.array([1, 2, 3]))
    lv = LabelVector.from_counts(2, 3)
    assert (lv.m, lv.n, lv.N) == (2, 3, 5)


def test_nn_by_hand():
    # two tight clusters, each a sample: every nearest neighbour is same-sample
    dm = line(0, 0.1, 10, 10.1)
    assert t_nn(knn_digraph(dm, 1), [1, 1, 2, 2]).value == 1.0
    assert t_nn(knn_digraph(dm, 1), [1, 2, 1, 2]).value == 0.0


def test_runs_by_hand():
    edges = np.array([[0, 1], [1, 2], [2, 3]])
    assert t_runs(edges, [1, 1, 2, 2], StatName.SHP_RUN).value == 2
    assert t_runs(edges, [1, 2, 1, 2], StatName.SHP_RUN).value == 4


def test_runs_edge_count_checked():
    with pytest.raises(ValueError, match="N-1"):
        t_runs(np.array([[0, 1]]), [1, 2, 2])


def test_nbp_by_hand():
    mt = min_weight_matching(line(0, 0.1, 5, 5.2))
    assert t_nbp(mt, [1, 1, 2, 2]).value == 0
    assert t_nbp(mt, [1, 2, 1, 2]).value == 2


def test_cf_singular_covariance_is_an_error():
    # on the complete graph both within-sample counts are constant
    complete = np.array([(i, j) for i in range(4) for j in range(i + 1, 4)])
    with pytest.raises(ValueError, match="singular"):
        CFForm(complete, 2, 2)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(4, 8), st.data())
def test_statistics_match_naive_and_respect_bounds(seed, N, data):
    rng = np.random.default_rng(seed)
    w = random_symmetric(rng, N)
    m = data.draw(st.integers(1, N - 1))
    lab = [1] * m + [2] * (N - m)
    rng.shuffle(lab)
    k = data.draw(st.integers(1, min(3, N - 1)))

    nn = t_nn(knn_digraph(w, k), lab).value
    assert Fraction(nn).limit_denominator(N * k) == naive_nn(w, k, lab)
    assert 0 <= nn <= 1

    tree = mst(w).edges
    runs = t_runs(tree, lab).value
    assert runs == naive_runs(tree.tolist(), lab)
    assert 2 <= runs <= N

    mt = min_weight_matching(w)
    a = t_nbp(mt, lab).value
    assert 0 <= a <= min(m, N - m, N // 2)

    # swapping sample names leaves every symmetric statistic unchanged
    assert t_nn(knn_digraph(w, k), swap(lab)).value == nn
    assert t_runs(tree, swap(lab)).value == runs
    assert t_nbp(mt, swap(lab)).value == a
    path = shp(w).edges
    assert t_runs(path, lab, StatName.SHP_RUN).value <= min(N, 2 * min(m, N - m) + 1)
    assert t_runs(path, swap(lab), StatName.SHP_RUN).value == t_runs(path, lab, StatName.SHP_RUN).value


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(4, 8), st.data())
def test_cf_moments_match_enumeration_exactly(seed, N, data):
    w = random_symmetric(np.random.default_rng(seed), N)
    m = data.draw(st.integers(1, N - 1))
    edges = data.draw(st.sampled_from([mst(w).edges, knn_graph_edges(w, min(2, N - 1))]))
    mean, cov = enumerate_cf_moments(edges.tolist(), m, N - m)
    mom = cf_moments(edges, m, N - m)
    assert mom.mean == mean
    assert mom.cov == cov


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(5, 8))
def test_cf_counts_and_form(seed, N):
    rng = np.random.default_rng(seed)
    w = random_symmetric(rng, N)
    edges = knn_graph_edges(w, 2)
    m = N // 2
    labs = np.array(list(labelings(m, N - m)))
    counts = cf_counts(edges, labs)
    for lab, c in zip(labs, counts):
        assert tuple(c) == cf_counts_naive(edges.tolist(), lab)
    try:
        form = CFForm(edges, m, N - m)
    except ValueError:
        return
    vals = form(labs)
    assert np.all(vals >= -1e-12)
    # the permutation mean of a Mahalanobis form in two variables is 2
    assert np.mean(vals) == pytest.approx(2.0, rel=1e-9)
    lv = LabelVector(labs[0])
    assert t_cf(edges, lv, StatName.CF_NN).value == pytest.approx(vals[0], rel=1e-12)
    # swapping labels swaps the roles of m and n
    sw = 3 - labs[0]
    assert t_cf(edges, sw, StatName.CF_NN).value == pytest.approx(vals[0], rel=1e-9, abs=1e-12)


def test_batch_labels_agree_with_single():
    w = random_symmetric(np.random.default_rng(0), 7)
    g = knn_digraph(w, 2)
    labs = np.array(list(labelings(3, 4)))
    from graphtest.stats import nn_values
    batch = nn_values(g.edges, labs)
    assert all(batch[i] == t_nn(g, labs[i]).value for i in range(len(labs)))
