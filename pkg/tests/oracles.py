"""Independent brute-force reference implementations used by the test suite.

Nothing here imports the package's algorithms; these are definition-level
loops and enumerations.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def naive_distance(u, v, family):
    d = len(u)
    diffs = [abs(a - b) for a, b in zip(u, v)]
    if family == "euclid_scaled":
        return math.sqrt(sum(t * t for t in diffs)) / math.sqrt(d)
    psi = {"lin": lambda t: t, "log1p": math.log1p, "expneg": lambda t: -math.expm1(-t)}[family]
    return sum(psi(t) for t in diffs) / d


def naive_madd(base):
    N = len(base)
    out = np.zeros((N, N))
    for i in range(N):
        for j in range(N):
            if i != j:
                out[i][j] = sum(abs(base[i][l] - base[j][l]) for l in range(N) if l not in (i, j)) / (N - 2)
    return out


def labelings(m, n):
    """All C(N, m) label vectors with m ones and n twos."""
    N = m + n
    for ones in itertools.combinations(range(N), m):
        lab = [2] * N
        for i in ones:
            lab[i] = 1
        yield lab


def perfect_matchings(vertices):
    vertices = list(vertices)
    if not vertices:
        yield []
        return
    first = vertices[0]
    for k in range(1, len(vertices)):
        rest = vertices[1:k] + vertices[k + 1:]
        for tail in perfect_matchings(rest):
            yield [(first, vertices[k])] + tail


def brute_min_matching_weight(w):
    N = len(w)
    best = math.inf
    if N % 2 == 0:
        for mt in perfect_matchings(range(N)):
            best = min(best, sum(w[a][b] for a, b in mt))
        return best
    for drop in range(N):
        rest = [v for v in range(N) if v != drop]
        for mt in perfect_matchings(rest):
            best = min(best, sum(w[a][b] for a, b in mt))
    return best


def prufer_trees(N):
    """Every labelled spanning tree on N >= 2 vertices, as edge lists."""
    if N == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(N), repeat=N - 2):
        degree = [1] * N
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(N) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(N) if degree[i] == 1]
        edges.append((u, v))
        yield edges


def brute_min_tree_weight(w):
    return min(sum(w[a][b] for a, b in t) for t in prufer_trees(len(w)))


def brute_min_path_weight(w):
    N = len(w)
    best = math.inf
    for perm in itertools.permutations(range(N)):
        if perm[0] > perm[-1]:
            continue
        best = min(best, sum(w[perm[i]][perm[i + 1]] for i in range(N - 1)))
    return best


def naive_runs(edges, lab):
    return 1 + sum(1 for a, b in edges if lab[a] != lab[b])


def naive_nn(dm, k, lab):
    N = len(dm)
    same = 0
    for i in range(N):
        ranked = sorted((j for j in range(N) if j != i), key=lambda j: (dm[i][j], j))
        same += sum(1 for j in ranked[:k] if lab[j] == lab[i])
    return Fraction(same, N * k)


def cf_counts_naive(edges, lab):
    sxx = sum(1 for a, b in edges if lab[a] == 1 and lab[b] == 1)
    syy = sum(1 for a, b in edges if lab[a] == 2 and lab[b] == 2)
    return sxx, syy


def enumerate_cf_moments(edges, m, n):
    """Exact mean vector and covariance of (S_xx, S_yy) by averaging over all labelings."""
    vals = [cf_counts_naive(edges, lab) for lab in labelings(m, n)]
    cnt = len(vals)
    mx = Fraction(sum(v[0] for v in vals), cnt)
    my = Fraction(sum(v[1] for v in vals), cnt)
    vxx = Fraction(sum(v[0] * v[0] for v in vals), cnt) - mx * mx
    vyy = Fraction(sum(v[1] * v[1] for v in vals), cnt) - my * my
    cxy = Fraction(sum(v[0] * v[1] for v in vals), cnt) - mx * my
    return (mx, my), ((vxx, cxy), (cxy, vyy))


def enumerate_path_runs_cdf(m, n, r):
    """P(run count <= r) over all labelings of the path 0-1-...-(N-1)."""
    N = m + n
    edges = [(i, i + 1) for i in range(N - 1)]
    hits = total = 0
    for lab in labelings(m, n):
        total += 1
        hits += naive_runs(edges, lab) <= r
    return Fraction(hits, total)


def enumerate_cross_match_cdf(m, n, a):
    """P(cross-match count <= a) for the fixed matching (0,1),(2,3),...; for odd N vertex N-1 is unmatched."""
    N = m + n
    pairs = [(2 * i, 2 * i + 1) for i in range(N // 2)]
    hits = total = 0
    for lab in labelings(m, n):
        total += 1
        hits += sum(1 for u, v in pairs if lab[u] != lab[v]) <= a
    return Fraction(hits, total)


def random_symmetric(rng, N, low=0.1, high=10.0):
    w = rng.uniform(low, high, size=(N, N))
    w = np.triu(w, 1)
    return w + w.T
