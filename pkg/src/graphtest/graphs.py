"""Graph substrates on the complete dissimilarity graph of a pooled sample.

All constructions take a dense symmetric N x N matrix and break ties by
vertex index, so identical inputs always give identical graphs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

EXACT_SHP_MAX_N = 12


def as_array(dm) -> np.ndarray:
    """Validate and return the raw matrix of a DistanceMatrix, MaddMatrix or ndarray."""
    values = getattr(dm, "values", dm)
    a = np.asarray(values, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dissimilarity matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("dissimilarity matrix has non-finite entries")
    if np.any(a < 0):
        raise ValueError("dissimilarity matrix has negative entries")
    if not np.array_equal(a, a.T):
        raise ValueError("dissimilarity matrix is not symmetric")
    if np.any(np.diag(a) != 0):
        raise ValueError("dissimilarity matrix has a non-zero diagonal")
    return a


@dataclass(frozen=True)
class KnnDigraph:
    k: int
    edges: np.ndarray  # (N*k, 2) rows (i, j): j is among the k nearest of i

    @property
    def N(self) -> int:
        return self.edges.shape[0] // self.k

    def undirected_edges(self) -> np.ndarray:
        """Deduplicated undirected version: (u, v) kept if either points to the other."""
        e = np.sort(self.edges, axis=1)
        return np.unique(e, axis=0)


@dataclass(frozen=True)
class Mst:
    edges: np.ndarray  # (N-1, 2), each row sorted
    total_weight: float


class ShpMethod(str, enum.Enum):
    EXACT = "exact"
    TWO_OPT = "two_opt"


@dataclass(frozen=True)
class HamPath:
    order: np.ndarray
    total_weight: float
    method: ShpMethod

    @property
    def edges(self) -> np.ndarray:
        return np.column_stack([self.order[:-1], self.order[1:]])


@dataclass(frozen=True)
class Matching:
    pairs: np.ndarray  # (N // 2, 2), each row sorted, rows sorted
    dropped: Optional[int]
    total_weight: float


def knn_digraph(dm, k: int) -> KnnDigraph:
    a = as_array(dm)
    N = a.shape[0]
    if not 1 <= k <= N - 1:
        raise ValueError(f"k must lie in [1, {N - 1}], got {k}")
    edges = np.empty((N * k, 2), dtype=np.int64)
    idx = np.arange(N)
    for i in range(N):
        others = np.delete(idx, i)
        # stable sort keeps the smaller index first on ties
        nearest = others[np.argsort(a[i, others], kind="stable")[:k]]
        edges[i * k:(i + 1) * k, 0] = i
        edges[i * k:(i + 1) * k, 1] = nearest
    if edges.shape[0] != N * k:
        raise RuntimeError("k-NN digraph has the wrong edge count")
    return KnnDigraph(k, edges)


def knn_graph_edges(dm, k: int) -> np.ndarray:
    """Undirected k-NN graph used by the Chen-Friedman statistic."""
    return knn_digraph(dm, k).undirected_edges()


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def mst(dm) -> Mst:
    """Kruskal over edges sorted by (weight, min index, max index)."""
    a = as_array(dm)
    N = a.shape[0]
    if N < 2:
        raise ValueError("MST needs N >= 2")
    iu, ju = np.triu_indices(N, k=1)
    w = a[iu, ju]
    order = np.lexsort((ju, iu, w))
    parent = list(range(N))
    edges = []
    total = 0.0
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        ri, rj = _find(parent, i), _find(parent, j)
        if ri == rj:
            continue
        parent[max(ri, rj)] = min(ri, rj)
        edges.append((i, j))
        total += float(w[e])
        if len(edges) == N - 1:
            break
    if len(edges) != N - 1:
        raise RuntimeError("MST has the wrong edge count")
    return Mst(np.array(edges, dtype=np.int64), total)


def path_weight(a: np.ndarray, order) -> float:
    order = np.asarray(order)
    return float(np.sum(a[order[:-1], order[1:]]))


def _canonical(order: np.ndarray) -> np.ndarray:
    return order[::-1].copy() if order[0] > order[-1] else order


def _held_karp(a: np.ndarray) -> np.ndarray:
    N = a.shape[0]
    full = (1 << N) - 1
    cost = np.full((1 << N, N), np.inf)
    parent = np.full((1 << N, N), -1, dtype=np.int64)
    bits = 1 << np.arange(N)
    cost[bits, np.arange(N)] = 0.0
    for mask in range(1, full):
        cur = cost[mask]
        inside = (mask & bits) != 0
        # best predecessor i for every extension j
        cand = cur[:, None] + a
        cand[~inside, :] = np.inf
        best_i = np.argmin(cand, axis=0)
        best = cand[best_i, np.arange(N)]
        for j in np.flatnonzero(~inside):
            nm = mask | (1 << int(j))
            if best[j] < cost[nm, j]:
                cost[nm, j] = best[j]
                parent[nm, j] = best_i[j]
    last = int(np.argmin(cost[full]))
    order = []
    mask = full
    while last != -1:
        order.append(last)
        prev = int(parent[mask, last])
        mask ^= 1 << last
        last = prev
    return np.array(order[::-1], dtype=np.int64)


def _greedy_path(a: np.ndarray, start: int) -> np.ndarray:
    N = a.shape[0]
    visited = np.zeros(N, dtype=bool)
    order = np.empty(N, dtype=np.int64)
    order[0] = start
    visited[start] = True
    cur = start
    for step in range(1, N):
        row = np.where(visited, np.inf, a[cur])
        cur = int(np.argmin(row))
        order[step] = cur
        visited[cur] = True
    return order


def _two_opt_sweep(a: np.ndarray, order: np.ndarray, budget: int, tol: float) -> tuple[int, bool]:
    """One pass of first-improvement segment reversals, scanning i then j ascending."""
    N = order.size
    evaluations = 0
    improved = False
    for i in range(N - 1):
        j = np.arange(i + 1, N)
        if i == 0:
            j = j[:-1]  # reversing the whole path changes nothing
        if j.size == 0:
            continue
        oi, oj = order[i], order[j]
        before = np.zeros(j.size)
        after = np.zeros(j.size)
        if i > 0:
            prev = order[i - 1]
            before += a[prev, oi]
            after += a[prev, oj]
        inner = j < N - 1
        nxt = order[j[inner] + 1]
        before[inner] += a[oj[inner], nxt]
        after[inner] += a[oi, nxt]
        hits = np.flatnonzero(after - before < -tol)
        left = budget - evaluations
        if hits.size and hits[0] < left:
            evaluations += int(hits[0]) + 1
            jj = int(j[hits[0]])
            order[i:jj + 1] = order[i:jj + 1][::-1].copy()
            improved = True
        else:
            evaluations += min(j.size, left)
        if evaluations >= budget:
            break
    return evaluations, improved


def _or_opt_sweep(a: np.ndarray, order: np.ndarray, budget: int, tol: float) -> tuple[int, bool]:
    """One pass of first-improvement moves relocating a run of 1-3 vertices, either orientation."""
    N = order.size
    evaluations = 0
    for length in (1, 2, 3):
        for i in range(N - length + 1):
            seg = order[i:i + length]
            rest = np.concatenate([order[:i], order[i + length:]])
            gain = 0.0
            if i > 0:
                gain -= a[order[i - 1], seg[0]]
            if i + length < N:
                gain -= a[seg[-1], order[i + length]]
            if 0 < i and i + length < N:
                gain += a[order[i - 1], order[i + length]]
            R = rest.size
            pos = np.arange(R + 1)
            base = np.zeros(R + 1)
            inner = (pos > 0) & (pos < R)
            base[inner] -= a[rest[pos[inner] - 1], rest[pos[inner]]]
            for first, last in ((seg[0], seg[-1]), (seg[-1], seg[0])):
                cost = base.copy()
                cost[1:] += a[rest, first]
                cost[:-1] += a[last, rest]
                delta = gain + cost
                delta[i] = np.inf  # same slot: plain reversal is a 2-opt move
                hits = np.flatnonzero(delta < -tol)
                left = budget - evaluations
                if hits.size and hits[0] < left:
                    evaluations += int(hits[0]) + 1
                    p = int(hits[0])
                    piece = seg if first == seg[0] else seg[::-1]
                    order[:] = np.concatenate([rest[:p], piece, rest[p:]])
                    return evaluations, True
                evaluations += min(R + 1, left)
                if evaluations >= budget:
                    return evaluations, False
    return evaluations, False


def _local_search(a: np.ndarray, order: np.ndarray, budget: int) -> np.ndarray:
    order = order.copy()
    tol = 1e-12 * max(1.0, path_weight(a, order))
    used = 0
    while used < budget:
        spent, improved = _two_opt_sweep(a, order, budget - used, tol)
        used += spent
        if improved or used >= budget:
            continue
        spent, improved = _or_opt_sweep(a, order, budget - used, tol)
        used += spent
        if not improved:
            break
    return order


def shp(dm, mode: str = "auto") -> HamPath:
    """Shortest Hamiltonian path with free endpoints.

    ``exact`` runs the subset dynamic program (N <= 12); ``two_opt`` runs
    multi-start nearest-neighbour construction, keeps the best start, then
    alternates 2-opt segment reversals with relocations of short runs until
    neither improves or 50 * N**2 move evaluations are spent; ``auto`` picks
    exact whenever it is allowed.
    """
    a = as_array(dm)
    N = a.shape[0]
    if N < 2:
        raise ValueError("SHP needs N >= 2")
    if mode not in ("auto", "exact", "two_opt"):
        raise ValueError(f"unknown SHP mode {mode!r}")
    if mode == "exact" and N > EXACT_SHP_MAX_N:
        raise ValueError(f"exact SHP is limited to N <= {EXACT_SHP_MAX_N}, got N={N}")
    if N == 2:
        order = np.array([0, 1])
        method = ShpMethod.EXACT if mode != "two_opt" else ShpMethod.TWO_OPT
        return HamPath(order, float(a[0, 1]), method)
    if mode == "exact" or (mode == "auto" and N <= EXACT_SHP_MAX_N):
        order = _canonical(_held_karp(a))
        return HamPath(order, path_weight(a, order), ShpMethod.EXACT)

    best, best_w = None, np.inf
    for s in range(N):
        cand = _greedy_path(a, s)
        w = path_weight(a, cand)
        if w < best_w:
            best, best_w = cand, w
    order = _canonical(_local_search(a, best, 50 * N * N))
    if np.unique(order).size != N:
        raise RuntimeError("local search produced an invalid path")
    return HamPath(order, path_weight(a, order), ShpMethod.TWO_OPT)


def min_weight_matching(dm) -> Matching:
    """Minimum-weight perfect matching; for odd N the optimizer picks the vertex to drop.

    Odd N is handled by a phantom vertex at distance 0 from everyone.
    """
    a = as_array(dm)
    N = a.shape[0]
    if N < 2:
        raise ValueError("matching needs N >= 2")
    g = nx.Graph()
    size = N + (N % 2)
    g.add_nodes_from(range(size))
    for i in range(N):
        for j in range(i + 1, N):
            g.add_edge(i, j, weight=float(a[i, j]))
    if size > N:
        for i in range(N):
            g.add_edge(i, N, weight=0.0)
    matched = nx.min_weight_matching(g)
    dropped = None
    pairs = []
    for u, v in matched:
        u, v = min(u, v), max(u, v)
        if v == N:
            dropped = u
            continue
        pairs.append((u, v))
    pairs.sort()
    if len(pairs) != N // 2 or (N % 2 == 1) != (dropped is not None):
        raise RuntimeError("matching is not perfect")
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    total = float(np.sum(a[arr[:, 0], arr[:, 1]]))
    return Matching(arr, dropped, total)
