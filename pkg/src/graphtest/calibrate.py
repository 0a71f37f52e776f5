"""P-values for the graph statistics.

Two routes: label-permutation tests over a fixed graph (any statistic), and
exact null distributions for the distribution-free SHP-run and cross-match
statistics.

Permutation ``b`` of a test seeded with ``seed`` is the stable argsort of
``N`` SplitMix64 keys computed from ``(seed, b, i)``, so each relabeling is
a pure function of its index and the p-value does not depend on how the
``B`` replications are chunked or scheduled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable

import numpy as np

from . import graphs
from .stats import (
    CFForm,
    LabelVector,
    Side,
    SIDES,
    StatName,
    StatValue,
    cross_counts,
    nn_values,
)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_UNIFORM_STREAM = np.uint64(0xFFFFFFFFFFFFFFFF)


def splitmix64(x) -> np.ndarray:
    z = np.asarray(x, dtype=np.uint64) + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _seed_u64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


def permutation_keys(seed: int, b: np.ndarray, N: int) -> np.ndarray:
    """(len(b), N) uint64 sort keys; row r depends only on (seed, b[r])."""
    with np.errstate(over="ignore"):
        stream = splitmix64(splitmix64(_seed_u64(seed)) ^ splitmix64(np.asarray(b, dtype=np.uint64)))
        return splitmix64(stream[:, None] ^ splitmix64(np.arange(N, dtype=np.uint64))[None, :])


def permuted_labels(labels: np.ndarray, seed: int, b: np.ndarray) -> np.ndarray:
    keys = permutation_keys(seed, b, labels.size)
    return labels[np.argsort(keys, axis=1, kind="stable")]


def boundary_uniform(seed: int) -> float:
    """Uniform draw in (0, 1] used only by randomized tests; disjoint from the permutation streams."""
    with np.errstate(over="ignore"):
        z = splitmix64(splitmix64(_seed_u64(seed)) ^ splitmix64(_UNIFORM_STREAM))
    return (int(z >> np.uint64(11)) + 1) / float(1 << 53)


class Method(str, enum.Enum):
    PERMUTATION = "permutation"
    EXACT_NULL = "exact_null"


@dataclass(frozen=True)
class PermutationPlan:
    B: int = 1000
    seed: int = 0
    alpha: float = 0.05
    randomized: bool = False

    def __post_init__(self):
        if self.B < 1:
            raise ValueError(f"B must be >= 1, got {self.B}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # keep pytest from collecting this class

    stat: StatValue
    p_value: float
    reject: bool
    method: Method
    B_used: int
    seed: int
    alpha: float

    def to_dict(self) -> dict:
        return {
            "name": self.stat.name.value,
            "statistic": self.stat.value,
            "side": self.stat.side.value,
            "p": self.p_value,
            "reject": self.reject,
            "method": self.method.value,
            "B": self.B_used,
            "alpha": self.alpha,
            "seed": self.seed,
        }


# -- graph statistics over a fixed graph ---------------------------------------


class GraphStatistic:
    """A statistic bound to a graph built once from a label-free dissimilarity matrix.

    Calling it on a (B, N) array of labelings returns the B statistic values.
    """

    def __init__(self, dm, name, k: int = 3, shp_mode: str = "auto", m: int | None = None,
                 n: int | None = None):
        self.name = StatName(name)
        a = graphs.as_array(dm)
        self.N = a.shape[0]
        if self.name is StatName.NN:
            self.graph = graphs.knn_digraph(a, k)
            edges = self.graph.edges
            self._fn: Callable = lambda lab: nn_values(edges, lab)
        elif self.name in (StatName.MST_RUN, StatName.SHP_RUN):
            if self.name is StatName.MST_RUN:
                self.graph = graphs.mst(a)
                edges = self.graph.edges
            else:
                self.graph = graphs.shp(a, shp_mode)
                edges = self.graph.edges
            self._fn = lambda lab: (1 + cross_counts(edges, lab)).astype(float)
        elif self.name is StatName.NBP:
            self.graph = graphs.min_weight_matching(a)
            pairs = self.graph.pairs
            self._fn = lambda lab: cross_counts(pairs, lab).astype(float)
        else:
            if m is None or n is None:
                raise ValueError("Chen-Friedman statistics need the sample sizes m and n")
            edges = graphs.knn_graph_edges(a, k) if self.name is StatName.CF_NN else graphs.mst(a).edges
            self.graph = edges
            self._fn = CFForm(edges, m, n)

    @property
    def side(self) -> Side:
        return SIDES[self.name]

    def __call__(self, labels: np.ndarray) -> np.ndarray:
        return np.asarray(self._fn(np.asarray(labels)), dtype=float)


def _chunk_size(N: int) -> int:
    return max(64, 200_000 // max(N, 1))


def permutation_test(dm, stat_kind, lab, plan: PermutationPlan = PermutationPlan(), k: int = 3,
                     shp_mode: str = "auto") -> TestReport:
    """Label-permutation test with the add-one estimator ``(1 + #as extreme) / (1 + B)``."""
    lab = lab if isinstance(lab, LabelVector) else LabelVector(lab)
    stat = GraphStatistic(dm, stat_kind, k=k, shp_mode=shp_mode, m=lab.m, n=lab.n)
    if stat.N != lab.N:
        raise ValueError(f"matrix has {stat.N} points but {lab.N} labels were given")
    return permutation_test_from_statistic(stat, lab, plan)


def permutation_test_from_statistic(stat: GraphStatistic, lab: LabelVector,
                                    plan: PermutationPlan) -> TestReport:
    labels = lab.labels
    observed = float(stat(labels[None, :])[0])
    larger = stat.side is Side.REJECT_LARGE
    more = ties = 0
    step = _chunk_size(labels.size)
    for start in range(0, plan.B, step):
        b = np.arange(start, min(start + step, plan.B), dtype=np.uint64)
        vals = stat(permuted_labels(labels, plan.seed, b))
        more += int(np.sum(vals > observed if larger else vals < observed))
        ties += int(np.sum(vals == observed))
    if plan.randomized:
        p = (more + boundary_uniform(plan.seed) * (ties + 1)) / (plan.B + 1)
    else:
        p = (1 + more + ties) / (plan.B + 1)
    return TestReport(StatValue(stat.name, observed), p, p <= plan.alpha, Method.PERMUTATION,
                      plan.B, plan.seed, plan.alpha)


# -- exact null distributions --------------------------------------------------


def shp_run_null_pmf(m: int, n: int, r: int) -> Fraction:
    """P(R = r) for the run count of a random arrangement of m ones and n twos on a path."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    total = comb(m + n, m)
    if r < 2:
        return Fraction(0)
    if r % 2 == 0:
        k = r // 2
        return Fraction(2 * comb(m - 1, k - 1) * comb(n - 1, k - 1), total)
    k = (r - 1) // 2
    return Fraction(comb(m - 1, k - 1) * comb(n - 1, k) + comb(m - 1, k) * comb(n - 1, k - 1), total)


def shp_run_null_cdf_exact(m: int, n: int, r: int) -> Fraction:
    N = m + n
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if not 1 <= r <= N:
        raise ValueError(f"run count must lie in [1, {N}], got {r}")
    return sum((shp_run_null_pmf(m, n, s) for s in range(2, r + 1)), Fraction(0))


def shp_run_null_cdf(m: int, n: int, r: int) -> float:
    return float(shp_run_null_cdf_exact(m, n, r))


def _nbp_pmf_even(m: int, n: int, a: int) -> Fraction:
    N = m + n
    K = N // 2
    if a < 0 or a > min(m, n) or (m - a) % 2:
        return Fraction(0)
    return Fraction(comb(K, a) * 2 ** a * comb(K - a, (m - a) // 2), comb(N, m))


def nbp_null_pmf(m: int, n: int, a: int) -> Fraction:
    """P(T_NBP = a) under random labeling with the matching held fixed.

    For odd N the unmatched vertex carries a random label too; the two
    cases are mixed with weights m/N and n/N.
    """
    N = m + n
    if N % 2 == 0:
        return _nbp_pmf_even(m, n, a)
    return Fraction(m, N) * _nbp_pmf_even(m - 1, n, a) + Fraction(n, N) * _nbp_pmf_even(m, n - 1, a)


def nbp_null_cdf_exact(m: int, n: int, a: int) -> Fraction:
    N = m + n
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if not 0 <= a <= N // 2:
        raise ValueError(f"cross-match count must lie in [0, {N // 2}], got {a}")
    if N % 2 == 0 and (a - m) % 2:
        raise ValueError(f"with N even the cross-match count has the parity of m={m}; got {a}")
    return sum((nbp_null_pmf(m, n, s) for s in range(0, a + 1)), Fraction(0))


def nbp_null_cdf(m: int, n: int, a: int) -> float:
    return float(nbp_null_cdf_exact(m, n, a))


def nbp_boundary_probability(m: int, n: int) -> Fraction:
    """Null probability that the cross-match count sits at its smallest attainable value.

    For odd N the probability is conditional on the unmatched vertex coming
    from the odd-sized sample.
    """
    N = m + n
    f = factorial
    if m % 2 == 0 and n % 2 == 0:
        return Fraction(f(N // 2), comb(N, m) * f(m // 2) * f(n // 2))
    if m % 2 == 1 and n % 2 == 1:
        return Fraction(2 * f(N // 2), comb(N, m) * f((m - 1) // 2) * f((n - 1) // 2))
    if m % 2 == 0:
        return Fraction(f((N - 1) // 2), comb(N - 1, m) * f(m // 2) * f((n - 1) // 2))
    return Fraction(f((N - 1) // 2), comb(N - 1, m - 1) * f((m - 1) // 2) * f(n // 2))


def exact_null_test(stat: StatValue, m: int, n: int, alpha: float = 0.05,
                    randomized: bool = False, seed: int = 0) -> TestReport:
    """Left-tail exact p-value for the distribution-free SHP-run and cross-match statistics."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    t = int(round(stat.value))
    if stat.name is StatName.SHP_RUN:
        below = shp_run_null_cdf_exact(m, n, t - 1) if t > 1 else Fraction(0)
        at = shp_run_null_pmf(m, n, t)
    elif stat.name is StatName.NBP:
        below = nbp_null_cdf_exact(m, n, t) - nbp_null_pmf(m, n, t)
        at = nbp_null_pmf(m, n, t)
    else:
        raise ValueError(f"{stat.name.value} has no exact null distribution; use permutation calibration")
    u = boundary_uniform(seed) if randomized else 1.0
    p = min(1.0, float(below) + u * float(at))
    return TestReport(stat, p, p <= alpha, Method.EXACT_NULL, 0, seed, alpha)


# -- one-call entry point --------------------------------------------------------

DISTRIBUTION_FREE = (StatName.SHP_RUN, StatName.NBP)


def run_test(dm, stat_kind, lab, plan: PermutationPlan = PermutationPlan(), k: int = 3,
             calibration: str = "perm", shp_mode: str = "auto") -> TestReport:
    """Build the graph for ``stat_kind`` on ``dm`` and calibrate the statistic.

    ``dm`` is any label-free dissimilarity matrix; raw distances and MADD
    values go through exactly the same graph, statistic and calibration code.
    """
    lab = lab if isinstance(lab, LabelVector) else LabelVector(lab)
    name = StatName(stat_kind)
    if calibration == "exact":
        if name not in DISTRIBUTION_FREE:
            raise ValueError(f"exact calibration is only available for SHP_RUN and NBP, not {name.value}")
        stat = GraphStatistic(dm, name, k=k, shp_mode=shp_mode)
        value = float(stat(lab.labels[None, :])[0])
        return exact_null_test(StatValue(name, value), lab.m, lab.n, plan.alpha,
                               randomized=plan.randomized, seed=plan.seed)
    if calibration != "perm":
        raise ValueError(f"unknown calibration {calibration!r}")
    return permutation_test(dm, name, lab, plan, k=k, shp_mode=shp_mode)
