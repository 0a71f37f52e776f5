"""Graph-based two-sample statistics.

Every statistic is written for a batch of labelings: ``labels`` may be a
single length-N vector or a (B, N) array, which is how the permutation
engine evaluates all relabelings against one fixed graph.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import KnnDigraph, Matching


class StatName(str, enum.Enum):
    NN = "NN"
    MST_RUN = "MST_RUN"
    SHP_RUN = "SHP_RUN"
    NBP = "NBP"
    CF_NN = "CF_NN"
    CF_MST = "CF_MST"


class Side(str, enum.Enum):
    REJECT_LARGE = "reject_large"
    REJECT_SMALL = "reject_small"


SIDES = {
    StatName.NN: Side.REJECT_LARGE,
    StatName.MST_RUN: Side.REJECT_SMALL,
    StatName.SHP_RUN: Side.REJECT_SMALL,
    StatName.NBP: Side.REJECT_SMALL,
    StatName.CF_NN: Side.REJECT_LARGE,
    StatName.CF_MST: Side.REJECT_LARGE,
}


@dataclass(frozen=True)
class LabelVector:
    labels: np.ndarray  # values in {1, 2}

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if not np.all((lab == 1) | (lab == 2)):
            raise ValueError("labels must take values in {1, 2}")
        lab = lab.astype(np.int8)
        if not (lab == 1).any() or not (lab == 2).any():
            raise ValueError("both samples must be non-empty")
        object.__setattr__(self, "labels", lab)

    @property
    def m(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def n(self) -> int:
        return int(np.sum(self.labels == 2))

    @property
    def N(self) -> int:
        return self.labels.size

    @classmethod
    def from_counts(cls, m: int, n: int) -> "LabelVector":
        return cls(np.r_[np.ones(m, dtype=np.int8), np.full(n, 2, dtype=np.int8)])


@dataclass(frozen=True)
class StatValue:
    name: StatName
    value: float

    @property
    def side(self) -> Side:
        return SIDES[self.name]


def _labels(lab, N: int | None = None) -> np.ndarray:
    a = lab.labels if isinstance(lab, LabelVector) else np.asarray(lab)
    if N is not None and a.shape[-1] != N:
        raise ValueError(f"label vector has length {a.shape[-1]}, graph has {N} vertices")
    return a


def nn_values(edges: np.ndarray, labels: np.ndarray) -> np.ndarray:
    same = labels[..., edges[:, 0]] == labels[..., edges[:, 1]]
    return same.mean(axis=-1)


def cross_counts(edges: np.ndarray, labels: np.ndarray) -> np.ndarray:
    if edges.size == 0:
        return np.zeros(labels.shape[:-1], dtype=np.int64)
    return np.sum(labels[..., edges[:, 0]] != labels[..., edges[:, 1]], axis=-1)


def t_nn(g: KnnDigraph, lab) -> StatValue:
    """Fraction of directed k-NN edges joining points from the same sample."""
    labels = _labels(lab, g.N)
    return StatValue(StatName.NN, float(nn_values(g.edges, labels)))


def t_runs(edges, lab, name=StatName.MST_RUN) -> StatValue:
    """One plus the number of cross-sample edges of a spanning tree or path."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    labels = _labels(lab)
    N = labels.shape[-1]
    if edges.shape[0] != N - 1:
        raise ValueError(f"run statistic needs N-1={N - 1} edges, got {edges.shape[0]}")
    name = StatName(name)
    if name not in (StatName.MST_RUN, StatName.SHP_RUN):
        raise ValueError(f"{name} is not a run statistic")
    return StatValue(name, float(1 + cross_counts(edges, labels)))


def t_nbp(match: Matching, lab) -> StatValue:
    """Cross-match count: pairs of the optimal matching joining the two samples."""
    labels = _labels(lab)
    N = labels.shape[-1]
    if match.pairs.shape[0] != N // 2:
        raise ValueError(f"matching has {match.pairs.shape[0]} pairs, labels imply {N // 2}")
    return StatValue(StatName.NBP, float(cross_counts(match.pairs, labels)))


# -- Chen-Friedman -----------------------------------------------------------

@dataclass(frozen=True)
class CFMoments:
    """Exact permutation mean and covariance of (S_xx, S_yy) for fixed (m, n)."""

    mean: tuple[Fraction, Fraction]
    cov: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        mu = np.array([float(x) for x in self.mean])
        sigma = np.array([[float(x) for x in row] for row in self.cov])
        return mu, sigma


def _falling(a: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= a - i
    return out


def cf_moments(edges, m: int, n: int) -> CFMoments:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    N = m + n
    if N < 4:
        raise ValueError("Chen-Friedman moments need N >= 4")
    E = edges.shape[0]
    deg = np.bincount(edges.ravel(), minlength=N).astype(object)
    sum_d2 = int(sum(int(x) ** 2 for x in deg))
    # ordered pairs of distinct edges sharing one vertex, and sharing none
    share1 = sum_d2 - 2 * E
    disjoint = E * E - E - share1

    def p(a: int, k: int) -> Fraction:
        return Fraction(_falling(a, k), _falling(N, k))

    mu_x = E * p(m, 2)
    mu_y = E * p(n, 2)
    exx = E * p(m, 2) + share1 * p(m, 3) + disjoint * p(m, 4)
    eyy = E * p(n, 2) + share1 * p(n, 3) + disjoint * p(n, 4)
    exy = disjoint * Fraction(_falling(m, 2) * _falling(n, 2), _falling(N, 4))
    vxx = exx - mu_x * mu_x
    vyy = eyy - mu_y * mu_y
    cxy = exy - mu_x * mu_y
    return CFMoments((mu_x, mu_y), ((vxx, cxy), (cxy, vyy)))


def cf_counts(edges: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """(…, 2) array of (S_xx, S_yy) edge counts."""
    a = labels[..., edges[:, 0]]
    b = labels[..., edges[:, 1]]
    sxx = np.sum((a == 1) & (b == 1), axis=-1)
    syy = np.sum((a == 2) & (b == 2), axis=-1)
    return np.stack([sxx, syy], axis=-1).astype(float)


class CFForm:
    """Quadratic form (S - mu)' Sigma^-1 (S - mu) with moments precomputed once."""

    def __init__(self, edges, m: int, n: int):
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.moments = cf_moments(self.edges, m, n)
        v = self.moments.cov
        det = v[0][0] * v[1][1] - v[0][1] * v[1][0]
        if det == 0:
            raise ValueError(
                f"singular permutation covariance for (S_xx, S_yy): {len(self.edges)} edges, "
                f"m={m}, n={n}, variances=({float(v[0][0]):.6g}, {float(v[1][1]):.6g})"
            )
        inv = ((v[1][1] / det, -v[0][1] / det), (-v[1][0] / det, v[0][0] / det))
        self.mu, _ = self.moments.as_arrays()
        self.inv = np.array([[float(x) for x in row] for row in inv])

    def __call__(self, labels: np.ndarray) -> np.ndarray:
        r = cf_counts(self.edges, labels) - self.mu
        return np.einsum("...i,ij,...j->...", r, self.inv, r)


def t_cf(edges, lab, name=StatName.CF_MST) -> StatValue:
    labels = _labels(lab)
    if labels.ndim != 1:
        raise ValueError("t_cf takes a single label vector")
    lv = lab if isinstance(lab, LabelVector) else LabelVector(labels)
    name = StatName(name)
    if name not in (StatName.CF_NN, StatName.CF_MST):
        raise ValueError(f"{name} is not a Chen-Friedman statistic")
    form = CFForm(edges, lv.m, lv.n)
    return StatValue(name, float(form(lv.labels)))
