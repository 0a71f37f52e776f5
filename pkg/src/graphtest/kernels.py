"""Coordinate-wise distance families and pooled distance matrices.

Every family has the form ``h((1/d) * sum_q psi(|u_q - v_q|))`` with
``h(t) = t`` except ``euclid_scaled``, which is ``d**-0.5 * ||u - v||``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class KernelSpec(str, enum.Enum):
    EUCLID_SCALED = "euclid_scaled"
    LIN = "lin"
    LOG1P = "log1p"
    EXPNEG = "expneg"


# short names used on the command line
KERNEL_ALIASES = {
    "euclid": KernelSpec.EUCLID_SCALED,
    "euclid_scaled": KernelSpec.EUCLID_SCALED,
    "lin": KernelSpec.LIN,
    "log": KernelSpec.LOG1P,
    "log1p": KernelSpec.LOG1P,
    "exp": KernelSpec.EXPNEG,
    "expneg": KernelSpec.EXPNEG,
}


def as_kernel(k) -> KernelSpec:
    if isinstance(k, KernelSpec):
        return k
    try:
        return KERNEL_ALIASES[str(k)]
    except KeyError:
        raise ValueError(f"unknown kernel family {k!r}; expected one of {sorted(KERNEL_ALIASES)}") from None


@dataclass(frozen=True)
class PooledSample:
    """First ``m`` rows come from sample 1, the remaining ``n`` from sample 2."""

    points: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError("points must be a 2-d array with at least one column")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"both samples must be non-empty, got m={self.m}, n={self.n}")
        if pts.shape[0] != self.m + self.n:
            raise ValueError(f"expected {self.m + self.n} rows, got {pts.shape[0]}")
        if pts.shape[0] < 3:
            raise ValueError("pooled sample needs N >= 3")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite coordinate in pooled sample")
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.m + self.n

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_samples(cls, x, y) -> "PooledSample":
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        if x.shape[1] != y.shape[1]:
            raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
        return cls(np.vstack([x, y]), x.shape[0], y.shape[0])


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    kernel: KernelSpec

    @property
    def N(self) -> int:
        return self.values.shape[0]


def _rows_distance(diffs: np.ndarray, k: KernelSpec) -> np.ndarray:
    # diffs: (rows, d) absolute coordinate differences. numpy reduces the
    # contiguous last axis with pairwise summation, and every caller goes
    # through this function so single pairs and matrix entries agree bitwise.
    diffs = np.ascontiguousarray(diffs)
    d = diffs.shape[1]
    if k is KernelSpec.EUCLID_SCALED:
        return np.sqrt(np.sum(diffs * diffs, axis=1)) / np.sqrt(d)
    if k is KernelSpec.LIN:
        terms = diffs
    elif k is KernelSpec.LOG1P:
        terms = np.log1p(diffs)
    elif k is KernelSpec.EXPNEG:
        terms = -np.expm1(-diffs)
    else:  # pragma: no cover - closed enum
        raise ValueError(k)
    return np.sum(terms, axis=1) / d


def _check_vector(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        u = u.reshape(1)
    if u.ndim != 1 or u.size < 1:
        raise ValueError("observation must be a non-empty 1-d vector")
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite coordinate in observation")
    return u


def kernel_distance(u, v, k) -> float:
    """Distance between two observations under kernel family ``k``."""
    k = as_kernel(k)
    u = _check_vector(u)
    v = _check_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    # canonical argument order keeps the result exactly symmetric
    a, b = (u, v) if tuple(u) <= tuple(v) else (v, u)
    return float(_rows_distance(np.abs(a - b)[None, :], k)[0])


def pairwise_matrix(z, k) -> DistanceMatrix:
    """Fill the N x N matrix of ``kernel_distance`` values over a pooled sample.

    ``z`` may be a :class:`PooledSample` or a raw (N, d) array.
    """
    k = as_kernel(k)
    pts = z.points if isinstance(z, PooledSample) else np.asarray(z, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("pairwise_matrix needs an (N, d) array with N >= 3")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinate in pooled sample")
    N = pts.shape[0]
    out = np.zeros((N, N))
    for i in range(N - 1):
        row = _rows_distance(np.abs(pts[i + 1:] - pts[i]), k)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return DistanceMatrix(out, k)
