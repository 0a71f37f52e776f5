"""Mean of absolute differences of pairwise distances (MADD)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import DistanceMatrix, KernelSpec


@dataclass(frozen=True)
class MaddMatrix:
    values: np.ndarray
    base_kernel: KernelSpec

    @property
    def N(self) -> int:
        return self.values.shape[0]


def madd_values(base: np.ndarray) -> np.ndarray:
    """MADD on a raw symmetric base matrix.

    ``out[i, j] = sum_{l != i, j} |base[i, l] - base[j, l]| / (N - 2)``.
    """
    base = np.asarray(base, dtype=float)
    if base.ndim != 2 or base.shape[0] != base.shape[1]:
        raise ValueError("base must be a square matrix")
    N = base.shape[0]
    if N < 3:
        raise ValueError(f"MADD needs N >= 3 points, got {N}")
    out = np.zeros((N, N))
    idx = np.arange(N)
    for i in range(N - 1):
        js = idx[i + 1:]
        diffs = np.abs(base[js] - base[i])  # row r holds |base[j_r, l] - base[i, l]| over l
        diffs[:, i] = 0.0
        diffs[np.arange(js.size), js] = 0.0
        row = np.sum(diffs, axis=1) / (N - 2)
        out[i, i + 1:] = row
        out[i + 1:, i] = row
    return out


def madd_matrix(base: DistanceMatrix) -> MaddMatrix:
    values = np.asarray(base.values, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ValueError("base distance matrix must be finite and non-negative")
    if not np.array_equal(values, values.T):
        raise ValueError("base distance matrix must be symmetric")
    return MaddMatrix(madd_values(values), base.kernel)
