"""Named test configurations shared by the power study, the benchmark and the CLI.

A test is written ``<statistic>:<dissimilarity>[@<calibration>]``, e.g.
``nn:rho0`` or ``shp:lin@exact``. Dissimilarities ``euclid``, ``lin``,
``log``, ``exp`` are the raw kernel distances; ``rho0`` .. ``rho3`` are the
MADD versions built on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibrate import PermutationPlan, TestReport, run_test
from .kernels import KernelSpec, pairwise_matrix
from .madd import madd_values
from .stats import LabelVector, StatName

DISSIMILARITIES: dict[str, tuple[KernelSpec, bool]] = {
    "euclid": (KernelSpec.EUCLID_SCALED, False),
    "lin": (KernelSpec.LIN, False),
    "log": (KernelSpec.LOG1P, False),
    "exp": (KernelSpec.EXPNEG, False),
    "rho0": (KernelSpec.EUCLID_SCALED, True),
    "rho1": (KernelSpec.LIN, True),
    "rho2": (KernelSpec.LOG1P, True),
    "rho3": (KernelSpec.EXPNEG, True),
}

TEST_NAMES: dict[str, StatName] = {
    "nn": StatName.NN,
    "mst": StatName.MST_RUN,
    "shp": StatName.SHP_RUN,
    "nbp": StatName.NBP,
    "cf-nn": StatName.CF_NN,
    "cf-mst": StatName.CF_MST,
}


def dissimilarity_token(kernel: KernelSpec, madd: bool) -> str:
    for token, value in DISSIMILARITIES.items():
        if value == (kernel, madd):
            return token
    raise ValueError((kernel, madd))


class MatrixCache:
    """Lazily computed dissimilarity matrices for one pooled sample."""

    def __init__(self, points: np.ndarray):
        self.points = np.asarray(points, dtype=float)
        self._base: dict[KernelSpec, np.ndarray] = {}
        self._madd: dict[KernelSpec, np.ndarray] = {}

    def get(self, token: str) -> np.ndarray:
        kernel, use_madd = DISSIMILARITIES[token]
        if kernel not in self._base:
            self._base[kernel] = pairwise_matrix(self.points, kernel).values
        if not use_madd:
            return self._base[kernel]
        if kernel not in self._madd:
            self._madd[kernel] = madd_values(self._base[kernel])
        return self._madd[kernel]


@dataclass(frozen=True)
class TestSpec:
    __test__ = False

    test: str
    dissimilarity: str
    calibration: str = "perm"
    k: int = 3
    shp_mode: str = "auto"

    def __post_init__(self):
        if self.test not in TEST_NAMES:
            raise ValueError(f"unknown test {self.test!r}; choose from {', '.join(TEST_NAMES)}")
        if self.dissimilarity not in DISSIMILARITIES:
            raise ValueError(
                f"unknown dissimilarity {self.dissimilarity!r}; choose from {', '.join(DISSIMILARITIES)}"
            )
        if self.calibration not in ("perm", "exact"):
            raise ValueError(f"unknown calibration {self.calibration!r}")
        if self.calibration == "exact" and self.test not in ("shp", "nbp"):
            raise ValueError(f"exact calibration is not available for the {self.test} test")

    @property
    def label(self) -> str:
        suffix = "" if self.calibration == "perm" else f"@{self.calibration}"
        return f"{self.test}:{self.dissimilarity}{suffix}"

    def run(self, cache: MatrixCache, labels: LabelVector, plan: PermutationPlan) -> TestReport:
        return run_test(cache.get(self.dissimilarity), TEST_NAMES[self.test], labels, plan,
                        k=self.k, calibration=self.calibration, shp_mode=self.shp_mode)

    def decide(self, cache: MatrixCache, labels: LabelVector, plan: PermutationPlan) -> bool:
        return self.run(cache, labels, plan).reject


def parse_test(token: str, k: int = 3) -> TestSpec:
    token = token.strip()
    calibration = "perm"
    if "@" in token:
        token, calibration = token.split("@", 1)
    if ":" not in token:
        raise ValueError(f"test {token!r} must look like <test>:<dissimilarity>, e.g. nn:rho0")
    test, dis = token.split(":", 1)
    return TestSpec(test.strip().lower(), dis.strip().lower(), calibration.strip().lower(), k=k)


def parse_tests(text: str, k: int = 3) -> list[TestSpec]:
    tests = [parse_test(t, k) for t in text.split(",") if t.strip()]
    if not tests:
        raise ValueError("no tests given")
    return tests

