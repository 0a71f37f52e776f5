"""Seeded simulation scenarios and the power-study harness.

Scenarios ``EX1`` .. ``EX7``:

* EX1  N(0, diag(1..1, 2..2)) vs N(0, diag(2..2, 1..1)), halves of length d/2
* EX2  iid N(0, 5) vs iid sqrt(3) * t_5
* EX3  N(0, I) vs N(0.2 * 1, I / gamma)
* EX4  mixture of N(0.3 * 1, I), N(-0.3 * 1, 4I) vs the same with the
       alternating sign vector (1, -1, 1, ...) in place of 1
* EX5  U[-1/2, 1/2]^d vs equal mixture of U[-0.45, 0.45]^d and U[-0.55, 0.55]^d
* EX6  N(0, I) vs a normal whose first ceil(sqrt(d)) coordinates have mean
       sqrt(0.01 log d) and variance 0.5 log d
* EX7  N(0, I) vs a law whose first ceil(d^(2/3)) coordinates are
       sqrt(1/3) * t_3, the rest N(0, 1)

Random streams come from numpy's counter-based Philox generator keyed by a
``SeedSequence``; normal and Student-t variates use numpy's
``standard_normal`` and ``standard_t``.
"""

from __future__ import annotations

import enum
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .calibrate import PermutationPlan
from .engine import MatrixCache, TestSpec
from .kernels import PooledSample
from .stats import LabelVector


class ScenarioId(str, enum.Enum):
    EX1 = "EX1"
    EX2 = "EX2"
    EX3 = "EX3"
    EX4 = "EX4"
    EX5 = "EX5"
    EX6 = "EX6"
    EX7 = "EX7"


def sqrt_count(d: int) -> int:
    """ceil(sqrt(d)) without floating-point rounding."""
    s = math.isqrt(d)
    return s if s * s == d else s + 1


def two_thirds_count(d: int) -> int:
    """ceil(d ** (2/3)): the smallest s with s**3 >= d**2."""
    s = max(1, int(round(d ** (2.0 / 3.0))) - 1)
    while s ** 3 < d * d:
        s += 1
    while s > 1 and (s - 1) ** 3 >= d * d:
        s -= 1
    return s


@dataclass(frozen=True)
class ScenarioTheory:
    nu2: Optional[float]
    sigmaF2: Optional[float]
    sigmaG2: Optional[float]
    available: bool


@dataclass(frozen=True)
class Scenario:
    id: ScenarioId
    d: int
    gamma: float = 5.0
    null: bool = False  # draw both samples from F

    def __post_init__(self):
        sid = self.id.value if isinstance(self.id, ScenarioId) else str(self.id).upper()
        object.__setattr__(self, "id", ScenarioId(sid))
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if self.id is ScenarioId.EX1 and self.d % 2:
            raise ValueError(f"EX1 needs an even dimension, got d={self.d}")
        if self.id is ScenarioId.EX3 and not self.gamma > 0:
            raise ValueError(f"EX3 needs gamma > 0, got {self.gamma}")

    @property
    def signal_coordinates(self) -> int:
        if self.id is ScenarioId.EX6:
            return sqrt_count(self.d)
        if self.id is ScenarioId.EX7:
            return two_thirds_count(self.d)
        return self.d

    def theory(self) -> ScenarioTheory:
        """Limiting constants of the scaled squared distances, where they are known.

        ``nu2`` is the limiting scaled squared mean gap; ``sigmaF2``,
        ``sigmaG2`` the limiting average coordinate variances.
        """
        if self.id is ScenarioId.EX1:
            return ScenarioTheory(0.0, 1.5, 1.5, True)
        if self.id is ScenarioId.EX2:
            return ScenarioTheory(0.0, 5.0, 5.0, True)
        if self.id is ScenarioId.EX3:
            g2 = 1.0 if self.null else 1.0 / self.gamma
            return ScenarioTheory(0.0 if self.null else 0.04, 1.0, g2, True)
        if self.id in (ScenarioId.EX6, ScenarioId.EX7):
            # the signal fraction vanishes, so the limits match the null
            return ScenarioTheory(0.0, 1.0, 1.0, True)
        return ScenarioTheory(None, None, None, False)

    def _draw(self, rng: np.random.Generator, size: int, second: bool) -> np.ndarray:
        d = self.d
        sid = self.id
        if sid is ScenarioId.EX1:
            sd = np.r_[np.ones(d // 2), np.full(d - d // 2, math.sqrt(2.0))]
            if second:
                sd = sd[::-1]
            return rng.standard_normal((size, d)) * sd
        if sid is ScenarioId.EX2:
            if second:
                return math.sqrt(3.0) * rng.standard_t(5, size=(size, d))
            return math.sqrt(5.0) * rng.standard_normal((size, d))
        if sid is ScenarioId.EX3:
            z = rng.standard_normal((size, d))
            return 0.2 + z / math.sqrt(self.gamma) if second else z
        if sid is ScenarioId.EX4:
            direction = np.where(np.arange(d) % 2 == 0, 1.0, -1.0) if second else np.ones(d)
            coin = rng.random(size) < 0.5
            z = rng.standard_normal((size, d))
            wide = coin[:, None]
            return np.where(wide, -0.3 * direction + 2.0 * z, 0.3 * direction + z)
        if sid is ScenarioId.EX5:
            u = rng.random((size, d)) - 0.5
            if not second:
                return u
            coin = rng.random(size) < 0.5
            return u * np.where(coin, 1.1, 0.9)[:, None]
        if sid is ScenarioId.EX6:
            z = rng.standard_normal((size, d))
            if not second:
                return z
            s = self.signal_coordinates
            z[:, :s] = math.sqrt(0.01 * math.log(d)) + math.sqrt(0.5 * math.log(d)) * z[:, :s]
            return z
        if sid is ScenarioId.EX7:
            z = rng.standard_normal((size, d))
            if not second:
                return z
            s = self.signal_coordinates
            z[:, :s] = math.sqrt(1.0 / 3.0) * rng.standard_t(3, size=(size, s))
            return z
        raise ValueError(sid)  # pragma: no cover


def make_rng(seed) -> np.random.Generator:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(ss))


def generate(sc: Scenario, m: int, n: int, seed) -> tuple[PooledSample, LabelVector]:
    """First m rows from F, next n from G; identical arguments give identical samples."""
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be positive, got m={m}, n={n}")
    rng = make_rng(seed)
    x = sc._draw(rng, m, second=False)
    y = sc._draw(rng, n, second=not sc.null)
    return PooledSample(np.vstack([x, y]), m, n), LabelVector.from_counts(m, n)


def replication_seed(master: int, grid_index: int, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master), spawn_key=(int(grid_index), int(rep)))


# -- power study -----------------------------------------------------------------


@dataclass(frozen=True)
class PowerRow:
    scenario: str
    d: int
    gamma: Optional[float]
    test: str
    kernel: str
    reps: int
    power: float
    se: float
    seconds: float


CSV_COLUMNS = ("scenario", "d", "gamma", "test", "kernel", "reps", "power", "se", "seconds")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class PowerTable:
    rows: list[PowerRow]

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in self.rows:
            lines.append(",".join([
                r.scenario,
                str(r.d),
                "" if r.gamma is None else fmt_float(r.gamma),
                r.test,
                r.kernel,
                str(r.reps),
                fmt_float(r.power),
                fmt_float(r.se),
                fmt_float(r.seconds),
            ]))
        return "\n".join(lines) + "\n"

    def power(self, test: str, kernel: str, d: Optional[int] = None) -> float:
        hits = [r.power for r in self.rows if r.test == test and r.kernel == kernel
                and (d is None or r.d == d)]
        if len(hits) != 1:
            raise KeyError((test, kernel, d))
        return hits[0]


def worker_count() -> int:
    raw = os.environ.get("GRAPHTEST_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GRAPHTEST_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("GRAPHTEST_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _one_replication(args) -> tuple[list[bool], list[float]]:
    sc, m, n, tests, B, alpha, randomized, seed_seq = args
    sample, labels = generate(sc, m, n, seed_seq)
    test_seed = int(seed_seq.generate_state(1, dtype=np.uint64)[0])
    plan = PermutationPlan(B=B, seed=test_seed, alpha=alpha, randomized=randomized)
    cache = MatrixCache(sample.points)
    decisions, seconds = [], []
    for t in tests:
        start = time.perf_counter()
        decisions.append(bool(t.decide(cache, labels, plan)))
        seconds.append(time.perf_counter() - start)
    return decisions, seconds


def power_study(sc: Scenario, m: int, n: int, tests: Sequence[TestSpec], plan: PermutationPlan,
                reps: int, d_grid: Optional[Sequence[int]] = None,
                gamma_grid: Optional[Sequence[float]] = None, threads: Optional[int] = None,
                progress=None) -> PowerTable:
    """Rejection rates of each test at each grid point.

    Exactly one of ``d_grid`` / ``gamma_grid`` is used; the other parameter
    comes from ``sc``. Replication ``r`` at grid index ``g`` draws its data
    and its permutation seed from ``(plan.seed, g, r)`` only. A test's
    ``seconds`` includes the dissimilarity matrices it was first to request.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if (d_grid is None) == (gamma_grid is None):
        raise ValueError("give exactly one of d_grid and gamma_grid")
    grid = list(d_grid if d_grid is not None else gamma_grid)
    if not grid:
        raise ValueError("empty grid")
    if gamma_grid is not None and sc.id is not ScenarioId.EX3:
        raise ValueError("a gamma grid only applies to EX3")
    workers = worker_count() if threads is None else max(1, threads)
    rows: list[PowerRow] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for g, value in enumerate(grid):
            point = Scenario(sc.id, int(value), sc.gamma, sc.null) if d_grid is not None else \
                Scenario(sc.id, sc.d, float(value), sc.null)
            jobs = [(point, m, n, tuple(tests), plan.B, plan.alpha, plan.randomized,
                     replication_seed(plan.seed, g, r)) for r in range(reps)]
            results = list(pool.map(_one_replication, jobs, chunksize=max(1, reps // (4 * workers))))\
                if pool else [_one_replication(j) for j in jobs]
            hits = np.array([res[0] for res in results], dtype=float).reshape(reps, len(tests))
            secs = np.array([res[1] for res in results], dtype=float).reshape(reps, len(tests))
            for ti, t in enumerate(tests):
                p = float(hits[:, ti].mean())
                rows.append(PowerRow(
                    scenario=point.id.value,
                    d=point.d,
                    gamma=point.gamma if point.id is ScenarioId.EX3 else None,
                    test=t.test,
                    kernel=t.dissimilarity if getattr(t, "calibration", "perm") == "perm"
                    else f"{t.dissimilarity}@{t.calibration}",
                    reps=reps,
                    power=p,
                    se=math.sqrt(p * (1.0 - p) / reps),
                    seconds=float(secs[:, ti].sum()),
                ))
            if progress is not None:
                progress(g, value)
    finally:
        if pool is not None:
            pool.shutdown()
    return PowerTable(rows)
