"""How far the SHP heuristic lands from the exact optimum on small instances.

    python scripts/shp_quality.py --instances 1000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from graphtest.graphs import shp
from graphtest.kernels import pairwise_matrix
from graphtest.madd import madd_values


@dataclass(frozen=True)
class QualityConfig:
    instances: int = 500
    max_n: int = 10
    seed: int = 0


def uniform_matrix(rng, N):
    w = np.triu(rng.uniform(0.1, 10.0, size=(N, N)), 1)
    return w + w.T


def kernel_matrix(rng, N):
    return pairwise_matrix(rng.standard_normal((N, 8)), "euclid_scaled").values


def madd_matrix(rng, N):
    return madd_values(pairwise_matrix(rng.standard_normal((N, 8)), "lin").values)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=QualityConfig.instances)
    p.add_argument("--max-n", type=int, default=QualityConfig.max_n)
    p.add_argument("--seed", type=int, default=QualityConfig.seed)
    cfg = QualityConfig(**{k.replace("-", "_"): v for k, v in vars(p.parse_args(argv)).items()})
    rng = np.random.default_rng(cfg.seed)
    print(f"{'family':10} {'over 5%':>8} {'mean':>8} {'worst':>8}")
    for label, make in (("uniform", uniform_matrix), ("euclid", kernel_matrix), ("madd", madd_matrix)):
        ratios = []
        for _ in range(cfg.instances):
            w = make(rng, int(rng.integers(3, cfg.max_n + 1)))
            ratios.append(shp(w, "two_opt").total_weight / shp(w, "exact").total_weight)
        r = np.array(ratios)
        print(f"{label:10} {np.mean(r > 1.05):8.3f} {r.mean():8.4f} {r.max():8.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
