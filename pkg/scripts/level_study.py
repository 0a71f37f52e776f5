"""Empirical size of every test under H0 (both samples N(0, I)).

    python scripts/level_study.py --reps 500 --randomized
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from graphtest.calibrate import PermutationPlan
from graphtest.engine import parse_tests
from graphtest.simgen import Scenario, power_study


@dataclass(frozen=True)
class LevelConfig:
    d: int = 100
    m: int = 20
    n: int = 20
    reps: int = 500
    perms: int = 1000
    alpha: float = 0.05
    seed: int = 3
    randomized: bool = False
    tests: str = ",".join(f"{t}:{k}" for t in ("nn", "mst", "shp", "nbp", "cf-nn", "cf-mst")
                          for k in ("euclid", "rho0", "rho2"))


def run(cfg: LevelConfig):
    plan = PermutationPlan(B=cfg.perms, seed=cfg.seed, alpha=cfg.alpha, randomized=cfg.randomized)
    return power_study(Scenario("EX3", cfg.d, null=True), cfg.m, cfg.n, parse_tests(cfg.tests), plan,
                       cfg.reps, d_grid=[cfg.d])


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = LevelConfig()
    for name in ("d", "m", "n", "reps", "perms", "seed"):
        p.add_argument(f"--{name}", type=int, default=getattr(defaults, name))
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--tests", default=defaults.tests)
    p.add_argument("--randomized", action="store_true", help="randomize ties at the observed value")
    cfg = LevelConfig(**vars(p.parse_args(argv)))
    table = run(cfg)
    print(f"{'test':8} {'dissimilarity':14} {'size':>7} {'se':>7}")
    for r in table.rows:
        flag = "" if abs(r.power - cfg.alpha) <= 2 * max(r.se, 1e-9) else "  *"
        print(f"{r.test:8} {r.kernel:14} {r.power:7.3f} {r.se:7.3f}{flag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
