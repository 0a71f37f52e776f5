"""Power curves for the simulation scenarios.

Each figure is a dataclass config turned into a ``graphtest power`` call,
so the CSV and SVG files are exactly what the CLI would write.

    python scripts/reproduce_figures.py --out figures --reps 100
    python scripts/reproduce_figures.py --only ex3-gamma
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from graphtest.cli import main as cli_main

RAW = ["euclid"]
MADD = ["rho0", "rho1", "rho2", "rho3"]


@dataclass(frozen=True)
class FigureConfig:
    name: str
    scenario: str
    tests: tuple[str, ...]
    d_grid: str | None = None
    gamma_grid: str | None = None
    d: int = 250
    gamma: float = 5.0
    m: int = 20
    n: int = 20
    extra: tuple[str, ...] = field(default_factory=tuple)

    def argv(self, out: Path, reps: int, perms: int, seed: int) -> list[str]:
        args = ["power", "--scenario", self.scenario, "--m", str(self.m), "--n", str(self.n),
                "--reps", str(reps), "--perms", str(perms), "--seed", str(seed),
                "--tests", ",".join(self.tests), "--out", str(out / self.name), "--plot", "on",
                "--d", str(self.d), "--gamma", str(self.gamma), *self.extra]
        if self.d_grid:
            args += ["--d-grid", self.d_grid]
        if self.gamma_grid:
            args += ["--gamma-grid", self.gamma_grid]
        return args


def grid_tests(families, dissimilarities) -> tuple[str, ...]:
    return tuple(f"{f}:{k}" for f in families for k in dissimilarities)


FIGURES = [
    FigureConfig("ex1", "ex1", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
    FigureConfig("ex2", "ex2", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
    FigureConfig("ex3-gamma", "ex3", grid_tests(["nn", "mst"], RAW + ["rho0"])
                 + grid_tests(["shp", "nbp"], ["lin", "log", "exp"]), gamma_grid="1,2,...,8", d=250),
    FigureConfig("ex4", "ex4", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
    FigureConfig("ex5", "ex5", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
    FigureConfig("ex6", "ex6", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
    FigureConfig("ex7", "ex7", grid_tests(["nn", "mst"], RAW + MADD), d_grid="2,4,...,1024"),
]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("figures"))
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--perms", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", action="append", help="figure name; repeatable")
    args = p.parse_args(argv)
    chosen = [f for f in FIGURES if not args.only or f.name in args.only]
    if not chosen:
        p.error(f"no figure matches {args.only}; known: {', '.join(f.name for f in FIGURES)}")
    for fig in chosen:
        print(f"== {fig.name}", file=sys.stderr)
        code = cli_main(fig.argv(args.out, args.reps, args.perms, args.seed))
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
