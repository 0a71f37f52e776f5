"""``graphtest`` command line: test, power, bench, subsample.

Exit status 0 on success, 1 on data errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .calibrate import PermutationPlan, run_test
from .data import DataError, SubsampleSpec, atomic_write, load_delimited, subsample, write_delimited
from .engine import DISSIMILARITIES, TEST_NAMES, MatrixCache, dissimilarity_token, parse_tests
from .kernels import as_kernel
from .simgen import Scenario, ScenarioId, fmt_float, generate, power_study
from .svg import power_chart

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_grid(text: str, kind=float) -> list:
    """Comma list with optional ellipsis: ``2,4,...,1024`` doubles, ``5,10,...,30`` steps."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty grid")
    if "..." not in parts:
        try:
            return [kind(p) for p in parts]
        except ValueError:
            raise UsageError(f"bad grid value in {text!r}") from None
    if len(parts) != 4 or parts[2] != "...":
        raise UsageError(f"ellipsis grids must look like a,b,...,z; got {text!r}")
    try:
        a, b, z = kind(parts[0]), kind(parts[1]), kind(parts[3])
    except ValueError:
        raise UsageError(f"bad grid value in {text!r}") from None
    if a > 0 and b > a:
        ratio = b / a
        out, v = [], a
        while v <= z * (1 + 1e-12):
            out.append(kind(v))
            v = v * ratio
        if out and abs(out[-1] - z) <= 1e-9 * abs(z):
            return out
    step = b - a
    if step <= 0:
        raise UsageError(f"grid {text!r} is not increasing")
    count = (z - a) / step
    if abs(count - round(count)) > 1e-9:
        raise UsageError(f"grid {text!r} does not reach its last value")
    return [kind(a + i * step) for i in range(int(round(count)) + 1)]


def _int_list(text: str) -> list[int]:
    return parse_grid(text, int)


# -- test ----------------------------------------------------------------------


def cmd_test(args) -> int:
    if args.calibration == "exact" and args.test not in ("shp", "nbp"):
        raise UsageError(f"--calibration exact needs a distribution-free test (shp or nbp), not {args.test}")
    ds = load_delimited(args.data, args.delimiter, args.label_column)
    token = dissimilarity_token(as_kernel(args.kernel), args.madd == "on")
    cache = MatrixCache(ds.pooled.points)
    plan = PermutationPlan(B=args.perms, seed=args.seed, alpha=args.alpha, randomized=args.randomize)
    report = run_test(cache.get(token), TEST_NAMES[args.test], ds.labels, plan, k=args.k,
                      calibration=args.calibration, shp_mode=args.shp_mode)
    payload = report.to_dict()
    payload.update({"test": args.test, "dissimilarity": token, "k": args.k, "m": ds.m, "n": ds.n, "d": ds.d})
    print(json.dumps(payload, sort_keys=True))
    verdict = "reject" if report.reject else "do not reject"
    print(f"{args.test} test on {token} ({ds.m} vs {ds.n} observations, d={ds.d}): "
          f"statistic={report.stat.value:.6g}, p={report.p_value:.6g} -> {verdict} H0 at alpha={args.alpha}")
    return EXIT_OK


# -- power ---------------------------------------------------------------------


FAMILY_TITLES = {
    "nn": "NN tests", "mst": "MST-run tests", "shp": "SHP-run tests", "nbp": "NBP tests",
    "cf-nn": "CF-NN tests", "cf-mst": "CF-MST tests",
}


def cmd_power(args) -> int:
    if (args.d_grid is None) == (args.gamma_grid is None):
        raise UsageError("give exactly one of --d-grid and --gamma-grid")
    try:
        scenario_id = ScenarioId(args.scenario.upper())
    except ValueError:
        raise UsageError(f"unknown scenario {args.scenario!r}; choose ex1..ex7") from None
    tests = _parse_tests(args.tests, args.k)
    d_grid = _int_list(args.d_grid) if args.d_grid is not None else None
    gamma_grid = parse_grid(args.gamma_grid) if args.gamma_grid is not None else None
    if gamma_grid is not None and scenario_id is not ScenarioId.EX3:
        raise UsageError("--gamma-grid only applies to ex3")
    base_d = d_grid[0] if d_grid else args.d
    try:
        sc = Scenario(scenario_id, base_d, args.gamma, args.null)
        for d in d_grid or []:
            Scenario(scenario_id, d, args.gamma, args.null)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    plan = PermutationPlan(B=args.perms, seed=args.seed, alpha=args.alpha, randomized=args.randomize)
    progress = None
    if args.verbose:
        def progress(g, value):
            print(f"grid point {g}: {value} done", file=sys.stderr)
    table = power_study(sc, args.m, args.n, tests, plan, args.reps, d_grid=d_grid, gamma_grid=gamma_grid,
                        progress=progress)
    out = Path(args.out)
    stem = f"power_{scenario_id.value.lower()}"
    csv_path = out / f"{stem}.csv"
    atomic_write(csv_path, table.to_csv())
    print(str(csv_path))
    if args.plot == "on":
        x_label = "dimension d" if d_grid else "gamma"
        families = []
        for t in tests:
            if t.test not in families:
                families.append(t.test)
        for fam in families:
            series = {}
            for row in table.rows:
                if row.test != fam:
                    continue
                x = row.d if d_grid else row.gamma
                series.setdefault(row.kernel, []).append((x, row.power))
            title = f"{scenario_id.value}: {FAMILY_TITLES[fam]}"
            svg_path = out / f"{stem}_{fam}.svg"
            atomic_write(svg_path, power_chart(title, series, x_label, log2_x=d_grid is not None))
            print(str(svg_path))
    return EXIT_OK


def _parse_tests(text: str, k: int):
    try:
        return parse_tests(text, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- bench ---------------------------------------------------------------------

BENCH_COLUMNS = ("test", "kernel", "m", "n", "d", "trials", "seconds")


def bench_rows(ms, ns, ds, trials, tests, plan) -> list[tuple]:
    """Mean wall seconds of one full test call per (test, dissimilarity, size) cell.

    Each trial draws fresh N(0, I) data and runs every test on it back to
    back, so all cells of a size see the same inputs.
    """
    if len(ms) != len(ns):
        raise UsageError("--m and --n lists must have the same length")
    rows = []
    for m, n in zip(ms, ns):
        for d in ds:
            totals = [0.0] * len(tests)
            for trial in range(trials):
                sample, labels = generate(Scenario(ScenarioId.EX3, d, null=True), m, n,
                                          np.random.SeedSequence(plan.seed, spawn_key=(m, n, d, trial)))
                for i, t in enumerate(tests):
                    start = time.perf_counter()
                    t.run(MatrixCache(sample.points), labels, plan)
                    totals[i] += time.perf_counter() - start
            for t, total in zip(tests, totals):
                rows.append((t.test, t.dissimilarity, m, n, d, trials, total / trials))
    return rows


def bench_csv(rows) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for test, kernel, m, n, d, trials, secs in rows:
        lines.append(",".join([test, kernel, str(m), str(n), str(d), str(trials), fmt_float(secs)]))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    tests = _parse_tests(args.tests, args.k)
    plan = PermutationPlan(B=args.perms, seed=args.seed, alpha=args.alpha)
    text = bench_csv(bench_rows(_int_list(args.m), _int_list(args.n), _int_list(args.d), args.trials, tests, plan))
    if args.out:
        atomic_write(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- subsample -----------------------------------------------------------------


def cmd_subsample(args) -> int:
    ds = load_delimited(args.data, args.delimiter, args.label_column)
    try:
        sub = subsample(ds, SubsampleSpec(args.size, args.seed))
    except ValueError as exc:
        raise DataError(str(exc)) from None
    write_delimited(sub, args.out, args.delimiter)
    print(json.dumps({"out": str(args.out), "m": sub.m, "n": sub.n, "seed": args.seed}, sort_keys=True))
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_data_args(p):
    p.add_argument("--data", required=True, help="delimited file, one observation per row")
    p.add_argument("--delimiter", default=",", help="field delimiter (default ','; ' ' for whitespace)")
    p.add_argument("--label-column", type=int, default=0, help="0-based position of the class id")


def _add_calibration_args(p, perms=True):
    p.add_argument("--k", type=int, default=3, help="neighbours for the NN and CF-NN graphs")
    p.add_argument("--alpha", type=float, default=0.05)
    if perms:
        p.add_argument("--perms", type=int, default=1000, help="number of label permutations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--randomize", action="store_true",
                   help="randomize the decision at the observed value to get exact level alpha")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphtest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one two-sample test on a labelled data file")
    _add_data_args(p)
    p.add_argument("--kernel", choices=["euclid", "lin", "log", "exp"], default="euclid")
    p.add_argument("--madd", choices=["on", "off"], default="on")
    p.add_argument("--test", choices=list(TEST_NAMES), default="nn")
    p.add_argument("--calibration", choices=["perm", "exact"], default="perm")
    p.add_argument("--shp-mode", choices=["auto", "exact", "two_opt"], default="auto")
    _add_calibration_args(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("power", help="simulate rejection rates over a dimension or gamma grid")
    p.add_argument("--scenario", required=True, help="ex1 .. ex7")
    p.add_argument("--d-grid", help="dimensions, e.g. 2,4,...,1024")
    p.add_argument("--gamma-grid", help="gamma values for ex3, e.g. 1,2,...,8")
    p.add_argument("--d", type=int, default=250, help="dimension used with --gamma-grid")
    p.add_argument("--gamma", type=float, default=5.0, help="gamma used by ex3 with --d-grid")
    p.add_argument("--null", action="store_true", help="draw both samples from the first distribution")
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--tests", default="nn:euclid,nn:rho0,mst:euclid,mst:rho0",
                   help=f"comma list of <test>:<dissimilarity>[@exact]; dissimilarities: "
                        f"{', '.join(DISSIMILARITIES)}")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--plot", choices=["on", "off"], default="off")
    p.add_argument("--verbose", action="store_true")
    _add_calibration_args(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("bench", help="time full test calls on raw distances vs MADD")
    p.add_argument("--m", default="20,40")
    p.add_argument("--n", default="20,40")
    p.add_argument("--d", default="200,500,1000")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tests", default="nn:euclid,nn:rho0,mst:euclid,mst:rho0")
    p.add_argument("--out", help="CSV path (default: standard output)")
    _add_calibration_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("subsample", help="class-proportional subsample of a labelled data file")
    _add_data_args(p)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_subsample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        for name in ("m", "n", "reps", "perms"):
            v = getattr(args, name, None)
            if isinstance(v, int) and v < 1:
                raise UsageError(f"--{name} must be >= 1")
        alpha = getattr(args, "alpha", None)
        if alpha is not None and not 0 < alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"graphtest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError) as exc:
        print(f"graphtest: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
