import math

import numpy as np
import pytest

from graphtest.calibrate import PermutationPlan
from graphtest.engine import parse_tests
from graphtest.simgen import (
    Scenario,
    generate,
    power_study,
    replication_seed,
    sqrt_count,
    two_thirds_count,
)


class Always:
    """Stub test with a fixed decision."""

    def __init__(self, reject):
        self.reject = reject
        self.test = "always" if reject else "never"
        self.dissimilarity = "none"
        self.calibration = "perm"

    def decide(self, cache, labels, plan):
        return self.reject


def test_counts_are_exact_ceilings():
    assert [sqrt_count(d) for d in (1, 4, 5, 100, 101)] == [1, 2, 3, 10, 11]
    assert [two_thirds_count(d) for d in (1, 8, 9, 1000, 1024)] == [1, 4, 5, 100, 102]
    for d in range(1, 3000):
        s = two_thirds_count(d)
        assert s ** 3 >= d * d > (s - 1) ** 3


def test_ex1_needs_even_dimension():
    with pytest.raises(ValueError, match="even"):
        Scenario("EX1", 7)


def test_generation_is_reproducible_and_seed_sensitive():
    sc = Scenario("EX4", 16)
    a, la = generate(sc, 5, 6, 42)
    b, _ = generate(sc, 5, 6, 42)
    c, _ = generate(sc, 5, 6, 43)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert list(la.labels) == [1] * 5 + [2] * 6
    assert a.points.shape == (11, 16)


def test_replication_seeds_are_distinct():
    states = {tuple(replication_seed(7, g, r).generate_state(2)) for g in range(3) for r in range(50)}
    assert len(states) == 150


def test_ex3_variances():
    z, _ = generate(Scenario("EX3", 50, gamma=5.0), 4000, 4000, 1)
    x, y = z.points[:4000], z.points[4000:]
    assert np.var(x) == pytest.approx(1.0, rel=0.05)
    assert np.var(y) == pytest.approx(0.2, rel=0.05)
    assert np.mean(y) == pytest.approx(0.2, abs=0.01)


def test_ex1_coordinate_variances():
    z, _ = generate(Scenario("EX1", 4), 20000, 20000, 2)
    vx = z.points[:20000].var(axis=0)
    vy = z.points[20000:].var(axis=0)
    assert vx == pytest.approx([1, 1, 2, 2], rel=0.05)
    assert vy == pytest.approx([2, 2, 1, 1], rel=0.05)


def test_ex5_support_and_mixing():
    z, _ = generate(Scenario("EX5", 3), 2000, 20000, 3)
    x, y = z.points[:2000], z.points[2000:]
    assert np.all(np.abs(x) <= 0.5)
    assert np.all(np.abs(y) <= 0.55)
    # a row from the narrow component stays inside 0.45 in every coordinate
    wide = np.any(np.abs(y) > 0.45, axis=1)
    narrow_share = 1 - wide.mean()
    # a wide row escapes 0.45 in some coordinate with probability 1 - (0.45/0.55)^3
    p_escape = 1 - (0.45 / 0.55) ** 3
    frac_wide = wide.mean() / p_escape
    assert 0.48 <= frac_wide <= 0.52
    assert narrow_share > 0


def test_ex6_and_ex7_touch_only_the_signal_coordinates():
    for sid in ("EX6", "EX7"):
        sc = Scenario(sid, 64)
        z, _ = generate(sc, 3000, 3000, 4)
        y = z.points[3000:]
        s = sc.signal_coordinates
        assert np.var(y[:, s:]) == pytest.approx(1.0, rel=0.05)
    s6 = Scenario("EX6", 64)
    y6 = generate(s6, 10, 4000, 5)[0].points[10:, :s6.signal_coordinates]
    assert np.var(y6) == pytest.approx(0.5 * math.log(64), rel=0.05)


@pytest.mark.parametrize("sid", ["EX1", "EX2", "EX3", "EX6", "EX7"])
def test_theory_constants_match_simulation(sid):
    sc = Scenario(sid, 4096)
    th = sc.theory()
    assert th.available
    z, _ = generate(sc, 60, 60, 6)
    x, y = z.points[:60], z.points[60:]
    d = sc.d
    gap = float(np.sum((x.mean(0) - y.mean(0)) ** 2) / d)
    # the sample mean gap carries a variance term of order (sigmaF2/m + sigmaG2/n)
    assert gap - (th.sigmaF2 + th.sigmaG2) / 60 == pytest.approx(th.nu2, abs=0.02)
    assert float(x.var(axis=0, ddof=1).mean()) == pytest.approx(th.sigmaF2, rel=0.05)
    assert float(y.var(axis=0, ddof=1).mean()) == pytest.approx(th.sigmaG2, rel=0.05)


def test_theory_unavailable_for_mixtures():
    assert not Scenario("EX4", 10).theory().available
    assert not Scenario("EX5", 10).theory().available


def test_power_of_stub_tests():
    table = power_study(Scenario("EX3", 5), 4, 4, [Always(True), Always(False)], PermutationPlan(B=10),
                        reps=7, d_grid=[5, 10], threads=1)
    assert len(table.rows) == 4
    assert all(r.power == 1.0 for r in table.rows if r.test == "always")
    assert all(r.power == 0.0 and r.se == 0.0 for r in table.rows if r.test == "never")


def test_power_study_grid_validation():
    tests = parse_tests("nn:euclid")
    with pytest.raises(ValueError, match="exactly one"):
        power_study(Scenario("EX3", 5), 4, 4, tests, PermutationPlan(B=10), reps=1)
    with pytest.raises(ValueError, match="gamma grid"):
        power_study(Scenario("EX2", 5), 4, 4, tests, PermutationPlan(B=10), reps=1, gamma_grid=[1.0])


def test_null_level_and_reproducibility():
    tests = parse_tests("nn:euclid,mst:rho0,nbp:lin@exact")
    plan = PermutationPlan(B=99, seed=17)
    sc = Scenario("EX3", 20, null=True)
    a = power_study(sc, 10, 10, tests, plan, reps=100, d_grid=[20], threads=1)
    b = power_study(sc, 10, 10, tests, plan, reps=100, d_grid=[20], threads=1)
    assert [r.power for r in a.rows] == [r.power for r in b.rows]
    assert all(r.power <= 0.12 for r in a.rows)


def test_alternative_is_detected():
    tests = parse_tests("nn:rho0,shp:lin")
    table = power_study(Scenario("EX3", 200, gamma=5.0), 10, 10, tests, PermutationPlan(B=99, seed=1),
                        reps=20, d_grid=[200], threads=1)
    assert min(r.power for r in table.rows) >= 0.8


def test_ex3_gamma_one_only_shifts_the_mean():
    z, _ = generate(Scenario("EX3", 500, gamma=1.0), 50, 50, 8)
    assert z.points[:50].var(axis=0).mean() == pytest.approx(1.0, rel=0.1)
    assert z.points[50:].var(axis=0).mean() == pytest.approx(1.0, rel=0.1)


def test_ex3_scaled_distances_concentrate_at_theory_values():
    sc = Scenario("EX3", 4096, gamma=5.0)
    th = sc.theory()
    z, _ = generate(sc, 20, 20, 9)
    x, y = z.points[:20], z.points[20:]
    scale = math.sqrt(sc.d)

    def mean_dist(a, b, same):
        vals = [np.linalg.norm(a[i] - b[j]) / scale for i in range(len(a)) for j in range(len(b))
                if not same or i < j]
        return float(np.mean(vals))

    assert mean_dist(x, x, True) == pytest.approx(math.sqrt(2 * th.sigmaF2), rel=0.02)
    assert mean_dist(y, y, True) == pytest.approx(math.sqrt(2 * th.sigmaG2), rel=0.02)
    assert mean_dist(x, y, False) == pytest.approx(math.sqrt(th.sigmaF2 + th.sigmaG2 + th.nu2), rel=0.02)
