import math
import random

import pytest

from boxpierce.classic import dnc_pierce
from boxpierce.generators import planted_piercing, uniform_random
from boxpierce.geom import Box, UsageError, exact_piercing, verify_piercing
from boxpierce.multiround import (
    MultiRoundConfig,
    TwoRoundConfig,
    loglog_factor,
    multi_round_pierce,
    residual_shrinkage_check,
    two_round_2d,
    unpierced_indices,
)
from boxpierce.mwu import improved_mwu

from conftest import instance, random_boxes


def dnc_inner(inst, seed):
    return dnc_pierce(inst)


def test_one_round_is_inner():
    inst = instance(random_boxes(random.Random(0), 40, 2))
    a = multi_round_pierce(inst, 3, MultiRoundConfig(rounds=1))
    assert a.points == improved_mwu(inst, 3).points


def test_bad_round_count():
    with pytest.raises(UsageError):
        multi_round_pierce(instance([Box((0, 0), (1, 1))]), 0, MultiRoundConfig(rounds=0))


def test_large_guess_single_effective_round():
    inst = instance(random_boxes(random.Random(1), 20, 2))
    sol = multi_round_pierce(inst, 0)
    assert not verify_piercing(inst, sol.points)
    assert sol.stats["residuals"][-1] == 0 and len(sol.stats["residuals"]) == 2


@pytest.mark.parametrize("rounds", [2, 3])
def test_real_rounds_shrink_residue(rounds):
    inst = planted_piercing(2000, 2, seed=4, k=10)
    cfg = MultiRoundConfig(rounds=rounds, sample_mult=0.25, inner=dnc_inner)
    sol = multi_round_pierce(inst, 5, cfg)
    assert not verify_piercing(inst, sol.points)
    res = sol.stats["residuals"]
    delta = sol.stats["delta"]
    assert sol.stats["sample_size"] < inst.n
    for before, after in zip(res, res[1:]):
        assert after <= delta * before


def test_multiround_ratio_small():
    r = random.Random(7)
    for seed in range(4):
        inst = instance(random_boxes(r, 25, 2, span=0.4))
        p = exact_piercing(inst).size
        sol = multi_round_pierce(inst, seed)
        assert not verify_piercing(inst, sol.points)
        assert sol.size <= 8 * p * max(1.0, math.log2(math.log2(p + 4)))


def test_restart_on_oversized_partial_solution():
    inst = uniform_random(400, 2, seed=3, side=0.02)
    cfg = MultiRoundConfig(rounds=2, sample_mult=0.05, inner=dnc_inner)
    sol = multi_round_pierce(inst, 1, cfg)
    assert not verify_piercing(inst, sol.points)
    assert sol.stats["restarts"] >= 1


def test_unpierced_indices():
    inst = instance([Box((0, 0), (1, 1)), Box((2, 2), (3, 3)), Box((0, 0), (3, 3))])
    assert unpierced_indices(inst, [0, 1, 2], [(0.5, 0.5)]) == [1]
    assert unpierced_indices(inst, [0, 2], []) == [0, 2]


def test_shrinkage_exact_solution():
    inst = instance(random_boxes(random.Random(8), 20, 2))
    Q = exact_piercing(inst).points
    rep = residual_shrinkage_check(inst, Q, 0.1)
    assert rep["unpierced"] == 0 and not rep["violated"]


def test_shrinkage_missing_cluster():
    near = [Box((0, 0), (1 + i / 10, 1)) for i in range(5)]
    far = [Box((10, 10), (11, 11 + i / 10)) for i in range(5)]
    inst = instance(near + far)
    rep = residual_shrinkage_check(inst, [(0.5, 0.5)], 0.3)
    assert rep["indices"] == [5, 6, 7, 8, 9] and rep["violated"]
    assert not residual_shrinkage_check(inst, [(0.5, 0.5)], 0.5)["violated"]


def test_shrinkage_monte_carlo():
    inst = planted_piercing(2000, 2, seed=9, k=10)
    k, n = 10, inst.n
    delta = math.sqrt(k / n)
    # a sample below n so the check has something to measure
    m = math.ceil(k / delta * math.log(n))
    assert m < n
    violations = 0
    for t in range(20):
        sample = random.Random(t).sample(range(n), m)
        Q = dnc_pierce(inst.subset(sorted(sample))).points
        violations += residual_shrinkage_check(inst, Q, delta)["violated"]
    assert violations / 20 <= 0.05


def test_two_round_common_point():
    r = random.Random(10)
    boxes = [Box((-r.random(), -r.random()), (r.random(), r.random())) for _ in range(300)]
    sol = two_round_2d(instance(boxes), 0)
    assert not verify_piercing(instance(boxes), sol.points)
    assert sol.size <= 8


def test_two_round_small_is_direct():
    inst = instance(random_boxes(random.Random(11), 50, 2))
    sol = two_round_2d(inst, 0)
    assert sol.stats["direct"] and not verify_piercing(inst, sol.points)


def test_two_round_planted():
    inst = planted_piercing(3000, 2, seed=12, k=8)
    sol = two_round_2d(inst, 4)
    assert not sol.stats["direct"]
    assert not verify_piercing(inst, sol.points)
    assert sol.size <= 8 * 8 * loglog_factor(12) * 2


def test_two_round_needs_2d():
    with pytest.raises(UsageError):
        two_round_2d(instance([Box((0, 0, 0), (1, 1, 1))]))


def test_two_round_custom_inner():
    inst = planted_piercing(1000, 2, seed=13, k=5)
    sol = two_round_2d(inst, 0, TwoRoundConfig(inner=dnc_inner))
    assert not verify_piercing(inst, sol.points)
