import math
import random
from fractions import Fraction

import numpy as np
import pytest

from boxpierce.generators import disjoint_grid, planted_piercing
from boxpierce.geom import Box, exact_piercing, normalize_instance, verify_piercing
from boxpierce.mwu import (
    ImprovedConfig,
    MwuConfig,
    _sample_counts,
    basic_mwu,
    doublings_until_heavy,
    improved_mwu,
    mwu_params,
)
from boxpierce.arrangement import BatchSampler
from boxpierce.classic import greedy_interval_pierce

from conftest import instance, random_boxes


def ratio_bound(p: int) -> float:
    return 8 * p * max(1.0, math.log2(math.log2(p + 4)))


def test_params():
    eps, ell, tau = mwu_params(3, 10, 2)
    assert eps == pytest.approx(2 / 9)
    assert ell == 4
    assert tau == math.ceil(8 * math.log(400 / 3))


@pytest.mark.parametrize("share, eps", [(0.01, 0.3), (0.2, 0.25), (0.001, 0.5), (0.24, 0.25), (1e-9, 0.1)])
def test_doublings_until_heavy_matches_stepping(share, eps):
    t, s = 0, share
    while True:
        t += 1
        s = 2 * s / (1 + s)
        if s >= eps:
            break
    assert doublings_until_heavy(share, eps) == t


def test_basic_single_box():
    sol = basic_mwu(instance([Box((0, 0), (1, 1))]), seed=0)
    assert sol.size == 1 and sol.stats["stages"] == 1 and sol.stats["k"] == 2


@pytest.mark.parametrize("m", [1, 4, 9, 16])
def test_basic_disjoint(m):
    side = int(math.isqrt(m))
    inst = disjoint_grid(side, 2)
    sol = basic_mwu(inst, seed=m)
    assert not verify_piercing(inst, sol.points)
    assert m <= sol.size <= ratio_bound(m)


@pytest.mark.parametrize("seed", range(6))
def test_basic_weight_growth_audit(seed):
    r = random.Random(seed)
    inst = instance(random_boxes(r, 12, 2, span=0.5))
    p = exact_piercing(inst).size
    sol = basic_mwu(inst, seed, MwuConfig(audit=True))
    assert not verify_piercing(inst, sol.points)
    for stage in sol.stats["trace"]:
        eps = Fraction(stage["eps"])
        W = [Fraction(w) for w in stage["weights"]]
        for i in range(1, len(W)):
            assert W[i] <= (1 + eps) * W[i - 1]
            assert p * Fraction(2) ** (i // p) <= W[i]


@pytest.mark.parametrize("d", [2, 3])
def test_basic_random_ratio(d):
    r = random.Random(40 + d)
    for seed in range(4):
        inst = instance(random_boxes(r, 25, d, span=0.4))
        sol = basic_mwu(inst, seed)
        assert not verify_piercing(inst, sol.points)
        assert sol.size <= ratio_bound(exact_piercing(inst).size)


def test_basic_float_mode():
    inst = instance(random_boxes(random.Random(3), 40, 2))
    sol = basic_mwu(inst, 1, MwuConfig(arith="float"))
    assert not verify_piercing(inst, sol.points)


def test_basic_deterministic():
    inst = instance(random_boxes(random.Random(4), 30, 2))
    assert basic_mwu(inst, 9).points == basic_mwu(inst, 9).points


def test_basic_cold_start_same_validity():
    inst = instance(random_boxes(random.Random(5), 30, 2, span=0.3))
    sol = basic_mwu(inst, 2, MwuConfig(warm_start=False))
    assert not verify_piercing(inst, sol.points)
    assert sol.stats["stages"] >= 1


def test_improved_single_box():
    sol = improved_mwu(instance([Box((0, 0, 0), (1, 2, 3))]), seed=0)
    assert sol.size == 1 and sol.stats["guesses"] == 1


def test_improved_grid():
    inst = disjoint_grid(4, 2)
    sol = improved_mwu(inst, seed=1, cfg=ImprovedConfig(warm_start=False))
    assert not verify_piercing(inst, sol.points)
    assert sol.size <= ratio_bound(16)
    # early guesses end in a restart because the disjoint family is too big
    assert sol.stats["restarts"] >= 1 and sol.stats["k"] >= 8


@pytest.mark.parametrize("seed", range(5))
def test_improved_random_ratio(seed):
    inst = instance(random_boxes(random.Random(100 + seed), 30, 2, span=0.4))
    sol = improved_mwu(inst, seed)
    assert not verify_piercing(inst, sol.points)
    assert sol.size <= ratio_bound(exact_piercing(inst).size)


def test_improved_1d_is_greedy():
    boxes = random_boxes(random.Random(6), 25, 1)
    assert improved_mwu(instance(boxes)).size == len(greedy_interval_pierce(boxes))


def test_improved_planted_3d():
    inst = planted_piercing(150, 3, seed=2, k=4)
    sol = improved_mwu(inst, 3)
    assert not verify_piercing(inst, sol.points)
    assert sol.size <= ratio_bound(inst.metadata["p_upper"])


def test_improved_empty():
    from boxpierce.geom import ProblemInstance

    assert improved_mwu(ProblemInstance(2, [])).size == 0


def test_sample_counts_routes_agree():
    inst = normalize_instance(random_boxes(random.Random(7), 60, 2))
    R = BatchSampler(inst).sample({3: 2}, 5000, np.random.default_rng(0))
    direct = _sample_counts(inst, R, ImprovedConfig())
    tree = _sample_counts(inst, R, ImprovedConfig(direct_count_cells=0))
    Ra = np.asarray(R)
    brute = [int(np.all((Ra >= b.lo) & (Ra <= b.hi), axis=1).sum()) for b in inst.boxes]
    assert direct.tolist() == brute == tree.tolist()
