import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxpierce.classic import (
    dnc_independent,
    dnc_independent_idx,
    dnc_pierce,
    greedy_interval_independent,
    greedy_interval_pierce,
)
from boxpierce.geom import Box, exact_piercing, independent, verify_piercing
from boxpierce.generators import disjoint_grid

from conftest import instance, random_boxes
from naive import brute_max_independent, brute_min_piercing


def I(lo, hi):
    return Box((lo,), (hi,))


def test_greedy_example():
    assert greedy_interval_pierce([(0, 2), (1, 3), (4, 5)]) == [2, 5]


def test_greedy_nested():
    assert len(greedy_interval_pierce([(0, 10), (1, 9), (2, 8)])) == 1


def test_greedy_disjoint():
    ivs = [(2 * i, 2 * i + 1) for i in range(7)]
    assert len(greedy_interval_pierce(ivs)) == 7


def test_greedy_accepts_boxes():
    assert greedy_interval_pierce([I(0, 2), I(1, 3)]) == [2]


def test_independent_example():
    assert greedy_interval_independent([(0, 2), (1, 3), (4, 5)]) == [(0, 2), (4, 5)]


def test_independent_common_point():
    assert len(greedy_interval_independent([(0, 5), (1, 6), (2, 7), (5, 9)])) == 1


def test_independent_disjoint():
    ivs = [(3 * i, 3 * i + 1) for i in range(5)]
    assert greedy_interval_independent(ivs) == ivs


ints = st.lists(st.tuples(st.integers(0, 20), st.integers(0, 6)).map(lambda t: (t[0], t[0] + t[1])),
                min_size=1, max_size=9)


@given(ints)
def test_greedy_matches_brute_force(ivs):
    boxes = [I(lo, hi) for lo, hi in ivs]
    pts = greedy_interval_pierce(ivs)
    assert not verify_piercing(instance(boxes), [(x,) for x in pts])
    assert len(pts) == brute_min_piercing(boxes)
    sub = greedy_interval_independent(ivs)
    assert independent([I(*t) for t in sub])
    # interval graphs are perfect: packing equals piercing
    assert len(sub) == len(pts)


def test_dnc_1d_equals_greedy():
    r = random.Random(1)
    boxes = random_boxes(r, 40, 1)
    assert dnc_pierce(instance(boxes)).size == len(greedy_interval_pierce(boxes))


@pytest.mark.parametrize("k", [2, 4, 7])
def test_dnc_disjoint_grid(k):
    inst = disjoint_grid(k, 2)
    sol = dnc_pierce(inst)
    assert sol.size == k * k
    assert not verify_piercing(inst, sol.points)


@pytest.mark.parametrize("seed", range(5))
def test_dnc_random_within_log_factor(seed):
    inst = instance(random_boxes(random.Random(seed), 30, 2, span=0.4))
    sol = dnc_pierce(inst)
    assert not verify_piercing(inst, sol.points)
    p = exact_piercing(inst).size
    assert sol.size <= p * (math.ceil(math.log2(30)) + 1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_dnc_valid_random(d):
    r = random.Random(d)
    for _ in range(10):
        inst = instance(random_boxes(r, r.randrange(1, 80), d))
        assert not verify_piercing(inst, dnc_pierce(inst).points)


def test_independent_disjoint_boxes_all():
    inst = disjoint_grid(5, 2)
    assert len(dnc_independent(inst)) == 25


def test_independent_grid_lower_bound():
    k = 6
    inst = disjoint_grid(k, 2)
    got = len(dnc_independent_idx(inst.boxes, extend=False))
    assert got >= k * k / (math.ceil(math.log2(k * k)) + 1)


def test_independent_common_point_boxes():
    r = random.Random(3)
    boxes = [Box((-r.random(), -r.random()), (r.random(), r.random())) for _ in range(20)]
    assert len(dnc_independent(instance(boxes))) == 1


@pytest.mark.parametrize("d", [2, 3])
def test_independent_is_disjoint_and_bounded(d):
    r = random.Random(10 + d)
    for _ in range(15):
        boxes = random_boxes(r, r.randrange(1, 9), d, span=0.5)
        sub = dnc_independent(instance(boxes))
        assert all(not a.intersects(b) for a, b in itertools.combinations(sub, 2))
        assert 1 <= len(sub) <= brute_max_independent(boxes)
        # any disjoint family lower-bounds the piercing number
        assert len(sub) <= exact_piercing(instance(boxes)).size


def test_empty_inputs():
    assert greedy_interval_pierce([]) == []
    assert greedy_interval_independent([]) == []
    assert dnc_independent_idx([]) == []
