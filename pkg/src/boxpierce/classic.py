"""Exact 1D greedy routines and median-split divide-and-conquer for d dimensions."""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from .geom import Box, PiercingSolution, ProblemInstance


def _interval(b) -> tuple:
    if isinstance(b, Box):
        return b.lo[0], b.hi[0]
    return b[0], b[1]


def greedy_interval_pierce(intervals: Sequence) -> list:
    """Minimum piercing set of closed intervals: repeatedly take the leftmost right end."""
    ivs = sorted((_interval(b) for b in intervals), key=lambda t: t[1])
    pts: list = []
    last = None
    for lo, hi in ivs:
        if last is None or lo > last:
            pts.append(hi)
            last = hi
    return pts


def _greedy_independent_idx(ivs: Sequence[tuple]) -> list:
    order = sorted(range(len(ivs)), key=lambda i: (ivs[i][1], i))
    chosen: list = []
    last = None
    for i in order:
        lo, hi = ivs[i]
        if last is None or lo > last:
            chosen.append(i)
            last = hi
    return chosen


def greedy_interval_independent(intervals: Sequence) -> list:
    """Maximum set of pairwise-disjoint intervals (earliest right endpoint first)."""
    items = list(intervals)
    ivs = [_interval(b) for b in items]
    return [items[i] for i in _greedy_independent_idx(ivs)]


def _median(idx: list, boxes: Sequence[Box], axis: int):
    ends = []
    for i in idx:
        ends.append(boxes[i].lo[axis])
        ends.append(boxes[i].hi[axis])
    ends.sort()
    return ends[len(ends) // 2]


def _split(idx: list, boxes: Sequence[Box], axis: int, med) -> tuple:
    left, cross, right = [], [], []
    for i in idx:
        b = boxes[i]
        if b.hi[axis] < med:
            left.append(i)
        elif b.lo[axis] > med:
            right.append(i)
        else:
            cross.append(i)
    return left, cross, right


def _pierce_rec(idx: list, boxes: Sequence[Box], axes: tuple, fixed: dict, out: list, stats: dict) -> None:
    if not idx:
        return
    axis = axes[0]
    if len(axes) == 1:
        for x in greedy_interval_pierce([(boxes[i].lo[axis], boxes[i].hi[axis]) for i in idx]):
            p = dict(fixed)
            p[axis] = x
            out.append(p)
        return
    stats["splits"] = stats.get("splits", 0) + 1
    med = _median(idx, boxes, axis)
    left, cross, right = _split(idx, boxes, axis, med)
    sub = dict(fixed)
    sub[axis] = med
    _pierce_rec(cross, boxes, axes[1:], sub, out, stats)
    _pierce_rec(left, boxes, axes, fixed, out, stats)
    _pierce_rec(right, boxes, axes, fixed, out, stats)


def dnc_pierce_boxes(boxes: Sequence[Box]) -> list:
    """Piercing points for ``boxes`` via median-hyperplane divide and conquer."""
    boxes = list(boxes)
    if not boxes:
        return []
    d = boxes[0].dim
    raw: list = []
    _pierce_rec(list(range(len(boxes))), boxes, tuple(range(d)), {}, raw, {})
    return [tuple(p[a] for a in range(d)) for p in raw]


def dnc_pierce(inst: ProblemInstance) -> PiercingSolution:
    t0 = time.perf_counter()
    stats: dict = {}
    raw: list = []
    d = inst.dimension
    _pierce_rec(list(range(inst.n)), inst.boxes, tuple(range(d)), {}, raw, stats)
    pts = [tuple(p[a] for a in range(d)) for p in raw]
    stats["wall_time"] = time.perf_counter() - t0
    return PiercingSolution(pts, "dnc", 0, stats)


def _indep_rec(idx: list, boxes: Sequence[Box], axes: tuple) -> list:
    """Largest per-depth group of the median recursion (indices into ``boxes``)."""
    if not idx:
        return []
    axis = axes[0]
    if len(axes) == 1:
        ivs = [(boxes[i].lo[axis], boxes[i].hi[axis]) for i in idx]
        return [idx[j] for j in _greedy_independent_idx(ivs)]
    groups: list = []
    frontier = [idx]
    while frontier:
        level: list = []
        nxt: list = []
        for part in frontier:
            med = _median(part, boxes, axis)
            left, cross, right = _split(part, boxes, axis, med)
            level.extend(_indep_rec(cross, boxes, axes[1:]))
            if left:
                nxt.append(left)
            if right:
                nxt.append(right)
        groups.append(level)
        frontier = nxt
    return max(groups, key=len)


def _extend_disjoint(boxes: Sequence[Box], chosen: list) -> list:
    """Greedily add (in index order) every box disjoint from all chosen so far."""
    lo = np.array([b.lo for b in boxes], dtype=float)
    hi = np.array([b.hi for b in boxes], dtype=float)
    taken = np.zeros(len(boxes), dtype=bool)
    taken[chosen] = True
    for i in range(len(boxes)):
        if taken[i]:
            continue
        sel = np.flatnonzero(taken)
        overlap = np.all((lo[sel] <= hi[i]) & (lo[i] <= hi[sel]), axis=1)
        if not overlap.any():
            taken[i] = True
    return np.flatnonzero(taken).tolist()


def dnc_independent_idx(boxes: Sequence[Box], extend: bool = True) -> list:
    """Indices of pairwise-disjoint boxes: the best median-recursion group, made maximal."""
    boxes = list(boxes)
    if not boxes:
        return []
    chosen = sorted(_indep_rec(list(range(len(boxes))), boxes, tuple(range(boxes[0].dim))))
    return _extend_disjoint(boxes, chosen) if extend else chosen


def dnc_independent(inst: ProblemInstance) -> list:
    """A pairwise-disjoint subset of the instance's boxes."""
    return [inst.boxes[i] for i in dnc_independent_idx(inst.boxes)]
