"""Planar piercing set maintained under insertions and deletions.

A rectangle ``[a1, a2] x [b1, b2]`` is stored as the 4D point
``(a1, b1, a2, b2)``; it contains ``p`` iff that point lies in the orthant
``{a1 <= px, b1 <= py, a2 >= px, b2 >= py}``.  The boxes missed by a point
set are therefore the stored points outside a union of orthants, which is
cut into axis-parallel regions and read off a range tree as canonical
subsets.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geom import Box, PiercingSolution, ProblemInstance, UsageError, pierced_mask, prune_redundant
from .mwu import improved_mwu
from .multiround import loglog_factor, unpierced_indices
from .rangetree import RangeTree
from .rng import derive_seed, np_rng

Solver = Callable[[ProblemInstance, int], PiercingSolution]

_INF = math.inf


def box_to_point(b: Box) -> tuple:
    return (b.lo[0], b.lo[1], b.hi[0], b.hi[1])


def point_to_box(q: Sequence) -> Box:
    return Box((q[0], q[1]), (q[2], q[3]))


def is_square(b: Box) -> bool:
    return math.isclose(b.hi[0] - b.lo[0], b.hi[1] - b.lo[1], rel_tol=1e-9, abs_tol=1e-12)


# ------------------------------------------------------------ orthant complement
@dataclass
class OrthantComplement:
    """Regions covering the 4D points whose box misses every point of ``points``.

    Each region is ``((lo, hi), ...)`` per axis of the flipped frame
    ``(a1, b1, -a2, -b2)`` meaning ``lo < y <= hi``.
    """

    points: list
    regions: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.regions)

    def contains(self, q: Sequence) -> bool:
        y = _flip(q)
        return any(all(lo < v <= hi for v, (lo, hi) in zip(y, reg)) for reg in self.regions)

    def query_boxes(self) -> list:
        """The regions as closed boxes in stored ``(a1, b1, a2, b2)`` coordinates."""
        out = []
        for reg in self.regions:
            lo, hi = [], []
            for axis, (l, h) in enumerate(reg):
                if axis < 2:
                    lo.append(np.nextafter(l, _INF) if l > -_INF else -_INF)
                    hi.append(h)
                else:
                    lo.append(-h)
                    hi.append(np.nextafter(-l, -_INF) if l > -_INF else _INF)
            out.append((tuple(float(x) for x in lo), tuple(float(x) for x in hi)))
        return out


def _flip(q: Sequence) -> tuple:
    return (q[0], q[1], -q[2], -q[3])


def _maximal(qs: list) -> list:
    """Drop points dominated coordinatewise by another (their orthant is redundant)."""
    qs = sorted(set(qs), reverse=True)
    keep: list = []
    for q in qs:
        if not any(all(a >= b for a, b in zip(k, q)) for k in keep):
            keep.append(q)
    return keep


def _complement(qs: list, dims: int, prefix: list, out: list) -> None:
    # complement of the union of closed lower orthants below qs, in the first
    # `dims` coordinates, with the remaining coordinates already fixed in `prefix`
    full = [(-_INF, _INF)] * dims
    if not qs:
        out.append(tuple(full) + tuple(prefix))
        return
    if dims == 0:
        return
    axis = dims - 1
    qs = _maximal(qs)
    cuts = sorted({q[axis] for q in qs})
    lo = -_INF
    for v in cuts:
        active = [q[:axis] for q in qs if q[axis] >= v]
        _complement(active, axis, [(lo, v)] + prefix, out)
        lo = v
    out.append(tuple([(-_INF, _INF)] * axis) + ((lo, _INF),) + tuple(prefix))


def _infeasible(reg: tuple) -> bool:
    # a1 <= a2 and b1 <= b2 hold for every stored box, i.e. y0 + y2 <= 0, y1 + y3 <= 0
    return reg[0][0] + reg[2][0] >= 0 or reg[1][0] + reg[3][0] >= 0


def complement_partition(points: Sequence, prune: bool = False) -> OrthantComplement:
    """Interior-disjoint regions whose union is the set of boxes missing all ``points``.

    With ``prune`` the regions that hold no valid box (``a1 > a2`` or
    ``b1 > b2`` throughout) are dropped; the union then only agrees with the
    complement on valid boxes.
    """
    pts = [tuple(float(c) for c in p) for p in points]
    if not pts:
        raise UsageError("complement_partition needs at least one point")
    qs = [(p[0], p[1], -p[0], -p[1]) for p in pts]
    out: list = []
    _complement(qs, 4, [], out)
    if prune:
        out = [r for r in out if not _infeasible(r)]
    return OrthantComplement(pts, out)


def unpierced_canonical(points: Sequence, tree: RangeTree, prune: bool = True) -> list:
    """Canonical node ids of ``tree`` jointly holding exactly the boxes missed by ``points``."""
    comp = complement_partition(points, prune=prune)
    out: list = []
    for lo, hi in comp.query_boxes():
        out.extend(tree.query_canonical((lo, hi)))
    return out


def squares_unpierced_canonical(points: Sequence, tree: RangeTree) -> list:
    """Canonical subsets of squares lying below every cone with apex in ``points``.

    A square with center ``c`` and radius ``a`` is the point ``(c, a)`` and
    is missed by ``p`` iff it lies below the cone ``|(x, y) - p|_inf <= z``.
    After the shear ``(x - z, y - z, x + z, y + z)`` each cone is the orthant
    used for rectangles, so the tree keeps squares in sheared coordinates.
    """
    return unpierced_canonical(points, tree)


# ------------------------------------------------------------ dynamic structure
@dataclass
class DynamicConfig:
    sample_const: float = 2.0  # c1
    residue_const: float = 4.0  # c2
    restart_const: float = 8.0  # first-round solution allowed up to restart_const * k * loglog k
    resample_cap: int = 3
    prune: bool = True  # drop points of the merged rounds that became redundant
    solver: Solver = field(default=improved_mwu)


class DynamicPiercer:
    """Near-optimal piercing set of a changing set of rectangles (or squares)."""

    def __init__(self, mode: str = "rectangles", seed: int = 0, cfg: DynamicConfig | None = None,
                 on_reconstruct: Callable | None = None) -> None:
        if mode not in ("rectangles", "squares"):
            raise UsageError(f"unknown mode {mode!r}")
        self.mode = mode
        self.seed = seed
        self.cfg = cfg or DynamicConfig()
        self.tree = RangeTree(4)
        self.live: Counter = Counter()
        self.P: list = []
        self._P_arr = np.zeros((0, 2))
        self.s = 0
        self.counter = 0
        self.reconstructions = 0
        self.on_reconstruct = on_reconstruct
        self.last_stats: dict = {}

    # -------------------------------------------------------------- updates
    def __len__(self) -> int:
        return self.tree.size

    def boxes(self) -> list:
        return [b for b, c in sorted(self.live.items(), key=lambda t: (t[0].lo, t[0].hi)) for _ in range(c)]

    def _set_P(self, pts: list) -> None:
        self.P = [tuple(float(c) for c in p) for p in pts]
        self._P_arr = np.asarray(self.P, dtype=float).reshape(-1, 2)

    def _pierced(self, b: Box) -> bool:
        if not self.P:
            return False
        A = self._P_arr
        return bool(np.any((A[:, 0] >= b.lo[0]) & (A[:, 0] <= b.hi[0]) & (A[:, 1] >= b.lo[1]) & (A[:, 1] <= b.hi[1])))

    def _tick(self) -> bool:
        self.counter += 1
        if self.counter >= max(1, math.ceil(self.s / 2)):
            self.reconstruct()
            return True
        return False

    def dyn_insert(self, b: Box) -> bool:
        """Insert ``b``; returns whether a reconstruction ran."""
        if b.dim != 2:
            raise UsageError("dynamic piercing is planar")
        if self.mode == "squares" and not is_square(b):
            raise UsageError(f"{b} is not a square")
        self.tree.insert_point(box_to_point(b))
        self.live[b] += 1
        if not self._pierced(b):
            c = ((b.lo[0] + b.hi[0]) / 2, (b.lo[1] + b.hi[1]) / 2)
            self._set_P(self.P + [c])
        return self._tick()

    def dyn_delete(self, b: Box) -> bool:
        if self.live.get(b, 0) == 0:
            raise UsageError(f"{b} is not in the set")
        self.tree.delete_point(box_to_point(b))
        self.live[b] -= 1
        if not self.live[b]:
            del self.live[b]
        return self._tick()

    # -------------------------------------------------------------- rebuilding
    def _solve(self, boxes: list, label: str) -> list:
        if not boxes:
            return []
        return list(self.cfg.solver(ProblemInstance(2, boxes), derive_seed(self.seed, label)).points)

    def _missed(self, points: list, pool: list | None, stats: dict) -> list:
        """Boxes (from the tree, or from ``pool``) missed by ``points``."""
        if pool is not None:
            inst = ProblemInstance(2, pool)
            return [pool[i] for i in unpierced_indices(inst, range(len(pool)), points)]
        n = len(self)
        if not points:
            return self.boxes()
        if len(points) ** 2 > n:
            # many points: a planar range tree over them and one query per box is cheaper
            stats["direct_filter"] = stats.get("direct_filter", 0) + 1
            boxes = self.boxes()
            return [boxes[i] for i in unpierced_indices(ProblemInstance(2, boxes), range(len(boxes)), points)]
        stats["canonical"] = stats.get("canonical", 0) + 1
        nodes = unpierced_canonical(points, self.tree)
        return [point_to_box(q) for v in nodes for q in self.tree.node_points(v)]

    def _sample_canonical(self, nodes: list, size: int, gen) -> list:
        sizes = np.array([self.tree.node_size(v) for v in nodes], dtype=np.int64)
        total = int(sizes.sum())
        if size >= total:
            return [point_to_box(q) for v in nodes for q in self.tree.node_points(v)]
        picks = np.sort(gen.choice(total, size=size, replace=False))
        ends = np.cumsum(sizes)
        which = np.searchsorted(ends, picks, side="right")
        out = []
        cache: dict = {}
        for pos, j in zip(picks, which):
            v = nodes[j]
            if v not in cache:
                cache[v] = self.tree.node_points(v)
            out.append(point_to_box(cache[v][pos - (ends[j] - sizes[j])]))
        return out

    def reconstruct(self) -> PiercingSolution:
        t0 = time.perf_counter()
        boxes = self.boxes()
        n = len(boxes)
        stats: dict = {"n": n, "restarts": 0, "resamples": 0}
        if n == 0:
            pts: list = []
            stats["k"] = 0
        elif self.mode == "squares":
            pts = self._reconstruct_squares(boxes, stats)
        else:
            pts = self._reconstruct_rectangles(boxes, stats)
        if self.cfg.prune and len(pts) > 1:
            stats["merged"] = len(pts)
            pts = prune_redundant(ProblemInstance(2, boxes), pts)
        self._set_P(pts)
        self.s = n
        self.counter = 0
        self.reconstructions += 1
        stats["size"] = len(self.P)
        stats["wall_time"] = time.perf_counter() - t0
        self.last_stats = stats
        sol = PiercingSolution(list(self.P), f"dynamic-{self.mode}", self.seed, stats)
        if self.on_reconstruct is not None:
            self.on_reconstruct(self, sol)
        return sol

    def _too_big(self, P1: list, k: int) -> bool:
        return len(P1) > self.cfg.restart_const * k * loglog_factor(k + 4)

    def _reconstruct_rectangles(self, boxes: list, stats: dict) -> list:
        cfg = self.cfg
        n = len(boxes)
        k = 1
        tag = f"rebuild{self.reconstructions}"
        while True:
            r = math.ceil(cfg.sample_const * math.sqrt(k * n))
            if r >= n:
                stats.update(k=k, direct=True)
                return self._solve(boxes, f"{tag}/direct")
            for attempt in range(cfg.resample_cap + 1):
                gen = np_rng(self.seed, f"{tag}/k{k}/a{attempt}")
                sample = [boxes[i] for i in np.sort(gen.choice(n, size=r, replace=False))]
                P1 = self._solve(sample, f"{tag}/k{k}/a{attempt}/first")
                if self._too_big(P1, k):
                    break
                B2 = self._missed(P1, None, stats)
                if len(B2) <= cfg.residue_const * math.sqrt(k * n):
                    P2 = self._solve(B2, f"{tag}/k{k}/a{attempt}/second")
                    stats.update(k=k, direct=False, sample_size=r, first=len(P1), residue=len(B2))
                    return list(dict.fromkeys(tuple(p) for p in P1 + P2))
                stats["resamples"] += 1
            stats["restarts"] += 1
            k *= 2

    def _reconstruct_squares(self, boxes: list, stats: dict) -> list:
        cfg = self.cfg
        n = len(boxes)
        k = 1
        tag = f"rebuild{self.reconstructions}"
        while True:
            r = math.ceil(cfg.sample_const * k ** (2 / 3) * n ** (1 / 3))
            if r >= n:
                stats.update(k=k, direct=True)
                return self._solve(boxes, f"{tag}/direct")
            for attempt in range(cfg.resample_cap + 1):
                gen = np_rng(self.seed, f"{tag}/k{k}/a{attempt}")
                sample = [boxes[i] for i in np.sort(gen.choice(n, size=r, replace=False))]
                P1 = self._solve(sample, f"{tag}/k{k}/a{attempt}/first")
                if self._too_big(P1, k):
                    break
                if len(P1) ** 2 > n:
                    U1 = self._missed(P1, None, stats)
                    sample2 = U1 if r >= len(U1) else [U1[i] for i in np.sort(gen.choice(len(U1), r, replace=False))]
                else:
                    stats["canonical"] = stats.get("canonical", 0) + 1
                    nodes = squares_unpierced_canonical(P1, self.tree)
                    sample2 = self._sample_canonical(nodes, r, gen)
                P2 = self._solve(sample2, f"{tag}/k{k}/a{attempt}/second")
                if self._too_big(P2, k):
                    break
                B3 = self._missed(P1 + P2, None, stats)
                if len(B3) <= cfg.residue_const * k ** (2 / 3) * n ** (1 / 3):
                    P3 = self._solve(B3, f"{tag}/k{k}/a{attempt}/third")
                    stats.update(k=k, direct=False, sample_size=r, first=len(P1), second=len(P2), residue=len(B3))
                    return list(dict.fromkeys(tuple(p) for p in P1 + P2 + P3))
                stats["resamples"] += 1
            stats["restarts"] += 1
            k *= 2

    # -------------------------------------------------------------- checks
    def unpierced(self) -> list:
        boxes = self.boxes()
        if not boxes:
            return []
        inst = ProblemInstance(2, boxes)
        pts = self._P_arr
        if len(pts) == 0:
            return boxes
        hit = pierced_mask(inst.lo, inst.hi, pts)
        return [b for b, h in zip(boxes, hit) if not h]
