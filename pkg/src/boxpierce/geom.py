"""Box and point primitives, rank normalization, and brute-force oracles."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Point = tuple


class UsageError(ValueError):
    """Raised on malformed input (dimension mismatch, bad parameters)."""


class CapExceeded(RuntimeError):
    """An oracle refused to run because the instance is larger than its cap."""


@dataclass(frozen=True, slots=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise UsageError("lo and hi have different lengths")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise UsageError(f"empty box lo={self.lo} hi={self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, p: Sequence) -> bool:
        return contains(self, p)

    def intersects(self, other: "Box") -> bool:
        return all(a <= d and c <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def project(self, axes: Sequence[int]) -> "Box":
        return Box(tuple(self.lo[a] for a in axes), tuple(self.hi[a] for a in axes))

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @staticmethod
    def from_json(obj: dict) -> "Box":
        return Box(tuple(obj["lo"]), tuple(obj["hi"]))


def make_box(lo: Iterable, hi: Iterable) -> Box:
    return Box(tuple(lo), tuple(hi))


def contains(b: Box, p: Sequence) -> bool:
    if len(p) != len(b.lo):
        raise UsageError(f"point of dimension {len(p)} against box of dimension {len(b.lo)}")
    return all(lo <= x <= hi for lo, x, hi in zip(b.lo, p, b.hi))


@dataclass
class ProblemInstance:
    dimension: int
    boxes: tuple
    # per axis: coordinate_map[axis][r] is the original value of normalized coordinate 2r
    coordinate_map: tuple | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.boxes = tuple(self.boxes)
        for b in self.boxes:
            if b.dim != self.dimension:
                raise UsageError(f"box {b} does not have dimension {self.dimension}")
        d = self.dimension
        if self.boxes:
            self.lo = np.array([b.lo for b in self.boxes], dtype=np.int64 if self.normalized else float)
            self.hi = np.array([b.hi for b in self.boxes], dtype=np.int64 if self.normalized else float)
        else:
            self.lo = np.zeros((0, d), dtype=np.int64)
            self.hi = np.zeros((0, d), dtype=np.int64)

    @property
    def normalized(self) -> bool:
        return self.coordinate_map is not None

    @property
    def n(self) -> int:
        return len(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)

    def subset(self, indices: Iterable[int]) -> "ProblemInstance":
        """Sub-instance sharing the same normalized coordinate frame."""
        return ProblemInstance(self.dimension, tuple(self.boxes[i] for i in indices), self.coordinate_map)

    def denormalize_point(self, p: Sequence[int]) -> tuple:
        """Map a normalized point back to original coordinates.

        Even coordinates map to the endpoint they came from; odd ones to the
        midpoint of the two neighbouring endpoints, which preserves membership.
        """
        if self.coordinate_map is None:
            return tuple(p)
        out = []
        for axis, c in enumerate(p):
            cmap = self.coordinate_map[axis]
            c = int(c)
            if c % 2 == 0:
                out.append(cmap[min(max(c // 2, 0), len(cmap) - 1)])
            else:
                r = c // 2
                a = cmap[min(max(r, 0), len(cmap) - 1)]
                b = cmap[min(max(r + 1, 0), len(cmap) - 1)]
                out.append((a + b) / 2)
        return tuple(out)


@dataclass
class PiercingSolution:
    points: list
    algorithm: str = ""
    seed: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.points)


def _check_raw(raw: Sequence[Box]) -> int:
    if not raw:
        raise UsageError("empty instance")
    d = raw[0].dim
    if d < 1:
        raise UsageError("dimension must be positive")
    for b in raw:
        if b.dim != d:
            raise UsageError("inconsistent box dimensions")
    return d


def normalize_instance(raw: Sequence[Box] | ProblemInstance) -> ProblemInstance:
    """Replace endpoints by distinct even ranks per axis.

    Equal values are ordered lo-before-hi and then by box index, so touching
    boxes still intersect after normalization.
    """
    if isinstance(raw, ProblemInstance):
        meta = dict(raw.metadata)
        raw = list(raw.boxes)
    else:
        meta = {}
        raw = list(raw)
    d = _check_raw(raw)
    n = len(raw)
    new_lo = [[0] * d for _ in range(n)]
    new_hi = [[0] * d for _ in range(n)]
    cmap = []
    for axis in range(d):
        keys = []
        for i, b in enumerate(raw):
            keys.append((b.lo[axis], 0, i))
            keys.append((b.hi[axis], 1, i))
        keys.sort()
        cmap.append(tuple(k[0] for k in keys))
        for rank, (_, kind, i) in enumerate(keys):
            if kind == 0:
                new_lo[i][axis] = 2 * rank
            else:
                new_hi[i][axis] = 2 * rank
    boxes = tuple(Box(tuple(lo), tuple(hi)) for lo, hi in zip(new_lo, new_hi))
    return ProblemInstance(d, boxes, tuple(cmap), meta)


def to_frame(inst: ProblemInstance) -> ProblemInstance:
    """The instance itself if normalized, else its normalized copy."""
    return inst if inst.normalized else normalize_instance(inst)


def from_frame(orig: ProblemInstance, norm: ProblemInstance, points: Iterable[Sequence]) -> list:
    """Express points computed on ``norm`` in the coordinates of ``orig``."""
    if orig is norm:
        return [tuple(p) for p in points]
    return [norm.denormalize_point(p) for p in points]


def verify_piercing(inst: ProblemInstance, points: Iterable[Sequence]) -> list:
    """Boxes of ``inst`` that contain none of ``points`` (empty iff they pierce)."""
    pts = [tuple(p) for p in points]
    d = inst.dimension
    for p in pts:
        if len(p) != d:
            raise UsageError("point dimension mismatch")
    n = inst.n
    if n == 0:
        return []
    if not pts:
        return list(inst.boxes)
    hit = pierced_mask(inst.lo, inst.hi, np.asarray(pts))
    return [inst.boxes[i] for i in np.flatnonzero(~hit)]


def pierced_mask(lo: np.ndarray, hi: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Boolean array: which boxes (rows of lo/hi) contain at least one point."""
    n = lo.shape[0]
    chunk = max(1, min(2048, 4_000_000 // max(1, n * lo.shape[1])))
    hit = np.zeros(n, dtype=bool)
    if pts.size == 0 or n == 0:
        return hit
    pts = pts.reshape(len(pts), -1)
    for s in range(0, len(pts), chunk):
        block = pts[s : s + chunk]
        inside = np.all((lo[:, None, :] <= block[None, :, :]) & (block[None, :, :] <= hi[:, None, :]), axis=2)
        hit |= inside.any(axis=1)
    return hit


def containment_matrix(lo: np.ndarray, hi: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """``M[j, i]`` is true iff point j lies in box i."""
    pts = np.asarray(pts).reshape(len(pts), -1)
    return np.all((lo[None, :, :] <= pts[:, None, :]) & (pts[:, None, :] <= hi[None, :, :]), axis=2)


def _coordinate_owners(inst: ProblemInstance) -> list:
    """Per axis: sorted list of (coordinate, owning box index)."""
    out = []
    for axis in range(inst.dimension):
        items = []
        for i, b in enumerate(inst.boxes):
            items.append((b.lo[axis], i))
            items.append((b.hi[axis], i))
        items.sort()
        for (c1, _), (c2, _) in zip(items, items[1:]):
            if c1 == c2:
                raise UsageError("arrangement vertices need distinct endpoints; normalize first")
        out.append(items)
    return out


def arrangement_vertices(inst: ProblemInstance, cap: int = 4_000_000) -> set:
    """All vertices of the arrangement of the boxes' facets.

    A vertex takes one facet coordinate per axis, and the box owning each of
    those facets must contain the point.
    """
    d = inst.dimension
    if inst.n == 0:
        return set()
    if (2 * inst.n) ** d > cap:
        raise CapExceeded(f"(2n)^d = {(2 * inst.n) ** d} exceeds cap {cap}")
    owners = _coordinate_owners(inst)
    coords = [np.array([c for c, _ in owners[a]]) for a in range(d)]
    mask = np.ones(tuple(len(c) for c in coords), dtype=bool)
    for i in range(d):
        own = np.array([o for _, o in owners[i]])
        for j in range(d):
            if i == j:
                continue
            lo_j = inst.lo[own, j]
            hi_j = inst.hi[own, j]
            m2 = (lo_j[:, None] <= coords[j][None, :]) & (coords[j][None, :] <= hi_j[:, None])
            shape = [1] * d
            shape[i] = m2.shape[0]
            shape[j] = m2.shape[1]
            mask &= (m2 if i < j else m2.T).reshape(shape)
    idx = np.argwhere(mask)
    return {tuple(int(coords[a][t[a]]) for a in range(d)) for t in idx}


def greedy_disjoint_lower_bound(inst: ProblemInstance) -> int:
    """Size of a greedily built set of pairwise-disjoint boxes."""
    order = sorted(range(inst.n), key=lambda i: tuple(inst.boxes[i].hi))
    chosen: list = []
    for i in order:
        b = inst.boxes[i]
        if all(not b.intersects(inst.boxes[j]) for j in chosen):
            chosen.append(i)
    return len(chosen)


def exact_piercing(
    inst: ProblemInstance,
    max_boxes: int = 40,
    max_vertices: int = 5000,
    node_limit: int = 5_000_000,
) -> PiercingSolution:
    """Minimum piercing set by branch-and-bound over arrangement vertices."""
    t0 = time.perf_counter()
    n = inst.n
    if n > max_boxes:
        raise CapExceeded(f"n={n} exceeds exact cap {max_boxes}")
    if n == 0:
        return PiercingSolution([], "exact", 0, {"optimal": 0})
    orig = inst
    inst = to_frame(inst)
    verts = sorted(arrangement_vertices(inst))
    if len(verts) > max_vertices:
        raise CapExceeded(f"|V|={len(verts)} exceeds exact cap {max_vertices}")
    cm = containment_matrix(inst.lo, inst.hi, np.array(verts))
    weights = 1 << np.arange(n, dtype=object)
    masks: dict = {}
    for j, row in enumerate(cm):
        m = int(np.sum(weights[row])) if row.any() else 0
        if m and m not in masks:
            masks[m] = verts[j]
    # keep only vertices whose box set is maximal under inclusion
    cands = sorted(masks, key=lambda m: -m.bit_count())
    kept: list = []
    for m in cands:
        if not any(m & k == m for k in kept):
            kept.append(m)
    box_cands = [[c for c, m in enumerate(kept) if m >> i & 1] for i in range(n)]
    box_cmask = [sum(1 << c for c in cs) for cs in box_cands]
    full = (1 << n) - 1
    order_boxes = sorted(range(n), key=lambda i: len(box_cands[i]))

    def lower_bound(unc: int) -> int:
        used = 0
        cnt = 0
        for i in order_boxes:
            if unc >> i & 1 and not box_cmask[i] & used:
                used |= box_cmask[i]
                cnt += 1
        return cnt

    # greedy upper bound
    unc = full
    greedy: list = []
    while unc:
        best = max(kept, key=lambda m: (m & unc).bit_count())
        greedy.append(best)
        unc &= ~best
    best_sol = list(greedy)
    nodes = 0

    def rec(unc: int, chosen: list) -> None:
        nonlocal best_sol, nodes
        nodes += 1
        if nodes > node_limit:
            raise CapExceeded("branch-and-bound node limit reached")
        if not unc:
            if len(chosen) < len(best_sol):
                best_sol = list(chosen)
            return
        if len(chosen) + lower_bound(unc) >= len(best_sol):
            return
        pick = -1
        fewest = None
        for i in order_boxes:
            if unc >> i & 1:
                c = len(box_cands[i])
                if fewest is None or c < fewest:
                    pick, fewest = i, c
                    if c <= 1:
                        break
        opts = sorted(box_cands[pick], key=lambda c: -(kept[c] & unc).bit_count())
        for c in opts:
            chosen.append(kept[c])
            rec(unc & ~kept[c], chosen)
            chosen.pop()

    rec(full, [])
    pts = from_frame(orig, inst, [masks[m] for m in best_sol])
    return PiercingSolution(
        pts,
        "exact",
        0,
        {"optimal": len(pts), "nodes": nodes, "vertices": len(verts), "wall_time": time.perf_counter() - t0},
    )


def independent(boxes: Sequence[Box]) -> bool:
    """True iff the boxes are pairwise disjoint."""
    bl = list(boxes)
    for i in range(len(bl)):
        for j in range(i + 1, len(bl)):
            if bl[i].intersects(bl[j]):
                return False
    return True


def prune_redundant(inst: ProblemInstance, points: Sequence[Sequence]) -> list:
    """Drop points whose boxes are all pierced by the points kept.

    Points covering fewer boxes are tried first.  Every box pierced by the
    input stays pierced, so the output is never larger and never worse.
    """
    pts = [tuple(p) for p in points]
    if len(pts) <= 1 or inst.n == 0:
        return pts
    M = containment_matrix(inst.lo, inst.hi, np.asarray(pts, dtype=inst.lo.dtype if inst.normalized else float))
    cover = M.sum(axis=0).astype(np.int64)  # per box: how many kept points pierce it
    keep = np.ones(len(pts), dtype=bool)
    for j in sorted(range(len(pts)), key=lambda j: (int(M[j].sum()), j)):
        row = M[j]
        if np.all(cover[row] >= 2):
            keep[j] = False
            cover[row] -= 1
    return [p for p, k in zip(pts, keep) if k]
