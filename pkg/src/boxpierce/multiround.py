"""Sample-solve-filter piercing in a fixed number of rounds.

Each round solves a random sample of the boxes still unpierced, then keeps
only the boxes the partial solution misses.  A round is repeated until the
survivors shrink by the target factor, and the guess for the piercing number
doubles whenever a partial solution comes out too large.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geom import PiercingSolution, ProblemInstance, UsageError, pierced_mask
from .mwu import improved_mwu
from .rangetree import StaticRangeTree
from .rng import derive_seed, np_rng

Solver = Callable[[ProblemInstance, int], PiercingSolution]


def loglog_factor(k: float) -> float:
    return max(1.0, math.log2(max(math.log2(max(k, 2.0)), 1.0)))


def unpierced_indices(inst: ProblemInstance, indices: Sequence[int], points: Sequence,
                      direct_cells: int = 20_000_000) -> list:
    """Indices of the boxes missed by ``points``.

    Small products of boxes and points are checked by broadcasting; larger
    ones with one range-count query per box.
    """
    if not points:
        return list(indices)
    idx = np.asarray(list(indices), dtype=np.int64)
    if len(idx) * len(points) <= direct_cells:
        hit = pierced_mask(inst.lo[idx], inst.hi[idx], np.asarray(points, dtype=float))
        return idx[~hit].tolist()
    tree = StaticRangeTree(np.asarray(points, dtype=float), inst.dimension)
    boxes = inst.boxes
    return [i for i in indices if tree.count(boxes[i]) == 0]


def _union(parts: list) -> list:
    return list(dict.fromkeys(tuple(p) for part in parts for p in part))


@dataclass
class MultiRoundConfig:
    rounds: int = 2
    sample_mult: float | None = None  # default 4 * d
    restart_const: float = 8.0
    repeat_cap: int = 5
    inner: Solver = field(default=improved_mwu)


def multi_round_pierce(inst: ProblemInstance, seed: int = 0, cfg: MultiRoundConfig | None = None) -> PiercingSolution:
    cfg = cfg or MultiRoundConfig()
    r = cfg.rounds
    if r < 1:
        raise UsageError("rounds must be at least 1")
    t0 = time.perf_counter()
    inner = cfg.inner
    tag = f"multiround:{r}"
    if r == 1 or inst.n == 0:
        sol = inner(inst, seed)
        return PiercingSolution(list(sol.points), tag, seed, {"inner": sol.stats, "wall_time": time.perf_counter() - t0})
    n, d = inst.n, inst.dimension
    mult = cfg.sample_mult if cfg.sample_mult is not None else 4.0 * d
    stats: dict = {"restarts": 0, "repeats": 0, "residuals": []}
    k = 1
    while True:
        delta = min(1.0, (k / n) ** (1.0 / r))
        m = math.ceil(mult * k / delta * math.log(max(n, 2)))
        alive = list(range(n))
        parts: list = []
        residuals = [n]
        escalate = False
        for i in range(1, r):
            for attempt in range(cfg.repeat_cap):
                sub_seed = derive_seed(seed, f"multiround/k{k}/round{i}/try{attempt}")
                if m >= len(alive):
                    sample = list(alive)
                else:
                    gen = np_rng(sub_seed, "sample")
                    sample = sorted(gen.choice(alive, size=m, replace=False).tolist())
                Q = inner(inst.subset(sample), sub_seed).points
                if len(sample) == len(alive):
                    # the whole remainder was solved: nothing is left for later rounds
                    parts.append(Q)
                    alive = []
                    residuals.append(0)
                    break
                if len(Q) > cfg.restart_const * k * loglog_factor(k + 4):
                    escalate = True
                    break
                rest = unpierced_indices(inst, alive, Q)
                if len(rest) <= delta * len(alive):
                    parts.append(Q)
                    alive = rest
                    residuals.append(len(rest))
                    break
                stats["repeats"] += 1
            else:
                escalate = True
            if escalate or not alive:
                break
        if escalate:
            stats["restarts"] += 1
            k *= 2
            continue
        if alive:
            parts.append(inner(inst.subset(alive), derive_seed(seed, f"multiround/k{k}/final")).points)
        stats.update(k=k, delta=delta, sample_size=m, residuals=residuals, wall_time=time.perf_counter() - t0)
        return PiercingSolution(_union(parts), tag, seed, stats)


def residual_shrinkage_check(inst: ProblemInstance, Q: Sequence, delta: float) -> dict:
    """How many boxes ``Q`` misses, and whether that exceeds ``delta * n``."""
    missed = unpierced_indices(inst, range(inst.n), [tuple(p) for p in Q])
    bound = delta * inst.n
    return {"unpierced": len(missed), "bound": bound, "violated": len(missed) > bound, "indices": missed}


@dataclass
class TwoRoundConfig:
    sample_const: float = 1.0
    sample_exp: float = 1.0  # sample size sample_const * n / ln(n)**sample_exp
    residue_const: float = 1.0
    direct_below: int = 100
    resample_cap: int = 3
    inner: Solver = field(default=improved_mwu)


def two_round_2d(inst: ProblemInstance, seed: int = 0, cfg: TwoRoundConfig | None = None) -> PiercingSolution:
    """Solve a random sample, filter the boxes it misses, solve those."""
    cfg = cfg or TwoRoundConfig()
    if inst.dimension != 2:
        raise UsageError("two_round_2d needs rectangles")
    t0 = time.perf_counter()
    n = inst.n
    stats: dict = {"resamples": 0}
    ln = math.log(max(n, 2))
    m = math.ceil(cfg.sample_const * n / ln**cfg.sample_exp)
    if n < cfg.direct_below or m >= n:
        sol = cfg.inner(inst, seed)
        stats.update(direct=True, inner=sol.stats, wall_time=time.perf_counter() - t0)
        return PiercingSolution(list(sol.points), "two-round-2d", seed, stats)
    for attempt in range(cfg.resample_cap + 1):
        sub_seed = derive_seed(seed, f"two-round/{attempt}")
        sample = sorted(np_rng(sub_seed, "sample").choice(n, size=m, replace=False).tolist())
        Q1 = cfg.inner(inst.subset(sample), sub_seed).points
        rest = unpierced_indices(inst, range(n), Q1)
        bound = min(1.0, cfg.residue_const * 2 * max(len(Q1), 1) * ln / m) * n
        if len(rest) <= bound or attempt == cfg.resample_cap:
            break
        stats["resamples"] += 1
    Q2 = cfg.inner(inst.subset(rest), derive_seed(seed, "two-round/residue")).points if rest else []
    stats.update(direct=False, sample_size=m, first=len(Q1), residue=len(rest), wall_time=time.perf_counter() - t0)
    return PiercingSolution(_union([Q1, Q2]), "two-round-2d", seed, stats)
