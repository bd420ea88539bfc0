"""Multiplicative-weights piercing.

``basic_mwu`` doubles light boxes over an implicit weighted arrangement until
every box is heavy, then extracts a weak net.  ``improved_mwu`` replaces the
per-box scan by a batch sample of the arrangement and doubles a whole
independent set of light boxes per round.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .arrangement import ArrangementDS, BatchSampler
from .classic import dnc_independent_idx, dnc_pierce_boxes, greedy_interval_pierce
from .epsnet import SamplingFailure, WeightedPoints, weak_net_for_boxes
from .geom import PiercingSolution, ProblemInstance, from_frame, prune_redundant, to_frame, verify_piercing
from .rangetree import StaticRangeTree
from .rng import derive_seed, np_rng


@dataclass
class MwuConfig:
    round_const: float = 8.0  # rounds per stage: round_const * ln((2n)^d / k)
    arith: str = "exact"
    alpha: float = 32.0
    net_alpha: float = 1.0
    net_retries: int = 3
    slab_capacity: int | None = None
    audit: bool = False
    prune: bool = True  # drop redundant points from the final set
    warm_start: bool = True  # first guess from a disjoint family


def mwu_params(k: int, n: int, d: int, round_const: float = 8.0) -> tuple:
    """(eps, doubling budget per round, round budget) for guess ``k``."""
    eps = 2.0 / (3.0 * k)
    ell = max(1, math.floor(1 / eps))
    tau = max(1, math.ceil(round_const * math.log(max((2 * n) ** d / k, math.e))))
    return eps, ell, tau


def doublings_until_heavy(share: float, eps: float) -> int:
    """Smallest t >= 1 after which a box holding ``share`` of the weight is eps-heavy.

    Doubling a box t times takes its share from ``s`` to
    ``2**t s / (1 + (2**t - 1) s)``.
    """
    if not 0 < share:
        raise ValueError("box has no weight")

    def heavy(t: int) -> bool:
        g = 2.0**t * share
        return g >= eps * (1 + g - share)

    need = eps * (1 - share) / ((1 - eps) * share)
    t = max(1, math.ceil(math.log2(need))) if need > 1 else 1
    while t > 1 and heavy(t - 1):
        t -= 1
    while not heavy(t):
        t += 1
    return t


def _net(P, eps: float, boxes: list, seed: int, label: str, cfg: MwuConfig, stats: dict) -> list:
    """Weak net with retries on sampling failure; the last attempt repairs instead of failing."""
    for attempt in range(cfg.net_retries + 1):
        gen = np_rng(seed, f"{label}/net{attempt}")
        last = attempt == cfg.net_retries
        info: dict = {}
        try:
            pts = weak_net_for_boxes(
                P, eps, boxes, gen, cfg.alpha, cfg.net_alpha,
                on_failure="fixup" if last else "raise", stats=info,
            )
        except SamplingFailure:
            stats["net_retries"] = stats.get("net_retries", 0) + 1
            continue
        stats["net"] = info
        return pts
    raise AssertionError("unreachable")


def basic_mwu(inst: ProblemInstance, seed: int = 0, cfg: MwuConfig | None = None) -> PiercingSolution:
    """Piercing set via repeated doubling of light boxes and a final weak net."""
    cfg = cfg or MwuConfig()
    t0 = time.perf_counter()
    orig = inst
    inst = to_frame(inst)
    n, d = inst.n, inst.dimension
    stats: dict = {"stages": 0, "rounds": 0, "doublings": 0, "stage_retries": 0}
    if cfg.audit:
        stats["trace"] = []
    if n == 0:
        return PiercingSolution([], "basic-mwu", seed, stats)
    k = _first_guess(inst, 2) if cfg.warm_start else 2
    while True:
        stats["stages"] += 1
        eps, ell, tau = mwu_params(k, n, d, cfg.round_const)
        ds = ArrangementDS(inst, cfg.arith, cfg.slab_capacity, activate_all=True)
        ar = ds.ar
        trace = [ds.total_weight()] if cfg.audit else None
        done = False
        for rnd in range(tau):
            stats["rounds"] += 1
            used = 0
            for i in range(n):
                share = ar.ratio(ds.ds_weight(inst.boxes[i]), ds.total_weight())
                if not share < eps:
                    continue
                if cfg.audit:
                    # one doubling at a time so every step can be audited
                    while share < eps and used < ell:
                        ds.ds_double(i)
                        used += 1
                        W = ds.total_weight()
                        share = ar.ratio(ds.ds_weight(inst.boxes[i]), W)
                        trace.append(W)
                else:
                    t = min(doublings_until_heavy(share, eps), ell - used)
                    ds.ds_double(i, t)
                    used += t
                if used >= ell:
                    break
            stats["doublings"] += used
            if used < ell:
                done = True
                break
        if cfg.audit:
            stats["trace"].append({"k": k, "eps": eps, "weights": trace})
        if not done:
            k *= 2
            continue
        net_eps = eps / math.e
        P = lambda gen, count, _ds=ds: _ds.sample_many(gen, count)
        pts = _net(P, net_eps, list(inst.boxes), seed, f"basic/k{k}/s{stats['stages']}", cfg, stats)
        if verify_piercing(inst, pts):
            stats["stage_retries"] += 1
            seed = derive_seed(seed, "retry")
            continue
        stats["k"] = k
        stats["net_points"] = len(pts)
        if cfg.prune:
            pts = prune_redundant(inst, pts)
        stats["wall_time"] = time.perf_counter() - t0
        return PiercingSolution(from_frame(orig, inst, pts), "basic-mwu", seed, stats)


@dataclass
class ImprovedConfig:
    sample_const: float = 200.0  # r = sample_const * k * ln n
    indep_const: float = 1.0  # small-independent-set threshold c1 * k / ln^(2d-1) n
    round_cap_const: float = 1.0  # rounds per guess: cap_const * ln^(2d) n
    doubling_const: float = 8.0  # doublings per guess: doubling_const * k * ln((2n)^d / k)
    leaf_size: int = 64
    heavy_const: float = 4.01
    arith: str = "exact"
    alpha: float = 32.0
    net_alpha: float = 1.0
    net_retries: int = 3
    round_retries: int = 3
    slab_capacity: int | None = None
    direct_count_cells: int = 10_000_000  # below n * |distinct samples| cells, count by broadcasting
    prune: bool = True
    warm_start: bool = True


def _ln(n: int) -> float:
    return max(1.0, math.log(max(n, 2)))


def _first_guess(inst: ProblemInstance, floor: int) -> int:
    # any disjoint family lower-bounds the optimum, so smaller guesses would only restart
    lb = len(dnc_independent_idx(inst.boxes))
    return max(floor, 1 << (lb.bit_length() - 1)) if lb else floor


def _sample_counts(inst: ProblemInstance, R, cfg: ImprovedConfig) -> np.ndarray:
    """Per box, how many of the sample points ``R`` it contains (with multiplicity)."""
    R = np.asarray(R, dtype=np.int64).reshape(-1, inst.dimension)
    if len(R) == 0:
        return np.zeros(inst.n, dtype=np.int64)
    U, mult = np.unique(R, axis=0, return_counts=True)
    if inst.n * len(U) <= cfg.direct_count_cells:
        out = np.zeros(inst.n, dtype=np.int64)
        step = max(1, 2_000_000 // len(U))
        for s in range(0, inst.n, step):
            lo, hi = inst.lo[s:s + step, None, :], inst.hi[s:s + step, None, :]
            inside = ((lo <= U[None]) & (U[None] <= hi)).all(axis=2)
            out[s:s + step] = inside @ mult
        return out
    tree = StaticRangeTree(R, inst.dimension, cfg.leaf_size)
    return np.array([tree.count(b) for b in inst.boxes])


def improved_mwu(inst: ProblemInstance, seed: int = 0, cfg: ImprovedConfig | None = None) -> PiercingSolution:
    """Piercing set via batch-sampled light boxes and independent-set doubling."""
    cfg = cfg or ImprovedConfig()
    t0 = time.perf_counter()
    orig = inst
    stats: dict = {"guesses": 0, "rounds": 0, "restarts": 0, "round_retries": 0, "doubled": 0}
    if inst.n == 0:
        return PiercingSolution([], "improved-mwu", seed, stats)
    if inst.dimension == 1:
        pts = [(x,) for x in greedy_interval_pierce(inst.boxes)]
        stats["wall_time"] = time.perf_counter() - t0
        return PiercingSolution(pts, "improved-mwu", seed, stats)
    inst = to_frame(inst)
    n, d = inst.n, inst.dimension
    boxes = list(inst.boxes)
    sampler = BatchSampler(inst, cfg.arith, cfg.slab_capacity)
    k = _first_guess(inst, 1) if cfg.warm_start else 1
    while True:
        stats["guesses"] += 1
        mult: dict = {}
        doubled = 0
        budget = cfg.doubling_const * k * math.log(max((2 * n) ** d / k, math.e))
        cap = max(1, math.ceil(cfg.round_cap_const * _ln(n) ** (2 * d)))
        small = cfg.indep_const * k / _ln(n) ** (2 * d - 1)
        rounds = 0
        retries = 0
        result = None
        while rounds < cap and doubled <= budget:
            rounds += 1
            stats["rounds"] += 1
            gen = np_rng(seed, f"improved/k{k}/r{rounds}/t{retries}")
            r = max(1, math.ceil(cfg.sample_const * k * _ln(n)))
            R = sampler.sample(mult, r, gen)
            counts = _sample_counts(inst, R, cfg)
            light = np.flatnonzero(counts <= r / (4 * k))
            I = [int(light[j]) for j in dnc_independent_idx([boxes[i] for i in light])]
            if len(I) >= 2 * k:
                stats["restarts"] += 1
                break
            if len(I) < small or len(light) == 0:
                P = dnc_pierce_boxes([boxes[i] for i in light])
                heavy = [boxes[i] for i in np.flatnonzero(counts > r / (4 * k))]
                N = _net(WeightedPoints(R), 1 / (cfg.heavy_const * k), heavy, seed,
                         f"improved/k{k}/r{rounds}", cfg, stats) if heavy else []
                pts = list(dict.fromkeys(tuple(p) for p in P + N))
                if verify_piercing(inst, pts):
                    retries += 1
                    stats["round_retries"] += 1
                    if retries > cfg.round_retries:
                        break
                    rounds -= 1
                    continue
                result = pts
                break
            for i in I:
                mult[i] = mult.get(i, 0) + 1
            doubled += len(I)
            stats["doubled"] += len(I)
        if result is not None:
            stats["k"] = k
            stats["net_points"] = len(result)
            if cfg.prune:
                result = prune_redundant(inst, result)
            stats["wall_time"] = time.perf_counter() - t0
            return PiercingSolution(from_frame(orig, inst, result), "improved-mwu", seed, stats)
        k *= 2
