"""Command-line front end: generate, solve, verify, replay, bench."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from pathlib import Path

from . import io
from .classic import dnc_pierce, greedy_interval_pierce
from .dynamic import DynamicPiercer
from .generators import KINDS, generate
from .geom import CapExceeded, PiercingSolution, ProblemInstance, UsageError, exact_piercing, verify_piercing
from .multiround import MultiRoundConfig, multi_round_pierce, two_round_2d
from .mwu import ImprovedConfig, MwuConfig, basic_mwu, improved_mwu

ALGORITHMS = ("greedy1d", "dnc", "basic-mwu", "improved-mwu", "multiround:r", "two-round-2d", "exact")

EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CAP = 3


def run_algorithm(inst: ProblemInstance, algo: str, seed: int = 0, rounds: int | None = None,
                  alpha: float | None = None, exact_cap: int = 40) -> PiercingSolution:
    extra = {} if alpha is None else {"alpha": alpha}
    if algo == "greedy1d":
        if inst.dimension != 1:
            raise UsageError("greedy1d needs intervals (d = 1)")
        t0 = time.perf_counter()
        pts = [(x,) for x in greedy_interval_pierce(inst.boxes)]
        return PiercingSolution(pts, "greedy1d", seed, {"wall_time": time.perf_counter() - t0})
    if algo == "dnc":
        sol = dnc_pierce(inst)
        sol.seed = seed
        return sol
    if algo == "basic-mwu":
        return basic_mwu(inst, seed, MwuConfig(**extra))
    if algo == "improved-mwu":
        return improved_mwu(inst, seed, ImprovedConfig(**extra))
    if algo.startswith("multiround"):
        _, _, r = algo.partition(":")
        if r and r != "r":
            try:
                rounds = int(r)
            except ValueError:
                raise UsageError(f"bad round count in {algo!r}") from None
        inner = improved_mwu if alpha is None else (lambda i, s: improved_mwu(i, s, ImprovedConfig(**extra)))
        return multi_round_pierce(inst, seed, MultiRoundConfig(rounds=rounds or 2, inner=inner))
    if algo == "two-round-2d":
        return two_round_2d(inst, seed)
    if algo == "exact":
        sol = exact_piercing(inst, max_boxes=exact_cap)
        sol.seed = seed
        return sol
    raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


def _counters(stats: dict) -> dict:
    keys = ("rounds", "doublings", "doubled", "restarts", "stages", "guesses", "k")
    out = {k: stats[k] for k in keys if k in stats and isinstance(stats[k], (int, float))}
    net = stats.get("net")
    if isinstance(net, dict) and "size" in net:
        out["net_size"] = net["size"]
    return out


def run_report(inst: ProblemInstance, sol: PiercingSolution, descriptor: str, optimal: int | None) -> dict:
    rep = {
        "instance": descriptor,
        "n": inst.n,
        "d": inst.dimension,
        "algorithm": sol.algorithm,
        "seed": sol.seed,
        "size": sol.size,
        "optimal": optimal,
        "ratio": (sol.size / optimal) if optimal else None,
        "wall_time": round(float(sol.stats.get("wall_time", 0.0)), 6),
    }
    rep.update(_counters(sol.stats))
    return rep


def _emit(obj: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        out.write(" ".join(f"{k}={v}" for k, v in obj.items()) + "\n")


# ------------------------------------------------------------ verbs
def cmd_generate(a) -> int:
    params = {}
    if a.k is not None:
        params["k"] = a.k
    inst = generate(a.kind, a.n, a.d, a.seed, **params)
    text = io.dumps(io.instance_to_json(inst))
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _known_optimum(inst: ProblemInstance, a) -> int | None:
    if "p_star" in inst.metadata:
        return int(inst.metadata["p_star"])
    if a.optimal:
        return exact_piercing(inst, max_boxes=a.exact_cap).size
    return None


def cmd_solve(a) -> int:
    inst = io.read_instance(a.instance)
    sol = run_algorithm(inst, a.algo, a.seed, a.rounds, a.alpha, a.exact_cap)
    missed = verify_piercing(inst, sol.points)
    if missed:
        print(f"error: {a.algo} left {len(missed)} boxes unpierced", file=sys.stderr)
        return EXIT_INVALID
    if a.out:
        io.write_solution(sol, a.out)
    _emit(run_report(inst, sol, str(a.instance), _known_optimum(inst, a)), a.format, sys.stdout)
    return 0


def cmd_verify(a) -> int:
    inst = io.read_instance(a.instance)
    sol = io.read_solution(a.solution)
    missed = verify_piercing(inst, sol.points)
    _emit({"boxes": inst.n, "points": sol.size, "unpierced": len(missed)}, a.format, sys.stdout)
    return EXIT_INVALID if missed else 0


def cmd_replay(a) -> int:
    script = io.read_script(a.script)
    events: list = []
    dp = DynamicPiercer(a.mode, a.seed, on_reconstruct=lambda _dp, sol: events.append(sol.stats))
    times = []
    failures = 0
    for step, (op, b) in enumerate(script, 1):
        t0 = time.perf_counter()
        try:
            (dp.dyn_insert if op == "insert" else dp.dyn_delete)(b)
        except UsageError as e:
            print(f"error: update {step}: {e}", file=sys.stderr)
            return EXIT_USAGE
        times.append(time.perf_counter() - t0)
        while events:
            ev = events.pop(0)
            _emit({"event": "reconstruct", "step": step, "n": ev["n"], "size": ev["size"], "k": ev.get("k"),
                   "wall_time": round(ev["wall_time"], 6)}, a.format, sys.stdout)
        if a.verify_each and dp.unpierced():
            failures += 1
            _emit({"event": "unpierced", "step": step}, a.format, sys.stdout)
    summary = {
        "event": "summary",
        "updates": len(script),
        "live": len(dp),
        "size": len(dp.P),
        "reconstructions": dp.reconstructions,
        "mean_update_time": round(sum(times) / len(times), 6) if times else 0.0,
        "max_update_time": round(max(times), 6) if times else 0.0,
        "verify_failures": failures if a.verify_each else None,
    }
    _emit(summary, a.format, sys.stdout)
    return EXIT_INVALID if failures else 0


def _bench_matrix(a) -> list:
    if a.matrix:
        table = json.loads(Path(a.matrix).read_text())
    else:
        table = {}
    get = lambda key, cli, default: table.get(key, cli if cli else default)
    ns = get("n", a.n, [50])
    ds = get("d", a.d, [2])
    kinds = get("kind", a.kind, ["uniform-random"])
    algos = get("algo", a.algo, ["dnc"])
    seeds = get("seeds", a.seeds, [0])
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    return list(itertools.product(kinds, ns, ds, algos, seeds))


def bench_rows(matrix: list, rounds: int | None = None, alpha: float | None = None, exact_cap: int = 40) -> list:
    rows = []
    for kind, n, d, algo, seed in matrix:
        inst = generate(kind, n, d, seed)
        sol = run_algorithm(inst, algo, seed, rounds, alpha, exact_cap)
        if verify_piercing(inst, sol.points):
            raise RuntimeError(f"{algo} produced an invalid solution on {kind} n={n} d={d} seed={seed}")
        opt = inst.metadata.get("p_star")
        rep = run_report(inst, sol, f"{kind}:n={n}:d={d}:seed={seed}", opt)
        rep["kind"] = kind
        rows.append(rep)
    return rows


BENCH_FIELDS = ["instance", "kind", "n", "d", "algorithm", "seed", "size", "optimal", "ratio", "wall_time",
                "rounds", "doublings", "doubled", "restarts", "stages", "guesses", "k", "net_size"]


def cmd_bench(a) -> int:
    rows = bench_rows(_bench_matrix(a), a.rounds, a.alpha, a.exact_cap)
    out = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        io.write_csv(rows, out, BENCH_FIELDS)
    finally:
        if a.out:
            out.close()
    return 0


# ------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boxpierce", description="Piercing sets for axis-parallel boxes.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, algo=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "text"), default="json")
        if algo:
            sp.add_argument("--rounds", type=int, default=None, help="round count for multiround")
            sp.add_argument("--alpha", type=float, default=None, help="sample-size constant of the weak net")
            sp.add_argument("--exact-cap", type=int, default=40, help="largest n the exact solver accepts")

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--kind", choices=KINDS, default="uniform-random")
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--k", type=int, default=None, help="plant count or grid side")
    g.add_argument("--out")
    common(g, algo=False)
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("solve", help="pierce an instance and verify the result")
    s.add_argument("instance")
    s.add_argument("--algo", default="improved-mwu", help="|".join(ALGORITHMS))
    s.add_argument("--out", help="solution file")
    s.add_argument("--optimal", action="store_true", help="also run the exact solver for the ratio")
    common(s)
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="check that a solution pierces an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    common(v, algo=False)
    v.set_defaults(fn=cmd_verify)

    r = sub.add_parser("replay", help="run an insert/delete script through the dynamic structure")
    r.add_argument("script")
    r.add_argument("--mode", choices=("rectangles", "squares"), default="rectangles")
    r.add_argument("--verify-each", action="store_true")
    common(r, algo=False)
    r.set_defaults(fn=cmd_replay)

    b = sub.add_parser("bench", help="CSV of runs over a matrix of settings")
    b.add_argument("--matrix", help="JSON file with lists under n, d, kind, algo and seeds")
    b.add_argument("--n", type=int, nargs="*")
    b.add_argument("--d", type=int, nargs="*")
    b.add_argument("--kind", nargs="*")
    b.add_argument("--algo", nargs="*")
    b.add_argument("--seeds", type=int, nargs="*")
    b.add_argument("--out")
    common(b)
    b.set_defaults(fn=cmd_bench)
    return p


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
