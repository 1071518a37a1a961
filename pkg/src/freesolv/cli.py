"""Command line front end: wp / pow / conj decision commands, a scaling
benchmark, and an oracle-agreement selftest.

Exit codes: 0 positive answer (trivial / power found / conjugate),
1 negative answer, 2 usage or parse error, 3 internal guard tripped.
"""

from __future__ import annotations

import argparse
import json
import secrets
import statistics
import sys
import time
from dataclasses import dataclass
from random import Random

import numpy as np

from . import oracle
from .words import (ParseError, Word, commutator, parse, random_reduced_word,
                    random_trivial_word)
from .wordproblem import LengthGuardError, word_problem
from .power import power_solve
from .conjugacy import conjugacy_solve
from .xdigraph import FoldConflict

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


@dataclass
class RunConfig:
    rank: int | None
    degree: int
    mode: str
    seed: int
    cube_exp: int | None
    trials: int
    as_json: bool
    max_len: int

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        if args.rank is not None and args.rank < 1:
            raise ParseError("rank must be >= 1")
        if args.degree < 0:
            raise ParseError("degree must be >= 0")
        if args.trials < 1:
            raise ParseError("trials must be >= 1")
        seed = args.seed if args.seed is not None else secrets.randbits(64)
        return cls(rank=args.rank, degree=args.degree, mode=args.mode,
                   seed=seed, cube_exp=args.cube_exp, trials=args.trials,
                   as_json=args.json, max_len=args.max_len)

    def cube_bound(self, n: int) -> int | None:
        if self.mode != "mc":
            return None
        if self.cube_exp is None:
            return None  # solver defaults (|w|^3 and friends)
        return max(1, n) ** self.cube_exp


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, sort_keys=True))
    else:
        pairs = " ".join(f"{k}={v}" for k, v in sorted(report.items()))
        print(pairs)


def _finish(report: dict, cfg: RunConfig, positive: bool) -> int:
    report.update(mode=cfg.mode, seed=cfg.seed, degree=cfg.degree)
    _emit(report, cfg.as_json)
    return EXIT_YES if positive else EXIT_NO


def cmd_wp(args) -> int:
    cfg = RunConfig.from_args(args)
    w = parse(args.word, cfg.rank)
    r = cfg.rank if cfg.rank is not None else w.rank
    rng = Random(cfg.seed)
    t0 = time.perf_counter()
    answers = [word_problem(w, r, cfg.degree, mode=cfg.mode, rng=rng,
                            cube_bound=cfg.cube_bound(len(w)),
                            max_len=cfg.max_len)
               for _ in range(cfg.trials)]
    # false-biased: any single False certifies nontriviality
    ans = all(answers)
    elapsed = (time.perf_counter() - t0) * 1000
    report = {"problem": "wp", "inputs": [w.serialize()], "answer": ans,
              "rank": r, "elapsed_ms": round(elapsed, 3)}
    return _finish(report, cfg, ans)


def cmd_pow(args) -> int:
    cfg = RunConfig.from_args(args)
    u = parse(args.u, cfg.rank)
    v = parse(args.v, cfg.rank)
    r = cfg.rank if cfg.rank is not None else max(u.rank, v.rank)
    rng = Random(cfg.seed)
    n = len(u) + len(v)
    if n >= cfg.max_len:
        raise LengthGuardError(f"|u|+|v| = {n} exceeds guard {cfg.max_len}")
    t0 = time.perf_counter()
    results = [power_solve(u, v, r, cfg.degree, mode=cfg.mode, rng=rng,
                           cube_bound=cfg.cube_bound(n))
               for _ in range(cfg.trials)]
    res = max(set(results), key=results.count)  # majority across trials
    elapsed = (time.perf_counter() - t0) * 1000
    report = {"problem": "pow", "inputs": [u.serialize(), v.serialize()],
              "answer": res.found, "k": res.k, "rank": r,
              "elapsed_ms": round(elapsed, 3)}
    return _finish(report, cfg, res.found)


def cmd_conj(args) -> int:
    cfg = RunConfig.from_args(args)
    x = parse(args.x, cfg.rank)
    y = parse(args.y, cfg.rank)
    r = cfg.rank if cfg.rank is not None else max(x.rank, y.rank)
    rng = Random(cfg.seed)
    n = len(x) + len(y)
    if n >= cfg.max_len:
        raise LengthGuardError(f"|x|+|y| = {n} exceeds guard {cfg.max_len}")
    t0 = time.perf_counter()
    outcomes = [conjugacy_solve(x, y, r, cfg.degree, mode=cfg.mode, rng=rng,
                                cube_bound=cfg.cube_bound(n))
                for _ in range(cfg.trials)]
    yes = [o for o in outcomes if o.conjugate]
    if 2 * len(yes) > len(outcomes):
        res = yes[0]
    else:
        res = next((o for o in outcomes if not o.conjugate), outcomes[0])
    elapsed = (time.perf_counter() - t0) * 1000
    report = {"problem": "conj", "inputs": [x.serialize(), y.serialize()],
              "answer": res.conjugate,
              "witness": res.witness.serialize() if res.conjugate else None,
              "rank": r, "elapsed_ms": round(elapsed, 3)}
    return _finish(report, cfg, res.conjugate)


# -- benchmark ---------------------------------------------------------------


def bench_instance(problem: str, n: int, r: int, d: int, rng: Random):
    """Seeded instance families used for the scaling table.

    wp: one random reduced word of length n.
    pow: u = v^2 with |u|+|v| about n (the solver must certify via the
      commutator word problem, the expensive path).
    conj: conjugate pair perturbed by a commutator: abelianizations match
      but the pair is generically not conjugate for d >= 2, so the shift
      loop runs in full.
    """
    if problem == "wp":
        return (random_reduced_word(rng, n, r),)
    if problem == "pow":
        v = random_reduced_word(rng, max(1, n // 3), r)
        return (v ** 2, v)
    if problem == "conj":
        x = random_reduced_word(rng, max(1, n // 3), r)
        z = random_reduced_word(rng, max(1, n // 6), r)
        while True:
            a = random_reduced_word(rng, max(1, n // 12), r)
            b = random_reduced_word(rng, max(1, n // 12), r)
            c = commutator(a, b)
            if len(c) > 0:
                break
        y = (z * x * ~z) * c
        return (x, y)
    raise ValueError(f"unknown bench problem {problem!r}")


def run_bench(problem: str, sizes: list[int], r: int, d: int, mode: str,
              seed: int, trials: int, cube_exp: int | None = None) -> dict:
    """Median wall times, doubling ratios and the fitted exponent."""
    rows = []
    for n in sizes:
        times = []
        for t in range(trials):
            rng = Random(seed * 1_000_003 + n * 1009 + t)
            inst = bench_instance(problem, n, r, d, rng)
            total = sum(len(w) for w in inst)
            cube = max(1, total) ** cube_exp if (cube_exp and mode == "mc") else None
            run_rng = Random(seed * 1_000_003 + n * 1009 + t + 500_000_001)
            t0 = time.perf_counter()
            if problem == "wp":
                word_problem(inst[0], r, d, mode=mode, rng=run_rng,
                             cube_bound=cube)
            elif problem == "pow":
                power_solve(inst[0], inst[1], r, d, mode=mode, rng=run_rng,
                            cube_bound=cube)
            else:
                conjugacy_solve(inst[0], inst[1], r, d, mode=mode,
                                rng=run_rng, cube_bound=cube)
            times.append(time.perf_counter() - t0)
        rows.append({"n": n, "median_s": statistics.median(times)})
    for prev, cur in zip(rows, rows[1:]):
        if cur["n"] == 2 * prev["n"] and prev["median_s"] > 0:
            cur["doubling_ratio"] = cur["median_s"] / prev["median_s"]
    xs = np.log2([row["n"] for row in rows])
    ys = np.log2([max(row["median_s"], 1e-9) for row in rows])
    exponent = float(np.polyfit(xs, ys, 1)[0]) if len(rows) > 1 else float("nan")
    return {"problem": problem, "mode": mode, "rank": r, "degree": d,
            "seed": seed, "rows": rows, "fitted_exponent": round(exponent, 3)}


def cmd_bench(args) -> int:
    cfg = RunConfig.from_args(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    if sizes != sorted(sizes):
        raise ParseError("sizes must be ascending")
    r = cfg.rank if cfg.rank is not None else 2
    table = run_bench(args.problem, sizes, r, cfg.degree, cfg.mode,
                      cfg.seed, cfg.trials, cfg.cube_exp)
    if cfg.as_json:
        print(json.dumps(table, sort_keys=True))
    else:
        print(f"# {table['problem']} mode={table['mode']} r={r} "
              f"d={cfg.degree} seed={cfg.seed}")
        print(f"{'n':>8} {'median_s':>12} {'doubling':>9}")
        for row in table["rows"]:
            ratio = row.get("doubling_ratio")
            tail = f"{ratio:>9.2f}" if ratio is not None else f"{'-':>9}"
            print(f"{row['n']:>8} {row['median_s']:>12.5f} {tail}")
        print(f"fitted exponent: {table['fitted_exponent']}")
    return EXIT_YES


# -- selftest ----------------------------------------------------------------


def run_selftest(max_len: int = 6, verbose: bool = True) -> int:
    """Oracle-agreement sweep; returns the number of mismatches."""
    bad = 0
    total = 0
    for w in oracle.reduced_words(2, max_len):
        for d in (1, 2):
            total += 1
            if word_problem(w, 2, d) != oracle.is_trivial(w, 2, d):
                bad += 1
                if verbose:
                    print(f"wp mismatch: {w.serialize()} d={d}")
    rng = Random(20240601)
    for _ in range(200):
        v = random_reduced_word(rng, rng.randrange(1, 6), 2)
        k = rng.randrange(-4, 5)
        u = v ** k
        res = power_solve(u, v, 2, 2)
        total += 1
        if not res.found or oracle.magnus_form(u, 2, 2) != \
                oracle.magnus_form(v ** res.k, 2, 2):
            bad += 1
            if verbose:
                print(f"pow mismatch: {u.serialize()} | {v.serialize()}")
    for _ in range(100):
        x = random_reduced_word(rng, rng.randrange(1, 5), 2)
        z = random_reduced_word(rng, rng.randrange(0, 5), 2)
        y = z * x * ~z
        total += 1
        if not conjugacy_solve(x, y, 2, 2).conjugate:
            bad += 1
            if verbose:
                print(f"conj missed: {x.serialize()} ~ {y.serialize()}")
    if verbose:
        print(f"selftest: {total} checks, {bad} mismatches")
    return bad


def cmd_selftest(args) -> int:
    bad = run_selftest(max_len=args.wp_len)
    return EXIT_YES if bad == 0 else EXIT_NO


# -- argument plumbing -------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rank", type=int, default=None,
                   help="number of generators (default: inferred)")
    p.add_argument("--degree", type=int, default=2,
                   help="solvability class d (default 2, free metabelian)")
    p.add_argument("--mode", choices=("det", "mc"), default="det",
                   help="deterministic (always correct) or Monte Carlo")
    p.add_argument("--seed", type=int, default=None,
                   help="PRNG seed (default: OS entropy, echoed in output)")
    p.add_argument("--cube-exp", type=int, default=None,
                   help="anchor cube exponent override for mc mode")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--json", action="store_true", help="JSON report")
    p.add_argument("--max-len", type=int, default=1 << 20,
                   help="input length guard")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="freesolv",
        description="word, power and conjugacy problems in free solvable "
                    "groups S_{r,d}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wp", help="decide w = 1 in S_{r,d}")
    p.add_argument("word")
    _add_common(p)
    p.set_defaults(fn=cmd_wp)

    p = sub.add_parser("pow", help="find k with u = v^k in S_{r,d}")
    p.add_argument("u")
    p.add_argument("v")
    _add_common(p)
    p.set_defaults(fn=cmd_pow)

    p = sub.add_parser("conj", help="decide conjugacy of x and y in S_{r,d}")
    p.add_argument("x")
    p.add_argument("y")
    _add_common(p)
    p.set_defaults(fn=cmd_conj)

    p = sub.add_parser("bench", help="scaling table for one problem")
    p.add_argument("problem", choices=("wp", "pow", "conj"))
    p.add_argument("sizes", help="comma-separated ascending instance sizes")
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("selftest", help="oracle agreement sweep")
    p.add_argument("--wp-len", type=int, default=6,
                   help="exhaustive word-problem length bound")
    _add_common(p)
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (LengthGuardError, oracle.OracleLimitError, FoldConflict) as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
