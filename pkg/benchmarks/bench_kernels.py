"""Timing comparison between the pure-Python kernels and the compiled
extension.

Four views: microbenchmarks of the bytecode box-evaluation kernel, the
interval-propagation kernel, and the completion kernel (fixed systems
plus the heaviest systems captured live from a random solver workload),
then an end-to-end timing of that workload under each backend.  Every
timed pair is also checked for identical output, so the tables double
as an agreement audit.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--reps 5] [--instances 12] [--seed 1]
"""

from __future__ import annotations

import argparse
import time
from array import array

import sumstar._kernels as K
from sumstar import semilinear
from sumstar._kernels import pure
from sumstar.ast import EQ, GE, LE, MOD, atom, conj, const_term, disj, linterm, var_term
from sumstar.bytecode import compile_formula
from sumstar.errors import ResourceLimit, SumstarError
from sumstar.oracle import gen_random_problem
from sumstar.solver import solve_problem

NODE_CAP = 400_000

COMPLETION_FIXED = [
    ("pair-doubling", [(1, 1, -2)], 3),
    ("balanced-triple", [(1, 1, 1, -1, -1, -1)], 6),
    ("two-row-mix", [(2, -3, 1, 0), (0, 1, -1, 1)], 4),
    ("counter-column", [(1, 2, -1, 0, -4), (0, 1, 1, -1, -2)], 5),
]

EVAL_FORMULAS = [
    (
        "sum-eq",
        atom(EQ, linterm(0, {"x": 1, "y": 1, "z": 1}), const_term(9)),
        ("x", "y", "z"),
        (12, 12, 12),
    ),
    (
        "guarded-band",
        conj(
            atom(GE, linterm(0, {"x": 2, "y": 1}), const_term(5)),
            atom(LE, linterm(0, {"x": 1, "z": 3}), const_term(20)),
            disj(atom(MOD, var_term("y"), const_term(1), 3), atom(EQ, var_term("z"), const_term(4))),
        ),
        ("x", "y", "z"),
        (20, 20, 20),
    ),
]


def _time(fn, reps: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_evaluation(reps: int) -> None:
    print("bytecode evaluation kernel (count over box)")
    header = f"{'formula':<14} {'box':>12} {'pure ms':>9} {'compiled ms':>12} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))
    for name, f, order, highs in EVAL_FORMULAS:
        prog = compile_formula(f, order)
        lows = (0,) * len(order)
        pure_t, pure_out = _time(lambda: pure.count_sat(prog.code, lows, highs), reps)
        box = "x".join(str(h + 1) for h in highs)
        if K._accel is None:
            print(f"{name:<14} {box:>12} {pure_t * 1e3:>9.3f} {'-':>12} {'-':>8}")
            continue
        flat = array("q", [v for pair in prog.code for v in pair])
        comp_t, comp_out = _time(
            lambda: K._accel.count_sat(flat, array("q", lows), array("q", highs)), reps
        )
        agree = "yes" if pure_out == comp_out else "NO"
        speed = pure_t / comp_t if comp_t > 0 else float("inf")
        print(
            f"{name:<14} {box:>12} {pure_t * 1e3:>9.3f} "
            f"{comp_t * 1e3:>12.3f} {speed:>7.1f}x  {agree}"
        )
    print()


PROPAGATE_FIXED = [
    # (name, rows as (is_eq, rhs, coeffs...), n, high)
    ("band-3", [(1, 7, 2, 1, 0), (0, 5, 1, 0, 3)], 3, 50),
    ("chain-5", [(1, 9, 1, 1, 0, 0, 0), (1, 4, 0, 1, -1, 0, 0), (0, 12, 0, 0, 2, 3, 1)], 5, 40),
]


def bench_propagation(reps: int) -> None:
    print("interval propagation kernel (bound tightening)")
    header = f"{'system':<10} {'vars':>5} {'rows':>5} {'pure ms':>9} {'compiled ms':>12} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))
    for name, rows, n, high in PROPAGATE_FIXED:
        flat = [v for row in rows for v in row]
        rounds = 4 * n + 8

        def run_pure():
            lows, highs = [0] * n, [high] * n
            ok = pure.propagate(flat, n, lows, highs, rounds)
            return ok, lows, highs

        pure_t, pure_out = _time(run_pure, reps * 200)
        if K._accel is None:
            print(f"{name:<10} {n:>5} {len(rows):>5} {pure_t * 1e3:>9.4f} {'-':>12} {'-':>8}")
            continue
        cflat = array("q", flat)

        def run_comp():
            lows, highs = array("q", [0] * n), array("q", [high] * n)
            ok = bool(K._accel.propagate(cflat, n, lows, highs, rounds))
            return ok, list(lows), list(highs)

        comp_t, comp_out = _time(run_comp, reps * 200)
        agree = "yes" if pure_out == comp_out else "NO"
        speed = pure_t / comp_t if comp_t > 0 else float("inf")
        print(
            f"{name:<10} {n:>5} {len(rows):>5} {pure_t * 1e3:>9.4f} "
            f"{comp_t * 1e3:>12.4f} {speed:>7.1f}x  {agree}"
        )
    print()


def capture_workload(seeds: list[int]) -> list[tuple[str, list[tuple[int, ...]], int]]:
    """Record every completion input a batch of random solves performs,
    keeping the distinct systems that cost the most."""

    records: dict[tuple, float] = {}
    original = semilinear._completion

    def recording(rows, n, node_cap):
        t0 = time.perf_counter()
        out = original(rows, n, node_cap)
        key = (tuple(tuple(r) for r in rows), n)
        records[key] = max(records.get(key, 0.0), time.perf_counter() - t0)
        return out

    semilinear._completion = recording
    try:
        run_workload(seeds)
    finally:
        semilinear._completion = original

    ranked = sorted(records.items(), key=lambda kv: kv[1], reverse=True)
    return [
        (f"workload-{i}", [tuple(r) for r in rows], n)
        for i, ((rows, n), _) in enumerate(ranked[:6])
    ]


def run_workload(seeds: list[int]) -> float:
    t0 = time.perf_counter()
    for s in seeds:
        p = gen_random_problem(s)
        try:
            solve_problem(p)
        except (ResourceLimit, SumstarError):
            pass
    return time.perf_counter() - t0


def bench_completion(reps: int, seeds: list[int]) -> None:
    print("completion kernel (generator search)")
    suite = COMPLETION_FIXED + capture_workload(seeds)
    header = f"{'system':<16} {'cols':>4} {'rows':>4} {'pure ms':>9} {'compiled ms':>12} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))
    for name, rows, n in suite:
        rows = [tuple(r) for r in rows]
        try:
            pure_t, pure_out = _time(lambda: pure.completion(rows, n, NODE_CAP), reps)
        except ResourceLimit:
            print(f"{name:<16} {n:>4} {len(rows):>4} {'cap':>9}")
            continue
        if K._accel is None:
            print(f"{name:<16} {n:>4} {len(rows):>4} {pure_t * 1e3:>9.3f} {'-':>12} {'-':>8}")
            continue
        comp_t, comp_out = _time(lambda: K._accel.completion(rows, n, NODE_CAP), reps)
        agree = "yes" if pure_out == comp_out else "NO"
        speed = pure_t / comp_t if comp_t > 0 else float("inf")
        print(
            f"{name:<16} {n:>4} {len(rows):>4} {pure_t * 1e3:>9.3f} "
            f"{comp_t * 1e3:>12.3f} {speed:>7.1f}x  {agree}"
        )
    print()


def bench_end_to_end(seeds: list[int]) -> None:
    print(f"end-to-end: {len(seeds)} random solves per backend")
    accel = K._accel
    t_comp = None
    if accel is not None:
        t_comp = run_workload(seeds)
        print(f"  compiled backend: {t_comp:8.2f} s")
    K._accel = None
    try:
        t_pure = run_workload(seeds)
    finally:
        K._accel = accel
    print(f"  pure backend:     {t_pure:8.2f} s")
    if t_comp:
        print(f"  speedup:          {t_pure / t_comp:8.1f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5, help="timing repetitions per input")
    ap.add_argument("--instances", type=int, default=12, help="random solves in the workload")
    ap.add_argument("--seed", type=int, default=1, help="first workload seed")
    args = ap.parse_args()

    print(f"import-selected backend: {K.backend_name()}")
    if K._accel is None:
        print("compiled extension not built; timing the pure kernels only")
    print()

    seeds = list(range(args.seed, args.seed + args.instances))
    bench_evaluation(args.reps)
    bench_propagation(args.reps)
    bench_completion(args.reps, seeds)
    bench_end_to_end(seeds)


if __name__ == "__main__":
    main()
