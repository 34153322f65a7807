"""Pure-Python kernel twin.

Functionally identical to the compiled extension, with arbitrary
precision arithmetic.  The extension mirrors this file instruction for
instruction; any behavioural difference between the two is a bug.
"""

from __future__ import annotations

from itertools import product
from math import gcd
from typing import Optional, Sequence

from ..bytecode import (
    OP_ADD,
    OP_AND,
    OP_CONST,
    OP_EQ,
    OP_GE,
    OP_GT,
    OP_LE,
    OP_LT,
    OP_MOD,
    OP_MULC,
    OP_NOT,
    OP_OR,
    OP_VAR,
)
from ..errors import ResourceLimit

name = "pure"


def run_program(code: Sequence[tuple[int, int]], env: Sequence[int]) -> int:
    stack: list[int] = []
    push = stack.append
    pop = stack.pop
    for op, arg in code:
        if op == OP_CONST:
            push(arg)
        elif op == OP_VAR:
            push(env[arg])
        elif op == OP_ADD:
            b = pop()
            push(pop() + b)
        elif op == OP_MULC:
            push(pop() * arg)
        elif op == OP_EQ:
            b = pop()
            push(1 if pop() == b else 0)
        elif op == OP_LE:
            b = pop()
            push(1 if pop() <= b else 0)
        elif op == OP_LT:
            b = pop()
            push(1 if pop() < b else 0)
        elif op == OP_GE:
            b = pop()
            push(1 if pop() >= b else 0)
        elif op == OP_GT:
            b = pop()
            push(1 if pop() > b else 0)
        elif op == OP_MOD:
            b = pop()
            push(1 if (pop() - b) % arg == 0 else 0)
        elif op == OP_NOT:
            push(0 if pop() else 1)
        elif op == OP_AND:
            b = pop()
            push(1 if pop() and b else 0)
        else:  # OP_OR
            b = pop()
            push(1 if pop() or b else 0)
    return stack[-1]


def search_product(
    code: Sequence[tuple[int, int]],
    lows: Sequence[int],
    highs: Sequence[int],
) -> Optional[tuple[int, ...]]:
    """First tuple in the box (lexicographic order) satisfying the program."""

    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    for env in product(*ranges):
        if run_program(code, env):
            return env
    return None


def first_diff(
    code_a: Sequence[tuple[int, int]],
    code_b: Sequence[tuple[int, int]],
    lows: Sequence[int],
    highs: Sequence[int],
) -> Optional[tuple[int, ...]]:
    """First tuple where the two programs disagree (as booleans)."""

    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    for env in product(*ranges):
        if bool(run_program(code_a, env)) != bool(run_program(code_b, env)):
            return env
    return None


def count_sat(
    code: Sequence[tuple[int, int]],
    lows: Sequence[int],
    highs: Sequence[int],
) -> int:
    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    return sum(1 for env in product(*ranges) if run_program(code, env))


def propagate(
    rows: Sequence[int],
    n: int,
    lows,
    highs,
    rounds: int,
) -> bool:
    """Tighten per-variable bounds from each row; False on an empty
    domain.

    ``rows`` is flat with stride ``n + 2``: an equality flag, the right
    hand side, then ``n`` coefficients.  ``lows`` and ``highs`` are
    mutable sequences updated in place.  Equality rows also prune by
    the residue of the open variables' coefficient gcd.
    """

    stride = n + 2
    nrows = len(rows) // stride
    for _ in range(rounds):
        changed = False
        for r in range(nrows):
            base = r * stride
            is_eq = rows[base]
            rhs = rows[base + 1]
            lo_sum = 0
            hi_sum = 0
            for i in range(n):
                c = rows[base + 2 + i]
                if c > 0:
                    lo_sum += c * lows[i]
                    hi_sum += c * highs[i]
                elif c < 0:
                    lo_sum += c * highs[i]
                    hi_sum += c * lows[i]
            if lo_sum > rhs or (is_eq and hi_sum < rhs):
                return False
            if is_eq:
                # residue check: the open variables' contribution must
                # make up rhs minus the settled part, so their
                # coefficient gcd has to divide it
                g = 0
                settled = 0
                for i in range(n):
                    c = rows[base + 2 + i]
                    if lows[i] == highs[i]:
                        settled += c * lows[i]
                    else:
                        g = gcd(g, abs(c))
                if g and (rhs - settled) % g:
                    return False
            for i in range(n):
                c = rows[base + 2 + i]
                if c == 0:
                    continue
                if c > 0:
                    rest_lo = lo_sum - c * lows[i]
                    rest_hi = hi_sum - c * highs[i]
                    # c*x <= rhs - rest_lo; for equalities also
                    # c*x >= rhs - rest_hi
                    cap = (rhs - rest_lo) // c
                    if cap < highs[i]:
                        highs[i] = cap
                        changed = True
                    if is_eq:
                        need = (rhs - rest_hi + c - 1) // c
                        if need > lows[i]:
                            lows[i] = need
                            changed = True
                else:
                    d = -c
                    rest_lo = lo_sum - c * highs[i]
                    rest_hi = hi_sum - c * lows[i]
                    # c*x <= rhs - rest_lo means
                    # x >= ceil((rest_lo - rhs) / d)
                    need = (rest_lo - rhs + d - 1) // d
                    if need > lows[i]:
                        lows[i] = need
                        changed = True
                    if is_eq:
                        cap = (rest_hi - rhs) // d
                        if cap < highs[i]:
                            highs[i] = cap
                            changed = True
                if lows[i] > highs[i]:
                    return False
        if not changed:
            return True
    return True


def completion(
    rows: Sequence[tuple[int, ...]], n: int, node_cap: int
) -> list[tuple[int, ...]]:
    """Minimal nonzero natural solutions of ``row . x = 0`` for every row.

    Frontier search from the unit vectors; a vector t grows by unit e_i
    only when the defect vectors satisfy <A t, A e_i> < 0, which cannot
    skip any minimal solution and guarantees termination.
    """

    if n == 0:
        return []
    unit_defects = [tuple(row[i] for row in rows) for i in range(n)]

    basis: list[tuple[int, ...]] = []
    # each frontier entry carries its defect vector, maintained
    # incrementally: growing by e_i adds that unit's defect
    frontier: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        frontier.append((tuple(e), unit_defects[i]))

    processed = 0
    seen: set[tuple[int, ...]] = {t for t, _ in frontier}
    while frontier:
        fresh: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        for t, d in frontier:
            processed += 1
            if processed > node_cap:
                raise ResourceLimit(
                    f"completion search exceeded {node_cap} nodes"
                )
            if not any(d):
                if not any(all(b <= v for b, v in zip(sol, t)) for sol in basis):
                    basis.append(t)
                continue
            for i in range(n):
                ud = unit_defects[i]
                if sum(a * b for a, b in zip(d, ud)) >= 0:
                    continue
                grown = list(t)
                grown[i] += 1
                g = tuple(grown)
                if g in seen:
                    continue
                if any(all(b <= v for b, v in zip(sol, g)) for sol in basis):
                    continue
                seen.add(g)
                fresh.append((g, tuple(a + b for a, b in zip(d, ud))))
        frontier = fresh
    # late solutions can retire earlier-found dominated candidates
    basis = [
        b
        for b in basis
        if not any(
            other is not b and all(o <= v for o, v in zip(other, b)) for other in basis
        )
    ]
    return sorted(basis)
