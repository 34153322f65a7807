"""Exact integer feasibility by variable elimination.

The classic elimination decision procedure for conjunctions of linear
constraints over the integers (the omega test): equalities are removed
by unimodular substitution, introducing a fresh quotient variable when
no coefficient is a unit, and inequalities by shadow projection, with a
finite splinter enumeration on the pairs where the integer shadow is
strictly smaller than the rational one.

This module is deliberately independent of the branch-and-bound search
in :mod:`sumstar.semilinear`: it shares no code with it beyond the row
shapes, so the two can referee each other in tests.  It is exact but
makes no performance promises; use it on small systems.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import ResourceLimit
from .semilinear import NatSystem

__all__ = ["int_feasible", "box_feasible"]

DEFAULT_FUEL = 1 << 22

# Rows are (coeffs, const) with coeffs a dict from variable id to a
# nonzero coefficient; an inequality row asserts coeffs . x + const >= 0
# and an equality row asserts coeffs . x + const = 0.


class _Fuel:
    """Step budget shared by one decision; elimination is worst-case
    exponential, so runaway inputs fail loudly instead of hanging."""

    def __init__(self, steps: int):
        self.left = steps

    def spend(self, amount: int = 1) -> None:
        self.left -= amount
        if self.left < 0:
            raise ResourceLimit("elimination step budget exhausted")


def _mhat(a: int, m: int) -> int:
    """Symmetric residue of ``a`` modulo ``m``, in ``(-m/2, m/2]``."""

    r = a % m
    return r - m if 2 * r > m else r


def _subst(rows: list, k: int, sub_c: dict[int, int], sub0: int) -> list:
    """Replace variable ``k`` by ``sub_c . x + sub0`` in every row."""

    out = []
    for c, d in rows:
        ck = c.get(k)
        if ck is None:
            out.append((c, d))
            continue
        nc = dict(c)
        del nc[k]
        for j, sj in sub_c.items():
            v = nc.get(j, 0) + ck * sj
            if v:
                nc[j] = v
            elif j in nc:
                del nc[j]
        out.append((nc, d + ck * sub0))
    return out


def _eliminate_equalities(
    eqs: list, ineqs: list, fresh: list[int], fuel: _Fuel
) -> Optional[list]:
    """Substitute every equality away; None when the equalities alone
    are contradictory.

    A coefficient of magnitude one solves directly.  Otherwise the row
    is rewritten through its symmetric residues, which always exposes a
    unit coefficient at the cost of one fresh quotient variable; the
    original row is kept and shrinks with each pass.
    """

    eqs = list(eqs)
    while eqs:
        fuel.spend()
        c, d = eqs.pop()
        c = {j: v for j, v in c.items() if v}
        if not c:
            if d != 0:
                return None
            continue
        g = 0
        for v in c.values():
            g = gcd(g, v)
        if d % g:
            return None
        if g > 1:
            c = {j: v // g for j, v in c.items()}
            d //= g
        k, ak = min(c.items(), key=lambda kv: (abs(kv[1]), kv[0]))
        if abs(ak) == 1:
            # ak*xk + rest + d = 0, so xk = -ak*(rest + d)
            sub_c = {j: -ak * v for j, v in c.items() if j != k}
            sub0 = -ak * d
            eqs = _subst(eqs, k, sub_c, sub0)
            ineqs = _subst(ineqs, k, sub_c, sub0)
            continue
        # Residues modulo m = |ak|+1 satisfy the same congruence, and
        # there the coefficient of xk is exactly -sign(ak).  Naming the
        # quotient sigma and solving that derived equality for xk:
        m = abs(ak) + 1
        sigma = fresh[0]
        fresh[0] += 1
        s = 1 if ak > 0 else -1
        sub_c = {j: s * _mhat(v, m) for j, v in c.items() if j != k}
        sub_c = {j: v for j, v in sub_c.items() if v}
        sub_c[sigma] = -s * m
        sub0 = s * _mhat(d, m)
        eqs.append((c, d))
        eqs = _subst(eqs, k, sub_c, sub0)
        ineqs = _subst(ineqs, k, sub_c, sub0)
    return ineqs


def _normalized(rows: list, fuel: _Fuel) -> Optional[list]:
    """Gcd-reduce, drop trivial rows, and keep only the tightest row per
    coefficient pattern; None on a numeric contradiction."""

    best: dict[tuple, int] = {}
    for c, d in rows:
        fuel.spend()
        c = {j: v for j, v in c.items() if v}
        if not c:
            if d < 0:
                return None
            continue
        g = 0
        for v in c.values():
            g = gcd(g, v)
        if g > 1:
            # c.x + d >= 0 tightens to (c/g).x + floor(d/g) >= 0
            c = {j: v // g for j, v in c.items()}
            d //= g
        key = tuple(sorted(c.items()))
        if key not in best or d < best[key]:
            best[key] = d
    return [(dict(key), d) for key, d in best.items()]


def _ineq_sat(rows: list, fresh: list[int], fuel: _Fuel) -> bool:
    while True:
        fuel.spend()
        norm = _normalized(rows, fuel)
        if norm is None:
            return False
        rows = norm
        present: set[int] = set()
        for c, _ in rows:
            present.update(c)
        if not present:
            return True

        def cost(k: int) -> tuple[int, int, int]:
            mags = [abs(c[k]) for c, _ in rows if k in c]
            los = sum(1 for c, _ in rows if c.get(k, 0) > 0)
            ups = len(mags) - los
            return (max(mags), los * ups, k)

        k = min(present, key=cost)
        lowers = [(c[k], c, d) for c, d in rows if c.get(k, 0) > 0]
        uppers = [(-c[k], c, d) for c, d in rows if c.get(k, 0) < 0]
        keep = [(c, d) for c, d in rows if k not in c]
        if not lowers or not uppers:
            # integers are unbounded, so a one-sided variable can always
            # be pushed far enough to satisfy every row naming it
            rows = keep
            continue

        # A lower row says a*xk >= -(rest_l + dl), an upper row says
        # b*xk <= rest_u + du.  Their integer shadow is the combined row
        # minus the (a-1)(b-1) gap; with a unit coefficient the gap is
        # zero and the projection is exact.
        exact = all(a == 1 for a, _, _ in lowers) or all(
            b == 1 for b, _, _ in uppers
        )
        shadow = list(keep)
        for a, cl, dl in lowers:
            for b, cu, du in uppers:
                fuel.spend()
                nc: dict[int, int] = {}
                for j, v in cu.items():
                    if j != k:
                        nc[j] = a * v
                for j, v in cl.items():
                    if j != k:
                        nc[j] = nc.get(j, 0) + b * v
                shadow.append((nc, a * du + b * dl - (a - 1) * (b - 1)))
        if exact:
            rows = shadow
            continue
        if _ineq_sat(shadow, fresh, fuel):
            return True
        # Any solution outside the shadow pins a*xk within a computable
        # distance of some lower bound; try each such offset exactly.
        bhat = max(b for b, _, _ in uppers)
        for a, cl, dl in lowers:
            top = (a * bhat - a - bhat) // bhat
            for i in range(top + 1):
                fuel.spend()
                sub = _eliminate_equalities(
                    [(dict(cl), dl - i)], [(dict(c), d) for c, d in rows], fresh, fuel
                )
                if sub is not None and _ineq_sat(sub, fresh, fuel):
                    return True
        return False


def int_feasible(
    eqs: Iterable[tuple[Sequence[int], int]],
    les: Iterable[tuple[Sequence[int], int]],
    n: int,
    fuel: int = DEFAULT_FUEL,
) -> bool:
    """Whether ``coeffs . x = rhs`` and ``coeffs . x <= rhs`` rows have a
    common solution over the whole of ``Z^n``.

    Bounds such as non-negativity must be passed as explicit rows;
    :func:`box_feasible` does that for natural-number boxes.  Raises
    :class:`ResourceLimit` when the step budget runs out.
    """

    meter = _Fuel(fuel)
    fresh = [n]
    eq_rows = [
        ({j: v for j, v in enumerate(coeffs) if v}, -rhs) for coeffs, rhs in eqs
    ]
    le_rows = [
        ({j: -v for j, v in enumerate(coeffs) if v}, rhs) for coeffs, rhs in les
    ]
    ineqs = _eliminate_equalities(eq_rows, le_rows, fresh, meter)
    if ineqs is None:
        return False
    return _ineq_sat(ineqs, fresh, meter)


def box_feasible(sys: NatSystem, high: int, fuel: int = DEFAULT_FUEL) -> bool:
    """Whether the system has a natural solution with every coordinate
    at most ``high``.

    Decides the same question as enumerating ``[0..high]^n`` point by
    point, but symbolically, so the box may be astronomically large.
    """

    if high < 0:
        return False
    les = list(sys.le)
    for i in range(sys.n):
        unit = [0] * sys.n
        unit[i] = 1
        les.append((tuple(unit), high))
        les.append((tuple(-v for v in unit), 0))
    return int_feasible(sys.eq, les, sys.n, fuel)
