"""Exact engine for linear constraints over the naturals.

Everything here is bignum-exact: systems of equalities and inequalities
over natural-number variables, Hilbert bases of the homogeneous parts,
minimal inhomogeneous solutions, semilinear normal forms of
quantifier-free formulas, and ILP feasibility with a sound search-box
truncation.

The generator computations use the completion procedure of Contejean
and Dévie: grow candidate vectors from the unit vectors, extending a
frontier vector by a unit only when that strictly improves the residual
(negative inner product of defect vectors), and pruning anything that
dominates an already-found solution.  One engine serves both entry
points; inhomogeneous systems are homogenized with a counter column
whose value 1 marks base vectors and 0 marks periods.

Inequality rows are turned into equality rows with slack columns only
where an algorithm needs it.  Note that projecting generators from
slack space back onto the original columns can produce comparable
vectors; the pairwise-incomparability guarantee therefore applies to
systems without inequality rows, while completeness (every solution is
a base plus a natural combination of periods) holds for all systems.

No floats, no LP relaxations.  Search caps raise :class:`ResourceLimit`
so exhaustion is never mistaken for infeasibility.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from ._kernels import completion as _completion, propagate_kernel
from .ast import EQ, GE, GT, LE, LT, MOD, NEQ, QfpaAtom, QfpaFormula, formula_variables
from .errors import ResourceLimit
from .semantics import Cube, to_dnf

DEFAULT_NODE_CAP = 400_000


# ---------------------------------------------------------------------------
# Systems


@dataclass(frozen=True)
class NatSystem:
    """Linear system over natural-number variables.

    ``eq`` rows mean ``coeffs . x = rhs`` and ``le`` rows mean
    ``coeffs . x <= rhs``.  All entries are arbitrary-precision ints and
    every row must have exactly ``n`` coefficients.
    """

    n: int
    eq: tuple[tuple[tuple[int, ...], int], ...] = ()
    le: tuple[tuple[tuple[int, ...], int], ...] = ()

    def __post_init__(self) -> None:
        for coeffs, _ in self.eq + self.le:
            if len(coeffs) != self.n:
                raise ValueError(f"row width {len(coeffs)} does not match arity {self.n}")

    def check(self, x: Sequence[int]) -> bool:
        if len(x) != self.n or any(v < 0 for v in x):
            return False
        for coeffs, rhs in self.eq:
            if sum(c * v for c, v in zip(coeffs, x)) != rhs:
                return False
        for coeffs, rhs in self.le:
            if sum(c * v for c, v in zip(coeffs, x)) > rhs:
                return False
        return True

    def max_abs(self) -> int:
        worst = 1
        for coeffs, rhs in self.eq + self.le:
            for c in coeffs:
                worst = max(worst, abs(c))
            worst = max(worst, abs(rhs))
        return worst

    def small_model_bound(self) -> int:
        """Sound truncation bound: a feasible system has a solution with
        every coordinate at most this value.

        Classic magnitude bound for least solutions of integer linear
        systems, computed on the slack-converted (all-equality) form:
        ``n * (m * a) ** (2 * m + 1)`` with ``n`` columns, ``m`` rows and
        ``a`` the largest absolute entry.
        """

        m = len(self.eq) + len(self.le)
        if m == 0:
            return 0
        cols = self.n + len(self.le)
        a = self.max_abs()
        return cols * (m * a) ** (2 * m + 1)


def atoms_to_system(cube: Cube, var_order: Sequence[str]) -> NatSystem:
    """Translate a negation-free cube into a system over naturals.

    Columns are ``var_order`` followed by two fresh columns per
    congruence atom (in cube order); projecting solutions onto the
    leading ``len(var_order)`` columns yields exactly the cube's
    solution set.  Strict comparisons shift by one, and a congruence
    ``lhs = rhs (mod k)`` becomes the equality row
    ``lhs - rhs + k*q' - k*q = 0`` with fresh natural columns q', q.
    """

    index = {v: i for i, v in enumerate(var_order)}
    n_orig = len(var_order)
    n_mod = sum(1 for a in cube if a.kind == MOD)
    n = n_orig + 2 * n_mod
    eq: list[tuple[tuple[int, ...], int]] = []
    le: list[tuple[tuple[int, ...], int]] = []
    next_mod = n_orig

    for a in cube:
        if a.kind == NEQ:
            raise ValueError("disequalities must be split before system conversion")
        diff_const = a.lhs.const - a.rhs.const
        row = [0] * n
        for v, c in a.lhs.coeffs:
            row[index[v]] += c
        for v, c in a.rhs.coeffs:
            row[index[v]] -= c
        if a.kind == EQ:
            eq.append((tuple(row), -diff_const))
        elif a.kind == LE:
            le.append((tuple(row), -diff_const))
        elif a.kind == LT:
            le.append((tuple(row), -diff_const - 1))
        elif a.kind == GE:
            le.append((tuple(-c for c in row), diff_const))
        elif a.kind == GT:
            le.append((tuple(-c for c in row), diff_const - 1))
        else:  # MOD
            k = a.modulus
            assert k is not None
            row[next_mod] = k
            row[next_mod + 1] = -k
            next_mod += 2
            eq.append((tuple(row), -diff_const))
    return NatSystem(n, tuple(eq), tuple(le))


# ---------------------------------------------------------------------------
# Completion search (Hilbert bases, minimal solutions)


def _slack_equalities(sys: NatSystem) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All rows as equalities over ``sys.n + len(sys.le)`` columns."""

    n_slack = len(sys.le)
    rows: list[tuple[tuple[int, ...], int]] = []
    for coeffs, rhs in sys.eq:
        rows.append((coeffs + (0,) * n_slack, rhs))
    for k, (coeffs, rhs) in enumerate(sys.le):
        slack = [0] * n_slack
        slack[k] = 1
        rows.append((coeffs + tuple(slack), rhs))
    return tuple(rows)


def hilbert_basis(sys: NatSystem, node_cap: int = DEFAULT_NODE_CAP) -> list[tuple[int, ...]]:
    """Minimal nonzero natural solutions of a homogeneous system.

    Complete: every homogeneous solution is a natural combination of the
    returned vectors.  For systems without inequality rows the result is
    additionally an antichain (no vector dominates another); inequality
    rows are slack-converted and projected, which can leave comparable
    vectors that are still required for completeness.
    """

    if any(rhs != 0 for _, rhs in sys.eq + sys.le):
        raise ValueError("hilbert_basis requires a homogeneous system")
    rows = [coeffs for coeffs, _ in _slack_equalities(sys)]
    full = _completion(rows, sys.n + len(sys.le), node_cap)
    out: list[tuple[int, ...]] = []
    for v in full:
        head = v[: sys.n]
        if any(head) and head not in out:
            out.append(head)
    return sorted(out)


def _generators(
    sys: NatSystem, node_cap: int = DEFAULT_NODE_CAP
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """(bases, periods) of the solution set, over the system's columns.

    Homogenize with a trailing counter column carrying ``-rhs``; in the
    resulting Hilbert basis the counter value 1 marks bases and 0 marks
    periods.  Solutions are exactly every base plus natural combinations
    of periods.
    """

    slack_rows = _slack_equalities(sys)
    n_ext = sys.n + len(sys.le)
    rows = [coeffs + (-rhs,) for coeffs, rhs in slack_rows]
    full = _completion(rows, n_ext + 1, node_cap)
    bases: list[tuple[int, ...]] = []
    periods: list[tuple[int, ...]] = []
    for v in full:
        head, counter = v[: sys.n], v[-1]
        if counter == 1 and head not in bases:
            bases.append(head)
        elif counter == 0 and any(head) and head not in periods:
            periods.append(head)
    return sorted(bases), sorted(periods)


def minimal_solutions(sys: NatSystem, node_cap: int = DEFAULT_NODE_CAP) -> list[tuple[int, ...]]:
    """Minimal solutions: every solution is one of these plus a natural
    combination of ``hilbert_basis`` vectors of the homogeneous part."""

    bases, _ = _generators(sys, node_cap)
    return bases


# ---------------------------------------------------------------------------
# Semilinear sets


@dataclass(frozen=True)
class HybridLinearSet:
    """All vectors ``a + sum_j alpha_j * p_j`` with a in bases, alpha in ℕ.

    One period list shared by every base of the component.
    """

    dim: int
    bases: tuple[tuple[int, ...], ...]
    periods: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for v in self.bases + self.periods:
            if len(v) != self.dim:
                raise ValueError("generator arity mismatch")


@dataclass(frozen=True)
class SemilinearSet:
    """Finite union of hybrid linear components over a common arity."""

    dim: int
    components: tuple[HybridLinearSet, ...]

    def __post_init__(self) -> None:
        if any(c.dim != self.dim for c in self.components):
            raise ValueError("component arity mismatch")


def semilinear_nf(
    f: QfpaFormula,
    var_order: Optional[Sequence[str]] = None,
    max_dnf: int = 256,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SemilinearSet:
    """Solution set of ``f`` over naturals, as generators.

    One component per satisfiable DNF cube: bases are the cube's minimal
    solutions and periods the Hilbert basis of its homogeneous part,
    both projected back onto the formula variables (dropping congruence
    slack columns).  Infeasible cubes and duplicate components are
    dropped.
    """

    names = tuple(var_order) if var_order is not None else tuple(sorted(formula_variables(f)))
    dim = len(names)
    parts: list[HybridLinearSet] = []
    for cube in to_dnf(f, max_cubes=max_dnf):
        sys = atoms_to_system(cube, names)
        raw_bases, raw_periods = _generators(sys, node_cap)
        bases = sorted({v[:dim] for v in raw_bases})
        if not bases:
            continue
        periods = sorted({v[:dim] for v in raw_periods if any(v[:dim])})
        part = HybridLinearSet(dim, tuple(bases), tuple(periods))
        if part not in parts:
            parts.append(part)
    return SemilinearSet(dim, tuple(parts))


def cube_generators(
    cube: Cube,
    var_order: Sequence[str],
    node_cap: int = DEFAULT_NODE_CAP,
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """(bases, periods) of one cube's solution set, projected onto
    ``var_order``.  Bases empty means the cube is infeasible."""

    dim = len(var_order)
    sys = atoms_to_system(cube, var_order)
    try:
        if ilp_feasible(sys, node_cap=node_cap) is None:
            # no solutions at all, so skip the expensive completion
            return [], []
    except ResourceLimit:
        pass
    raw_bases, raw_periods = _generators(sys, node_cap)
    bases = sorted({v[:dim] for v in raw_bases})
    periods = sorted({v[:dim] for v in raw_periods if any(v[:dim])})
    return bases, periods


def member(s: SemilinearSet, x: Sequence[int], node_cap: int = DEFAULT_NODE_CAP) -> bool:
    """Exact membership, by feasibility of the combination coefficients."""

    if len(x) != s.dim:
        raise ValueError(f"point arity {len(x)} does not match set arity {s.dim}")
    if any(v < 0 for v in x):
        return False
    for part in s.components:
        for base in part.bases:
            rest = [v - b for v, b in zip(x, base)]
            if any(r < 0 for r in rest):
                continue
            if not any(rest):
                return True
            if not part.periods:
                continue
            rows = tuple(
                (tuple(p[d] for p in part.periods), rest[d]) for d in range(s.dim)
            )
            sys = NatSystem(len(part.periods), rows, ())
            if ilp_feasible(sys, node_cap=node_cap) is not None:
                return True
    return False


# ---------------------------------------------------------------------------
# ILP feasibility


def _row_gcd_reduce(sys: NatSystem) -> Optional[NatSystem]:
    """Divide rows by their coefficient gcd; None when that shows
    an equality row unsatisfiable."""

    eq: list[tuple[tuple[int, ...], int]] = []
    le: list[tuple[tuple[int, ...], int]] = []
    for coeffs, rhs in sys.eq:
        g = 0
        for c in coeffs:
            g = gcd(g, abs(c))
        if g == 0:
            if rhs != 0:
                return None
            continue
        if rhs % g:
            return None
        eq.append((tuple(c // g for c in coeffs), rhs // g))
    for coeffs, rhs in sys.le:
        g = 0
        for c in coeffs:
            g = gcd(g, abs(c))
        if g == 0:
            if rhs < 0:
                return None
            continue
        # floor division is sound: the reduced lhs is an integer
        le.append((tuple(c // g for c in coeffs), rhs // g if rhs >= 0 else -((-rhs + g - 1) // g)))
    return NatSystem(sys.n, tuple(eq), tuple(le))


_FM_MAX_VARS = 8
_FM_MAX_ROWS = 400


def _fm_infeasible(sys: NatSystem, highs: Sequence[int]) -> bool:
    """True when the system has no rational solution in the box.

    Fourier-Motzkin elimination over exact rationals, bounds included.
    Gives up (returns False) when intermediate row counts blow past a
    cap, so a True verdict is always trustworthy.
    """

    rows: list[tuple[tuple[Fraction, ...], Fraction]] = []

    def add(coeffs: Iterable[int | Fraction], rhs: int | Fraction) -> None:
        rows.append((tuple(Fraction(c) for c in coeffs), Fraction(rhs)))

    for coeffs, rhs in sys.eq:
        add(coeffs, rhs)
        add((-c for c in coeffs), -rhs)
    for coeffs, rhs in sys.le:
        add(coeffs, rhs)
    for i, hi in enumerate(highs):
        unit = [0] * sys.n
        unit[i] = 1
        add(unit, hi)
        add((-c for c in unit), 0)

    for i in range(sys.n):
        pos = [r for r in rows if r[0][i] > 0]
        neg = [r for r in rows if r[0][i] < 0]
        rest = [r for r in rows if r[0][i] == 0]
        if len(rest) + len(pos) * len(neg) > _FM_MAX_ROWS:
            return False
        rows = rest
        for pc, pr in pos:
            for nc, nr in neg:
                scale_p = -nc[i]
                scale_n = pc[i]
                coeffs = tuple(scale_p * a + scale_n * b for a, b in zip(pc, nc))
                rows.append((coeffs, scale_p * pr + scale_n * nr))
        for coeffs, rhs in rows:
            if not any(coeffs) and rhs < 0:
                return True
    return any(not any(coeffs) and rhs < 0 for coeffs, rhs in rows)


def _flat_rows(sys: NatSystem) -> list[int]:
    """Rows in the propagation kernel's flat layout: equality flag,
    right hand side, then the coefficients, per row."""

    flat: list[int] = []
    for coeffs, rhs in sys.eq:
        flat.append(1)
        flat.append(rhs)
        flat.extend(coeffs)
    for coeffs, rhs in sys.le:
        flat.append(0)
        flat.append(rhs)
        flat.extend(coeffs)
    return flat


def _propagation_ceiling(sys: NatSystem, highs: Sequence[int]) -> int:
    """Largest magnitude interval propagation can meet on this system
    within the box, used to pick a safe kernel backend."""

    worst = max(highs, default=0)
    for coeffs, rhs in sys.eq + sys.le:
        row = sum(abs(c) * h for c, h in zip(coeffs, highs)) + abs(rhs)
        worst = max(worst, row)
    return worst


def ilp_feasible(
    sys: NatSystem,
    box: Optional[Sequence[int]] = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Optional[tuple[int, ...]]:
    """A natural solution within the search box, or None when there is
    none.

    The default box is ``[0..M]`` per variable with M the sound
    small-solution bound, so None means infeasible over all of ℕ.
    Presolve: row gcd reduction, a rational elimination check on small
    systems, and interval propagation; then depth-first search branching
    on the variable with the smallest domain, values ascending.  Search
    effort beyond ``node_cap`` raises :class:`ResourceLimit`.
    """

    reduced = _row_gcd_reduce(sys)
    if reduced is None:
        return None
    sys = reduced
    if sys.n == 0:
        return () if sys.check(()) else None

    if box is not None:
        if len(box) != sys.n:
            raise ValueError("box arity mismatch")
        highs = [int(b) for b in box]
    else:
        bound = sys.small_model_bound()
        highs = [bound] * sys.n
    lows = [0] * sys.n
    if any(h < 0 for h in highs):
        return None

    if sys.n <= _FM_MAX_VARS and _fm_infeasible(sys, highs):
        return None

    prop, wants_arrays = propagate_kernel(_propagation_ceiling(sys, highs))
    rows_flat: Sequence[int] = _flat_rows(sys)
    if wants_arrays:
        rows_flat = array("q", rows_flat)
        lows = array("q", lows)
        highs = array("q", highs)
    if not prop(rows_flat, sys.n, lows, highs, 4 * sys.n + 8):
        return None

    nodes = 0

    def dfs(lows: Sequence[int], highs: Sequence[int]) -> Optional[list[int]]:
        nonlocal nodes
        open_vars = [i for i in range(sys.n) if lows[i] < highs[i]]
        if not open_vars:
            point = list(lows)
            return point if sys.check(point) else None
        i = min(open_vars, key=lambda k: highs[k] - lows[k])
        for v in range(lows[i], highs[i] + 1):
            nodes += 1
            if nodes > node_cap:
                raise ResourceLimit(f"feasibility search exceeded {node_cap} nodes")
            nl, nh = lows[:], highs[:]
            nl[i] = nh[i] = v
            if not prop(rows_flat, sys.n, nl, nh, 2 * sys.n + 4):
                continue
            found = dfs(nl, nh)
            if found is not None:
                return found
        return None

    got = dfs(lows, highs)
    return tuple(got) if got is not None else None


def qfpa_sat(
    f: QfpaFormula,
    var_order: Optional[Sequence[str]] = None,
    max_dnf: int = 256,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Optional[dict[str, int]]:
    """First satisfying natural assignment of a quantifier-free formula,
    or None.  Cubes are tried in DNF order, so the result is
    deterministic."""

    names = tuple(var_order) if var_order is not None else tuple(sorted(formula_variables(f)))
    for cube in to_dnf(f, max_cubes=max_dnf):
        sys = atoms_to_system(cube, names)
        got = ilp_feasible(sys, node_cap=node_cap)
        if got is not None:
            return dict(zip(names, got[: len(names)]))
    return None
