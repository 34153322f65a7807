"""Decision procedure for arithmetic with star-membership atoms.

A star atom ``u in {values : body}^x`` holds when ``u`` is the sum of
exactly ``x`` vectors (addends), each satisfying the body.  The solver
eliminates such atoms through the semilinear structure of the body's
solution set: every addend is a base vector of some disjunct of the
body plus a natural combination of that disjunct's periods, so the sum
decomposes as

    u  =  sum over chosen bases i of (mu_i * base_i)
          + sum over their periods j of (lam_ij * period_ij)
    x  =  sum over chosen bases i of mu_i

with every chosen base used at least once (``mu_i >= 1``).  Choosing
the set of bases (the support) turns the atom into plain linear rows
over naturals; the solver enumerates supports, smallest total first,
and conjoins the rows of all atoms with the rows of one disjunct of the
surrounding arithmetic into one system handed to ``ilp_feasible``.

Bases are pooled across all disjuncts of a body, each keeping its own
disjunct's periods; addends from different disjuncts may mix freely
(a sum of 5 over addends from ``{2}`` and ``{3}`` needs one of each).

Period multiples attach to all supported bases.  A satisfying
assignment may leave any of them zero; which bases actually carry
period load is read off the solution afterwards rather than enumerated
up front.

Verdicts: a SAT answer carries a checked assignment and an explicit
addend decomposition per atom.  UNSAT is reported only after every
support choice and every disjunct combination has been exhausted with
no search cap hit anywhere; otherwise :class:`ResourceLimit` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

from .ast import FragmentProblem, Model, ValidatedProblem
from .errors import ResourceLimit, SizeLimitExceeded, SumstarError
from .pipeline import LiaCardProblem, StarAtom, Stages, normalize_stages
from .semantics import Cube, check_model, set_values, to_dnf, validate_fragment
from .semilinear import (
    DEFAULT_NODE_CAP,
    NatSystem,
    atoms_to_system,
    cube_generators,
    ilp_feasible,
)

DEFAULT_DNF_CAP = 256
DEFAULT_SUPPORT_CAP = 8
DEFAULT_ATTEMPT_CAP = 20_000


# ---------------------------------------------------------------------------
# Encodings


@dataclass(frozen=True)
class PooledBase:
    """One base vector of one disjunct of a star atom's body, carrying
    that disjunct's shared periods."""

    cube_index: int
    base_index: int
    base: tuple[int, ...]
    periods: tuple[tuple[int, ...], ...]


def mu_name(atom_index: int, cube_index: int, base_index: int) -> str:
    """Column name of a supported base's multiplicity."""

    return f"#mu_a{atom_index}_c{cube_index}_b{base_index}"


def lam_name(atom_index: int, cube_index: int, base_index: int, period: int) -> str:
    """Column name of a supported base's coefficient on one period."""

    return f"#lam_a{atom_index}_c{cube_index}_b{base_index}_p{period}"


@dataclass(frozen=True)
class StarEncoding:
    """Column plan for one star atom under one chosen support.

    Each supported base contributes a multiplicity column (how many
    addends use it, shifted so the column stores multiplicity minus
    one) and one column per period of its disjunct (how many copies of
    that period are spread over those addends).
    """

    atom_index: int
    support: tuple[PooledBase, ...]

    def mu_name(self, pb: PooledBase) -> str:
        return mu_name(self.atom_index, pb.cube_index, pb.base_index)

    def lam_name(self, pb: PooledBase, j: int) -> str:
        return lam_name(self.atom_index, pb.cube_index, pb.base_index, j)

    def column_names(self) -> list[str]:
        cols: list[str] = []
        for pb in self.support:
            cols.append(self.mu_name(pb))
            cols.extend(self.lam_name(pb, j) for j in range(len(pb.periods)))
        return cols


@dataclass(frozen=True)
class CombinedSystem:
    """One natural-number system covering all star atoms (under fixed
    supports) plus one disjunct of the surrounding arithmetic, with a
    name for every column."""

    system: NatSystem
    columns: tuple[str, ...]
    encodings: tuple[StarEncoding, ...]


def star_atom_encode(
    atom: StarAtom, enc: StarEncoding, width: int, col_of: dict[str, int]
) -> list[tuple[tuple[int, ...], int]]:
    """Equality rows of one atom under one support, over the combined
    column layout ``col_of`` (total ``width`` columns)."""

    dim = len(atom.u)
    for pb in enc.support:
        if len(pb.base) != dim or any(len(p) != dim for p in pb.periods):
            raise ValueError(
                f"generator arity does not match the atom's {dim} components"
            )
    rows: list[tuple[tuple[int, ...], int]] = []
    for i in range(dim):
        row = [0] * width
        row[col_of[atom.u[i]]] = 1
        for pb in enc.support:
            row[col_of[enc.mu_name(pb)]] -= pb.base[i]
            for j, period in enumerate(pb.periods):
                row[col_of[enc.lam_name(pb, j)]] -= period[i]
        rows.append((tuple(row), sum(pb.base[i] for pb in enc.support)))
    row = [0] * width
    row[col_of[atom.exponent]] = 1
    for pb in enc.support:
        row[col_of[enc.mu_name(pb)]] -= 1
    rows.append((tuple(row), len(enc.support)))
    return rows


def build_combined_system(
    atoms: Sequence[StarAtom],
    encodings: Sequence[StarEncoding],
    f0_cube: Cube,
    ints: Sequence[str],
) -> CombinedSystem:
    """Conjoin the star rows of every encoding with one arithmetic
    disjunct into a single system.

    Columns: the encodings' multiplicity and period columns in order,
    then the integer variables, then the fresh columns introduced for
    congruence atoms of the disjunct.
    """

    star_cols: list[str] = []
    for enc in encodings:
        star_cols.extend(enc.column_names())
    n_star = len(star_cols)

    f0_sys = atoms_to_system(f0_cube, ints)
    n_mod = f0_sys.n - len(ints)
    columns = tuple(star_cols) + tuple(ints) + tuple(
        f"#mod_{j}" for j in range(n_mod)
    )
    width = n_star + f0_sys.n
    col_of = {name: i for i, name in enumerate(columns)}
    if len(col_of) != width:
        raise ValueError("column names collide across encodings and integers")

    eq: list[tuple[tuple[int, ...], int]] = []
    le: list[tuple[tuple[int, ...], int]] = []
    for enc in encodings:
        eq.extend(star_atom_encode(atoms[enc.atom_index], enc, width, col_of))
    pad = (0,) * n_star
    for coeffs, rhs in f0_sys.eq:
        eq.append((pad + coeffs, rhs))
    for coeffs, rhs in f0_sys.le:
        le.append((pad + coeffs, rhs))

    return CombinedSystem(
        system=NatSystem(width, tuple(eq), tuple(le)),
        columns=columns,
        encodings=tuple(encodings),
    )


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class LoadedBase:
    """One supported base in a satisfying decomposition: how many
    addends it contributes and the period load spread over them."""

    cube_index: int
    base_index: int
    base: tuple[int, ...]
    multiplicity: int
    loads: tuple[tuple[int, tuple[int, ...], int], ...]


@dataclass(frozen=True)
class Decomposition:
    """Explicit addend decomposition for one star atom."""

    atom_index: int
    picks: tuple[LoadedBase, ...]

    def addends(self) -> list[tuple[int, ...]]:
        """Concrete addend vectors: per pick, one copy of the base
        carrying the whole period load, then bare copies of the base."""

        out: list[tuple[int, ...]] = []
        for pick in self.picks:
            loaded = list(pick.base)
            for _, period, coeff in pick.loads:
                for i, c in enumerate(period):
                    loaded[i] += coeff * c
            out.append(tuple(loaded))
            out.extend([pick.base] * (pick.multiplicity - 1))
        return out


@dataclass(frozen=True)
class SatResult:
    """Satisfying outcome: values for every integer and every
    multiplicity/period column (multiplicities unshifted), plus the
    addend decomposition of every star atom."""

    assignment: dict[str, int]
    witnesses: tuple[Decomposition, ...]
    encodings: tuple[StarEncoding, ...]
    f0_cube_index: int


# ---------------------------------------------------------------------------
# Search


def _compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Splits of ``total`` into per-position sizes within caps, in
    lexicographic order."""

    if not caps:
        if total == 0:
            yield ()
        return
    for head in range(min(caps[0], total) + 1):
        for rest in _compositions(total - head, caps[1:]):
            yield (head,) + rest


def _pool(atom: StarAtom, max_dnf: int, node_cap: int) -> list[PooledBase]:
    cubes = to_dnf(atom.body, max_dnf)
    pool: list[PooledBase] = []
    for ci, cube in enumerate(cubes):
        bases, periods = cube_generators(cube, atom.body_vars, node_cap)
        shared = tuple(periods)
        for bi, base in enumerate(bases):
            pool.append(PooledBase(ci, bi, base, shared))
    return pool


def _package(
    p: LiaCardProblem,
    cs: CombinedSystem,
    solution: Sequence[int],
    f0_cube_index: int,
) -> SatResult:
    values = dict(zip(cs.columns, solution))
    assignment = {name: values[name] for name in p.ints}
    witnesses: list[Decomposition] = []
    for enc in cs.encodings:
        picks: list[LoadedBase] = []
        for pb in enc.support:
            mu = values[enc.mu_name(pb)] + 1
            assignment[enc.mu_name(pb)] = mu
            loads: list[tuple[int, tuple[int, ...], int]] = []
            for j, period in enumerate(pb.periods):
                lam = values[enc.lam_name(pb, j)]
                assignment[enc.lam_name(pb, j)] = lam
                if lam:
                    loads.append((j, period, lam))
            picks.append(
                LoadedBase(pb.cube_index, pb.base_index, pb.base, mu, tuple(loads))
            )
        witnesses.append(Decomposition(enc.atom_index, tuple(picks)))

    for w in witnesses:
        atom = p.star_atoms[w.atom_index]
        addends = w.addends()
        assert len(addends) == assignment[atom.exponent]
        for i, name in enumerate(atom.u):
            assert sum(a[i] for a in addends) == assignment[name]
    return SatResult(
        assignment=assignment,
        witnesses=tuple(witnesses),
        encodings=cs.encodings,
        f0_cube_index=f0_cube_index,
    )


def solve_lia_card(
    p: LiaCardProblem,
    max_dnf: int = DEFAULT_DNF_CAP,
    max_support: int = DEFAULT_SUPPORT_CAP,
    node_cap: int = DEFAULT_NODE_CAP,
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
) -> Optional[SatResult]:
    """Satisfying assignment with addend decompositions, or None.

    Iterates disjuncts of the arithmetic part crossed with support
    choices for every star atom, smallest total support first, and
    solves one combined system per choice.  None (unsatisfiable) is
    returned only when the whole space was exhausted within every cap;
    any truncation raises :class:`ResourceLimit` instead.
    """

    known = set(p.ints)
    for a in p.star_atoms:
        missing = [v for v in (*a.u, a.exponent) if v not in known]
        if missing:
            raise ValueError(f"star atom references undeclared integers {missing}")

    try:
        f0_cubes = to_dnf(p.f0, max_dnf)
        pools = [_pool(a, max_dnf, node_cap) for a in p.star_atoms]
    except SizeLimitExceeded as e:
        raise ResourceLimit(str(e)) from e

    caps = [min(len(pool), max_support) for pool in pools]
    truncated = any(len(pool) > max_support for pool in pools)
    saw_limit = False
    attempts = 0

    for total in range(sum(caps) + 1):
        for sizes in _compositions(total, caps):
            choice_lists = [
                list(combinations(range(len(pool)), k))
                for pool, k in zip(pools, sizes)
            ]
            for picks in product(*choice_lists):
                encodings = tuple(
                    StarEncoding(ai, tuple(pools[ai][i] for i in idxs))
                    for ai, idxs in enumerate(picks)
                )
                for f0i, cube in enumerate(f0_cubes):
                    attempts += 1
                    if attempts > max_attempts:
                        raise ResourceLimit(
                            f"star search exceeded {max_attempts} support/disjunct attempts"
                        )
                    cs = build_combined_system(p.star_atoms, encodings, cube, p.ints)
                    try:
                        solution = ilp_feasible(cs.system, node_cap=node_cap)
                    except ResourceLimit:
                        saw_limit = True
                        continue
                    if solution is not None:
                        return _package(p, cs, solution, f0i)

    if saw_limit or truncated:
        raise ResourceLimit(
            "support search exhausted its caps without finding a model; "
            "the problem may still be satisfiable"
        )
    return None


# ---------------------------------------------------------------------------
# End-to-end solving


@dataclass(frozen=True)
class ProblemResult:
    """Outcome of solving a full problem: verdict, a checked
    finite-support model when satisfiable, and all intermediates."""

    status: str
    model: Optional[Model]
    stages: Stages
    result: Optional[SatResult]


def rebuild_model(
    vp: ValidatedProblem, stages: Stages, res: SatResult
) -> Model:
    """Finite-support model of the original problem from a star-level
    satisfying result: each atom's addends become the array prefixes,
    everything past them is the zero tail."""

    lia = stages.liacard
    arrays: dict[str, tuple[int, ...]] = {a: () for a in vp.problem.arrays}
    for w in res.witnesses:
        atom = lia.star_atoms[w.atom_index]
        addends = w.addends()
        for pos, name in enumerate(atom.body_vars):
            if name in arrays:
                arrays[name] = tuple(a[pos] for a in addends)
    ints = {name: res.assignment[name] for name in vp.problem.ints}
    partial = Model(arrays=arrays, ints=ints)
    sets = {
        name: (tuple(sorted(fc.members)), fc.tail)
        for name, fc in set_values(vp, partial).items()
    }
    return Model(arrays=arrays, ints=ints, sets=sets)


def solve_problem(
    problem: FragmentProblem | ValidatedProblem,
    max_dnf: int = DEFAULT_DNF_CAP,
    max_support: int = DEFAULT_SUPPORT_CAP,
    node_cap: int = DEFAULT_NODE_CAP,
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
) -> ProblemResult:
    """Validate, normalize, solve, and (when satisfiable) rebuild a
    model that the independent checker accepts."""

    vp = (
        problem
        if isinstance(problem, ValidatedProblem)
        else validate_fragment(problem)
    )
    stages = normalize_stages(vp)
    res = solve_lia_card(
        stages.liacard,
        max_dnf=max_dnf,
        max_support=max_support,
        node_cap=node_cap,
        max_attempts=max_attempts,
    )
    if res is None:
        return ProblemResult("unsat", None, stages, None)
    model = rebuild_model(vp, stages, res)
    report = check_model(vp, model)
    if not report.ok:
        raise SumstarError(
            "solver produced a model the checker rejects: "
            + "; ".join(report.messages)
        )
    return ProblemResult("sat", model, stages, res)
