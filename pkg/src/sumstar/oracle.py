"""Bounded reference semantics, random instances, and differential testing.

The oracle enumerates finite-support models directly: array prefixes of a
fixed length with a zero tail, and integer values up to a bound.  It is
deliberately independent of the solver; the two meet only in the
differential harness, which flags any disagreement.

Verdicts are bound-relative.  ``unsat_at_bound`` never claims global
unsatisfiability; it only reports that no model exists within the given
prefix length and value bounds.

Candidate models are ordered index-major: first by the tuple of array
values at position 0, then position 1, and so on, then by the remaining
integer values in declared order.  The first satisfying model in that
order is returned, which keeps golden tests stable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Optional

from .ast import (
    EQ,
    GE,
    GT,
    LE,
    LT,
    MOD,
    And,
    Arith,
    BapaAnd,
    BapaFormula,
    BapaNot,
    BapaOr,
    CardEq,
    CardLe,
    EmptySet,
    FragmentProblem,
    FullSet,
    Model,
    Not,
    Or,
    QfpaFormula,
    SetCompl,
    SetEq,
    SetInter,
    SetInterpretation,
    SetTerm,
    SetUnion,
    SetVar,
    Subset,
    SumSpec,
    ValidatedProblem,
    atom,
    conj,
    const_term,
    disj,
    linterm,
)
from .errors import ResourceLimit, SumstarError
from .pipeline import GuardedSum, SumForm
from .semantics import FcSet, check_model, eval_qfpa, validate_fragment

DEFAULT_ORACLE_WORK = 2_000_000


# ---------------------------------------------------------------------------
# Bounds


@dataclass(frozen=True)
class OracleBounds:
    """Search space of the brute-force enumeration.

    Arrays range over prefixes in ``[0..max_val]^max_len`` with a zero
    tail; declared integers range over ``[0..int_bound]``, which defaults
    to ``max_len * max_val``, the largest value a single guarded sum can
    reach.
    """

    max_len: int = 3
    max_val: int = 4
    int_bound: Optional[int] = None

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("prefix length bound must be at least 1")
        if self.max_val < 0:
            raise ValueError("value bound must be non-negative")
        if self.int_bound is not None and self.int_bound < 0:
            raise ValueError("integer bound must be non-negative")

    @property
    def ints_max(self) -> int:
        if self.int_bound is not None:
            return self.int_bound
        return self.max_len * self.max_val


@dataclass(frozen=True)
class OracleVerdict:
    """``sat`` with the first model in enumeration order, or
    ``unsat_at_bound`` with no model."""

    status: str
    model: Optional[Model] = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


# ---------------------------------------------------------------------------
# Evaluation helpers


def _eval_set_term(t: SetTerm, sets_by_var: Mapping[str, FcSet], horizon: int) -> FcSet:
    if isinstance(t, SetVar):
        return sets_by_var[t.name]
    if isinstance(t, SetUnion):
        return _eval_set_term(t.left, sets_by_var, horizon).union(
            _eval_set_term(t.right, sets_by_var, horizon)
        )
    if isinstance(t, SetInter):
        return _eval_set_term(t.left, sets_by_var, horizon).inter(
            _eval_set_term(t.right, sets_by_var, horizon)
        )
    if isinstance(t, SetCompl):
        return _eval_set_term(t.arg, sets_by_var, horizon).complement()
    if isinstance(t, EmptySet):
        return FcSet(horizon, frozenset(), False)
    return FcSet(horizon, frozenset(range(horizon)), True)


def _eval_bapa(
    f: BapaFormula,
    sets_by_var: Mapping[str, FcSet],
    horizon: int,
    ints: Mapping[str, int],
) -> bool:
    if isinstance(f, BapaAnd):
        return all(_eval_bapa(g, sets_by_var, horizon, ints) for g in f.args)
    if isinstance(f, BapaOr):
        return any(_eval_bapa(g, sets_by_var, horizon, ints) for g in f.args)
    if isinstance(f, BapaNot):
        return not _eval_bapa(f.arg, sets_by_var, horizon, ints)
    if isinstance(f, Subset):
        return _eval_set_term(f.left, sets_by_var, horizon).subset_of(
            _eval_set_term(f.right, sets_by_var, horizon)
        )
    if isinstance(f, SetEq):
        return _eval_set_term(f.left, sets_by_var, horizon) == _eval_set_term(
            f.right, sets_by_var, horizon
        )
    if isinstance(f, (CardEq, CardLe)):
        size = _eval_set_term(f.term, sets_by_var, horizon).card()
        if size is None:
            return False
        bound = f.bound.value(ints)
        return size == bound if isinstance(f, CardEq) else size <= bound
    return eval_qfpa(f.formula, ints)


def _universal_guards(p: FragmentProblem) -> list[QfpaFormula]:
    """Guards that must hold at every index in every model.

    A top-level conjunct asserting ``S = full`` forces the guard of each
    interpretation of ``S`` to hold everywhere, so candidate cells that
    violate one can be pruned before enumeration.  The constraint itself
    stays in the formula, so pruning never changes the verdict, only the
    work.
    """

    forced: set[str] = set()

    def walk(f: Optional[BapaFormula]) -> None:
        if isinstance(f, BapaAnd):
            for g in f.args:
                walk(g)
        elif isinstance(f, SetEq):
            sides = (f.left, f.right)
            if any(isinstance(s, FullSet) for s in sides):
                for s in sides:
                    if isinstance(s, SetVar):
                        forced.add(s.name)

    walk(p.bapa)
    return [i.guard for i in p.interps if i.set_var in forced]


class _WorkMeter:
    def __init__(self, cap: int):
        self.cap = cap
        self.done = 0

    def spend(self, units: int = 1) -> None:
        self.done += units
        if self.done > self.cap:
            raise ResourceLimit(
                f"oracle enumeration exceeded the work cap of {self.cap}"
            )


def _first_int_solution(
    free: list[str],
    pinned: dict[str, int],
    bound: int,
    holds: Callable[[dict[str, int]], bool],
    meter: _WorkMeter,
) -> Optional[dict[str, int]]:
    """Lexicographically first extension of ``pinned`` over ``free`` in
    ``[0..bound]`` satisfying ``holds``, or ``None``."""

    for values in product(range(bound + 1), repeat=len(free)):
        meter.spend()
        env = dict(pinned)
        env.update(zip(free, values))
        if holds(env):
            return env
    return None


# ---------------------------------------------------------------------------
# Brute force over the full fragment


def brute_force_sat(
    p: FragmentProblem | ValidatedProblem,
    b: OracleBounds = OracleBounds(),
    max_work: int = DEFAULT_ORACLE_WORK,
) -> OracleVerdict:
    """Enumerate finite-support models within ``b`` and report the first
    hit, or that none exists at these bounds.

    Synthetic arrays (names starting with ``#``) get a value range of at
    least ``{0, 1}`` even when ``max_val`` is 0, so indicator logic
    survives degenerate bounds.
    """

    if isinstance(p, ValidatedProblem):
        p = p.problem
    else:
        p = validate_fragment(p).problem

    L, ibound = b.max_len, b.ints_max
    meter = _WorkMeter(max_work)
    arrays = p.arrays

    def domain(name: str) -> range:
        hi = max(b.max_val, 1) if name.startswith("#") else b.max_val
        return range(hi + 1)

    zero_env = {a: 0 for a in arrays}
    uguards = _universal_guards(p)
    if any(not eval_qfpa(g, zero_env) for g in uguards):
        # the forced-zero tail already violates a universal constraint
        return OracleVerdict("unsat_at_bound")

    cells = []
    for cell in product(*(domain(a) for a in arrays)):
        meter.spend()
        env = dict(zip(arrays, cell))
        if all(eval_qfpa(g, env) for g in uguards):
            cells.append(cell)

    # truth tables per cell, computed once
    interp_truth: list[dict[tuple[int, ...], bool]] = []
    interp_tail: list[bool] = []
    for interp in p.interps:
        table = {}
        for cell in cells:
            meter.spend()
            table[cell] = eval_qfpa(interp.guard, dict(zip(arrays, cell)))
        interp_truth.append(table)
        interp_tail.append(eval_qfpa(interp.guard, zero_env))

    spec = p.sum_spec
    sum_truth: dict[tuple[int, ...], bool] = {}
    target_pos: list[tuple[str, int]] = []
    if spec is not None:
        for cell in cells:
            meter.spend()
            sum_truth[cell] = eval_qfpa(spec.guard, dict(zip(arrays, cell)))
        target_pos = [(svar, arrays.index(arr)) for svar, arr in spec.targets]

    sum_vars = {svar for svar, _ in target_pos}
    free = [name for name in p.ints if name not in sum_vars]
    inner_cache: dict[tuple, Optional[dict[str, int]]] = {}

    for combo in product(cells, repeat=L):
        meter.spend()

        sets_by_var: dict[str, FcSet] = {}
        agree = True
        for idx, interp in enumerate(p.interps):
            table = interp_truth[idx]
            members = frozenset(n for n, cell in enumerate(combo) if table[cell])
            derived = FcSet(L, members, interp_tail[idx])
            prev = sets_by_var.setdefault(interp.set_var, derived)
            if prev != derived:
                agree = False
                break
        if not agree:
            continue

        pinned: dict[str, int] = {}
        within = True
        for svar, pos in target_pos:
            total = sum(cell[pos] for cell in combo if sum_truth[cell])
            if total > ibound:
                within = False
                break
            pinned[svar] = total
        if not within:
            continue

        key = (
            tuple(sorted(pinned.items())),
            tuple((name, sets_by_var[name]) for name in sorted(sets_by_var)),
        )
        if key in inner_cache:
            env = inner_cache[key]
        else:
            env = _first_int_solution(
                free,
                pinned,
                ibound,
                lambda e: p.bapa is None or _eval_bapa(p.bapa, sets_by_var, L, e),
                meter,
            )
            inner_cache[key] = env
        if env is None:
            continue

        model = Model(
            arrays={a: tuple(cell[i] for cell in combo) for i, a in enumerate(arrays)},
            ints=env,
            sets={
                name: (tuple(sorted(fc.members)), fc.tail)
                for name, fc in sets_by_var.items()
            },
        )
        if not check_model(p, model).ok:
            raise SumstarError(
                "oracle enumeration accepted a model the checker rejects"
            )
        return OracleVerdict("sat", model)

    return OracleVerdict("unsat_at_bound")


# ---------------------------------------------------------------------------
# Stage evaluation

# The two rewriting stages are still array problems with guarded sums,
# so they are judged by the same enumeration.  Universal pointwise
# constraints are expressed as "this guard's set is everything", which
# the model checker already knows how to decide over a finite prefix
# with a zero tail.


def sum_form_as_problem(s: SumForm) -> FragmentProblem:
    """The set-free stage as an ordinary problem: each universal
    constraint becomes a set asserted equal to the full index set."""

    names = [f"#all_{i}" for i in range(len(s.interps))]
    interps = tuple(
        SetInterpretation(name, interp.guard)
        for name, interp in zip(names, s.interps)
    )
    parts: list[BapaFormula] = [Arith(s.psi)]
    parts.extend(SetEq(SetVar(name), FullSet()) for name in names)
    return FragmentProblem(
        arrays=s.arrays,
        sets=tuple(names),
        ints=s.ints,
        bapa=BapaAnd(tuple(parts)),
        interps=interps,
        sum_spec=s.sum,
    )


def guarded_sum_verdict(
    g: GuardedSum,
    b: OracleBounds = OracleBounds(),
    max_work: int = DEFAULT_ORACLE_WORK,
) -> str:
    """Bounded verdict for the single-guard stage.

    Only a cell's contribution to the sums matters, so the prefix search
    collapses to reachability over contribution vectors: which target
    totals can a prefix of ``max_len`` cells produce.
    """

    L, ibound = b.max_len, b.ints_max
    meter = _WorkMeter(max_work)
    arrays = g.arrays

    def domain(name: str) -> range:
        hi = max(b.max_val, 1) if name.startswith("#") else b.max_val
        return range(hi + 1)

    positions = [arrays.index(arr) for _, arr in g.targets]
    zero = (0,) * len(positions)
    contribs: set[tuple[int, ...]] = set()
    for cell in product(*(domain(a) for a in arrays)):
        meter.spend()
        if eval_qfpa(g.guard, dict(zip(arrays, cell))):
            contribs.add(tuple(cell[pos] for pos in positions))
        else:
            contribs.add(zero)

    frontier: set[tuple[int, ...]] = {zero}
    for _ in range(L):
        meter.spend(len(frontier) * len(contribs))
        frontier = {
            tuple(f[i] + c[i] for i in range(len(zero)))
            for f in frontier
            for c in contribs
            if all(f[i] + c[i] <= ibound for i in range(len(zero)))
        }

    sum_vars = [svar for svar, _ in g.targets]
    free = [name for name in g.ints if name not in set(sum_vars)]
    for vec in sorted(frontier):
        pinned = dict(zip(sum_vars, vec))
        env = _first_int_solution(
            free, pinned, ibound, lambda e: eval_qfpa(g.psi, e), meter
        )
        if env is not None:
            return "sat"
    return "unsat_at_bound"


@dataclass(frozen=True)
class StageVerdicts:
    """One bounded verdict per pipeline stage of a single problem."""

    original: str
    sum_form: str
    guarded: str

    @property
    def consistent(self) -> bool:
        return self.original == self.sum_form == self.guarded


def stage_verdicts(
    vp: ValidatedProblem,
    b: OracleBounds = OracleBounds(),
    max_work: int = DEFAULT_ORACLE_WORK,
) -> StageVerdicts:
    """Evaluate a problem and its two rewriting stages independently."""

    from .pipeline import eliminate_bapa, merge_set_interpretations

    s = eliminate_bapa(vp)
    g = merge_set_interpretations(s)
    return StageVerdicts(
        original=brute_force_sat(vp, b, max_work).status,
        sum_form=brute_force_sat(sum_form_as_problem(s), b, max_work).status,
        guarded=guarded_sum_verdict(g, b, max_work),
    )


# ---------------------------------------------------------------------------
# Random problems


_SIZES = {
    # arrays, sets, ints, atoms per guard, formula depth
    "small": (2, 1, 2, 2, 1),
    "medium": (2, 2, 3, 3, 2),
}

_ARRAY_NAMES = ("c", "d")
_SET_NAMES = ("S", "T")
_INT_NAMES = ("s", "t", "v")


def _rand_linterm(rng: random.Random, names: tuple[str, ...]) -> "LinTerm":
    coeffs = {}
    for name in names:
        if rng.random() < 0.6:
            coeffs[name] = rng.randint(1, 3)
    if not coeffs and names:
        coeffs[rng.choice(names)] = rng.randint(1, 3)
    return linterm(rng.randint(0, 4), coeffs)


def _rand_atom(rng: random.Random, names: tuple[str, ...]) -> QfpaFormula:
    kind = rng.choice((EQ, LE, LT, GE, GT, MOD))
    lhs = _rand_linterm(rng, names)
    if kind == MOD:
        m = rng.randint(2, 4)
        return atom(MOD, lhs, const_term(rng.randrange(m)), m)
    return atom(kind, lhs, const_term(rng.randint(0, 6)))


def _rand_qf(
    rng: random.Random, names: tuple[str, ...], max_atoms: int, depth: int
) -> QfpaFormula:
    if depth == 0 or rng.random() < 0.5:
        return _rand_atom(rng, names)
    n = rng.randint(1, max_atoms)
    parts = [_rand_qf(rng, names, max_atoms, depth - 1) for _ in range(n)]
    combine = conj if rng.random() < 0.7 else disj
    f = combine(*parts)
    if rng.random() < 0.15:
        f = Not(f)
    return f


def _rand_set_term(rng: random.Random, sets: tuple[str, ...]) -> SetTerm:
    roll = rng.random()
    if roll < 0.55 or len(sets) == 1:
        t: SetTerm = SetVar(rng.choice(sets))
        return SetCompl(t) if rng.random() < 0.2 else t
    left, right = SetVar(rng.choice(sets)), SetVar(rng.choice(sets))
    return SetUnion(left, right) if roll < 0.8 else SetInter(left, right)


def gen_random_problem(seed: int, size: str = "small") -> FragmentProblem:
    """Seeded, reproducible sample from the validated grammar.

    Every referenced set carries an interpretation and guards never read
    integers, so the result always passes validation.
    """

    if size not in _SIZES:
        raise ValueError(f"unknown size '{size}'")
    max_arrays, max_sets, max_ints, max_atoms, depth = _SIZES[size]
    rng = random.Random(f"sumstar-oracle:{size}:{seed}")

    arrays = _ARRAY_NAMES[: rng.randint(1, max_arrays)]
    sets = _SET_NAMES[: rng.randint(0, max_sets)]
    ints = _INT_NAMES[: rng.randint(1, max_ints)]

    interps = tuple(
        SetInterpretation(name, _rand_qf(rng, arrays, max_atoms, depth))
        for name in sets
    )

    sum_spec = None
    if rng.random() < 0.85:
        k = rng.randint(1, min(len(ints), len(arrays)))
        svars = rng.sample(ints, k)
        targets = tuple(zip(svars, rng.sample(arrays, k)))
        sum_spec = SumSpec(targets, _rand_qf(rng, arrays, max_atoms, depth))

    parts: list[BapaFormula] = []
    for _ in range(rng.randint(0, 3)):
        roll = rng.random()
        if roll < 0.55 or not sets:
            f: BapaFormula = Arith(_rand_qf(rng, tuple(ints), max_atoms, depth))
            if rng.random() < 0.1:
                f = BapaNot(f)
            parts.append(f)
        elif roll < 0.85:
            kind = CardEq if rng.random() < 0.6 else CardLe
            bound = linterm(
                rng.randint(0, 6),
                {rng.choice(ints): 1} if rng.random() < 0.3 else {},
            )
            parts.append(kind(_rand_set_term(rng, sets), bound))
        else:
            left, right = _rand_set_term(rng, sets), _rand_set_term(rng, sets)
            parts.append(Subset(left, right) if rng.random() < 0.6 else SetEq(left, right))

    bapa: Optional[BapaFormula] = None
    if len(parts) == 1:
        bapa = parts[0]
    elif parts:
        bapa = BapaAnd(tuple(parts))

    p = FragmentProblem(
        arrays=arrays,
        sets=sets,
        ints=tuple(ints),
        bapa=bapa,
        interps=interps,
        sum_spec=sum_spec,
    )
    validate_fragment(p)
    return p


# ---------------------------------------------------------------------------
# Differential harness


@dataclass(frozen=True)
class DiffLine:
    """One tested instance: the seed to replay it, both verdicts, and
    whether they are consistent."""

    seed: int
    oracle: str
    solver: str
    status: str
    detail: str = ""

    def render(self) -> str:
        line = f"seed={self.seed} oracle={self.oracle} solver={self.solver} {self.status}"
        return f"{line} ({self.detail})" if self.detail else line


@dataclass(frozen=True)
class DiffReport:
    lines: tuple[DiffLine, ...] = ()

    @property
    def disagreements(self) -> tuple[DiffLine, ...]:
        return tuple(l for l in self.lines if l.status == "disagree")

    @property
    def limited(self) -> tuple[DiffLine, ...]:
        return tuple(l for l in self.lines if l.status == "limit")

    def render(self) -> str:
        body = [l.render() for l in self.lines]
        body.append(
            f"instances={len(self.lines)} disagreements={len(self.disagreements)} "
            f"limits={len(self.limited)}"
        )
        return "\n".join(body)


def differential_run(
    seed: int,
    count: int,
    bounds: OracleBounds = OracleBounds(),
    size: str = "small",
    solve: Optional[Callable[[ValidatedProblem], object]] = None,
    max_work: int = DEFAULT_ORACLE_WORK,
) -> DiffReport:
    """Generate ``count`` problems and compare solver against oracle.

    Disagreements are: oracle found a model where the solver said
    unsatisfiable, or the solver's model fails the independent checker.
    A solver ``sat`` the bounded oracle cannot reproduce is consistent,
    and resource limits on either side are reported separately.
    """

    from .solver import solve_problem

    run = solve or solve_problem
    rng = random.Random(f"sumstar-diff:{seed}")
    lines = []
    for _ in range(count):
        inst = rng.randrange(1 << 30)
        vp = validate_fragment(gen_random_problem(inst, size))

        solver_status, model, detail = "error", None, ""
        try:
            outcome = run(vp)
            solver_status = outcome.status
            model = outcome.model
        except ResourceLimit as exc:
            solver_status, detail = "limit", str(exc)
        except SumstarError as exc:
            detail = str(exc)

        oracle_status = "limit"
        try:
            oracle_status = brute_force_sat(vp, bounds, max_work).status
        except ResourceLimit as exc:
            if not detail:
                detail = str(exc)

        if solver_status == "sat" and not (model and check_model(vp, model).ok):
            status, detail = "disagree", "solver model rejected by the checker"
        elif solver_status == "error":
            status = "disagree"
        elif oracle_status == "sat" and solver_status == "unsat":
            status = "disagree"
        elif "limit" in (solver_status, oracle_status):
            status = "limit"
        else:
            status = "ok"
        lines.append(DiffLine(inst, oracle_status, solver_status, status, detail))
    return DiffReport(tuple(lines))
