"""Evaluation, normal forms, and well-formedness checking.

This module is deliberately the slow, obviously-correct reference: the
model checker below is what every other component (solver, oracle,
certificate replay) is ultimately judged against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .ast import (
    EQ,
    GE,
    GT,
    LE,
    LT,
    MOD,
    NEQ,
    And,
    Arith,
    Atom,
    BapaAnd,
    BapaFormula,
    BapaNot,
    BapaOr,
    CardEq,
    CardLe,
    EmptySet,
    FragmentProblem,
    FullSet,
    LinTerm,
    Model,
    Not,
    Or,
    QfpaAtom,
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
    set_term_variables,
)
from .errors import SizeLimitExceeded, ValidationError

Cube = tuple[QfpaAtom, ...]

DEFAULT_DNF_CAP = 256


# ---------------------------------------------------------------------------
# Evaluation


def eval_qfpa(f: QfpaFormula, env: Mapping[str, int]) -> bool:
    """Evaluate a formula under a total assignment of naturals.

    Raises :class:`~sumstar.errors.MissingBinding` if a referenced
    variable has no value.
    """

    if isinstance(f, Atom):
        return f.atom.holds(env)
    if isinstance(f, Not):
        return not eval_qfpa(f.arg, env)
    if isinstance(f, And):
        return all(eval_qfpa(g, env) for g in f.args)
    return any(eval_qfpa(g, env) for g in f.args)


def eval_cube(cube: Cube, env: Mapping[str, int]) -> bool:
    return all(a.holds(env) for a in cube)


def eval_dnf(cubes: list[Cube], env: Mapping[str, int]) -> bool:
    return any(eval_cube(c, env) for c in cubes)


# ---------------------------------------------------------------------------
# Disjunctive normal form


def _negate_atom(a: QfpaAtom) -> list[Cube]:
    """Negation-free rewriting of one negated atom, as a DNF."""

    if a.kind == EQ:
        return [
            (QfpaAtom(LT, a.lhs, a.rhs),),
            (QfpaAtom(GE, a.lhs, a.rhs.shift(1)),),
        ]
    if a.kind == NEQ:
        return [(QfpaAtom(EQ, a.lhs, a.rhs),)]
    if a.kind == LE:
        return [(QfpaAtom(GE, a.lhs, a.rhs.shift(1)),)]
    if a.kind == LT:
        return [(QfpaAtom(GE, a.lhs, a.rhs),)]
    if a.kind == GE:
        return [(QfpaAtom(LE, a.lhs, a.rhs.shift(-1)),)]
    if a.kind == GT:
        return [(QfpaAtom(LE, a.lhs, a.rhs),)]
    # lhs != rhs (mod m)  <=>  lhs == rhs + r (mod m) for some 1 <= r < m
    return [
        (QfpaAtom(MOD, a.lhs, a.rhs.shift(r), a.modulus),)
        for r in range(1, a.modulus)
    ]


def _positive_atom(a: QfpaAtom) -> list[Cube]:
    if a.kind == NEQ:
        # keep cubes free of disequalities so downstream systems stay conjunctive
        return [
            (QfpaAtom(LT, a.lhs, a.rhs),),
            (QfpaAtom(GE, a.lhs, a.rhs.shift(1)),),
        ]
    return [(a,)]


def _cross(blocks: list[list[Cube]], cap: int) -> list[Cube]:
    acc: list[Cube] = [()]
    for block in blocks:
        nxt: list[Cube] = []
        for left in acc:
            for right in block:
                merged = tuple(dict.fromkeys(left + right))
                nxt.append(merged)
                if len(nxt) > cap:
                    raise SizeLimitExceeded(
                        f"disjunctive normal form exceeds {cap} cubes"
                    )
        acc = nxt
    return acc


def _dnf(f: QfpaFormula, negated: bool, cap: int) -> list[Cube]:
    if isinstance(f, Atom):
        return _negate_atom(f.atom) if negated else _positive_atom(f.atom)
    if isinstance(f, Not):
        return _dnf(f.arg, not negated, cap)
    if isinstance(f, And):
        branches = [_dnf(g, negated, cap) for g in f.args]
        if negated:
            out = [c for b in branches for c in b]
            if len(out) > cap:
                raise SizeLimitExceeded(f"disjunctive normal form exceeds {cap} cubes")
            return out
        return _cross(branches, cap)
    branches = [_dnf(g, negated, cap) for g in f.args]
    if negated:
        return _cross(branches, cap)
    out = [c for b in branches for c in b]
    if len(out) > cap:
        raise SizeLimitExceeded(f"disjunctive normal form exceeds {cap} cubes")
    return out


def to_dnf(f: QfpaFormula, max_cubes: int = DEFAULT_DNF_CAP) -> list[Cube]:
    """Negation- and disequality-free disjunctive normal form.

    Each returned cube is a conjunction of atoms drawn from
    ``{=, <=, <, >=, >, mod}``.  Raises ``SizeLimitExceeded`` when the
    cube count would pass ``max_cubes``.
    """

    cubes = _dnf(f, False, max_cubes)
    # drop duplicate cubes, keeping first occurrence to stay deterministic
    return list(dict.fromkeys(cubes))


# ---------------------------------------------------------------------------
# Fragment validation

UNDECIDABLE_SHARING = "UndecidableSharing"
NEGATIVE_CARDINALITY = "NegativeCardinality"
UNDECLARED_SYMBOL = "UndeclaredSymbol"

Violation = tuple[str, str]


def _check_guard(
    guard: QfpaFormula,
    where: str,
    arrays: set[str],
    ints: set[str],
    out: list[Violation],
) -> None:
    from .ast import formula_variables

    for var in sorted(formula_variables(guard)):
        if var in ints:
            out.append(
                (
                    UNDECIDABLE_SHARING,
                    f"integer variable '{var}' occurs in {where}; guards may "
                    "only read array cells",
                )
            )
        elif var not in arrays:
            out.append((UNDECLARED_SYMBOL, f"'{var}' in {where} is not a declared array"))


def _check_arith(
    f: QfpaFormula, arrays: set[str], sets: set[str], ints: set[str], out: list[Violation]
) -> None:
    from .ast import formula_variables

    for var in sorted(formula_variables(f)):
        if var in arrays:
            out.append(
                (
                    UNDECIDABLE_SHARING,
                    f"array '{var}' occurs in the arithmetic part; arrays may "
                    "only be read inside guards",
                )
            )
        elif var in sets:
            out.append((UNDECLARED_SYMBOL, f"set '{var}' used as an integer"))
        elif var not in ints:
            out.append((UNDECLARED_SYMBOL, f"'{var}' is not a declared integer"))


def _check_bound(
    t: LinTerm, arrays: set[str], sets: set[str], ints: set[str], out: list[Violation]
) -> None:
    for var in t.variables():
        if var in arrays:
            out.append(
                (
                    UNDECIDABLE_SHARING,
                    f"array '{var}' occurs in a cardinality bound",
                )
            )
        elif var in sets:
            out.append((UNDECLARED_SYMBOL, f"set '{var}' used as an integer"))
        elif var not in ints:
            out.append((UNDECLARED_SYMBOL, f"'{var}' is not a declared integer"))


def _check_set_term(t: SetTerm, sets: set[str], out: list[Violation], used: set[str]) -> None:
    for name in sorted(set_term_variables(t)):
        used.add(name)
        if name not in sets:
            out.append((UNDECLARED_SYMBOL, f"'{name}' is not a declared set"))


def _has_set_content(f: BapaFormula) -> bool:
    if isinstance(f, (Subset, SetEq, CardEq, CardLe)):
        return True
    if isinstance(f, (BapaAnd, BapaOr)):
        return any(_has_set_content(g) for g in f.args)
    if isinstance(f, BapaNot):
        return _has_set_content(f.arg)
    return False


def fragment_violations(p: FragmentProblem) -> list[Violation]:
    """Complete list of well-formedness violations, in traversal order."""

    out: list[Violation] = []
    arrays, sets, ints = set(p.arrays), set(p.sets), set(p.ints)

    seen: dict[str, str] = {}
    for sort, names in (("array", p.arrays), ("set", p.sets), ("int", p.ints)):
        for name in names:
            if name in seen:
                out.append(
                    (
                        UNDECLARED_SYMBOL,
                        f"'{name}' declared as both {seen[name]} and {sort}",
                    )
                )
            seen[name] = sort

    used_sets: set[str] = set()

    def walk(f: BapaFormula, under_not: bool) -> None:
        if isinstance(f, (BapaAnd, BapaOr)):
            for g in f.args:
                walk(g, under_not)
        elif isinstance(f, BapaNot):
            if _has_set_content(f.arg):
                out.append(
                    (
                        NEGATIVE_CARDINALITY,
                        "set or cardinality atom under negation; these atoms "
                        "must occur positively",
                    )
                )
            walk(f.arg, True)
        elif isinstance(f, (Subset, SetEq)):
            _check_set_term(f.left, sets, out, used_sets)
            _check_set_term(f.right, sets, out, used_sets)
        elif isinstance(f, (CardEq, CardLe)):
            _check_set_term(f.term, sets, out, used_sets)
            _check_bound(f.bound, arrays, sets, ints, out)
        else:
            _check_arith(f.formula, arrays, sets, ints, out)

    if p.bapa is not None:
        walk(p.bapa, False)

    interpreted = set()
    for interp in p.interps:
        if interp.set_var not in sets:
            out.append(
                (UNDECLARED_SYMBOL, f"interpretation for undeclared set '{interp.set_var}'")
            )
        interpreted.add(interp.set_var)
        _check_guard(
            interp.guard, f"the interpretation of '{interp.set_var}'", arrays, ints, out
        )

    for name in sorted(used_sets):
        if name in sets and name not in interpreted:
            out.append(
                (
                    UNDECLARED_SYMBOL,
                    f"set '{name}' is referenced but has no interpretation",
                )
            )

    if p.sum_spec is not None:
        for svar, arr in p.sum_spec.targets:
            if svar not in ints:
                out.append(
                    (UNDECLARED_SYMBOL, f"sum variable '{svar}' is not a declared integer")
                )
            if arr not in arrays:
                out.append((UNDECLARED_SYMBOL, f"sum target '{arr}' is not a declared array"))
        _check_guard(p.sum_spec.guard, "the sum guard", arrays, ints, out)

    return out


def validate_fragment(p: FragmentProblem) -> ValidatedProblem:
    """Return a validated wrapper or raise ``ValidationError`` with every violation."""

    violations = fragment_violations(p)
    if violations:
        raise ValidationError(violations)
    return ValidatedProblem(p)


# ---------------------------------------------------------------------------
# Model checking


@dataclass(frozen=True)
class FcSet:
    """Finite-or-cofinite index set relative to a horizon.

    Membership below ``horizon`` is listed explicitly in ``members``;
    membership at and past the horizon is the constant ``tail``.
    """

    horizon: int
    members: frozenset[int]
    tail: bool

    def complement(self) -> "FcSet":
        full = frozenset(range(self.horizon))
        return FcSet(self.horizon, full - self.members, not self.tail)

    def union(self, other: "FcSet") -> "FcSet":
        return FcSet(self.horizon, self.members | other.members, self.tail or other.tail)

    def inter(self, other: "FcSet") -> "FcSet":
        return FcSet(self.horizon, self.members & other.members, self.tail and other.tail)

    def subset_of(self, other: "FcSet") -> bool:
        return self.members <= other.members and (not self.tail or other.tail)

    def card(self) -> Optional[int]:
        """Cardinality, or ``None`` when infinite."""

        return None if self.tail else len(self.members)


@dataclass(frozen=True)
class CheckReport:
    """Per-conjunct verdicts of a model check."""

    ok: bool
    sum_ok: bool
    interps_ok: bool
    bapa_ok: bool
    messages: tuple[str, ...] = ()


def _cell_env(p: FragmentProblem, m: Model, n: int) -> dict[str, int]:
    env = {}
    for arr in p.arrays:
        prefix = m.arrays.get(arr, ())
        env[arr] = prefix[n] if n < len(prefix) else 0
    return env


def _derived_set(guard: QfpaFormula, p: FragmentProblem, m: Model, horizon: int) -> FcSet:
    members = frozenset(
        n for n in range(horizon) if eval_qfpa(guard, _cell_env(p, m, n))
    )
    tail = eval_qfpa(guard, {arr: 0 for arr in p.arrays})
    return FcSet(horizon, members, tail)


def set_values(p: FragmentProblem | ValidatedProblem, m: Model) -> dict[str, FcSet]:
    """Index set denoted by each interpreted set variable (first interpretation)."""

    if isinstance(p, ValidatedProblem):
        p = p.problem
    horizon = max((len(m.arrays.get(a, ())) for a in p.arrays), default=0)
    out: dict[str, FcSet] = {}
    for interp in p.interps:
        if interp.set_var not in out:
            out[interp.set_var] = _derived_set(interp.guard, p, m, horizon)
    return out


def check_model(p: FragmentProblem | ValidatedProblem, m: Model) -> CheckReport:
    """Total check of a finite-prefix model against all three conjuncts.

    Positions past every stored prefix carry value 0, which makes every
    interpreted set finite or cofinite; the cardinality of an infinite
    set compares as false under both ``=`` and ``<=``.
    """

    if isinstance(p, ValidatedProblem):
        p = p.problem
    messages: list[str] = []

    for arr in p.arrays:
        if any(v < 0 for v in m.arrays.get(arr, ())):
            return CheckReport(False, False, False, False, (f"array '{arr}' holds a negative value",))
    for name in p.ints:
        if name not in m.ints:
            return CheckReport(False, False, False, False, (f"no value for integer '{name}'",))
        if m.ints[name] < 0:
            return CheckReport(False, False, False, False, (f"integer '{name}' is negative",))

    horizon = max((len(m.arrays.get(a, ())) for a in p.arrays), default=0)

    # (b) interpretations: every interpretation of a set must derive the
    # same finite-or-cofinite index set.
    sets_by_var: dict[str, FcSet] = {}
    interps_ok = True
    for interp in p.interps:
        derived = _derived_set(interp.guard, p, m, horizon)
        prev = sets_by_var.get(interp.set_var)
        if prev is None:
            sets_by_var[interp.set_var] = derived
        elif prev != derived:
            interps_ok = False
            messages.append(
                f"interpretations of '{interp.set_var}' disagree on this model"
            )

    def eval_set(t: SetTerm) -> FcSet:
        if isinstance(t, SetVar):
            if t.name not in sets_by_var:
                raise ValidationError(
                    [(UNDECLARED_SYMBOL, f"set '{t.name}' has no interpretation")]
                )
            return sets_by_var[t.name]
        if isinstance(t, SetUnion):
            return eval_set(t.left).union(eval_set(t.right))
        if isinstance(t, SetInter):
            return eval_set(t.left).inter(eval_set(t.right))
        if isinstance(t, SetCompl):
            return eval_set(t.arg).complement()
        if isinstance(t, EmptySet):
            return FcSet(horizon, frozenset(), False)
        return FcSet(horizon, frozenset(range(horizon)), True)

    def eval_bapa(f: BapaFormula) -> bool:
        if isinstance(f, BapaAnd):
            return all(eval_bapa(g) for g in f.args)
        if isinstance(f, BapaOr):
            return any(eval_bapa(g) for g in f.args)
        if isinstance(f, BapaNot):
            return not eval_bapa(f.arg)
        if isinstance(f, Subset):
            return eval_set(f.left).subset_of(eval_set(f.right))
        if isinstance(f, SetEq):
            return eval_set(f.left) == eval_set(f.right)
        if isinstance(f, (CardEq, CardLe)):
            size = eval_set(f.term).card()
            if size is None:
                return False
            bound = f.bound.value(m.ints)
            return size == bound if isinstance(f, CardEq) else size <= bound
        return eval_qfpa(f.formula, m.ints)

    bapa_ok = True
    if p.bapa is not None:
        bapa_ok = eval_bapa(p.bapa)
        if not bapa_ok:
            messages.append("constraint part is false under this model")

    # (c) sums
    sum_ok = True
    if p.sum_spec is not None:
        guard = p.sum_spec.guard
        guarded = [n for n in range(horizon) if eval_qfpa(guard, _cell_env(p, m, n))]
        for svar, arr in p.sum_spec.targets:
            prefix = m.arrays.get(arr, ())
            total = sum(prefix[n] for n in guarded if n < len(prefix))
            if total != m.ints.get(svar):
                sum_ok = False
                messages.append(
                    f"sum target '{svar}' is {m.ints.get(svar)} but the guarded "
                    f"sum of '{arr}' is {total}"
                )

    ok = interps_ok and bapa_ok and sum_ok
    return CheckReport(ok, sum_ok, interps_ok, bapa_ok, tuple(messages))
