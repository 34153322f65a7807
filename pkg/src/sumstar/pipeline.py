"""Satisfiability-preserving normalization chain.

Three rewrites take a validated problem to a form with a single star
membership atom:

1. ``eliminate_bapa``: set variables become 0/1 indicator arrays linked
   pointwise to their defining guards; set-algebra atoms become
   cardinality atoms; each cardinality atom gets a fresh 0/1 array, a
   fresh counter integer summed over that array, and a plain arithmetic
   comparison on the counter.  All introduced constraints are universal
   (they must hold at every index), recorded as interpretations of the
   full index set.
2. ``merge_set_interpretations``: the universal constraints and the sum
   guard collapse into one guard formula; nothing else changes.
3. ``sums_to_star``: the guarded sum becomes membership of the sum
   vector in the x-fold addition closure of the guard's solution set,
   with a fresh exponent variable counting addends.

Three value-at-zero analyses keep the chain faithful to the
finite-support model semantics.  First, a set whose defining guard
holds at the all-zero point is cofinite, so its indicator would have to
be one on the whole tail; such indicators store the complement instead,
keeping every array zero on the tail.  Second, a cardinality atom whose
set contains the all-zero point denotes a cofinite set; no finite count
can match, so the atom is replaced by the false formula before any
machinery is built.  Third, if two defining guards for one set variable
disagree at the all-zero point, no finite-support model can exist at
all (the common tail violates one of them), and the false formula is
conjoined.

When counters join a sum that carries a nontrivial guard, the original
targets are rerouted through gate arrays (equal to the source under the
guard, zero elsewhere) so that a single trivial guard serves every
target; counters must count every index, not only the guarded ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    EQ,
    FALSE,
    GE,
    LE,
    TRUE,
    Arith,
    BapaAnd,
    BapaFormula,
    BapaNot,
    BapaOr,
    CardEq,
    CardLe,
    EmptySet,
    FullSet,
    Not,
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
    formula_variables,
    var_term,
)
from .semantics import eval_qfpa

UNIVERSAL = "full"


# ---------------------------------------------------------------------------
# Stage types


@dataclass(frozen=True)
class SumForm:
    """After set elimination: arithmetic plus universal constraints plus
    one (possibly extended) guarded sum."""

    arrays: tuple[str, ...]
    ints: tuple[str, ...]
    psi: QfpaFormula
    interps: tuple[SetInterpretation, ...]
    sum: SumSpec


@dataclass(frozen=True)
class GuardedSum:
    """After guard merging: arithmetic plus a single guarded sum."""

    arrays: tuple[str, ...]
    ints: tuple[str, ...]
    psi: QfpaFormula
    targets: tuple[tuple[str, str], ...]
    guard: QfpaFormula


@dataclass(frozen=True)
class StarAtom:
    """Membership ``u in {values : body}^exponent``.

    ``u[i]`` receives the sum of the ``body_vars[i]`` components over the
    chosen addends; the body reads ``body_vars`` as one addend's values.
    """

    u: tuple[str, ...]
    body_vars: tuple[str, ...]
    body: QfpaFormula
    exponent: str


@dataclass(frozen=True)
class LiaCardProblem:
    """Arithmetic over integers extended with star membership atoms."""

    ints: tuple[str, ...]
    f0: QfpaFormula
    star_atoms: tuple[StarAtom, ...]


@dataclass(frozen=True)
class Stages:
    """All intermediates of one normalization run."""

    sum_form: SumForm
    guarded: GuardedSum
    liacard: LiaCardProblem


# ---------------------------------------------------------------------------
# Set elimination


def _indicator(set_var: str) -> str:
    return f"#ind_{set_var}"


def _pointwise(term: SetTerm, flipped: frozenset[str] = frozenset()) -> QfpaFormula:
    """Membership formula of a set term over indicator arrays.

    Indicators of sets in ``flipped`` store the complement (1 means the
    index is outside the set), so membership tests there compare to 0.
    """

    if isinstance(term, SetVar):
        inside = 0 if term.name in flipped else 1
        return atom(EQ, var_term(_indicator(term.name)), const_term(inside))
    if isinstance(term, SetUnion):
        return disj(_pointwise(term.left, flipped), _pointwise(term.right, flipped))
    if isinstance(term, SetInter):
        return conj(_pointwise(term.left, flipped), _pointwise(term.right, flipped))
    if isinstance(term, SetCompl):
        return Not(_pointwise(term.arg, flipped))
    if isinstance(term, EmptySet):
        return FALSE
    if isinstance(term, FullSet):
        return TRUE
    raise TypeError(f"unexpected set term {term!r}")


def _ite_link(cond: QfpaFormula, arr: str, then_term, else_term) -> QfpaFormula:
    """(cond and arr = then) or (not cond and arr = else)."""

    return disj(
        conj(cond, atom(EQ, var_term(arr), then_term)),
        conj(Not(cond), atom(EQ, var_term(arr), else_term)),
    )


class _Elimination:
    def __init__(self, vp: ValidatedProblem):
        self.p = vp.problem
        self.zero_env = {a: 0 for a in self.p.arrays}
        self.interp_map: dict[str, list[QfpaFormula]] = {}
        for i in self.p.interps:
            self.interp_map.setdefault(i.set_var, []).append(i.guard)
        # truth of each defining guard at the all-zero point; None marks a
        # disagreement between guards of the same set
        self.zero_truth: dict[str, Optional[bool]] = {}
        for s, guards in self.interp_map.items():
            vals = {bool(eval_qfpa(g, self.zero_env)) for g in guards}
            self.zero_truth[s] = vals.pop() if len(vals) == 1 else None
        self.tail_conflict = any(v is None for v in self.zero_truth.values())
        # Indicators must be zero on the common tail of finite-support
        # models.  A set whose guard holds at the all-zero point would
        # need a cofinitely-one indicator, so its indicator stores the
        # complement instead.
        self.flipped = frozenset(s for s, v in self.zero_truth.items() if v)
        self.universal: list[SetInterpretation] = []
        self.fresh_arrays: list[str] = []
        self.counter_targets: list[tuple[str, str]] = []
        self.card_index = 0
        self.psi_parts: list[QfpaFormula] = []

    def run(self) -> SumForm:
        for s in sorted(self.interp_map):
            ind = _indicator(s)
            self.fresh_arrays.append(ind)
            self.universal.append(
                SetInterpretation(
                    UNIVERSAL,
                    disj(
                        atom(EQ, var_term(ind), const_term(0)),
                        atom(EQ, var_term(ind), const_term(1)),
                    ),
                )
            )
            inside, outside = (0, 1) if s in self.flipped else (1, 0)
            for g in self.interp_map[s]:
                self.universal.append(
                    SetInterpretation(
                        UNIVERSAL,
                        _ite_link(g, ind, const_term(inside), const_term(outside)),
                    )
                )
        if self.p.bapa is not None:
            self.psi_parts.append(self._formula(self.p.bapa))
        if self.tail_conflict:
            self.psi_parts.append(FALSE)

        spec = self.p.sum_spec or SumSpec(())
        targets = list(spec.targets)
        guard = spec.guard
        if self.counter_targets and guard != TRUE:
            gated: list[tuple[str, str]] = []
            for svar, arr in targets:
                gate = f"#gate_{arr}"
                self.fresh_arrays.append(gate)
                self.universal.append(
                    SetInterpretation(
                        UNIVERSAL,
                        _ite_link(guard, gate, var_term(arr), const_term(0)),
                    )
                )
                gated.append((svar, gate))
            targets = gated
            guard = TRUE
        targets.extend(self.counter_targets)

        return SumForm(
            arrays=self.p.arrays + tuple(self.fresh_arrays),
            ints=self.p.ints + tuple(s for s, _ in self.counter_targets),
            psi=conj(*self.psi_parts) if self.psi_parts else TRUE,
            interps=tuple(self.universal),
            sum=SumSpec(tuple(targets), guard),
        )

    def _zero_point(self, membership: QfpaFormula) -> bool:
        """Truth of a pointwise membership formula on the common tail,
        where every array (indicators included) is zero."""

        env = dict(self.zero_env)
        for s in self.zero_truth:
            env[_indicator(s)] = 0
        return bool(eval_qfpa(membership, env))

    def _cardinality(self, term: SetTerm, bound, kind: str) -> QfpaFormula:
        membership = _pointwise(term, self.flipped)
        if self._zero_point(membership):
            # the set holds the whole tail, so it is infinite and no
            # finite bound can match
            return FALSE
        self.card_index += 1
        card = f"#card_{self.card_index}"
        counter = f"#cnt_{self.card_index}"
        self.fresh_arrays.append(card)
        self.universal.append(
            SetInterpretation(
                UNIVERSAL, _ite_link(membership, card, const_term(1), const_term(0))
            )
        )
        self.counter_targets.append((counter, card))
        return atom(kind, var_term(counter), bound)

    def _formula(self, f: BapaFormula) -> QfpaFormula:
        if isinstance(f, Arith):
            return f.formula
        if isinstance(f, BapaAnd):
            return conj(*(self._formula(a) for a in f.args))
        if isinstance(f, BapaOr):
            return disj(*(self._formula(a) for a in f.args))
        if isinstance(f, BapaNot):
            # validation bars set content under negation, so the body
            # translates to pure arithmetic
            return Not(self._formula(f.arg))
        if isinstance(f, Subset):
            return self._cardinality(
                SetInter(f.left, SetCompl(f.right)), const_term(0), EQ
            )
        if isinstance(f, SetEq):
            return conj(
                self._formula(Subset(f.left, f.right)),
                self._formula(Subset(f.right, f.left)),
            )
        if isinstance(f, CardEq):
            return self._cardinality(f.term, f.bound, EQ)
        if isinstance(f, CardLe):
            return self._cardinality(f.term, f.bound, LE)
        raise TypeError(f"unexpected constraint {f!r}")


def eliminate_bapa(vp: ValidatedProblem) -> SumForm:
    """Rewrite set reasoning into indicator arrays, counters, and
    universal pointwise constraints.  Satisfiable iff the input is."""

    return _Elimination(vp).run()


# ---------------------------------------------------------------------------
# Guard merging


def merge_set_interpretations(s: SumForm) -> GuardedSum:
    """Collapse the universal constraints and the sum guard into one
    guard; pointwise the result is the plain conjunction."""

    assert all(i.set_var == UNIVERSAL for i in s.interps)
    guard = conj(*(i.guard for i in s.interps), s.sum.guard)
    return GuardedSum(
        arrays=s.arrays,
        ints=s.ints,
        psi=s.psi,
        targets=s.sum.targets,
        guard=guard,
    )


# ---------------------------------------------------------------------------
# Star introduction


def sums_to_star(g: GuardedSum) -> LiaCardProblem:
    """Replace the guarded sum with star membership.

    The addend space has one component per sum-target array plus one per
    further array read by the guard; target components accumulate into
    the sum variables, the rest into fresh unconstrained integers.  A
    fresh exponent counts addends; tail indices (all-zero originals with
    tail-consistent fresh values) are never addends, which is sound
    because gating keeps their target components at zero.
    """

    if not g.targets:
        return LiaCardProblem(ints=g.ints, f0=g.psi, star_atoms=())

    guard_arrays = formula_variables(g.guard)
    body_vars = [arr for _, arr in g.targets]
    u_vars = [svar for svar, _ in g.targets]
    extra = sorted(a for a in g.arrays if a in guard_arrays and a not in set(body_vars))
    aux = [f"#aux_{a}" for a in extra]
    body_vars.extend(extra)
    u_vars.extend(aux)

    exponent = "#exp_1"
    star = StarAtom(tuple(u_vars), tuple(body_vars), g.guard, exponent)
    f0 = conj(g.psi, atom(GE, var_term(exponent), const_term(0)))
    return LiaCardProblem(
        ints=g.ints + tuple(aux) + (exponent,),
        f0=f0,
        star_atoms=(star,),
    )


def normalize(vp: ValidatedProblem) -> tuple[SumForm, GuardedSum, LiaCardProblem]:
    """All three stages of one problem, for stage tests and dumps."""

    s = eliminate_bapa(vp)
    g = merge_set_interpretations(s)
    return s, g, sums_to_star(g)


def normalize_stages(vp: ValidatedProblem) -> Stages:
    s, g, l = normalize(vp)
    return Stages(s, g, l)
