"""Core syntax trees.

Three layers of syntax share this module:

* linear terms and quantifier-free Presburger formulas (``LinTerm``,
  ``QfpaFormula``) used both for guards over array cells and for the
  arithmetic part of a problem;
* set terms and the top-level constraint language with subset and
  cardinality atoms (``SetTerm``, ``BapaFormula``);
* whole problems: declarations, constraints, pointwise set
  interpretations and a guarded sum specification.

Everything is an immutable dataclass so trees can be hashed, compared
structurally and reused freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

# ---------------------------------------------------------------------------
# Linear terms


@dataclass(frozen=True)
class LinTerm:
    """Integer-linear term ``const + sum(coeff * var)``.

    The coefficient list is kept sorted by variable name with no zero
    entries, so structural equality coincides with semantic equality of
    terms.
    """

    const: int
    coeffs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        names = [v for v, _ in self.coeffs]
        if names != sorted(names):
            raise ValueError("coefficients must be sorted by variable")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable in linear term")
        if any(c == 0 for _, c in self.coeffs):
            raise ValueError("zero coefficient in linear term")

    def value(self, env: Mapping[str, int]) -> int:
        total = self.const
        for var, coeff in self.coeffs:
            if var not in env:
                from .errors import MissingBinding

                raise MissingBinding(var)
            total += coeff * env[var]
        return total

    def variables(self) -> Iterator[str]:
        for var, _ in self.coeffs:
            yield var

    def shift(self, delta: int) -> "LinTerm":
        return LinTerm(self.const + delta, self.coeffs)

    def plus(self, other: "LinTerm") -> "LinTerm":
        merged = dict(self.coeffs)
        for var, coeff in other.coeffs:
            merged[var] = merged.get(var, 0) + coeff
        return linterm(self.const + other.const, merged)

    def scaled(self, k: int) -> "LinTerm":
        if k == 0:
            return LinTerm(0)
        return LinTerm(self.const * k, tuple((v, c * k) for v, c in self.coeffs))


def linterm(const: int, coeffs: Mapping[str, int] | None = None) -> LinTerm:
    """Canonicalizing constructor: drops zeros and sorts variables."""

    items = tuple(sorted((v, c) for v, c in (coeffs or {}).items() if c != 0))
    return LinTerm(const, items)


def var_term(name: str) -> LinTerm:
    return LinTerm(0, ((name, 1),))


def const_term(value: int) -> LinTerm:
    return LinTerm(value)


# ---------------------------------------------------------------------------
# Quantifier-free Presburger formulas

EQ = "="
NEQ = "distinct"
LE = "<="
LT = "<"
GE = ">="
GT = ">"
MOD = "mod"

_ATOM_KINDS = (EQ, NEQ, LE, LT, GE, GT, MOD)


@dataclass(frozen=True)
class QfpaAtom:
    """Comparison between two linear terms.

    ``mod`` atoms assert ``lhs == rhs  (mod modulus)``; every other kind
    leaves ``modulus`` as ``None``.
    """

    kind: str
    lhs: LinTerm
    rhs: LinTerm
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _ATOM_KINDS:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == MOD:
            if self.modulus is None or self.modulus < 2:
                raise ValueError("mod atoms need a modulus of at least 2")
        elif self.modulus is not None:
            raise ValueError("modulus is only meaningful for mod atoms")

    def holds(self, env: Mapping[str, int]) -> bool:
        a = self.lhs.value(env)
        b = self.rhs.value(env)
        if self.kind == EQ:
            return a == b
        if self.kind == NEQ:
            return a != b
        if self.kind == LE:
            return a <= b
        if self.kind == LT:
            return a < b
        if self.kind == GE:
            return a >= b
        if self.kind == GT:
            return a > b
        return (a - b) % self.modulus == 0


@dataclass(frozen=True)
class Atom:
    atom: QfpaAtom


@dataclass(frozen=True)
class Not:
    arg: "QfpaFormula"


@dataclass(frozen=True)
class And:
    args: tuple["QfpaFormula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty conjunction; use TRUE instead")


@dataclass(frozen=True)
class Or:
    args: tuple["QfpaFormula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty disjunction; use FALSE instead")


QfpaFormula = Union[Atom, Not, And, Or]

TRUE = Atom(QfpaAtom(EQ, const_term(0), const_term(0)))
FALSE = Atom(QfpaAtom(EQ, const_term(0), const_term(1)))


def atom(kind: str, lhs: LinTerm, rhs: LinTerm, modulus: int | None = None) -> Atom:
    return Atom(QfpaAtom(kind, lhs, rhs, modulus))


def conj(*parts: QfpaFormula) -> QfpaFormula:
    """N-ary conjunction that flattens nested ``And`` and drops ``TRUE``."""

    flat: list[QfpaFormula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.args)
        elif p == TRUE:
            continue
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts: QfpaFormula) -> QfpaFormula:
    flat: list[QfpaFormula] = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.args)
        elif p == FALSE:
            continue
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def formula_variables(f: QfpaFormula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.update(node.atom.lhs.variables())
            out.update(node.atom.rhs.variables())
        elif isinstance(node, Not):
            stack.append(node.arg)
        else:
            stack.extend(node.args)
    return out


def formula_atoms(f: QfpaFormula) -> Iterator[QfpaAtom]:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            yield node.atom
        elif isinstance(node, Not):
            stack.append(node.arg)
        else:
            stack.extend(node.args)


# ---------------------------------------------------------------------------
# Set terms


@dataclass(frozen=True)
class SetVar:
    name: str


@dataclass(frozen=True)
class SetUnion:
    left: "SetTerm"
    right: "SetTerm"


@dataclass(frozen=True)
class SetInter:
    left: "SetTerm"
    right: "SetTerm"


@dataclass(frozen=True)
class SetCompl:
    arg: "SetTerm"


@dataclass(frozen=True)
class EmptySet:
    pass


@dataclass(frozen=True)
class FullSet:
    pass


SetTerm = Union[SetVar, SetUnion, SetInter, SetCompl, EmptySet, FullSet]

EMPTY = EmptySet()
FULL = FullSet()


def set_term_variables(t: SetTerm) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, SetVar):
            out.add(node.name)
        elif isinstance(node, (SetUnion, SetInter)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, SetCompl):
            stack.append(node.arg)
    return out


# ---------------------------------------------------------------------------
# Top-level constraint language


@dataclass(frozen=True)
class Subset:
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class SetEq:
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class CardEq:
    """``|term| == bound`` where the bound is a linear term over integers."""

    term: SetTerm
    bound: LinTerm


@dataclass(frozen=True)
class CardLe:
    """``|term| <= bound``."""

    term: SetTerm
    bound: LinTerm


@dataclass(frozen=True)
class Arith:
    """Embeds a pure arithmetic formula into the constraint language."""

    formula: QfpaFormula


@dataclass(frozen=True)
class BapaAnd:
    args: tuple["BapaFormula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty conjunction")


@dataclass(frozen=True)
class BapaOr:
    args: tuple["BapaFormula", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("empty disjunction")


@dataclass(frozen=True)
class BapaNot:
    """Negation node.

    Only negations of pure arithmetic survive validation; the parser folds
    those into the embedded formula, so a ``BapaNot`` in a parsed tree
    always marks a polarity violation.
    """

    arg: "BapaFormula"


BapaFormula = Union[Subset, SetEq, CardEq, CardLe, Arith, BapaAnd, BapaOr, BapaNot]


# ---------------------------------------------------------------------------
# Problems and models


@dataclass(frozen=True)
class SetInterpretation:
    """Pointwise definition ``set_var = {n | guard(cells at n)}``.

    The guard's variables are array names, read as "the value of that
    array at the index under consideration".
    """

    set_var: str
    guard: QfpaFormula


@dataclass(frozen=True)
class SumSpec:
    """Componentwise guarded sum ``sum_var = sum of array(n) where guard``.

    All targets share the one guard.  Each array may be targeted at most
    once; each sum variable may be bound at most once.
    """

    targets: tuple[tuple[str, str], ...]
    guard: QfpaFormula = TRUE

    def __post_init__(self):
        arrays = [a for _, a in self.targets]
        if len(set(arrays)) != len(arrays):
            raise ValueError("array targeted twice in one sum")
        svars = [s for s, _ in self.targets]
        if len(set(svars)) != len(svars):
            raise ValueError("sum variable bound twice")


@dataclass(frozen=True)
class FragmentProblem:
    """A complete input problem.

    ``bapa`` is ``None`` for an empty constraint part (trivially true).
    ``sum_spec`` is ``None`` when the problem has no summation constraint.
    """

    arrays: tuple[str, ...] = ()
    sets: tuple[str, ...] = ()
    ints: tuple[str, ...] = ()
    bapa: Optional[BapaFormula] = None
    interps: tuple[SetInterpretation, ...] = ()
    sum_spec: Optional[SumSpec] = None


@dataclass(frozen=True)
class ValidatedProblem:
    """Wrapper certifying that ``problem`` passed ``validate_fragment``."""

    problem: FragmentProblem


@dataclass(frozen=True)
class Model:
    """Finite description of a candidate model.

    Arrays are stored as finite prefixes; every position past the stored
    prefix holds 0.  ``sets`` is display-only and always recomputed from
    the interpretations during checking.
    """

    arrays: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    ints: Mapping[str, int] = field(default_factory=dict)
    sets: Mapping[str, tuple[tuple[int, ...], bool]] = field(default_factory=dict)
