"""Concrete syntax: problems, models, and certificates.

One document is a sequence of declarations followed by constraints::

    (declare-array c)
    (declare-set S1)
    (declare-int s)
    (interp S1 (>= c 2))
    (sum ((s c)) (>= c 1))
    (bapa (and (= s 5) (card= S1 2)))

Identifiers must be declared before use.  ``parse_problem`` and
``print_problem`` are inverse up to canonical form: printing then
parsing is the identity on syntax trees, and parsing then printing is
the identity on printed documents.
"""

from __future__ import annotations

import hashlib

from .ast import (
    EMPTY,
    EQ,
    FULL,
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
    const_term,
)
from .errors import DimensionMismatch, DuplicateDeclaration, ParseError
from .sexpr import Num, SList, SNode, Sym, read_all

_RESERVED = {
    "declare-array",
    "declare-set",
    "declare-int",
    "interp",
    "sum",
    "bapa",
    "and",
    "or",
    "not",
    "mod",
    "union",
    "inter",
    "compl",
    "subset",
    "card=",
    "card<=",
    "empty",
    "full",
    "model",
    "certificate",
}

_COMPARE = {"=": EQ, "<=": LE, "<": LT, ">=": GE, ">": GT}


def _err(node: SNode, message: str) -> ParseError:
    return ParseError(message, node.line, node.col)


def _head(node: SNode) -> str | None:
    if isinstance(node, SList) and node.items and isinstance(node.items[0], Sym):
        return node.items[0].text
    return None


class _Tables:
    def __init__(self):
        self.arrays: list[str] = []
        self.sets: list[str] = []
        self.ints: list[str] = []
        self.sort: dict[str, str] = {}

    def declare(self, node: Sym, sort: str) -> None:
        name = node.text
        if not name[0].isalpha():
            raise _err(node, f"identifier {name!r} must start with a letter")
        if name in _RESERVED:
            raise _err(node, f"{name!r} is a reserved word")
        if name in self.sort:
            raise DuplicateDeclaration(
                f"'{name}' already declared as {self.sort[name]}", node.line, node.col
            )
        self.sort[name] = sort
        {"array": self.arrays, "set": self.sets, "int": self.ints}[sort].append(name)


def _parse_term(node: SNode, tables: _Tables) -> LinTerm:
    if isinstance(node, Num):
        return const_term(node.value)
    if isinstance(node, Sym):
        sort = tables.sort.get(node.text)
        if sort is None:
            raise _err(node, f"undeclared identifier '{node.text}'")
        if sort == "set":
            raise _err(node, f"'{node.text}' is a set, expected an integer or array")
        return LinTerm(0, ((node.text, 1),))
    head = _head(node)
    if head == "+":
        if len(node.items) < 2:
            raise _err(node, "(+ ...) needs at least one argument")
        total = const_term(0)
        for item in node.items[1:]:
            total = total.plus(_parse_term(item, tables))
        return total
    if head == "*":
        if len(node.items) != 3 or not isinstance(node.items[1], Num):
            raise _err(node, "(* ...) takes a numeral and a term")
        return _parse_term(node.items[2], tables).scaled(node.items[1].value)
    raise _err(node, "expected a term")


def _parse_qf(node: SNode, tables: _Tables) -> QfpaFormula:
    head = _head(node)
    if head in ("and", "or"):
        if len(node.items) < 2:
            raise _err(node, f"({head} ...) needs at least one argument")
        parts = tuple(_parse_qf(item, tables) for item in node.items[1:])
        return And(parts) if head == "and" else Or(parts)
    if head == "not":
        if len(node.items) != 2:
            raise _err(node, "(not ...) takes one argument")
        return Not(_parse_qf(node.items[1], tables))
    return Atom(_parse_atom(node, tables))


def _parse_atom(node: SNode, tables: _Tables) -> QfpaAtom:
    head = _head(node)
    if head in _COMPARE:
        if len(node.items) != 3:
            raise _err(node, f"({head} ...) takes two terms")
        lhs = _parse_term(node.items[1], tables)
        rhs = _parse_term(node.items[2], tables)
        return QfpaAtom(_COMPARE[head], lhs, rhs)
    if head == "mod":
        if len(node.items) != 4 or not isinstance(node.items[3], Num):
            raise _err(node, "(mod ...) takes two terms and a numeral modulus")
        if node.items[3].value < 2:
            raise _err(node.items[3], "modulus must be at least 2")
        lhs = _parse_term(node.items[1], tables)
        rhs = _parse_term(node.items[2], tables)
        return QfpaAtom(MOD, lhs, rhs, node.items[3].value)
    raise _err(node, "expected an atom")


def _is_set_node(node: SNode, tables: _Tables) -> bool:
    if isinstance(node, Sym):
        return node.text in ("empty", "full") or tables.sort.get(node.text) == "set"
    return _head(node) in ("union", "inter", "compl")


def _parse_set_term(node: SNode, tables: _Tables) -> SetTerm:
    if isinstance(node, Sym):
        if node.text == "empty":
            return EMPTY
        if node.text == "full":
            return FULL
        sort = tables.sort.get(node.text)
        if sort is None:
            raise _err(node, f"undeclared identifier '{node.text}'")
        if sort != "set":
            raise _err(node, f"'{node.text}' is {sort}-sorted, expected a set")
        return SetVar(node.text)
    head = _head(node)
    if head in ("union", "inter"):
        if len(node.items) != 3:
            raise _err(node, f"({head} ...) takes two set terms")
        left = _parse_set_term(node.items[1], tables)
        right = _parse_set_term(node.items[2], tables)
        return SetUnion(left, right) if head == "union" else SetInter(left, right)
    if head == "compl":
        if len(node.items) != 2:
            raise _err(node, "(compl ...) takes one set term")
        return SetCompl(_parse_set_term(node.items[1], tables))
    raise _err(node, "expected a set term")


def _parse_bf(node: SNode, tables: _Tables) -> BapaFormula:
    head = _head(node)
    if head in ("and", "or"):
        if len(node.items) < 2:
            raise _err(node, f"({head} ...) needs at least one argument")
        parts = tuple(_parse_bf(item, tables) for item in node.items[1:])
        if all(isinstance(p, Arith) for p in parts):
            inner = tuple(p.formula for p in parts)
            return Arith(And(inner) if head == "and" else Or(inner))
        return BapaAnd(parts) if head == "and" else BapaOr(parts)
    if head == "not":
        if len(node.items) != 2:
            raise _err(node, "(not ...) takes one argument")
        inner = _parse_bf(node.items[1], tables)
        if isinstance(inner, Arith):
            return Arith(Not(inner.formula))
        return BapaNot(inner)
    if head == "subset":
        if len(node.items) != 3:
            raise _err(node, "(subset ...) takes two set terms")
        return Subset(
            _parse_set_term(node.items[1], tables),
            _parse_set_term(node.items[2], tables),
        )
    if head in ("card=", "card<="):
        if len(node.items) != 3:
            raise _err(node, f"({head} ...) takes a set term and a term")
        term = _parse_set_term(node.items[1], tables)
        bound = _parse_term(node.items[2], tables)
        return CardEq(term, bound) if head == "card=" else CardLe(term, bound)
    if head == "=" and len(node.items) == 3:
        left_set = _is_set_node(node.items[1], tables)
        right_set = _is_set_node(node.items[2], tables)
        if left_set and right_set:
            return SetEq(
                _parse_set_term(node.items[1], tables),
                _parse_set_term(node.items[2], tables),
            )
        if left_set or right_set:
            raise _err(node, "(= ...) mixes a set term with an integer term")
    return Arith(_parse_qf(node, tables))


def parse_problem(text: str) -> FragmentProblem:
    """Parse one document; raises ``ParseError`` at the first bad form."""

    tables = _Tables()
    interps: list[SetInterpretation] = []
    bapa_parts: list[BapaFormula] = []
    sum_spec: SumSpec | None = None

    for form in read_all(text):
        head = _head(form)
        if head in ("declare-array", "declare-set", "declare-int"):
            if len(form.items) != 2 or not isinstance(form.items[1], Sym):
                raise _err(form, f"({head} ...) takes one identifier")
            tables.declare(form.items[1], head.removeprefix("declare-"))
        elif head == "interp":
            if len(form.items) != 3 or not isinstance(form.items[1], Sym):
                raise _err(form, "(interp ...) takes a set name and a guard")
            name = form.items[1].text
            if tables.sort.get(name) != "set":
                raise _err(form.items[1], f"'{name}' is not a declared set")
            interps.append(SetInterpretation(name, _parse_qf(form.items[2], tables)))
        elif head == "sum":
            if sum_spec is not None:
                raise DuplicateDeclaration("second (sum ...) form", form.line, form.col)
            if len(form.items) != 3 or not isinstance(form.items[1], SList):
                raise _err(form, "(sum ...) takes a binding list and a guard")
            targets: list[tuple[str, str]] = []
            for binding in form.items[1].items:
                if (
                    not isinstance(binding, SList)
                    or len(binding.items) != 2
                    or not all(isinstance(x, Sym) for x in binding.items)
                ):
                    raise _err(binding, "sum binding must be (int-var array)")
                svar, arr = binding.items[0].text, binding.items[1].text
                if tables.sort.get(svar) != "int":
                    raise _err(binding.items[0], f"'{svar}' is not a declared integer")
                if tables.sort.get(arr) != "array":
                    raise _err(binding.items[1], f"'{arr}' is not a declared array")
                if any(s == svar for s, _ in targets):
                    raise DuplicateDeclaration(
                        f"sum variable '{svar}' bound twice", binding.line, binding.col
                    )
                if any(a == arr for _, a in targets):
                    raise DuplicateDeclaration(
                        f"array '{arr}' targeted twice", binding.line, binding.col
                    )
                targets.append((svar, arr))
            sum_spec = SumSpec(tuple(targets), _parse_qf(form.items[2], tables))
        elif head == "bapa":
            if len(form.items) != 2:
                raise _err(form, "(bapa ...) takes one formula")
            bapa_parts.append(_parse_bf(form.items[1], tables))
        else:
            raise _err(form, "expected a declaration or constraint form")

    if not bapa_parts:
        bapa = None
    elif len(bapa_parts) == 1:
        bapa = bapa_parts[0]
    elif all(isinstance(p, Arith) for p in bapa_parts):
        bapa = Arith(And(tuple(p.formula for p in bapa_parts)))
    else:
        bapa = BapaAnd(tuple(bapa_parts))

    return FragmentProblem(
        arrays=tuple(tables.arrays),
        sets=tuple(tables.sets),
        ints=tuple(tables.ints),
        bapa=bapa,
        interps=tuple(interps),
        sum_spec=sum_spec,
    )


# ---------------------------------------------------------------------------
# Printing


def term_text(t: LinTerm) -> str:
    def product(var: str, coeff: int) -> str:
        if coeff < 0:
            raise ValueError("cannot print a negative coefficient")
        return var if coeff == 1 else f"(* {coeff} {var})"

    if t.const < 0:
        raise ValueError("cannot print a negative constant")
    if not t.coeffs:
        return str(t.const)
    parts = [product(v, c) for v, c in t.coeffs]
    if t.const:
        parts.append(str(t.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def _atom_text(a: QfpaAtom) -> str:
    if a.kind == MOD:
        return f"(mod {term_text(a.lhs)} {term_text(a.rhs)} {a.modulus})"
    if a.kind == NEQ:
        return f"(not (= {term_text(a.lhs)} {term_text(a.rhs)}))"
    return f"({a.kind} {term_text(a.lhs)} {term_text(a.rhs)})"


def qf_text(f: QfpaFormula) -> str:
    if isinstance(f, Atom):
        return _atom_text(f.atom)
    if isinstance(f, Not):
        return f"(not {qf_text(f.arg)})"
    op = "and" if isinstance(f, And) else "or"
    return f"({op} " + " ".join(qf_text(g) for g in f.args) + ")"


def set_text(t: SetTerm) -> str:
    if isinstance(t, SetVar):
        return t.name
    if isinstance(t, EmptySet):
        return "empty"
    if isinstance(t, FullSet):
        return "full"
    if isinstance(t, SetCompl):
        return f"(compl {set_text(t.arg)})"
    op = "union" if isinstance(t, SetUnion) else "inter"
    return f"({op} {set_text(t.left)} {set_text(t.right)})"


def bf_text(f: BapaFormula) -> str:
    if isinstance(f, Arith):
        return qf_text(f.formula)
    if isinstance(f, BapaNot):
        return f"(not {bf_text(f.arg)})"
    if isinstance(f, (BapaAnd, BapaOr)):
        op = "and" if isinstance(f, BapaAnd) else "or"
        return f"({op} " + " ".join(bf_text(g) for g in f.args) + ")"
    if isinstance(f, Subset):
        return f"(subset {set_text(f.left)} {set_text(f.right)})"
    if isinstance(f, SetEq):
        return f"(= {set_text(f.left)} {set_text(f.right)})"
    op = "card=" if isinstance(f, CardEq) else "card<="
    return f"({op} {set_text(f.term)} {term_text(f.bound)})"


def print_problem(p: FragmentProblem) -> str:
    """Canonical textual form; the digest below is taken over this text."""

    lines = []
    for name in p.arrays:
        lines.append(f"(declare-array {name})")
    for name in p.sets:
        lines.append(f"(declare-set {name})")
    for name in p.ints:
        lines.append(f"(declare-int {name})")
    for interp in p.interps:
        lines.append(f"(interp {interp.set_var} {qf_text(interp.guard)})")
    if p.sum_spec is not None:
        bindings = " ".join(f"({s} {a})" for s, a in p.sum_spec.targets)
        lines.append(f"(sum ({bindings}) {qf_text(p.sum_spec.guard)})")
    if p.bapa is not None:
        lines.append(f"(bapa {bf_text(p.bapa)})")
    return "\n".join(lines) + ("\n" if lines else "")


def problem_digest(p: FragmentProblem) -> str:
    """Hex digest of the canonical text; certificates bind to this."""

    return hashlib.sha256(print_problem(p).encode()).hexdigest()


def print_model(p: FragmentProblem, m: Model) -> str:
    from .semantics import set_values

    lines = ["(model"]
    for arr in p.arrays:
        cells = " ".join(str(v) for v in m.arrays.get(arr, ()))
        lines.append(f"  (array {arr} ({cells}))")
    for name in p.ints:
        lines.append(f"  (int {name} {m.ints.get(name, 0)})")
    for name, fc in sorted(set_values(p, m).items()):
        members = " ".join(str(n) for n in sorted(fc.members))
        tail = "all-past-horizon" if fc.tail else "none-past-horizon"
        lines.append(f"  (set {name} ({members}) {tail})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def print_stages(stages) -> str:
    """Readable dump of all three rewriting stages of one problem."""

    s, g, l = stages.sum_form, stages.guarded, stages.liacard
    lines = ["(stage set-free"]
    lines.append(f"  (arrays {' '.join(s.arrays)})")
    lines.append(f"  (ints {' '.join(s.ints)})")
    lines.append(f"  (arith {qf_text(s.psi)})")
    for interp in s.interps:
        lines.append(f"  (always {qf_text(interp.guard)})")
    bindings = " ".join(f"({sv} {a})" for sv, a in s.sum.targets)
    lines.append(f"  (sum ({bindings}) {qf_text(s.sum.guard)}))")

    lines.append("(stage one-guard")
    lines.append(f"  (arrays {' '.join(g.arrays)})")
    lines.append(f"  (ints {' '.join(g.ints)})")
    lines.append(f"  (arith {qf_text(g.psi)})")
    bindings = " ".join(f"({sv} {a})" for sv, a in g.targets)
    lines.append(f"  (sum ({bindings}) {qf_text(g.guard)}))")

    lines.append("(stage star")
    lines.append(f"  (ints {' '.join(l.ints)})")
    lines.append(f"  (arith {qf_text(l.f0)})")
    for a in l.star_atoms:
        lines.append(
            f"  (star-atom (sums {' '.join(a.u)}) (addend {' '.join(a.body_vars)}) "
            f"(count {a.exponent}) (body {qf_text(a.body)}))"
        )
    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Certificates


def _cert_err(node: SNode, message: str) -> ParseError:
    return ParseError(message, node.line, node.col)


def _parse_int(node: SNode) -> int:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym) and node.text.lstrip("-").isdigit():
        return int(node.text)
    raise _cert_err(node, "expected an integer")


def _parse_nat(node: SNode) -> int:
    value = _parse_int(node)
    if value < 0:
        raise _cert_err(node, "expected a natural number")
    return value


def _parse_vector(node: SNode, arity: int | None, what: str) -> tuple[int, ...]:
    if not isinstance(node, SList):
        raise _cert_err(node, f"expected a parenthesized {what}")
    vec = tuple(_parse_int(item) for item in node.items)
    if arity is not None and len(vec) != arity:
        raise DimensionMismatch(
            f"{what} has {len(vec)} components where {arity} are declared",
            node.line,
            node.col,
        )
    return vec


def _parse_sys(node: SNode):
    from .semilinear import NatSystem

    if _head(node) != "sys" or len(node.items) < 2:
        raise _cert_err(node, "expected (sys N rows...)")
    n = _parse_nat(node.items[1])
    eq, le = [], []
    for row in node.items[2:]:
        head = _head(row)
        if head not in ("eq", "le") or len(row.items) != 3:
            raise _cert_err(row, "expected (eq (coeffs) rhs) or (le (coeffs) rhs)")
        coeffs = _parse_vector(row.items[1], None, "coefficient row")
        if len(coeffs) != n:
            raise DimensionMismatch(
                f"row has {len(coeffs)} coefficients where {n} are declared",
                row.line,
                row.col,
            )
        rhs = _parse_int(row.items[2])
        (eq if head == "eq" else le).append((coeffs, rhs))
    return NatSystem(n, tuple(eq), tuple(le))


def _sys_text(sys) -> str:
    rows = []
    for coeffs, rhs in sys.eq:
        rows.append(f"(eq ({' '.join(map(str, coeffs))}) {rhs})")
    for coeffs, rhs in sys.le:
        rows.append(f"(le ({' '.join(map(str, coeffs))}) {rhs})")
    body = (" " + " ".join(rows)) if rows else ""
    return f"(sys {sys.n}{body})"


def _atom_sections(node: SNode, section: str) -> dict[int, SList]:
    """The (atom IDX ...) children of a section, keyed by index."""

    out: dict[int, SList] = {}
    for form in node.items[1:]:
        if _head(form) != "atom" or len(form.items) < 2:
            raise _cert_err(form, f"expected (atom IDX ...) inside ({section} ...)")
        idx = _parse_nat(form.items[1])
        if idx in out:
            raise _cert_err(form, f"atom {idx} listed twice in ({section} ...)")
        out[idx] = form
    return out


def parse_certificate(text: str):
    """Certificate from its textual form.

    Raises :class:`ParseError` on malformed documents and
    :class:`DimensionMismatch` when vector arities disagree within an
    atom's section entries.
    """

    from .certificate import AtomCertificate, CertPick, Certificate

    forms = read_all(text)
    if len(forms) != 1 or _head(forms[0]) != "certificate":
        raise ParseError("expected a single (certificate ...) document", 1, 1)
    top = forms[0]

    digest = ""
    f0_cube: int | None = None
    f0_rows = None
    disjuncts = bases = periods = None
    assignment: list[tuple[str, int]] = []
    for form in top.items[1:]:
        head = _head(form)
        if head == "digest":
            if len(form.items) != 2 or not isinstance(form.items[1], Sym):
                raise _cert_err(form, "(digest ...) takes one token")
            token = form.items[1].text
            if token == "none":
                digest = ""
            elif token.startswith("sha256-"):
                digest = token[len("sha256-") :]
            else:
                raise _cert_err(form.items[1], "digest must be sha256-HEX or none")
        elif head == "disjuncts":
            disjuncts = form
        elif head == "bases":
            bases = form
        elif head == "periods":
            periods = form
        elif head == "assignment":
            seen: set[str] = set()
            for binding in form.items[1:]:
                if (
                    _head(binding) != "="
                    or len(binding.items) != 3
                    or not isinstance(binding.items[1], Sym)
                ):
                    raise _cert_err(binding, "expected (= name value)")
                name = binding.items[1].text
                if name in seen:
                    raise _cert_err(binding, f"'{name}' bound twice")
                seen.add(name)
                assignment.append((name, _parse_nat(binding.items[2])))
        else:
            raise _cert_err(form, "unknown certificate section")
    if disjuncts is None or bases is None or periods is None:
        raise ParseError(
            "certificate needs disjuncts, bases, and periods sections", top.line, top.col
        )

    atom_rows: dict[int, SList] = {}
    for form in disjuncts.items[1:]:
        head = _head(form)
        if head == "f0":
            if f0_cube is not None:
                raise _cert_err(form, "duplicate (f0 ...) entry")
            if len(form.items) not in (2, 3):
                raise _cert_err(form, "expected (f0 IDX) or (f0 IDX (sys ...))")
            f0_cube = _parse_nat(form.items[1])
            if len(form.items) == 3:
                f0_rows = _parse_sys(form.items[2])
        elif head == "atom":
            if len(form.items) < 2:
                raise _cert_err(form, "expected (atom IDX ...)")
            idx = _parse_nat(form.items[1])
            if idx in atom_rows:
                raise _cert_err(form, f"atom {idx} listed twice in (disjuncts ...)")
            atom_rows[idx] = form
        else:
            raise _cert_err(form, "expected (f0 ...) or (atom ...)")
    if f0_cube is None:
        raise ParseError("certificate lacks the (f0 ...) entry", top.line, top.col)

    base_atoms = _atom_sections(bases, "bases")
    period_atoms = _atom_sections(periods, "periods")
    indices = sorted(atom_rows)
    if sorted(base_atoms) != indices or sorted(period_atoms) != indices:
        raise ParseError(
            "disjuncts, bases, and periods must list the same atoms", top.line, top.col
        )

    atoms = []
    for idx in indices:
        arity: int | None = None
        cube_rows = []
        for form in atom_rows[idx].items[2:]:
            if _head(form) != "cube" or len(form.items) != 3:
                raise _cert_err(form, "expected (cube IDX (sys ...))")
            cube_rows.append((_parse_nat(form.items[1]), _parse_sys(form.items[2])))
        picks = []
        for form in base_atoms[idx].items[2:]:
            if _head(form) != "base" or len(form.items) != 4:
                raise _cert_err(form, "expected (base CUBE INDEX (vector))")
            vec = _parse_vector(form.items[3], arity, "base vector")
            arity = len(vec)
            picks.append(
                CertPick(_parse_nat(form.items[1]), _parse_nat(form.items[2]), vec)
            )
        period_list = []
        for form in period_atoms[idx].items[2:]:
            if _head(form) != "period" or len(form.items) != 4:
                raise _cert_err(form, "expected (period CUBE INDEX (vector))")
            vec = _parse_vector(form.items[3], arity, "period vector")
            arity = len(vec)
            period_list.append(
                (_parse_nat(form.items[1]), _parse_nat(form.items[2]), vec)
            )
        atoms.append(
            AtomCertificate(idx, tuple(picks), tuple(period_list), tuple(cube_rows))
        )

    return Certificate(
        digest=digest,
        f0_cube=f0_cube,
        atoms=tuple(atoms),
        assignment=tuple(assignment),
        f0_rows=f0_rows,
    )


def print_certificate(c) -> str:
    """Canonical textual form; inverse of :func:`parse_certificate`."""

    token = f"sha256-{c.digest}" if c.digest else "none"
    lines = ["(certificate", f"  (digest {token})"]

    lines.append("  (disjuncts")
    f0 = f"    (f0 {c.f0_cube}"
    if c.f0_rows is not None:
        f0 += f" {_sys_text(c.f0_rows)}"
    lines.append(f0 + ")")
    for ac in c.atoms:
        if not ac.cube_rows:
            lines.append(f"    (atom {ac.atom_index})")
            continue
        lines.append(f"    (atom {ac.atom_index}")
        for ci, sys in ac.cube_rows:
            lines.append(f"      (cube {ci} {_sys_text(sys)})")
        lines[-1] += ")"
    lines[-1] += ")"

    lines.append("  (bases")
    for ac in c.atoms:
        if not ac.picks:
            lines.append(f"    (atom {ac.atom_index})")
            continue
        lines.append(f"    (atom {ac.atom_index}")
        for pk in ac.picks:
            vec = " ".join(map(str, pk.base))
            lines.append(f"      (base {pk.cube_index} {pk.base_index} ({vec}))")
        lines[-1] += ")"
    lines[-1] += ")"

    lines.append("  (periods")
    for ac in c.atoms:
        if not ac.periods:
            lines.append(f"    (atom {ac.atom_index})")
            continue
        lines.append(f"    (atom {ac.atom_index}")
        for ci, pi, vec in ac.periods:
            cells = " ".join(map(str, vec))
            lines.append(f"      (period {ci} {pi} ({cells}))")
        lines[-1] += ")"
    lines[-1] += ")"

    lines.append("  (assignment")
    for name, val in c.assignment:
        lines.append(f"    (= {name} {val})")
    lines[-1] += "))"
    return "\n".join(lines) + "\n"
