"""Committed corpus of quantifier-free arithmetic formulas, arity <= 3.

Each entry is ``(label, variable order, formula)``.  The corpus is the
fixed input of the generator-form equivalence gate: membership in the
computed generator representation must match direct evaluation on every
point of the standard box.  Entries cover every atom kind, both
polarities, nesting, coefficient signs, unused variables, and constant
truth values; labels are unique so failures name their formula.
"""

from sumstar.ast import (
    EQ,
    FALSE,
    GE,
    GT,
    LE,
    LT,
    MOD,
    NEQ,
    TRUE,
    Not,
    atom,
    conj,
    const_term,
    disj,
    linterm,
    var_term,
)

x, y, z = var_term("x"), var_term("y"), var_term("z")


def _c(v):
    return const_term(v)


FORMULAS = [
    # --- arity 1: single atoms of every kind -------------------------
    ("eq-const", ("x",), atom(EQ, x, _c(4))),
    ("neq-const", ("x",), atom(NEQ, x, _c(3))),
    ("ge-const", ("x",), atom(GE, x, _c(5))),
    ("gt-const", ("x",), atom(GT, x, _c(6))),
    ("le-const", ("x",), atom(LE, x, _c(2))),
    ("lt-const", ("x",), atom(LT, x, _c(1))),
    ("mod-2", ("x",), atom(MOD, x, _c(0), 2)),
    ("mod-3-shift", ("x",), atom(MOD, x, _c(2), 3)),
    ("mod-5-of-2x", ("x",), atom(MOD, linterm(0, {"x": 2}), _c(1), 5)),
    ("mod-offset-term", ("x",), atom(MOD, linterm(1, {"x": 3}), _c(0), 4)),
    ("scaled-eq", ("x",), atom(EQ, linterm(0, {"x": 3}), _c(12))),
    ("scaled-eq-miss", ("x",), atom(EQ, linterm(0, {"x": 3}), _c(10))),
    ("negated-ge", ("x",), Not(atom(GE, x, _c(4)))),
    ("double-negation", ("x",), Not(Not(atom(LE, x, _c(5))))),
    ("band", ("x",), conj(atom(GE, x, _c(2)), atom(LE, x, _c(6)))),
    ("split", ("x",), disj(atom(LT, x, _c(2)), atom(GT, x, _c(7)))),
    ("always", ("x",), TRUE),
    ("never", ("x",), FALSE),
    ("even-or-big", ("x",), disj(atom(MOD, x, _c(0), 2), atom(GE, x, _c(7)))),
    ("units-digit", ("x",), atom(MOD, x, _c(3), 10)),
    # --- arity 2 -----------------------------------------------------
    ("diagonal", ("x", "y"), atom(EQ, x, y)),
    ("off-diagonal", ("x", "y"), atom(NEQ, x, y)),
    ("above-line", ("x", "y"), atom(GE, y, x)),
    ("strict-above", ("x", "y"), atom(GT, y, x)),
    ("sum-caps", ("x", "y"), atom(LE, linterm(0, {"x": 1, "y": 1}), _c(8))),
    ("sum-exact", ("x", "y"), atom(EQ, linterm(0, {"x": 1, "y": 1}), _c(7))),
    ("weighted-sum", ("x", "y"), atom(EQ, linterm(0, {"x": 2, "y": 3}), _c(12))),
    ("difference-band", ("x", "y"), conj(
        atom(GE, linterm(0, {"x": 1, "y": -1}), _c(1)),
        atom(LE, linterm(0, {"x": 1, "y": -1}), _c(3)),
    )),
    ("negative-coeff-ge", ("x", "y"), atom(GE, linterm(5, {"x": -1, "y": 2}), _c(4))),
    ("parity-pair", ("x", "y"), conj(
        atom(MOD, x, _c(0), 2), atom(MOD, y, _c(1), 2),
    )),
    ("congruent-mod-3", ("x", "y"), atom(MOD, linterm(0, {"x": 1, "y": -1}), _c(0), 3)),
    ("doubling", ("x", "y"), atom(EQ, linterm(0, {"x": 2, "y": -1}), _c(0))),
    ("near-doubling", ("x", "y"), conj(
        atom(GE, linterm(0, {"y": 1, "x": -2}), _c(0)),
        atom(LE, linterm(0, {"y": 1, "x": -2}), _c(1)),
    )),
    ("xor-quadrant", ("x", "y"), disj(
        conj(atom(LE, x, _c(3)), atom(GE, y, _c(5))),
        conj(atom(GE, x, _c(5)), atom(LE, y, _c(3))),
    )),
    ("implication-shape", ("x", "y"), disj(Not(atom(GE, x, _c(4))), atom(GE, y, _c(4)))),
    ("negated-conj", ("x", "y"), Not(conj(atom(GE, x, _c(2)), atom(GE, y, _c(2))))),
    ("negated-disj", ("x", "y"), Not(disj(atom(LT, x, _c(1)), atom(LT, y, _c(1))))),
    ("ignores-second", ("x", "y"), atom(EQ, x, _c(5))),
    ("mod-and-cap", ("x", "y"), conj(
        atom(MOD, linterm(0, {"x": 1, "y": 1}), _c(0), 3),
        atom(LT, linterm(0, {"x": 1, "y": 1}), _c(9)),
    )),
    ("three-cell-union", ("x", "y"), disj(
        conj(atom(EQ, x, _c(0)), atom(EQ, y, _c(0))),
        conj(atom(EQ, x, _c(4)), atom(EQ, y, _c(4))),
        conj(atom(EQ, x, _c(8)), atom(EQ, y, _c(8))),
    )),
    ("lattice-strip", ("x", "y"), conj(
        atom(MOD, x, _c(1), 4), atom(NEQ, y, _c(2)),
    )),
    # --- arity 3 -----------------------------------------------------
    ("plane", ("x", "y", "z"), atom(EQ, linterm(0, {"x": 1, "y": 1, "z": 1}), _c(9))),
    ("halfspace", ("x", "y", "z"), atom(GE, linterm(0, {"x": 1, "y": 2, "z": 3}), _c(10))),
    ("chain", ("x", "y", "z"), conj(atom(LE, x, y), atom(LE, y, z))),
    ("strict-chain", ("x", "y", "z"), conj(atom(LT, x, y), atom(LT, y, z))),
    ("sum-pair-eq-third", ("x", "y", "z"), atom(EQ, linterm(0, {"x": 1, "y": 1, "z": -1}), _c(0))),
    ("mixed-signs", ("x", "y", "z"), atom(LE, linterm(2, {"x": 2, "y": -3, "z": 1}), _c(4))),
    ("triangle-band", ("x", "y", "z"), conj(
        atom(GE, linterm(0, {"x": 1, "y": 1, "z": -1}), _c(0)),
        atom(LE, linterm(0, {"x": 1, "y": -1, "z": -1}), _c(0)),
    )),
    ("mod-sum-3", ("x", "y", "z"), atom(MOD, linterm(0, {"x": 1, "y": 1, "z": 1}), _c(0), 3)),
    ("any-equal-pair", ("x", "y", "z"), disj(
        atom(EQ, x, y), atom(EQ, y, z), atom(EQ, x, z),
    )),
    ("all-distinct", ("x", "y", "z"), conj(
        atom(NEQ, x, y), atom(NEQ, y, z), atom(NEQ, x, z),
    )),
    ("middle-unused", ("x", "y", "z"), conj(atom(GE, x, _c(3)), atom(LE, z, _c(5)))),
    ("guarded-mod-mix", ("x", "y", "z"), disj(
        conj(atom(MOD, x, _c(0), 2), atom(GT, y, z)),
        conj(atom(MOD, x, _c(1), 2), atom(LE, y, z)),
    )),
    ("nested-negation", ("x", "y", "z"), Not(disj(
        conj(atom(GE, x, _c(5)), atom(GE, y, _c(5))),
        atom(GT, z, _c(6)),
    ))),
    ("affine-offset", ("x", "y", "z"), atom(EQ, linterm(3, {"x": 1, "y": -1, "z": 2}), _c(7))),
    ("cube-corner", ("x", "y", "z"), conj(
        atom(LE, x, _c(1)), atom(LE, y, _c(1)), atom(LE, z, _c(1)),
    )),
    ("shell", ("x", "y", "z"), conj(
        atom(GE, linterm(0, {"x": 1, "y": 1, "z": 1}), _c(6)),
        atom(LE, linterm(0, {"x": 1, "y": 1, "z": 1}), _c(12)),
        atom(MOD, linterm(0, {"x": 1, "z": 1}), _c(1), 2),
    )),
]
