"""Linear terms, atoms, and the disjunctive normal form."""

import random

import pytest

from conftest import rand_qf
from sumstar.ast import (
    EQ,
    GE,
    LE,
    MOD,
    NEQ,
    And,
    Atom,
    LinTerm,
    Not,
    Or,
    QfpaAtom,
    TRUE,
    FALSE,
    atom,
    conj,
    const_term,
    disj,
    linterm,
    var_term,
)
from sumstar.errors import MissingBinding, SizeLimitExceeded
from sumstar.semantics import eval_dnf, eval_qfpa, to_dnf


def test_linterm_canonical():
    t = linterm(3, {"b": 2, "a": 1, "z": 0})
    assert t.coeffs == (("a", 1), ("b", 2))
    assert t.const == 3
    assert t == linterm(3, {"a": 1, "b": 2})


def test_linterm_rejects_noncanonical():
    with pytest.raises(ValueError):
        LinTerm(0, (("b", 1), ("a", 1)))
    with pytest.raises(ValueError):
        LinTerm(0, (("a", 0),))
    with pytest.raises(ValueError):
        LinTerm(0, (("a", 1), ("a", 2)))


def test_linterm_arithmetic():
    t = linterm(1, {"x": 2}).plus(linterm(4, {"x": 1, "y": 3}))
    assert t == linterm(5, {"x": 3, "y": 3})
    assert t.scaled(2) == linterm(10, {"x": 6, "y": 6})
    assert t.scaled(0) == const_term(0)
    assert linterm(2, {"x": 1}).plus(linterm(0, {"x": -1})) == const_term(2)
    assert t.shift(-5).const == 0


def test_linterm_eval():
    t = linterm(1, {"x": 2, "y": 1})
    assert t.value({"x": 3, "y": 4}) == 11
    with pytest.raises(MissingBinding):
        t.value({"x": 3})


def test_atom_invariants():
    with pytest.raises(ValueError):
        QfpaAtom(MOD, const_term(0), const_term(0), 1)
    with pytest.raises(ValueError):
        QfpaAtom(MOD, const_term(0), const_term(0), None)
    with pytest.raises(ValueError):
        QfpaAtom(EQ, const_term(0), const_term(0), 2)
    with pytest.raises(ValueError):
        QfpaAtom("==", const_term(0), const_term(0))


def test_mod_semantics():
    a = QfpaAtom(MOD, var_term("x"), const_term(1), 3)
    assert a.holds({"x": 4})
    assert not a.holds({"x": 5})


def test_connective_helpers():
    x = atom(EQ, var_term("x"), const_term(1))
    y = atom(EQ, var_term("y"), const_term(2))
    assert conj() == TRUE
    assert conj(x) == x
    assert conj(x, TRUE, y) == And((x, y))
    assert conj(conj(x, y), x) == And((x, y, x))
    assert disj() == FALSE
    assert disj(x, FALSE) == x


def test_dnf_negated_le_shifts():
    f = Not(atom(LE, var_term("x"), const_term(3)))
    cubes = to_dnf(f)
    assert cubes == [(QfpaAtom(GE, var_term("x"), const_term(4)),)]


def test_dnf_negated_eq_splits():
    f = Not(atom(EQ, var_term("x"), var_term("y")))
    cubes = to_dnf(f)
    assert len(cubes) == 2
    kinds = {c[0].kind for c in cubes}
    assert kinds == {"<", ">="}


def test_dnf_negated_mod_splits_residues():
    f = Not(Atom(QfpaAtom(MOD, var_term("x"), const_term(0), 4)))
    cubes = to_dnf(f)
    assert len(cubes) == 3
    shifts = sorted(c[0].rhs.const for c in cubes)
    assert shifts == [1, 2, 3]
    for v in range(9):
        assert eval_dnf(cubes, {"x": v}) == (v % 4 != 0)


def test_dnf_positive_disequality_splits():
    f = Atom(QfpaAtom(NEQ, var_term("x"), const_term(2)))
    cubes = to_dnf(f)
    assert len(cubes) == 2
    for v in range(6):
        assert eval_dnf(cubes, {"x": v}) == (v != 2)


def test_dnf_cap():
    x = var_term("x")
    pair = disj(atom(EQ, x, const_term(0)), atom(EQ, x, const_term(1)))
    wide = And(tuple([pair] * 5))
    with pytest.raises(SizeLimitExceeded):
        to_dnf(wide, max_cubes=20)
    assert len(to_dnf(wide, max_cubes=40)) <= 32


def test_dnf_no_negations_or_disequalities_remain():
    rng = random.Random(7)
    names = ("x", "y", "z")
    for _ in range(100):
        f = rand_qf(rng, names)
        for cube in to_dnf(f, max_cubes=4000):
            for a in cube:
                assert a.kind != NEQ


def test_dnf_equivalence_corpus():
    """DNF agrees with direct evaluation on 200 formulas, values up to 6."""

    rng = random.Random(20260822)
    names = ("x", "y", "z")
    checked = 0
    for _ in range(200):
        f = rand_qf(rng, names)
        try:
            cubes = to_dnf(f, max_cubes=4000)
        except SizeLimitExceeded:
            continue
        for x in range(7):
            for y in range(7):
                for z in range(7):
                    env = {"x": x, "y": y, "z": z}
                    assert eval_dnf(cubes, env) == eval_qfpa(f, env)
        checked += 1
    assert checked >= 190


def test_eval_connectives():
    x1 = atom(EQ, var_term("x"), const_term(1))
    y2 = atom(EQ, var_term("y"), const_term(2))
    env = {"x": 1, "y": 3}
    assert eval_qfpa(And((x1, Not(y2))), env)
    assert not eval_qfpa(And((x1, y2)), env)
    assert eval_qfpa(Or((y2, x1)), env)
