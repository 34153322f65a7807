"""Flat postfix programs for fast repeated formula evaluation.

A compiled program is a sequence of ``(op, arg)`` pairs executed on an
integer stack.  Comparisons push 0 or 1, so boolean connectives are
plain integer operations.  Both kernel backends (the compiled extension
and its pure-Python twin) execute exactly this encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    EQ,
    GE,
    GT,
    LE,
    LT,
    MOD,
    NEQ,
    And,
    Atom,
    LinTerm,
    Not,
    Or,
    QfpaFormula,
)

OP_CONST = 0  # push arg
OP_VAR = 1  # push env[arg]
OP_ADD = 2  # pop b, a; push a + b
OP_MULC = 3  # pop a; push a * arg
OP_EQ = 4
OP_LE = 5
OP_LT = 6
OP_GE = 7
OP_GT = 8
OP_MOD = 9  # pop b, a; push 1 if (a - b) % arg == 0
OP_NOT = 10
OP_AND = 11
OP_OR = 12


@dataclass(frozen=True)
class Program:
    """Compiled formula over a fixed variable order."""

    code: tuple[tuple[int, int], ...]
    var_names: tuple[str, ...]


def _emit_term(t: LinTerm, index: dict[str, int], code: list[tuple[int, int]]) -> None:
    code.append((OP_CONST, t.const))
    for var, coeff in t.coeffs:
        code.append((OP_VAR, index[var]))
        if coeff != 1:
            code.append((OP_MULC, coeff))
        code.append((OP_ADD, 0))


def _emit(f: QfpaFormula, index: dict[str, int], code: list[tuple[int, int]]) -> None:
    if isinstance(f, Atom):
        a = f.atom
        _emit_term(a.lhs, index, code)
        _emit_term(a.rhs, index, code)
        if a.kind == EQ:
            code.append((OP_EQ, 0))
        elif a.kind == NEQ:
            code.append((OP_EQ, 0))
            code.append((OP_NOT, 0))
        elif a.kind == LE:
            code.append((OP_LE, 0))
        elif a.kind == LT:
            code.append((OP_LT, 0))
        elif a.kind == GE:
            code.append((OP_GE, 0))
        elif a.kind == GT:
            code.append((OP_GT, 0))
        else:
            code.append((OP_MOD, a.modulus))
    elif isinstance(f, Not):
        _emit(f.arg, index, code)
        code.append((OP_NOT, 0))
    elif isinstance(f, And):
        _emit(f.args[0], index, code)
        for g in f.args[1:]:
            _emit(g, index, code)
            code.append((OP_AND, 0))
    elif isinstance(f, Or):
        _emit(f.args[0], index, code)
        for g in f.args[1:]:
            _emit(g, index, code)
            code.append((OP_OR, 0))
    else:
        raise TypeError(f"cannot compile {type(f).__name__}")


def compile_formula(f: QfpaFormula, var_order: tuple[str, ...]) -> Program:
    """Compile ``f`` against a fixed variable order.

    Every variable of ``f`` must appear in ``var_order``; extra names in
    the order are allowed (they become unused slots).
    """

    index = {name: i for i, name in enumerate(var_order)}
    code: list[tuple[int, int]] = []
    _emit(f, index, code)
    return Program(tuple(code), tuple(var_order))


def stack_need(program: Program) -> int:
    """Maximum stack depth the program can reach."""

    depth = peak = 0
    for op, _ in program.code:
        if op in (OP_CONST, OP_VAR):
            depth += 1
        elif op in (OP_ADD, OP_EQ, OP_LE, OP_LT, OP_GE, OP_GT, OP_MOD, OP_AND, OP_OR):
            depth -= 1
        peak = max(peak, depth)
    return peak


def value_bound(program: Program, highs: list[int]) -> int:
    """Conservative bound on the absolute value of any intermediate.

    Used to decide whether fixed-width kernel arithmetic is safe for a
    given search box.
    """

    stack: list[int] = []
    worst = 0
    for op, arg in program.code:
        if op == OP_CONST:
            stack.append(abs(arg))
        elif op == OP_VAR:
            stack.append(abs(highs[arg]))
        elif op == OP_ADD:
            b = stack.pop()
            a = stack.pop()
            stack.append(a + b)
        elif op == OP_MULC:
            stack.append(stack.pop() * abs(arg))
        elif op == OP_MOD:
            stack.pop()
            stack.pop()
            stack.append(1)
        else:
            for _ in range(1 if op == OP_NOT else 2):
                stack.pop()
            stack.append(1)
        worst = max(worst, stack[-1])
    return worst
