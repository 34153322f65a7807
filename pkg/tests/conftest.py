"""Shared seeded generators for structural tests.

These build random-but-reproducible syntax trees.  Printable trees stay
inside the concrete grammar (no disequality atoms, non-negative
constants); general trees may use the full abstract syntax.
"""

from __future__ import annotations

import random

import pytest

from sumstar.ast import (
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
    QfpaAtom,
    linterm,
)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_ledger() -> list[str]:
    """Collector for the one-line verdicts of the acceptance gates;
    everything appended is echoed after the run."""

    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rand_linterm(rng: random.Random, names: tuple[str, ...]) -> LinTerm:
    coeffs = {}
    for name in rng.sample(names, rng.randint(0, min(2, len(names)))):
        coeffs[name] = rng.randint(1, 3)
    return linterm(rng.randint(0, 4), coeffs)


def rand_atom(rng: random.Random, names: tuple[str, ...], printable: bool) -> Atom:
    kinds = [EQ, LE, LT, GE, GT, MOD] + ([] if printable else [NEQ])
    kind = rng.choice(kinds)
    lhs = rand_linterm(rng, names)
    rhs = rand_linterm(rng, names)
    if kind == MOD:
        return Atom(QfpaAtom(MOD, lhs, rhs, rng.randint(2, 4)))
    return Atom(QfpaAtom(kind, lhs, rhs))


def rand_qf(rng: random.Random, names: tuple[str, ...], depth: int = 3, printable: bool = False):
    if depth == 0 or rng.random() < 0.45:
        return rand_atom(rng, names, printable)
    roll = rng.random()
    if roll < 0.25:
        return Not(rand_qf(rng, names, depth - 1, printable))
    parts = tuple(
        rand_qf(rng, names, depth - 1, printable) for _ in range(rng.randint(2, 3))
    )
    return And(parts) if roll < 0.65 else Or(parts)
