"""Elimination-based integer feasibility against literal enumeration."""

import random
from itertools import product

import pytest

from sumstar.errors import ResourceLimit
from sumstar.omega import box_feasible, int_feasible
from sumstar.semilinear import NatSystem, ilp_feasible


def enumerated(sys: NatSystem, high: int) -> bool:
    for x in product(range(high + 1), repeat=sys.n):
        if sys.check(x):
            return True
    return False


def random_system(rng: random.Random) -> NatSystem:
    n = rng.randint(1, 3)
    eqs, les = [], []
    for _ in range(rng.randint(1, 3)):
        row = (tuple(rng.randint(-3, 3) for _ in range(n)), rng.randint(-4, 4))
        (eqs if rng.random() < 0.5 else les).append(row)
    return NatSystem(n, eq=tuple(eqs), le=tuple(les))


def test_tight_band_with_no_integer_point():
    # 7 <= 3x <= 8 has rational but no integer solutions
    assert not int_feasible([], [((3,), 8), ((-3,), -7)], 1)
    assert int_feasible([], [((3,), 7), ((-3,), -5)], 1)


def test_parity_contradiction():
    assert not int_feasible([((2, -2), 1)], [], 2)


def test_gcd_free_equality_solved_over_integers_but_not_naturals():
    # 3x + 5y = 1 needs a negative coordinate
    assert int_feasible([((3, 5), 1)], [], 2)
    assert not box_feasible(NatSystem(2, eq=(((3, 5), 1),)), 100)


def test_no_unit_coefficient_equality():
    sys = NatSystem(2, eq=(((3, 5), 22),))
    assert box_feasible(sys, 10)
    assert enumerated(sys, 10)


def test_one_sided_variables_are_free():
    # x <= -5 alone is satisfiable over the integers
    assert int_feasible([], [((1,), -5)], 1)
    # and so is an unconstrained system
    assert int_feasible([], [], 3)


def test_numeric_contradiction_rows():
    assert not int_feasible([], [((0, 0), -1)], 2)
    assert not int_feasible([((0,), 3)], [], 1)


def test_negative_box_is_empty():
    assert not box_feasible(NatSystem(1, eq=(((1,), 0),)), -1)


def test_box_matches_enumeration_on_random_systems():
    rng = random.Random(2718)
    for _ in range(1500):
        sys = random_system(rng)
        high = rng.randint(0, 6)
        assert box_feasible(sys, high) == enumerated(sys, high)


def test_box_at_model_bound_matches_branch_and_bound():
    rng = random.Random(1618)
    for _ in range(150):
        sys = random_system(rng)
        found = ilp_feasible(sys) is not None
        assert box_feasible(sys, sys.small_model_bound()) == found


def test_fuel_exhaustion_raises():
    sys = NatSystem(3, le=(((1, 1, 1), 30),))
    with pytest.raises(ResourceLimit):
        box_feasible(sys, 30, fuel=3)
