"""Bounded enumeration, the random problem generator, and the
differential harness."""

from types import SimpleNamespace

import pytest

from sumstar.ast import FragmentProblem
from sumstar.errors import ResourceLimit
from sumstar.frontend import parse_problem
from sumstar.oracle import (
    OracleBounds,
    brute_force_sat,
    differential_run,
    gen_random_problem,
    stage_verdicts,
    sum_form_as_problem,
)
from sumstar.pipeline import eliminate_bapa
from sumstar.semantics import check_model, validate_fragment
from sumstar.solver import solve_problem


def problem(text):
    return validate_fragment(parse_problem(text))


# ---------------------------------------------------------------------------
# Bounds


def test_bounds_validation():
    with pytest.raises(ValueError):
        OracleBounds(max_len=0)
    with pytest.raises(ValueError):
        OracleBounds(max_val=-1)
    assert OracleBounds(3, 4).ints_max == 12
    assert OracleBounds(3, 4, int_bound=99).ints_max == 99


# ---------------------------------------------------------------------------
# Brute force


def test_sum_equals_two():
    p = problem("(declare-array c)(declare-int s)(sum ((s c)) (>= c 0))(bapa (= s 2))")
    v = brute_force_sat(p, OracleBounds(1, 2))
    assert v.is_sat
    assert v.model.arrays == {"c": (2,)}
    assert v.model.ints == {"s": 2}


def test_odd_target_with_even_addends():
    p = problem("(declare-array c)(declare-int s)(sum ((s c)) (= c 2))(bapa (= s 3))")
    for bounds in (OracleBounds(1, 2), OracleBounds(3, 4), OracleBounds(4, 6)):
        assert brute_force_sat(p, bounds).status == "unsat_at_bound"


def test_empty_problem_gets_all_zero_model():
    v = brute_force_sat(FragmentProblem(), OracleBounds(2, 2))
    assert v.is_sat
    assert v.model.arrays == {} and v.model.ints == {}


def test_first_model_is_index_major():
    p = problem("(declare-array c)(declare-int s)(sum ((s c)) (>= c 0))(bapa (>= s 2))")
    v = brute_force_sat(p, OracleBounds(2, 2))
    assert v.model.arrays == {"c": (0, 2)}


def test_verdict_is_deterministic():
    p = problem(
        "(declare-array c)(declare-array d)(declare-int s)"
        "(sum ((s c)) (>= d 1))(bapa (= s 3))"
    )
    first = brute_force_sat(p, OracleBounds(2, 3))
    second = brute_force_sat(p, OracleBounds(2, 3))
    assert first == second and first.is_sat


def test_sat_is_monotone_in_bounds():
    hits = 0
    for seed in range(25):
        vp = validate_fragment(gen_random_problem(seed, "small"))
        small = brute_force_sat(vp, OracleBounds(2, 2))
        if small.is_sat:
            hits += 1
            assert brute_force_sat(vp, OracleBounds(3, 3)).is_sat
    assert hits > 5


def test_work_cap_raises():
    p = problem("(declare-array c)(declare-int s)(sum ((s c)) (>= c 0))(bapa (= s 9))")
    with pytest.raises(ResourceLimit):
        brute_force_sat(p, OracleBounds(3, 4), max_work=5)


def test_cofinite_cardinality_never_matches():
    p = problem(
        "(declare-array c)(declare-set S)(interp S (<= c 5))(bapa (card= S 2))"
    )
    assert brute_force_sat(p, OracleBounds(3, 4)).status == "unsat_at_bound"


def test_finite_complement_cardinality():
    p = problem(
        "(declare-array c)(declare-set S)(interp S (<= c 3))"
        "(bapa (card= (compl S) 1))"
    )
    v = brute_force_sat(p, OracleBounds(3, 4))
    assert v.is_sat
    assert v.model.arrays == {"c": (0, 0, 4)}
    assert check_model(p, v.model).ok


def test_oracle_model_always_checks():
    for seed in range(40):
        vp = validate_fragment(gen_random_problem(seed, "small"))
        v = brute_force_sat(vp, OracleBounds(2, 3))
        if v.is_sat:
            assert check_model(vp, v.model).ok


# ---------------------------------------------------------------------------
# Stage evaluation


def test_stage_verdicts_agree_on_samples():
    for seed in range(20):
        vp = validate_fragment(gen_random_problem(seed, "small"))
        sv = stage_verdicts(vp, OracleBounds(2, 3))
        assert sv.consistent, (seed, sv)


def test_sum_form_as_problem_validates():
    vp = problem(
        "(declare-array c)(declare-int s)(declare-set S)(interp S (>= c 2))"
        "(sum ((s c)) (>= c 1))(bapa (and (= s 7) (card= S 2)))"
    )
    stage = sum_form_as_problem(eliminate_bapa(vp))
    validate_fragment(stage)
    assert brute_force_sat(stage, OracleBounds(3, 4)).is_sat


# ---------------------------------------------------------------------------
# Generator


def test_generator_is_deterministic():
    assert gen_random_problem(7) == gen_random_problem(7)
    assert gen_random_problem(7, "medium") == gen_random_problem(7, "medium")


def test_generator_respects_small_quotas():
    for seed in range(100):
        p = gen_random_problem(seed, "small")
        assert 1 <= len(p.arrays) <= 2
        assert len(p.sets) <= 1
        assert 1 <= len(p.ints) <= 2


def test_generator_output_always_validates():
    for seed in range(200):
        for size in ("small", "medium"):
            validate_fragment(gen_random_problem(seed, size))


def test_generator_rejects_unknown_size():
    with pytest.raises(ValueError):
        gen_random_problem(1, "huge")


# ---------------------------------------------------------------------------
# Differential harness


def test_empty_run():
    report = differential_run(1, 0)
    assert report.lines == ()
    assert "instances=0" in report.render()


def test_small_run_has_no_disagreements():
    report = differential_run(7, 15)
    assert len(report.lines) == 15
    assert report.disagreements == ()


def test_report_lines_carry_replay_seeds():
    report = differential_run(7, 3)
    for line in report.lines:
        assert f"seed={line.seed}" in line.render()
        gen_random_problem(line.seed, "small")
    assert "disagreements=0" in report.render()


def test_fault_injection_flips_sat_to_unsat():
    def broken(vp):
        real = solve_problem(vp)
        if real.status == "sat":
            return SimpleNamespace(status="unsat", model=None)
        return real

    report = differential_run(7, 15, solve=broken)
    assert report.disagreements


def test_fault_injection_bogus_model():
    from sumstar.ast import Model

    def broken(vp):
        real = solve_problem(vp)
        if real.status == "sat":
            return SimpleNamespace(status="sat", model=Model(ints={"zz": 1}))
        return real

    report = differential_run(7, 15, solve=broken)
    assert report.disagreements
    assert any("rejected by the checker" in l.detail for l in report.disagreements)
