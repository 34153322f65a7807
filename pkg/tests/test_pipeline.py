"""Normalization chain: shapes, fresh symbols, and pointwise semantics."""

import random

from sumstar.ast import (
    EQ,
    FALSE,
    GE,
    LE,
    TRUE,
    Arith,
    BapaAnd,
    CardEq,
    CardLe,
    FragmentProblem,
    SetCompl,
    SetInterpretation,
    SetVar,
    Subset,
    SumSpec,
    atom,
    conj,
    const_term,
    formula_variables,
    var_term,
)
from sumstar.pipeline import (
    GuardedSum,
    eliminate_bapa,
    merge_set_interpretations,
    normalize,
    sums_to_star,
)
from sumstar.semantics import eval_qfpa, validate_fragment


def vg(arr, k, kind=GE):
    return atom(kind, var_term(arr), const_term(k))


def test_passthrough_without_sets():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            ints=("s",),
            bapa=Arith(atom(EQ, var_term("s"), const_term(5))),
            sum_spec=SumSpec((("s", "c"),), vg("c", 1)),
        )
    )
    s = eliminate_bapa(vp)
    assert s.interps == ()
    assert s.sum.targets == (("s", "c"),)
    assert s.sum.guard == vg("c", 1)
    assert s.arrays == ("c",) and s.ints == ("s",)


def test_indicator_and_counter_freshness():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            ints=("t",),
            bapa=CardEq(SetVar("S"), var_term("t")),
            interps=(SetInterpretation("S", vg("c", 2)),),
        )
    )
    s = eliminate_bapa(vp)
    assert s.arrays == ("c", "#ind_S", "#card_1")
    assert s.ints == ("t", "#cnt_1")
    assert s.sum.targets == (("#cnt_1", "#card_1"),)
    assert s.sum.guard == TRUE
    # 0/1 range constraint, indicator link, cardinality link
    assert len(s.interps) == 3
    assert all(i.set_var == "full" for i in s.interps)
    # the comparison lives in psi
    assert "#cnt_1" in formula_variables(s.psi)


def test_two_sets_two_indicators():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S", "T"),
            bapa=Subset(SetVar("S"), SetVar("T")),
            interps=(
                SetInterpretation("S", vg("c", 3)),
                SetInterpretation("T", vg("c", 1)),
            ),
        )
    )
    s = eliminate_bapa(vp)
    assert "#ind_S" in s.arrays and "#ind_T" in s.arrays
    # subset became an emptiness count
    assert "#card_1" in s.arrays and ("#cnt_1", "#card_1") in s.sum.targets


def test_cofinite_cardinality_becomes_false():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            bapa=CardEq(SetVar("S"), const_term(2)),
            interps=(SetInterpretation("S", vg("c", 3, LE)),),  # holds at zero
        )
    )
    s = eliminate_bapa(vp)
    assert s.psi == FALSE
    assert "#card_1" not in s.arrays  # no machinery for the dead atom
    assert s.sum.targets == ()


def test_cofinite_complement_keeps_machinery():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            bapa=CardEq(SetCompl(SetVar("S")), const_term(1)),
            interps=(SetInterpretation("S", vg("c", 3, LE)),),
        )
    )
    s = eliminate_bapa(vp)
    assert s.psi != FALSE
    assert "#card_1" in s.arrays


def test_universal_constraints_hold_on_zero_tail():
    # a set whose guard is true at zero is cofinite; its indicator
    # stores the complement so the all-zero tail stays consistent
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S", "T"),
            bapa=BapaAnd(
                (
                    CardEq(SetCompl(SetVar("S")), const_term(2)),
                    CardLe(SetVar("T"), const_term(1)),
                )
            ),
            interps=(
                SetInterpretation("S", vg("c", 3, LE)),  # true at zero
                SetInterpretation("T", vg("c", 5)),  # false at zero
            ),
        )
    )
    s = eliminate_bapa(vp)
    assert s.psi != FALSE
    zero = {a: 0 for a in s.arrays}
    for interp in s.interps:
        assert eval_qfpa(interp.guard, zero)


def test_tail_conflict_conjoins_false():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            bapa=CardLe(SetVar("S"), const_term(5)),
            interps=(
                SetInterpretation("S", vg("c", 1)),  # false at zero
                SetInterpretation("S", vg("c", 3, LE)),  # true at zero
            ),
        )
    )
    s = eliminate_bapa(vp)
    parts = s.psi.args if hasattr(s.psi, "args") else (s.psi,)
    assert FALSE in parts


def test_gating_under_nontrivial_guard():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            ints=("s",),
            bapa=BapaAnd(
                (
                    Arith(atom(EQ, var_term("s"), const_term(7))),
                    CardEq(SetVar("S"), const_term(2)),
                )
            ),
            interps=(SetInterpretation("S", vg("c", 2)),),
            sum_spec=SumSpec((("s", "c"),), vg("c", 3)),
        )
    )
    s = eliminate_bapa(vp)
    assert s.sum.guard == TRUE
    assert ("s", "#gate_c") in s.sum.targets
    assert ("#cnt_1", "#card_1") in s.sum.targets
    assert "#gate_c" in s.arrays


def test_no_gating_when_guard_trivial():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            ints=("s",),
            bapa=CardEq(SetVar("S"), const_term(1)),
            interps=(SetInterpretation("S", vg("c", 2)),),
            sum_spec=SumSpec((("s", "c"),), TRUE),
        )
    )
    s = eliminate_bapa(vp)
    assert s.sum.guard == TRUE
    assert ("s", "c") in s.sum.targets
    assert not any(a.startswith("#gate_") for a in s.arrays)


def test_merge_conjunction_shape():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            ints=("s",),
            bapa=CardEq(SetVar("S"), const_term(2)),
            interps=(SetInterpretation("S", vg("c", 2)),),
            sum_spec=SumSpec((("s", "c"),), vg("c", 1)),
        )
    )
    s = eliminate_bapa(vp)
    g = merge_set_interpretations(s)
    assert isinstance(g, GuardedSum)
    assert g.psi == s.psi and g.targets == s.sum.targets


def test_merge_pointwise_equivalence():
    rng = random.Random(3)
    from conftest import rand_qf

    names = ("c", "d")
    for _ in range(100):
        interps = tuple(
            SetInterpretation("full", rand_qf(rng, names)) for _ in range(rng.randint(0, 3))
        )
        guard = rand_qf(rng, names)
        from sumstar.pipeline import SumForm

        s = SumForm(
            arrays=names,
            ints=(),
            psi=TRUE,
            interps=interps,
            sum=SumSpec((), guard),
        )
        g = merge_set_interpretations(s)
        env = {n: rng.randint(0, 4) for n in names}
        both = all(eval_qfpa(i.guard, env) for i in interps) and eval_qfpa(guard, env)
        assert eval_qfpa(g.guard, env) == both


def test_star_shape_sum_five():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            ints=("s",),
            bapa=Arith(atom(EQ, var_term("s"), const_term(5))),
            sum_spec=SumSpec((("s", "c"),), vg("c", 1)),
        )
    )
    _, g, l = normalize(vp)
    assert len(l.star_atoms) == 1
    star = l.star_atoms[0]
    assert star.u == ("s",)
    assert star.body_vars == ("c",)
    assert star.body == g.guard
    assert star.exponent == "#exp_1"
    assert "#exp_1" in l.ints
    assert "#exp_1" in formula_variables(l.f0)


def test_star_no_sum():
    vp = validate_fragment(
        FragmentProblem(
            ints=("s",),
            bapa=Arith(atom(EQ, var_term("s"), const_term(3))),
        )
    )
    s, g, l = normalize(vp)
    assert l.star_atoms == ()
    assert l.f0 == g.psi


def test_star_aux_components_for_guard_arrays():
    # the indicator array is read by the merged guard but not a target
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            sets=("S",),
            ints=("s",),
            bapa=BapaAnd(
                (
                    Arith(atom(EQ, var_term("s"), const_term(4))),
                    CardEq(SetVar("S"), const_term(1)),
                )
            ),
            interps=(SetInterpretation("S", vg("c", 2)),),
            sum_spec=SumSpec((("s", "c"),), TRUE),
        )
    )
    _, g, l = normalize(vp)
    star = l.star_atoms[0]
    assert "#ind_S" in star.body_vars
    pos = star.body_vars.index("#ind_S")
    assert star.u[pos] == "#aux_#ind_S"
    assert "#aux_#ind_S" in l.ints
    # targets stay aligned with their sum variables
    assert star.body_vars.index("c") == star.u.index("s")
    assert star.body_vars.index("#card_1") == star.u.index("#cnt_1")


def test_exponent_nonnegativity_in_f0():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            ints=("s",),
            sum_spec=SumSpec((("s", "c"),), vg("c", 1)),
        )
    )
    _, _, l = normalize(vp)
    texts = str(l.f0)
    assert "#exp_1" in texts


def test_normalize_returns_all_stages():
    vp = validate_fragment(
        FragmentProblem(
            arrays=("c",),
            ints=("s",),
            sum_spec=SumSpec((("s", "c"),), vg("c", 1)),
        )
    )
    s, g, l = normalize(vp)
    assert s.sum.guard == g.guard or g.guard == conj(s.sum.guard)
    assert sums_to_star(g) == l
