"""End-to-end acceptance gates for the finished tool.

Each test exercises one release criterion at its stated tolerance and
appends a single PASS or FAIL line to the summary block printed after
the run, so a transcript of the suite doubles as the acceptance report.
The fuzz corpus (seed 42, 500 instances, prefix length 3, values to 4)
is generated once and shared by the gates that quantify over it.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import replace
from itertools import product

import pytest

from qfpa_corpus import FORMULAS
from sumstar.certificate import (
    emit_certificate,
    reconstruct_model,
    verify_certificate,
    verify_for_problem,
)
from sumstar.cli import run_cli
from sumstar.errors import ResourceLimit, SumstarError, ValidationError
from sumstar.frontend import parse_problem, print_certificate, problem_digest
from sumstar.omega import box_feasible
from sumstar.oracle import (
    OracleBounds,
    differential_run,
    gen_random_problem,
    stage_verdicts,
)
from sumstar.semantics import check_model, eval_qfpa, fragment_violations, validate_fragment
from sumstar.semilinear import NatSystem, hilbert_basis, ilp_feasible, member, semilinear_nf
from sumstar.solver import solve_problem

CORPUS_SEED = 42
CORPUS_COUNT = 500
CORPUS_BOUNDS = OracleBounds(max_len=3, max_val=4)
CORPUS_BUDGET_SECONDS = 300.0


@pytest.fixture(scope="session")
def corpus_report():
    """The differential fuzz run all corpus-quantified gates share."""

    t0 = time.perf_counter()
    report = differential_run(CORPUS_SEED, CORPUS_COUNT, CORPUS_BOUNDS)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def corpus_problems(corpus_report):
    report, _ = corpus_report
    return [
        (line, validate_fragment(gen_random_problem(line.seed)))
        for line in report.lines
    ]


@pytest.fixture(scope="session")
def sat_solutions(corpus_problems):
    """Replayed solver outcomes for every instance the fuzz run proved
    satisfiable; solving is deterministic, so these are the same runs."""

    out = []
    for line, vp in corpus_problems:
        if line.solver != "sat":
            continue
        r = solve_problem(vp)
        assert r.status == "sat"
        out.append((line.seed, vp, r))
    return out


def _conclude(ledger, number, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} — {detail}"
    ledger.append(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1: differential soundness of solver against the bounded oracle


def test_criterion_1_differential_soundness(corpus_report, acceptance_ledger):
    report, seconds = corpus_report
    rejected = [l for l in report.lines if "rejected by the checker" in l.detail]
    ok = (
        len(report.lines) == CORPUS_COUNT
        and not report.disagreements
        and not rejected
        and seconds < CORPUS_BUDGET_SECONDS
    )
    _conclude(
        acceptance_ledger,
        1,
        ok,
        f"fuzz seed {CORPUS_SEED}, {len(report.lines)} instances at L=3 V=4: "
        f"{len(report.disagreements)} disagreements, {len(rejected)} checker-rejected "
        f"models, {len(report.limited)} resource-limited, {seconds:.1f}s "
        f"(budget {CORPUS_BUDGET_SECONDS:.0f}s)",
    )


# ---------------------------------------------------------------------------
# 2: certificates accepted, and the perturbation sweep never fools them


def _with_atom(cert, ai, new_atom):
    atoms = list(cert.atoms)
    atoms[ai] = new_atom
    return replace(cert, atoms=tuple(atoms))


def _perturbed_systems(nsys):
    """Every copy of a row system with one entry moved by one."""

    for kind in ("eq", "le"):
        rows = getattr(nsys, kind)
        for wi, (coeffs, rhs) in enumerate(rows):
            for delta in (1, -1):
                bumped = list(rows)
                bumped[wi] = (coeffs, rhs + delta)
                yield replace(nsys, **{kind: tuple(bumped)})
                for ci, cv in enumerate(coeffs):
                    nc = list(coeffs)
                    nc[ci] = cv + delta
                    bumped = list(rows)
                    bumped[wi] = (tuple(nc), rhs)
                    yield replace(nsys, **{kind: tuple(bumped)})


def certificate_mutants(cert):
    """Every certificate obtainable by moving one numeric entry by one."""

    for delta in (1, -1):
        yield replace(cert, f0_cube=cert.f0_cube + delta)
    for i, (name, val) in enumerate(cert.assignment):
        for delta in (1, -1):
            rows = list(cert.assignment)
            rows[i] = (name, val + delta)
            yield replace(cert, assignment=tuple(rows))
    if cert.f0_rows is not None:
        for nsys in _perturbed_systems(cert.f0_rows):
            yield replace(cert, f0_rows=nsys)
    for ai, ac in enumerate(cert.atoms):
        for delta in (1, -1):
            yield _with_atom(cert, ai, replace(ac, atom_index=ac.atom_index + delta))
        for pi, pk in enumerate(ac.picks):
            variants = [replace(pk, cube_index=pk.cube_index + d) for d in (1, -1)]
            variants += [replace(pk, base_index=pk.base_index + d) for d in (1, -1)]
            for bi, bv in enumerate(pk.base):
                for delta in (1, -1):
                    base = list(pk.base)
                    base[bi] = bv + delta
                    variants.append(replace(pk, base=tuple(base)))
            for new_pk in variants:
                picks = list(ac.picks)
                picks[pi] = new_pk
                yield _with_atom(cert, ai, replace(ac, picks=tuple(picks)))
        for qi, (ci, pi2, vec) in enumerate(ac.periods):
            variants = [(ci + d, pi2, vec) for d in (1, -1)]
            variants += [(ci, pi2 + d, vec) for d in (1, -1)]
            for vi, vv in enumerate(vec):
                for delta in (1, -1):
                    nv = list(vec)
                    nv[vi] = vv + delta
                    variants.append((ci, pi2, tuple(nv)))
            for entry in variants:
                periods = list(ac.periods)
                periods[qi] = entry
                yield _with_atom(cert, ai, replace(ac, periods=tuple(periods)))
        for ri, (ci, nsys) in enumerate(ac.cube_rows):
            for new_sys in _perturbed_systems(nsys):
                rows = list(ac.cube_rows)
                rows[ri] = (ci, new_sys)
                yield _with_atom(cert, ai, replace(ac, cube_rows=tuple(rows)))


def test_criterion_2_certificate_round_trip(sat_solutions, acceptance_ledger):
    emitted = accepted = mutants = rejected = unsound = 0
    for seed, vp, r in sat_solutions:
        cert = emit_certificate(
            r.stages.liacard, r.result, problem_digest(vp.problem)
        )
        emitted += 1
        if verify_for_problem(vp, cert).accepted:
            accepted += 1
        for mutant in certificate_mutants(cert):
            mutants += 1
            if not verify_certificate(r.stages.liacard, mutant).accepted:
                rejected += 1
                continue
            # An accepted mutant is only sound if it still encodes a
            # model the independent checker confirms.
            try:
                _, model = reconstruct_model(vp, mutant)
                if not check_model(vp, model).ok:
                    unsound += 1
            except SumstarError:
                unsound += 1
    ok = emitted > 0 and accepted == emitted and unsound == 0
    _conclude(
        acceptance_ledger,
        2,
        ok,
        f"{accepted}/{emitted} certificates accepted; perturbation sweep: "
        f"{mutants} single-entry mutants, {rejected} rejected, "
        f"{mutants - rejected} accepted of which {unsound} unsound",
    )


# ---------------------------------------------------------------------------
# 3: generator form of the committed formula corpus matches evaluation


def test_criterion_3_generator_form_equivalence(acceptance_ledger):
    mismatches = []
    points = 0
    for label, names, f in FORMULAS:
        s = semilinear_nf(f, names, node_cap=2_000_000)
        for point in product(range(9), repeat=len(names)):
            points += 1
            want = eval_qfpa(f, dict(zip(names, point)))
            if member(s, point) != want:
                mismatches.append((label, point))
    ok = len(FORMULAS) >= 50 and not mismatches
    shown = "; ".join(f"{l} at {p}" for l, p in mismatches[:3])
    _conclude(
        acceptance_ledger,
        3,
        ok,
        f"{len(FORMULAS)} formulas, {points} points on [0..8]^n, "
        f"{len(mismatches)} mismatches" + (f" ({shown})" if shown else ""),
    )


# ---------------------------------------------------------------------------
# 4: golden minimal-generator computation


def test_criterion_4_minimal_generators_golden(acceptance_ledger):
    got = hilbert_basis(NatSystem(3, eq=(((1, 1, -2), 0),)))
    want = [(0, 2, 1), (1, 1, 1), (2, 0, 1)]
    ok = sorted(got) == want
    _conclude(
        acceptance_ledger,
        4,
        ok,
        f"two-summands-doubling basis: got {sorted(got)}, expected {want}",
    )


# ---------------------------------------------------------------------------
# 5: feasibility verdicts match the bounded box the size lemma promises


def test_criterion_5_small_model_box(acceptance_ledger):
    rng = random.Random("sumstar-acceptance:small-model")
    failures = []
    largest = 0
    for i in range(200):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        eqs, les = [], []
        for _ in range(m):
            row = (tuple(rng.randint(-2, 2) for _ in range(n)), rng.randint(-3, 3))
            (eqs if rng.random() < 0.5 else les).append(row)
        sys = NatSystem(n, eq=tuple(eqs), le=tuple(les))
        magnitudes = [abs(c) for coeffs, _ in eqs + les for c in coeffs]
        magnitudes += [abs(rhs) for _, rhs in eqs + les]
        a = max([1] + magnitudes)
        bound = n * (m * a) ** (2 * m + 1)
        largest = max(largest, bound)
        verdicts = (
            ilp_feasible(sys) is not None,
            box_feasible(sys, bound),
            box_feasible(sys, 2 * bound),
        )
        if len(set(verdicts)) != 1:
            failures.append((i, sys, verdicts))
    ok = not failures
    _conclude(
        acceptance_ledger,
        5,
        ok,
        f"200 random systems (n,m<=3, entries [-2..2], rhs [-3..3]): "
        f"{len(failures)} verdict splits between search, the stated box, and "
        f"its doubling; largest box bound {largest}",
    )


# ---------------------------------------------------------------------------
# 6: guards naming program integers are rejected up front


SHARED_GUARD = """
(declare-array c)
(declare-int x)
(declare-int z)
(declare-set S)
(interp S (<= c x))
(sum ((z c)) (<= c x))
(bapa (= z 6))
"""


def test_criterion_6_guard_sharing_rejected(tmp_path, capsys, acceptance_ledger):
    p = parse_problem(SHARED_GUARD)
    codes = [code for code, _ in fragment_violations(p)]
    raised = False
    try:
        validate_fragment(p)
    except ValidationError:
        raised = True
    path = tmp_path / "shared.sstar"
    path.write_text(SHARED_GUARD)
    exit_code = run_cli(["solve", str(path)])
    err = capsys.readouterr().err
    ok = (
        "UndecidableSharing" in codes
        and raised
        and exit_code == 1
        and "UndecidableSharing" in err
    )
    _conclude(
        acceptance_ledger,
        6,
        ok,
        f"value-threshold guard naming a program integer: violation codes "
        f"{sorted(set(codes))}, validation raised={raised}, solve exit code "
        f"{exit_code}",
    )


# ---------------------------------------------------------------------------
# 7: the rewriting stages stay equisatisfiable under the oracle


def test_criterion_7_stage_agreement(corpus_problems, acceptance_ledger):
    inconsistent = []
    limited = 0
    evaluated = 0
    for line, vp in corpus_problems:
        try:
            v = stage_verdicts(vp, CORPUS_BOUNDS)
        except ResourceLimit:
            limited += 1
            continue
        evaluated += 1
        if not v.consistent:
            inconsistent.append((line.seed, v))
    ok = evaluated > 0 and not inconsistent
    shown = "; ".join(
        f"seed {s}: {v.original}/{v.sum_form}/{v.guarded}" for s, v in inconsistent[:3]
    )
    _conclude(
        acceptance_ledger,
        7,
        ok,
        f"{evaluated} corpus instances with all three stage verdicts, "
        f"{len(inconsistent)} inconsistent, {limited} over the work bound"
        + (f" ({shown})" if shown else ""),
    )


# ---------------------------------------------------------------------------
# 8: certificate size grows tamely with the sum target (soft, non-blocking)


def test_criterion_8_certificate_growth(acceptance_ledger):
    points = []
    for k in range(1, 13):
        sigma = 2**k
        text = (
            "(declare-array y)\n(declare-int s)\n"
            f"(sum ((s y)) (>= y 1))\n(bapa (= s {sigma}))\n"
        )
        p = parse_problem(text)
        vp = validate_fragment(p)
        r = solve_problem(vp)
        assert r.status == "sat"
        cert = emit_certificate(r.stages.liacard, r.result, problem_digest(p))
        assert verify_for_problem(vp, cert).accepted
        input_bits = len(text.encode()) * 8
        cert_bits = len(print_certificate(cert).encode()) * 8
        points.append((math.log(input_bits), math.log(cert_bits)))
    mean_x = sum(a for a, _ in points) / len(points)
    mean_y = sum(b for _, b in points) / len(points)
    slope = sum((a - mean_x) * (b - mean_y) for a, b in points) / sum(
        (a - mean_x) ** 2 for a, _ in points
    )
    within = slope <= 3.0
    # Soft gate: the slope is reported but an excess does not block.
    acceptance_ledger.append(
        f"criterion 8 {'PASS' if within else 'SOFT-FAIL (non-blocking)'} — "
        f"doubling sum targets k=1..12: certificate bit-size log-log slope "
        f"{slope:.2f} against limit 3.0"
    )
    assert math.isfinite(slope)
