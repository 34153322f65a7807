"""Independently checkable satisfiability certificates.

A certificate pins down everything a satisfying decomposition claims:
which disjunct of the surrounding arithmetic holds, which bases of
which body disjuncts the addends are built from, every period vector in
play, and a full natural-number assignment covering the integers, the
base multiplicities, and the period coefficients.  Verification redoes
the disjunctive normal forms itself, checks the generator claims by
direct evaluation, and replays the linear bookkeeping; it never
searches, so its cost is polynomial in certificate plus problem size.

Matrices shipped inside a certificate (the per-disjunct row systems)
are commentary for human readers: the verifier recomputes everything it
relies on, which closes the forgery channel of trusting shipped
algebra.  Certificates also carry a digest of the problem text they
were issued for, so a certificate for one problem cannot be replayed
against another; the digest is checked by :func:`verify_for_problem`,
which wraps plain :func:`verify_certificate` with the binding.

The six verification steps, in order:

1. disjunct indices are valid for the locally computed normal forms;
2. every claimed base satisfies its body disjunct;
3. every claimed period solves the disjunct's homogeneous rows;
4. the assignment satisfies the per-component sum rows rebuilt locally;
5. exponent bookkeeping: each exponent equals the sum of its atom's
   multiplicities;
6. the integer assignment satisfies the chosen arithmetic disjunct.

Rejections name the first failing check.  Structural defects (missing
bindings, duplicate picks, negative numbers) reject as malformed
before the numbered checks run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .ast import (
    EQ,
    GE,
    GT,
    LE,
    LT,
    MOD,
    Atom,
    FragmentProblem,
    Model,
    QfpaAtom,
    ValidatedProblem,
)
from .errors import CertificateError, ResourceLimit, SizeLimitExceeded
from .pipeline import LiaCardProblem, Stages, normalize_stages
from .semantics import Cube, check_model, eval_qfpa, set_values, to_dnf, validate_fragment
from .semilinear import NatSystem, atoms_to_system
from .solver import (
    DEFAULT_DNF_CAP,
    PooledBase,
    SatResult,
    StarEncoding,
    lam_name,
    mu_name,
    star_atom_encode,
)


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class CertPick:
    """One supported base: which disjunct, which base of that disjunct's
    generator list, and the vector itself."""

    cube_index: int
    base_index: int
    base: tuple[int, ...]


@dataclass(frozen=True)
class AtomCertificate:
    """All claims about one star atom: the supported bases, the period
    vectors of their disjuncts, and commentary row systems."""

    atom_index: int
    picks: tuple[CertPick, ...]
    periods: tuple[tuple[int, int, tuple[int, ...]], ...]
    cube_rows: tuple[tuple[int, NatSystem], ...] = ()

    def periods_of(self, cube_index: int) -> list[tuple[int, tuple[int, ...]]]:
        return sorted(
            (pi, vec) for ci, pi, vec in self.periods if ci == cube_index
        )


@dataclass(frozen=True)
class Certificate:
    """Complete satisfiability certificate for one problem."""

    digest: str
    f0_cube: int
    atoms: tuple[AtomCertificate, ...]
    assignment: tuple[tuple[str, int], ...]
    f0_rows: Optional[NatSystem] = None

    def value(self, name: str) -> Optional[int]:
        for key, val in self.assignment:
            if key == name:
                return val
        return None


@dataclass(frozen=True)
class StarWitness:
    """Explicit addend list for one star atom."""

    atom_index: int
    addends: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class VerifyOutcome:
    """ACCEPT, or REJECT naming the first failing check."""

    accepted: bool
    check: Optional[int]
    reason: str

    def __bool__(self) -> bool:
        return self.accepted


ACCEPT = VerifyOutcome(True, None, "")


def _reject(check: Optional[int], reason: str) -> VerifyOutcome:
    return VerifyOutcome(False, check, reason)


def _malformed(reason: str) -> VerifyOutcome:
    return _reject(0, f"Malformed: {reason}")


# ---------------------------------------------------------------------------
# Emission


def emit_certificate(
    p: LiaCardProblem,
    res: SatResult,
    digest: str = "",
    max_dnf: int = DEFAULT_DNF_CAP,
) -> Certificate:
    """Certificate for a satisfying solver result.

    The result's support choices and assignment are copied; the
    commentary row systems are derived from the locally recomputed
    disjunct normal forms.
    """

    f0_cubes = to_dnf(p.f0, max_dnf)
    atoms: list[AtomCertificate] = []
    for enc in res.encodings:
        star = p.star_atoms[enc.atom_index]
        body_cubes = to_dnf(star.body, max_dnf)
        picks = tuple(
            CertPick(pb.cube_index, pb.base_index, pb.base) for pb in enc.support
        )
        periods: list[tuple[int, int, tuple[int, ...]]] = []
        rows: list[tuple[int, NatSystem]] = []
        for ci in sorted({pb.cube_index for pb in enc.support}):
            shared = next(
                pb.periods for pb in enc.support if pb.cube_index == ci
            )
            periods.extend((ci, pi, vec) for pi, vec in enumerate(shared))
            rows.append((ci, atoms_to_system(body_cubes[ci], star.body_vars)))
        atoms.append(
            AtomCertificate(enc.atom_index, picks, tuple(periods), tuple(rows))
        )
    return Certificate(
        digest=digest,
        f0_cube=res.f0_cube_index,
        atoms=tuple(atoms),
        assignment=tuple(sorted(res.assignment.items())),
        f0_rows=atoms_to_system(f0_cubes[res.f0_cube_index], p.ints),
    )


# ---------------------------------------------------------------------------
# Verification


def _atom_diff(a: QfpaAtom, var_order: Sequence[str]) -> list[int]:
    index = {v: i for i, v in enumerate(var_order)}
    row = [0] * len(var_order)
    for v, c in a.lhs.coeffs:
        row[index[v]] += c
    for v, c in a.rhs.coeffs:
        row[index[v]] -= c
    return row


def _period_solves(a: QfpaAtom, var_order: Sequence[str], vec: Sequence[int]) -> bool:
    """Whether adding any multiple of ``vec`` preserves the atom."""

    value = sum(c * x for c, x in zip(_atom_diff(a, var_order), vec))
    if a.kind == EQ:
        return value == 0
    if a.kind in (LE, LT):
        return value <= 0
    if a.kind in (GE, GT):
        return value >= 0
    if a.kind == MOD:
        assert a.modulus is not None
        return value % a.modulus == 0
    raise ValueError(f"unexpected atom kind {a.kind!r} in a disjunct")


def _cube_holds(cube: Cube, var_order: Sequence[str], vec: Sequence[int]) -> bool:
    env = dict(zip(var_order, vec))
    return all(eval_qfpa(Atom(a), env) for a in cube)


def _structural(p: LiaCardProblem, c: Certificate) -> Optional[VerifyOutcome]:
    amap: dict[str, int] = {}
    for name, val in c.assignment:
        if name in amap:
            return _malformed(f"duplicate assignment for '{name}'")
        if val < 0:
            return _malformed(f"negative value for '{name}'")
        amap[name] = val
    for name in p.ints:
        if name not in amap:
            return _malformed(f"no value for integer '{name}'")

    if [a.atom_index for a in c.atoms] != list(range(len(p.star_atoms))):
        return _malformed("certificate atoms do not match the problem's star atoms")
    for ac in c.atoms:
        star = p.star_atoms[ac.atom_index]
        dim = len(star.u)
        seen: set[tuple[int, int]] = set()
        picked_cubes = {pk.cube_index for pk in ac.picks}
        for pk in ac.picks:
            if (pk.cube_index, pk.base_index) in seen:
                return _malformed(
                    f"base {pk.base_index} of disjunct {pk.cube_index} picked twice"
                )
            seen.add((pk.cube_index, pk.base_index))
            if len(pk.base) != dim:
                return _malformed(
                    f"base arity {len(pk.base)} where the atom has {dim} components"
                )
            if any(v < 0 for v in pk.base):
                return _malformed("negative base component")
        by_cube: dict[int, list[int]] = {}
        for ci, pi, vec in ac.periods:
            if ci not in picked_cubes:
                return _malformed(f"period listed for unpicked disjunct {ci}")
            if len(vec) != dim:
                return _malformed(
                    f"period arity {len(vec)} where the atom has {dim} components"
                )
            if any(v < 0 for v in vec):
                return _malformed("negative period component")
            by_cube.setdefault(ci, []).append(pi)
        for ci, indices in by_cube.items():
            if sorted(indices) != list(range(len(indices))):
                return _malformed(f"period indices of disjunct {ci} are not 0..k-1")
        for pk in ac.picks:
            name = mu_name(ac.atom_index, pk.cube_index, pk.base_index)
            if name not in amap:
                return _malformed(f"no value for multiplicity '{name}'")
            if amap[name] < 1:
                return _malformed(f"multiplicity '{name}' below one")
            for pi, _ in ac.periods_of(pk.cube_index):
                lname = lam_name(ac.atom_index, pk.cube_index, pk.base_index, pi)
                if lname not in amap:
                    return _malformed(f"no value for coefficient '{lname}'")
    return None


def verify_certificate(
    p: LiaCardProblem, c: Certificate, max_dnf: int = DEFAULT_DNF_CAP
) -> VerifyOutcome:
    """Replay every checkable claim of the certificate against the
    problem.  Accepts iff all six checks pass; rejections carry the
    number and a description of the first failure.

    Raises :class:`ResourceLimit` if a disjunctive normal form blows
    the cap, since then no verdict is possible either way.
    """

    bad = _structural(p, c)
    if bad is not None:
        return bad
    amap = dict(c.assignment)

    try:
        f0_cubes = to_dnf(p.f0, max_dnf)
        body_cubes = [to_dnf(a.body, max_dnf) for a in p.star_atoms]
    except SizeLimitExceeded as e:
        raise ResourceLimit(str(e)) from e

    # 1: disjunct indices valid for the locally computed normal forms
    if not 0 <= c.f0_cube < len(f0_cubes):
        return _reject(1, f"arithmetic disjunct {c.f0_cube} out of range")
    for ac in c.atoms:
        cubes = body_cubes[ac.atom_index]
        for pk in ac.picks:
            if not 0 <= pk.cube_index < len(cubes):
                return _reject(
                    1,
                    f"atom {ac.atom_index}: disjunct {pk.cube_index} out of range",
                )

    # 2: bases satisfy their disjuncts
    for ac in c.atoms:
        star = p.star_atoms[ac.atom_index]
        for pk in ac.picks:
            cube = body_cubes[ac.atom_index][pk.cube_index]
            if not _cube_holds(cube, star.body_vars, pk.base):
                return _reject(
                    2,
                    f"atom {ac.atom_index}: base {pk.base} violates "
                    f"disjunct {pk.cube_index}",
                )

    # 3: periods solve the homogeneous rows of their disjuncts
    for ac in c.atoms:
        star = p.star_atoms[ac.atom_index]
        for ci, pi, vec in ac.periods:
            cube = body_cubes[ac.atom_index][ci]
            for a in cube:
                if not _period_solves(a, star.body_vars, vec):
                    return _reject(
                        3,
                        f"atom {ac.atom_index}: period {vec} does not solve "
                        f"the homogeneous part of disjunct {ci}",
                    )

    # 4: assignment satisfies the rebuilt per-component sum rows
    encodings = []
    for ac in c.atoms:
        support = tuple(
            PooledBase(
                pk.cube_index,
                pk.base_index,
                pk.base,
                tuple(vec for _, vec in ac.periods_of(pk.cube_index)),
            )
            for pk in ac.picks
        )
        encodings.append(StarEncoding(ac.atom_index, support))
    for enc in encodings:
        star = p.star_atoms[enc.atom_index]
        cols: list[str] = [v for v in star.u] + [star.exponent]
        cols += enc.column_names()
        col_of = {name: i for i, name in enumerate(cols)}
        rows = star_atom_encode(star, enc, len(cols), col_of)
        vector = []
        for name in cols:
            val = amap[name]
            if name.startswith("#mu_a"):
                val -= 1
            vector.append(val)
        for coeffs, rhs in rows[: len(star.u)]:
            if sum(cf * v for cf, v in zip(coeffs, vector)) != rhs:
                return _reject(
                    4,
                    f"atom {enc.atom_index}: assignment violates a sum row",
                )

    # 5: exponent bookkeeping
    for ac in c.atoms:
        star = p.star_atoms[ac.atom_index]
        total = sum(
            amap[mu_name(ac.atom_index, pk.cube_index, pk.base_index)]
            for pk in ac.picks
        )
        if amap[star.exponent] != total:
            return _reject(
                5,
                f"atom {ac.atom_index}: exponent {amap[star.exponent]} "
                f"differs from the {total} claimed addends",
            )

    # 6: the integer assignment satisfies the chosen arithmetic disjunct
    env = {name: amap[name] for name in p.ints}
    for a in f0_cubes[c.f0_cube]:
        if not eval_qfpa(Atom(a), env):
            return _reject(6, "assignment violates the arithmetic disjunct")

    return ACCEPT


def verify_for_problem(
    problem: FragmentProblem | ValidatedProblem,
    c: Certificate,
    max_dnf: int = DEFAULT_DNF_CAP,
) -> VerifyOutcome:
    """Digest binding plus full verification against the normalized
    problem."""

    from .frontend import problem_digest

    vp = (
        problem
        if isinstance(problem, ValidatedProblem)
        else validate_fragment(problem)
    )
    digest = problem_digest(vp.problem)
    if c.digest and c.digest != digest:
        return _reject(0, "certificate was issued for a different problem")
    stages = normalize_stages(vp)
    return verify_certificate(stages.liacard, c, max_dnf)


# ---------------------------------------------------------------------------
# Model reconstruction


def reconstruct_model(
    problem: FragmentProblem | ValidatedProblem,
    c: Certificate,
    max_dnf: int = DEFAULT_DNF_CAP,
) -> tuple[tuple[StarWitness, ...], Model]:
    """Explicit addend lists and a finite-support model from a verified
    certificate.

    Each supported base contributes one addend carrying its whole
    period load and multiplicity-minus-one bare copies; array prefixes
    are the addends in order, zero past them.  The result is replayed
    through the model checker; a certificate that verifies but fails
    reconstruction indicates an internal fault and raises
    :class:`CertificateError`.
    """

    vp = (
        problem
        if isinstance(problem, ValidatedProblem)
        else validate_fragment(problem)
    )
    stages = normalize_stages(vp)
    lia = stages.liacard
    amap = dict(c.assignment)

    witnesses: list[StarWitness] = []
    arrays: dict[str, tuple[int, ...]] = {a: () for a in vp.problem.arrays}
    for ac in c.atoms:
        star = lia.star_atoms[ac.atom_index]
        addends: list[tuple[int, ...]] = []
        for pk in ac.picks:
            mu = amap[mu_name(ac.atom_index, pk.cube_index, pk.base_index)]
            loaded = list(pk.base)
            for pi, vec in ac.periods_of(pk.cube_index):
                lam = amap[lam_name(ac.atom_index, pk.cube_index, pk.base_index, pi)]
                for i, component in enumerate(vec):
                    loaded[i] += lam * component
            addends.append(tuple(loaded))
            addends.extend([pk.base] * (mu - 1))
        for addend in addends:
            env = dict(zip(star.body_vars, addend))
            if not eval_qfpa(star.body, env):
                raise CertificateError(
                    "reconstruction", f"addend {addend} violates the atom body"
                )
        if len(addends) != amap[star.exponent]:
            raise CertificateError(
                "reconstruction", "addend count differs from the exponent"
            )
        witnesses.append(StarWitness(ac.atom_index, tuple(addends)))
        for pos, name in enumerate(star.body_vars):
            if name in arrays:
                arrays[name] = tuple(a[pos] for a in addends)

    ints = {name: amap[name] for name in vp.problem.ints}
    partial = Model(arrays=arrays, ints=ints)
    sets = {
        name: (tuple(sorted(fc.members)), fc.tail)
        for name, fc in set_values(vp, partial).items()
    }
    model = Model(arrays=arrays, ints=ints, sets=sets)
    report = check_model(vp, model)
    if not report.ok:
        raise CertificateError(
            "reconstruction",
            "model fails the checker: " + "; ".join(report.messages),
        )
    return tuple(witnesses), model
