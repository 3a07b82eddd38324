"""End-to-end acceptance criteria, one test per criterion.

Each test appends a single ``PASS``/``FAIL`` line to the summary printed at the end of
the pytest run (and to stdout when this file is executed directly).
"""
import itertools
import json
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from gen import random_atoms, random_formula, random_minterm_consequence
from s2ic import cli
from s2ic.admit import decide_admissible, get_rule
from s2ic.budget import Budget
from s2ic.errors import ResourceLimit
from s2ic.frames import (ContactFrame, KripkeModel, MinExtSpec, StableMap, all_frames,
                         classify_map, compose_chain, dual_algebra, factor_minimal,
                         lift_relation, minimal_extensions, model_check, one_step_cover,
                         pullback_amalgam, quotient_by_partition, splitting_check)
from s2ic.qe import eliminate
from s2ic.sat import Status, brute_force_oracle, entails, equivalent, satisfiable
from s2ic.syntax import ast as A
from s2ic.syntax import parse_fo

# wall-clock budgets in seconds
RHO9_BUDGET = 5 * 60
BASIS_BUDGET = 10 * 60
RHO_S1_BUDGET = 2 * 60 * 60
FIXTURE_BUDGET = 60
QE_BUDGET = 60
ORACLE_SUITE_BUDGET = 5 * 60

ORACLE_FORMULAS = 500
ORACLE_POINTS = 4
QE_INSTANCES = 100
QE_CONSEQUENCES = 200
COVER_CHECKS = 100
COSPANS = 50


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def timed(fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t0


# 1 ---------------------------------------------------------------------------

def test_criterion_1_rho9():
    trace = []
    rep, dt = timed(decide_admissible, get_rule("rho9"), trace=trace.append)
    branches = [e for e in trace if e["event"] == "branch" and e.get("qe")]
    interp = [b for b in rep.branch_results if b["eliminated"]]
    qe_ok = len(interp) == 1 and equivalent(parse_fo(interp[0]["qe"]), parse_fo("x1 << x2"))
    ok = rep.admissible and dt <= RHO9_BUDGET and qe_ok and bool(branches)
    assert record(1, ok, f"rho9 {rep.verdict.value} in {dt:.2f}s, "
                         f"surviving branch QE equivalent to x1 << x2: {qe_ok}")


# 2 ---------------------------------------------------------------------------

def test_criterion_2_basis_rules():
    parts, ok = [], True
    for name in ("rho_s2", "rho_s3"):
        rep, dt = timed(decide_admissible, get_rule(name))
        ok &= rep.admissible and dt <= BASIS_BUDGET
        parts.append(f"{name} {rep.verdict.value} {dt:.2f}s")
    try:
        rep, dt = timed(decide_admissible, get_rule("rho_s1"),
                        budget=Budget(timeout=RHO_S1_BUDGET))
        ok &= rep.admissible
        parts.append(f"rho_s1 {rep.verdict.value} {dt:.2f}s")
    except ResourceLimit as e:
        # exiting with partial stats is an accepted outcome for this rule
        ok &= bool(e.stats)
        parts.append(f"rho_s1 resource limit with stats {sorted(e.stats)}")
    assert record(2, ok, ", ".join(parts))


def test_criterion_2_cli_exit_code_on_limit(capsys):
    code = cli.main(["admit", "rho_s1", "--timeout", "0.0001", "--json"])
    d = json.loads(capsys.readouterr().out)
    assert code == 3 and d["stats"]


# 3 ---------------------------------------------------------------------------

def test_criterion_3_fixture():
    rep, dt = timed(decide_admissible, get_rule("not_admissible_fixture"))
    cm = rep.countermodel
    rechecked = cm is not None and model_check(cm, A.neg(rep.eliminated))
    ok = not rep.admissible and rep.verified and rechecked and dt <= FIXTURE_BUDGET
    assert record(3, ok, f"fixture {rep.verdict.value} in {dt:.2f}s, "
                         f"countermodel re-verified: {rechecked}")


# 4 ---------------------------------------------------------------------------

def test_criterion_4_interpolant():
    t0 = time.perf_counter()
    psi = eliminate(parse_fo(r"z << z /\ x << z /\ z << y"), ["z"], ["x", "y"])
    target = parse_fo("x << y")
    fwd, bwd = entails(psi, target), entails(target, psi)
    dt = time.perf_counter() - t0
    ok = fwd.holds and bwd.holds and dt <= QE_BUDGET
    assert record(4, ok, f"both entailments unsat-certified: {fwd.holds and bwd.holds}, "
                         f"{dt:.2f}s")


# 5 ---------------------------------------------------------------------------

def oracle_instances(seed=20250):
    rng = random.Random(seed)
    for _ in range(ORACLE_FORMULAS):
        names = ("x", "y")[: rng.randint(1, 2)]
        atoms = random_atoms(rng, names, rng.randint(1, 3))
        yield random_formula(rng, atoms, 4)


def test_criterion_5_oracle_agreement():
    t0 = time.perf_counter()
    agree = total = 0
    for f in oracle_instances():
        total += 1
        a, b = satisfiable(f).status, brute_force_oracle(f, ORACLE_POINTS).status
        agree += a is b
    dt = time.perf_counter() - t0
    ok = agree == total == ORACLE_FORMULAS and dt <= ORACLE_SUITE_BUDGET
    assert record(5, ok, f"{agree}/{total} agree with the {ORACLE_POINTS}-point oracle "
                         f"in {dt:.1f}s")


# 6 ---------------------------------------------------------------------------

def test_criterion_6_qe_properties():
    rng = random.Random(606)
    sound = strong = checked = 0
    for _ in range(QE_INSTANCES):
        kept = ["x", "y"][: rng.randint(1, 2)]
        elim = ["u", "v"][: rng.randint(1, 2)]
        phi = random_formula(rng, random_atoms(rng, kept + elim, rng.randint(1, 3)), 3)
        psi = eliminate(phi, elim, kept)
        sound += entails(phi, psi).holds and A.term_vars(psi) <= set(kept)
        fine = True
        for _ in range(QE_CONSEQUENCES):
            G = random_minterm_consequence(rng, kept)
            if entails(phi, G).holds:
                checked += 1
                fine &= entails(psi, G).holds
        strong += fine
    ok = sound == strong == QE_INSTANCES
    assert record(6, ok, f"soundness {sound}/{QE_INSTANCES}, strength {strong}/{QE_INSTANCES} "
                         f"({checked} implied consequences re-derived)")


# 7 ---------------------------------------------------------------------------

def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


def minext_specs(X):
    for x in X.points:
        nb = sorted(X.neighbours(x))
        for lab in itertools.product((1, 2, 3), repeat=len(nb)):
            S1 = frozenset(p for p, l in zip(nb, lab) if l & 1)
            S2 = frozenset(p for p, l in zip(nb, lab) if l & 2)
            for c in (False, True):
                yield MinExtSpec(x, S1, S2, c)


def dual_embeds(f):
    X, Y = f.cod, f.dom
    Dx, Dy = dual_algebra(X), dual_algebra(Y)
    pre = [Y.mask(p for p in Y.points if f(p) in X.subset(m)) for m in range(1 << X.size)]
    if len(set(pre)) != len(pre):
        return False
    return all(Dx.precedes(a, b) == Dy.precedes(pre[a], pre[b])
               for a in range(1 << X.size) for b in range(1 << X.size))


def random_frame(rng, n, prefix="a"):
    pts = tuple(f"{prefix}{i}" for i in range(n))
    return ContactFrame(pts, frozenset(e for e in itertools.combinations(pts, 2)
                                       if rng.random() < 0.5), name=prefix.upper())


def random_cover(rng, X):
    if rng.random() < 0.5:
        Y, f = one_step_cover(X)
        assert Y.is_one_step()
        return Y, f
    extra = rng.randint(0, 3)
    img = list(X.points) + [rng.choice(X.points) for _ in range(extra)]
    mapping = {f"y{i}": p for i, p in enumerate(img)}
    Y = lift_relation(mapping, X)
    return Y, StableMap(Y, X, mapping)


def random_regular_onto(rng, X, prefix):
    m = rng.randint(X.size, 4) if X.size < 4 else X.size
    while True:
        img = list(X.points) + [rng.choice(X.points) for _ in range(m - X.size)]
        rng.shuffle(img)
        pts = tuple(f"{prefix}{i}" for i in range(m))
        edges = {(pts[i], pts[j]) for i, j in itertools.combinations(range(m), 2)
                 if X.related(img[i], img[j]) and rng.random() < 0.5}
        f = StableMap(ContactFrame(pts, frozenset(edges)), X, dict(zip(pts, img)))
        if classify_map(f) == "regular_stable":
            return f


def test_criterion_7_duality_and_frames():
    rng = random.Random(707)
    frames4 = [X for n in range(1, 5) for X in all_frames(n, up_to_iso=True)]

    axioms = sum(not dual_algebra(X).axiom_failures() for X in frames4)

    covers = 0
    for _ in range(COVER_CHECKS):
        X = random_frame(rng, rng.randint(1, 4))
        Y, f = random_cover(rng, X)
        atoms = random_atoms(rng, ("x", "y"), 3)
        fs = [random_formula(rng, atoms, 3) for _ in range(3)] + atoms
        M = KripkeModel(X, {v: X.subset(rng.randrange(1 << X.size)) for v in ("x", "y")})
        N = M.pulled_back(f)
        covers += classify_map(f) == "regular_stable" and all(
            model_check(M, g) == model_check(N, g) for g in fs)

    minext = minext_total = 0
    for X in frames4:
        for spec in minext_specs(X):
            Y, f = minimal_extensions(X, spec)
            minext_total += 1
            minext += (classify_map(f) == "regular_stable"
                       and dual_algebra(Y).size == 2 * dual_algebra(X).size and dual_embeds(f))

    factor = factor_total = 0
    for Y in frames4:
        for P in set_partitions(list(Y.points)):
            Q, q = quotient_by_partition(Y, P)
            chain = factor_minimal(q)
            factor_total += 1
            factor += (all(classify_map(g) == "regular_stable" for g in chain)
                       and (not chain or compose_chain(chain).mapping == q.mapping)
                       and len(chain) == Y.size - Q.size
                       or (Y.size == Q.size and len(chain) <= 1))

    plus = 0
    for _ in range(COSPANS):
        A_ = random_frame(rng, rng.randint(1, 3))
        f = random_regular_onto(rng, A_, "b")
        g = random_regular_onto(rng, A_, "c")
        D, p1, p2 = pullback_amalgam(f, g)
        plus += (classify_map(p1) == classify_map(p2) == "regular_stable"
                 and all(f(p1(d)) == g(p2(d)) for d in D.points))

    ok = (axioms == len(frames4) and covers == COVER_CHECKS and minext == minext_total
          and factor == factor_total and plus == COSPANS)
    assert record(7, ok, f"axioms {axioms}/{len(frames4)} frames, covers {covers}/{COVER_CHECKS}, "
                         f"minext {minext}/{minext_total}, factor {factor}/{factor_total}, "
                         f"pullback {plus}/{COSPANS}")


# 8 ---------------------------------------------------------------------------

def test_criterion_8_s3_fails_on_finite_frames():
    frames5 = [X for n in range(1, 6) for X in all_frames(n, up_to_iso=True)]
    fails = sum(not splitting_check(X, "S3", collect=False).holds for X in frames5)
    assert record(8, fails == len(frames5), f"S3 fails on {fails}/{len(frames5)} frames "
                                            f"with at most 5 points")


# 9 ---------------------------------------------------------------------------

def test_criterion_9_pipeline_shape():
    # documented only: exponential elimination followed by one NP check; observable as
    # a single final satisfiability call whose size is bounded by the minterm basis
    rep = decide_admissible(get_rule("rho9"))
    final = rep.stats["final_check"]
    ok = final["atoms"] <= 4 ** len(rep.stats.get("kept", ["x1", "x2", "z"])) + 8
    assert record(9, ok, "INFO: complexity class is not benchmarked; pipeline is "
                         f"branch QE then one SAT check ({final['atoms']} atoms for rho9)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
