import itertools
import random

import pytest
from hypothesis import given, settings

from gen import formulas, random_atoms, random_formula
from s2ic.budget import Budget
from s2ic.cdcl import Solver, luby
from s2ic.errors import ResourceLimit
from s2ic.frames import model_check
from s2ic.sat import Status, brute_force_oracle, entails, equivalent, satisfiable, valid
from s2ic.syntax import ast as A
from s2ic.syntax import parse_fo


def P(text):
    return parse_fo(text)


def test_propositional_contradiction():
    assert satisfiable(P(r"x << y /\ ~(x << y)")).status is Status.UNSAT


def test_nonzero_example():
    r = satisfiable(P("~(x << !x)"))
    assert r.sat
    M = r.model
    assert M.frame.size == 2 and M.frame.is_one_step()
    assert M.valuation["x"] == frozenset(M.frame.points)
    assert model_check(M, P("~(x << !x)"))


def test_pair_example():
    phi = P(r"x << y /\ ~(x << x)")
    r = satisfiable(phi)
    assert r.sat and model_check(r.model, phi)
    p, q = r.model.frame.points
    assert r.model.valuation["y"] == {p, q}
    assert len(r.model.valuation["x"]) == 1


def test_constants():
    assert not satisfiable(A.BOTTOM).sat
    assert satisfiable(A.TOP).sat
    assert not satisfiable(P("~(0 << x)")).sat
    assert not satisfiable(P("1 << 0")).sat


def test_entails_examples():
    assert entails(P("x << y"), P("x << y")).holds
    assert entails(P(r"x << y /\ y << z"), P("x << z")).holds
    e = entails(P("x << y"), P("~(y << x)"))
    assert not e.holds
    M = e.countermodel
    assert model_check(M, P(r"x << y /\ y << x"))
    assert not M.valuation.get("x") and not M.valuation.get("y")


def test_equivalent_and_valid():
    assert equivalent(P("x == 0"), P("x << !x"))
    assert equivalent(P("x << y"), P("!y << !x"))
    assert valid(P("x << y => x & !y == 0")).holds
    assert not valid(P("x << x")).holds


def test_oracle_examples():
    assert brute_force_oracle(P("~(x << !x)"), 1).sat
    phi = P(r"x << y /\ y << x /\ ~((x + y) << !(x + y))")
    assert brute_force_oracle(phi, 4).status is Status.UNSAT
    assert not brute_force_oracle(A.BOTTOM, 4).sat


def test_oracle_models_are_real():
    r = brute_force_oracle(P(r"~(x << x) /\ x << y /\ ~(y << x)"), 3)
    assert r.sat and model_check(r.model, P(r"~(x << x) /\ x << y /\ ~(y << x)"))


@settings(max_examples=150, deadline=None)
@given(formulas(names=("x", "y"), max_leaves=5))
def test_models_check_and_are_one_step(f):
    r = satisfiable(f)
    if r.sat:
        assert model_check(r.model, f)
        assert r.model.frame.is_one_step()


@settings(max_examples=80, deadline=None)
@given(formulas(names=("x", "y", "z"), max_leaves=5))
def test_search_mode_agrees_with_enumeration(f):
    a = satisfiable(f)
    b = satisfiable(f, enum_limit=0)
    assert a.status == b.status
    if b.sat:
        assert model_check(b.model, f) and b.model.frame.is_one_step()


def test_oracle_monotone_in_points():
    rng = random.Random(11)
    for _ in range(40):
        f = random_formula(rng, random_atoms(rng, ("x", "y"), 3), 3)
        s = satisfiable(f).status
        seen_sat = False
        for n in range(1, 5):
            o = brute_force_oracle(f, n).status
            if o is Status.SAT:
                seen_sat = True
                assert s is Status.SAT
            else:
                assert not seen_sat


def test_entails_is_a_preorder():
    rng = random.Random(5)
    atoms = random_atoms(rng, ("x", "y"), 3)
    fs = [random_formula(rng, atoms, 2) for _ in range(7)]
    ent = {(i, j): entails(fs[i], fs[j]).holds for i in range(7) for j in range(7)}
    for i in range(7):
        assert ent[i, i]
    for i, j, k in itertools.product(range(7), repeat=3):
        if ent[i, j] and ent[j, k]:
            assert ent[i, k]


@pytest.mark.parametrize("nvars,natoms", [(6, 300), (8, 300)])
def test_many_atoms_terminate(nvars, natoms):
    rng = random.Random(4)
    names = tuple("abcdefgh"[:nvars])
    atoms = random_atoms(rng, names, natoms, term_depth=1)
    phi = A.Conj(tuple(A.Disj(tuple(rng.choice([a, A.Neg(a)]) for a in rng.sample(atoms, 3)))
                       for _ in range(natoms)))
    r = satisfiable(phi, budget=Budget(timeout=120))
    assert r.stats["atoms"] > 200
    if r.sat:
        assert model_check(r.model, phi)


def test_atom_limit():
    phi = A.conj(*(A.Prec(A.Var(f"v{i}"), A.Var(f"v{i + 1}")) for i in range(10)))
    with pytest.raises(ResourceLimit) as ei:
        satisfiable(phi, budget=Budget(max_atoms=5))
    assert ei.value.stats["atoms"] > 5


def test_timeout_is_a_resource_limit():
    rng = random.Random(1)
    atoms = random_atoms(rng, tuple("abcdefgh"), 60, term_depth=3)
    phi = A.Conj(tuple(A.Disj((rng.choice(atoms), A.Neg(rng.choice(atoms)),
                               A.Neg(rng.choice(atoms)))) for _ in range(120)))
    b = Budget(timeout=1e-9)
    with pytest.raises(ResourceLimit):
        satisfiable(phi, budget=b)


# the propositional engine ----------------------------------------------------

def test_luby():
    assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def brute_cnf(n, clauses):
    for bits_ in itertools.product((False, True), repeat=n):
        if all(any(bits_[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def test_cdcl_matches_brute_force_on_random_cnf():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(3, 9)
        m = rng.randint(1, 5 * n)
        clauses = [[rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(1, 3))]
                   for _ in range(m)]
        s = Solver(n)
        ok = all([s.add_clause(c) for c in clauses])
        res = ok and s.solve()
        assert res == brute_cnf(n, clauses)
        if res:
            model = s.model()
            assert all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


@settings(max_examples=60, deadline=None)
@given(formulas(names=("x", "y"), relations=(A.Prec, A.Equation, A.Nleq), max_leaves=4))
def test_all_atom_kinds_agree_with_oracle(f):
    r = satisfiable(f)
    assert r.status is brute_force_oracle(f, 4).status
    if r.sat:
        assert model_check(r.model, f)


def test_nleq_examples():
    assert not satisfiable(P(r"x </= y /\ x << y")).sat
    assert satisfiable(P(r"x </= y /\ y << y")).sat
