import itertools

import pytest
from hypothesis import given, settings

from gen import formulas, terms
from s2ic.admit import get_rule, s2ic_valid
from s2ic.errors import ParseError
from s2ic.frames import KripkeModel, all_frames, eval_mask, model_check
from s2ic.syntax import (encode_fo, flatten_modal, minterm_atoms, normalize_atoms, parse,
                         parse_contact, parse_fo, parse_modal, parse_rule, parse_term, pretty,
                         pretty_rule, projective_unifier, tau1, tau2_branches)
from s2ic.syntax import ast as A
from s2ic.syntax.transform import expand_nleq

x, y, z, w = (A.Var(n) for n in "xyzw")


def models(max_points, names):
    for n in range(1, max_points + 1):
        for X in all_frames(n, up_to_iso=True):
            for combo in itertools.product(range(1 << n), repeat=len(names)):
                yield KripkeModel(X, {v: X.subset(m) for v, m in zip(names, combo)})


# parsing ---------------------------------------------------------------------

def test_parse_sim():
    assert parse_modal("x1 ~> x2") == A.Sim(A.Var("x1"), A.Var("x2"))


def test_parse_contact_formula():
    assert parse_contact(r"x << y /\ ~(y << x)") == A.Conj((A.Prec(x, y), A.Neg(A.Prec(y, x))))


def test_parse_rho9_rule():
    text = """rule rho9
xvars x1 x2
pvars p
F: (p ~> p) & (x1 ~> p) & (p ~> x2)
G: x1 ~> x2
"""
    r = parse_rule(text)
    x1, x2, p = A.Var("x1"), A.Var("x2"), A.Var("p")
    assert r.name == "rho9" and r.xvars == ("x1", "x2") and r.pvars == ("p",)
    assert r.F == A.And(A.And(A.Sim(p, p), A.Sim(x1, p)), A.Sim(p, x2))
    assert r.G == A.Sim(x1, x2)
    assert parse_rule(pretty_rule(r)) == r


def test_term_precedence():
    assert parse_term("x | y & !z") == A.Or(x, A.And(y, A.Not(z)))
    assert parse_term("x -> y -> z") == A.Imp(x, A.Imp(y, z))
    assert parse_term("x + y & z") == A.Xor(x, A.And(y, z))
    assert parse_term("x <-> y -> z") == A.Iff(x, A.Imp(y, z))


def test_formula_precedence():
    f = parse_fo(r"x << y /\ y << x \/ ~(x == y) => top")
    assert f == A.FoImp(A.Disj((A.Conj((A.Prec(x, y), A.Prec(y, x))),
                                A.Neg(A.Equation(x, y)))), A.TOP)


def test_diamond_and_box():
    assert parse_modal("<E>x & [A]!y") == A.And(A.Diam(x), A.Univ(A.Not(y)))
    assert parse_modal("top ~> bot") == A.Sim(A.TOP_T, A.BOT_T)


def test_comments_ignored():
    assert parse_term("x & y  # trailing") == A.And(x, y)


def test_parse_dispatch():
    assert parse("term", "x") == x
    assert parse("contact", "x << y") == A.Prec(x, y)
    with pytest.raises(ValueError):
        parse("nonsense", "x")


@pytest.mark.parametrize("text,line,col", [
    ("x & ", 1, 4),
    ("x << y << z", 1, 8),
    ("x ~> y ~> z", 1, 8),
    ("(x & y", 1, 7),
])
def test_parse_error_location(text, line, col):
    with pytest.raises(ParseError) as ei:
        parse_fo(text) if "<<" in text else parse_modal(text)
    assert (ei.value.line, ei.value.column) == (line, col)
    assert ei.value.expected


def test_parse_error_expected_tokens():
    with pytest.raises(ParseError) as ei:
        parse_term("x &")
    assert "identifier" in ei.value.expected and "(" in ei.value.expected


def test_term_rejects_modal_and_contact_rejects_modal():
    with pytest.raises(ParseError):
        parse_term("x ~> y")
    with pytest.raises(ParseError):
        parse_contact("[A]x << y")
    with pytest.raises(ParseError):
        parse_contact("x </= y")


def test_rule_error_line_numbers():
    text = "rule r\nxvars x\npvars p\nF: p &\nG: x\n"
    with pytest.raises(ParseError) as ei:
        parse_rule(text)
    assert ei.value.line == 4


def test_rule_variable_discipline():
    with pytest.raises(ParseError):
        parse_rule("rule r\nxvars x\npvars p\nF: q\nG: x\n")
    with pytest.raises(ParseError):
        parse_rule("rule r\nxvars x\npvars p\nF: p\nG: p\n")


@settings(max_examples=300, deadline=None)
@given(formulas(modal=True, relations=(A.Prec, A.Equation, A.Nleq)))
def test_roundtrip_formulas(f):
    assert parse_fo(pretty(f)) == f


@settings(max_examples=300, deadline=None)
@given(terms(modal=True))
def test_roundtrip_terms(t):
    assert parse_modal(pretty(t)) == t


# normalization ---------------------------------------------------------------

def test_normalize_examples():
    t = A.And(x, y)
    assert normalize_atoms(A.Equation(t, A.BOT_T)) == A.Prec(t, A.Not(t))
    assert normalize_atoms(A.Prec(x, y)) == A.Prec(x, y)
    d = A.Xor(x, y)
    assert normalize_atoms(A.Equation(x, y)) == A.Prec(d, A.Not(d))


@settings(max_examples=60, deadline=None)
@given(formulas(names=("x", "y"), max_leaves=4))
def test_normalize_preserves_models(f):
    g = normalize_atoms(f)
    assert not any(isinstance(a, A.Equation) for a in A.atoms(g))
    for M in models(3, ("x", "y")):
        assert model_check(M, f) == model_check(M, g)


def test_minterm_atoms():
    assert minterm_atoms([]) == [A.Prec(A.TOP_T, A.BOT_T)]
    nx = A.Not(x)
    assert minterm_atoms(["x"]) == [A.Prec(x, nx), A.Prec(x, x), A.Prec(nx, nx), A.Prec(nx, x)]
    assert len(minterm_atoms(["x", "y"])) == 16
    assert len(set(minterm_atoms(["x", "y", "z"]))) == 64
    with pytest.raises(ValueError):
        minterm_atoms(["x", "x"])


# translations ----------------------------------------------------------------

def test_encode_fo_examples():
    assert encode_fo(A.Equation(x, y)) == A.Univ(A.Iff(x, y))
    assert encode_fo(A.Neg(A.Equation(x, A.BOT_T))) == A.Not(A.Univ(A.Iff(x, A.BOT_T)))
    f = A.Conj((A.Equation(x, A.TOP_T), A.Equation(y, A.BOT_T)))
    assert encode_fo(f) == A.And(A.Univ(A.Iff(x, A.TOP_T)), A.Univ(A.Iff(y, A.BOT_T)))


@settings(max_examples=50, deadline=None)
@given(formulas(names=("x", "y"), relations=(A.Equation,), max_leaves=4))
def test_encode_fo_evaluates_to_top_iff_true(f):
    star = encode_fo(f)
    for M in models(3, ("x", "y")):
        assert model_check(M, f) == (eval_mask(M, star) == M.frame.full)


def test_tau1_examples():
    assert tau1(A.Prec(x, y)) == A.Equation(A.Sim(x, y), A.TOP_T)
    assert tau1(A.TOP) == A.TOP
    f = A.Disj((A.Neg(A.Prec(x, y)), A.Prec(y, x)))
    assert tau1(f) == A.Disj((A.Neg(A.Equation(A.Sim(x, y), A.TOP_T)),
                              A.Equation(A.Sim(y, x), A.TOP_T)))


def test_flatten_example():
    fresh, core = flatten_modal(A.Equation(A.Sim(x, y), A.TOP_T))
    assert fresh == ["w1"]
    assert A.term_vars(core) == {"x", "y", "w1"}
    branches = tau2_branches(fresh, core)
    assert branches == [A.Prec(x, y)]


def test_flatten_without_modal_operators():
    fresh, core = flatten_modal(A.Equation(x, y))
    assert fresh == []
    assert core == normalize_atoms(A.Equation(x, y))
    assert tau2_branches(fresh, core) == [core]


def test_flatten_univ_goes_through_sim():
    fresh, core = flatten_modal(A.Equation(A.Univ(x), A.TOP_T))
    assert len(fresh) == 1
    assert tau2_branches(fresh, core) == [A.Prec(A.TOP_T, x)]


def test_flatten_shares_witnesses():
    s = A.Sim(x, y)
    fresh, _ = flatten_modal(A.Equation(A.And(s, s), A.TOP_T))
    assert len(fresh) == 1


def test_tau2_branch_count_bound():
    f = A.Equation(A.Or(A.Sim(x, y), A.Sim(y, x)), A.TOP_T)
    fresh, core = flatten_modal(f)
    assert len(fresh) == 2
    assert 1 <= len(tau2_branches(fresh, core)) <= 4


def test_reverse_orientation_flag_swaps_sides():
    fresh, core = flatten_modal(A.Equation(A.Sim(x, y), A.TOP_T), reverse_orientation=True)
    assert tau2_branches(fresh, core) == [A.Prec(y, x)]


@settings(max_examples=40, deadline=None)
@given(formulas(names=("x", "y"), relations=(A.Prec,), max_leaves=4))
def test_tau2_of_tau1_is_equivalent(f):
    fresh, core = flatten_modal(tau1(f))
    g = A.disj(*tau2_branches(fresh, core))
    for M in models(3, ("x", "y")):
        assert model_check(M, f) == model_check(M, g)


@settings(max_examples=40, deadline=None)
@given(formulas(names=("x",), modal=True, relations=(A.Equation, A.Nleq), max_leaves=3))
def test_flatten_existential_reading(f):
    # exists fresh. core  <=>  f, checked by trying every two-valued witness assignment
    fresh, core = flatten_modal(f)
    for M in models(2, ("x",)):
        X = M.frame
        found = any(
            model_check(KripkeModel(X, {**M.valuation,
                                        **{w_: (X.subset(X.full) if b else frozenset())
                                           for w_, b in zip(fresh, bits_)}}), core)
            for bits_ in itertools.product((True, False), repeat=len(fresh)))
        assert found == model_check(M, f)


def test_expand_nleq():
    f = expand_nleq(A.Nleq(x, y))
    assert f == A.Neg(A.Equation(A.And(x, A.Not(y)), A.BOT_T))


# projective unifier ----------------------------------------------------------

def test_projective_unifier_shape():
    pi = projective_unifier(x, {"x": A.TOP_T})
    bx = A.Univ(x)
    assert pi == {"x": A.Or(A.And(bx, x), A.And(A.Not(bx), A.TOP_T))}
    phi = A.And(x, y)
    pi = projective_unifier(phi, {})
    b = A.Univ(phi)
    assert pi["y"] == A.Or(A.And(b, y), A.And(A.Not(b), y))


def test_projective_unifier_unifies():
    pi = projective_unifier(x, {"x": A.TOP_T})
    assert s2ic_valid(A.Univ(A.substitute(x, pi))).holds


@pytest.mark.parametrize("phi,sigma", [
    ("x | y", {"x": "1"}),
    ("x -> y", {"x": "y"}),
    ("[A]x -> y", {"y": "1"}),
    ("x ~> y", {"x": "0"}),
])
def test_projective_unifier_preserves_unifiers(phi, sigma):
    phi = parse_modal(phi)
    sigma = {k: parse_modal(v) for k, v in sigma.items()}
    assert s2ic_valid(A.substitute(phi, sigma)).holds
    pi = projective_unifier(phi, sigma)
    assert s2ic_valid(A.substitute(phi, pi)).holds


def test_builtin_rho9_shape():
    r = get_rule("rho9")
    assert r.G == parse_modal("x1 ~> x2")
