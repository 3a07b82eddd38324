"""Pretty printer producing text that reparses to the same tree."""
from __future__ import annotations

from . import ast as A

# term precedence levels, loosest first
_TPREC = {A.Sim: 1, A.Iff: 2, A.Imp: 3, A.Or: 4, A.Xor: 5, A.And: 6}
_TSYM = {A.Sim: "~>", A.Iff: "<->", A.Imp: "->", A.Or: "|", A.Xor: "+", A.And: "&"}
_UNARY = {A.Not: "!", A.Univ: "[A]", A.Diam: "<E>"}
_RSYM = {A.Prec: "<<", A.Equation: "==", A.Nleq: "</="}


def _tlevel(t):
    if isinstance(t, (A.Const, A.Var)):
        return 8
    if type(t) in _UNARY:
        return 7
    return _TPREC[type(t)]


def _term(t, need=0):
    s, lvl = _term_raw(t)
    return f"({s})" if lvl < need else s


def _term_raw(t):
    if isinstance(t, A.Const):
        return ("1" if t.value else "0"), 8
    if isinstance(t, A.Var):
        return t.name, 8
    if type(t) in _UNARY:
        return _UNARY[type(t)] + _term(t.arg, 7), 7
    p = _TPREC[type(t)]
    if isinstance(t, A.Sim):
        l, r = p + 1, p + 1
    elif isinstance(t, A.Imp):
        l, r = p + 1, p
    else:
        l, r = p, p + 1
    return f"{_term(t.left, l)} {_TSYM[type(t)]} {_term(t.right, r)}", p


def _formula(f, need=0):
    s, lvl = _formula_raw(f)
    return f"({s})" if lvl < need else s


def _formula_raw(f):
    if isinstance(f, A.Top):
        return "top", 7
    if isinstance(f, A.Bottom):
        return "bot", 7
    if type(f) in _RSYM:
        return f"{_term(f.lhs)} {_RSYM[type(f)]} {_term(f.rhs)}", 6
    if isinstance(f, A.Neg):
        # parenthesize relations under ~ for readability; still reparses identically
        return "~" + _formula(f.arg, 7), 5
    if isinstance(f, A.Conj):
        return " /\\ ".join(_formula(a, 5) for a in f.args), 4
    if isinstance(f, A.Disj):
        return " \\/ ".join(_formula(a, 4) for a in f.args), 3
    if isinstance(f, A.FoImp):
        return f"{_formula(f.left, 3)} => {_formula(f.right, 2)}", 2
    if isinstance(f, A.FoIff):
        return f"{_formula(f.left, 1)} <=> {_formula(f.right, 2)}", 1
    raise TypeError(f"cannot print {f!r}")


def pretty(node) -> str:
    if isinstance(node, A.Pi2Rule):
        return pretty_rule(node)
    if isinstance(node, A.Formula):
        return _formula(node)
    return _term(node)


def pretty_rule(rule: A.Pi2Rule) -> str:
    lines = [f"rule {rule.name}"]
    if rule.xvars:
        lines.append("xvars " + " ".join(rule.xvars))
    if rule.pvars:
        lines.append("pvars " + " ".join(rule.pvars))
    lines.append(f"F: {pretty(rule.F)}")
    lines.append(f"G: {pretty(rule.G)}")
    return "\n".join(lines) + "\n"
