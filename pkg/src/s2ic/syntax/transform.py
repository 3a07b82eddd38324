"""Normalization and the translations between the modal and the contact language."""
from __future__ import annotations

import itertools

from . import ast as A
from .ast import (BOT_T, BOTTOM, TOP, TOP_T, Const, Equation, Formula, Neg, Nleq, Not, Prec,
                  Term, Var, conj, disj, neg, tnot)


def _diff(t: Term, u: Term) -> Term:
    if u == BOT_T:
        return t
    if t == BOT_T:
        return u
    if u == TOP_T:
        return tnot(t)
    if t == TOP_T:
        return tnot(u)
    return A.Xor(t, u)


def zero_atom(t: Term) -> Prec:
    """The atom ``t << !t``, which holds exactly when ``t`` is zero."""
    return Prec(t, tnot(t))


def normalize_atoms(phi: Formula) -> Formula:
    """Replace every equation ``t == u`` by ``(t + u) << !(t + u)``."""
    def fix(a):
        if isinstance(a, Equation):
            return zero_atom(_diff(a.lhs, a.rhs))
        return a
    return A.map_atoms(phi, fix)


def expand_nleq(phi: Formula) -> Formula:
    """Unfold ``a </= b`` into ``~((a & !b) == 0)``."""
    def fix(a):
        if isinstance(a, Nleq):
            return Neg(Equation(A.And(a.lhs, Not(a.rhs)), BOT_T))
        return a
    return A.map_atoms(phi, fix)


def minterm(signs, kept) -> Term:
    lits = [Var(x) if s else Not(Var(x)) for s, x in zip(signs, kept)]
    return A.tand(*lits)


def sign_vectors(k: int):
    """Sign vectors over ``k`` variables, positive literals first."""
    return list(itertools.product((True, False), repeat=k))


def minterm_atoms(kept) -> list:
    """All ``m_e << !m_d`` for pairs of sign vectors ``(e, d)`` over ``kept``."""
    kept = list(kept)
    if len(set(kept)) != len(kept):
        raise ValueError("kept variables must be distinct")
    ms = [minterm(s, kept) for s in sign_vectors(len(kept))]
    return [Prec(me, tnot(md)) for me in ms for md in ms]


def encode_fo(phi: Formula) -> Term:
    """Translate a first-order formula over equations into a single modal formula.

    ``a == b`` becomes ``[A](a <-> b)``.  Contact atoms ``a << b`` are accepted
    as well and become ``a ~> b``.
    """
    if isinstance(phi, A.Top):
        return TOP_T
    if isinstance(phi, A.Bottom):
        return BOT_T
    if isinstance(phi, Equation):
        return A.Univ(A.Iff(phi.lhs, phi.rhs))
    if isinstance(phi, Prec):
        return A.Sim(phi.lhs, phi.rhs)
    if isinstance(phi, Nleq):
        raise ValueError("expand '</=' atoms before encoding")
    if isinstance(phi, Neg):
        return Not(encode_fo(phi.arg))
    if isinstance(phi, (A.Conj, A.Disj)):
        op = A.And if isinstance(phi, A.Conj) else A.Or
        parts = [encode_fo(a) for a in phi.args]
        out = parts[0]
        for p in parts[1:]:
            out = op(out, p)
        return out
    if isinstance(phi, A.FoImp):
        return A.Imp(encode_fo(phi.left), encode_fo(phi.right))
    if isinstance(phi, A.FoIff):
        return A.Iff(encode_fo(phi.left), encode_fo(phi.right))
    raise TypeError(f"not a formula: {phi!r}")


def tau1(phi: Formula) -> Formula:
    """Map each contact atom ``t << u`` to ``(t ~> u) == 1``."""
    return A.map_atoms(phi, lambda a: Equation(A.Sim(a.lhs, a.rhs), TOP_T)
                       if isinstance(a, Prec) else a)


def _fresh_names(prefix: str, taken: set):
    i = 1
    while True:
        name = f"{prefix}{i}"
        if name not in taken:
            yield name
        i += 1


def flatten_modal(phi: Formula, *, reverse_orientation: bool = False, prefix: str = "w"):
    """Name every strict-implication subterm by a fresh two-valued witness.

    Returns ``(fresh, core)`` where ``core`` is an equation-free contact formula
    such that ``exists fresh. core`` is equivalent to ``phi`` over simple
    algebras.  ``reverse_orientation`` swaps the sides of the witness atom and
    exists only to compare against the alternative reading; it is not sound.
    """
    phi = A.eliminate_diamonds(phi)
    names = _fresh_names(prefix, A.term_vars(phi))
    witness: dict = {}
    fresh: list = []
    blocks: list = []

    def flat(t: Term) -> Term:
        if isinstance(t, (Const, Var)):
            return t
        if isinstance(t, A.Univ):
            return flat(A.Sim(TOP_T, t.arg))
        if isinstance(t, A.Sim):
            lhs, rhs = flat(t.left), flat(t.right)
            key = (lhs, rhs)
            if key not in witness:
                w = next(names)
                witness[key] = w
                fresh.append(w)
                atom = Prec(rhs, lhs) if reverse_orientation else Prec(lhs, rhs)
                wv = Var(w)
                blocks.append(disj(conj(Equation(wv, TOP_T), atom),
                                   conj(Equation(wv, BOT_T), neg(atom))))
            return Var(witness[key])
        if isinstance(t, Not):
            return Not(flat(t.arg))
        return type(t)(flat(t.left), flat(t.right))

    def atom(a):
        lhs, rhs = flat(a.lhs), flat(a.rhs)
        if isinstance(a, Nleq):
            c = A.And(lhs, Not(rhs))
            return neg(zero_atom(c))
        return type(a)(lhs, rhs)

    body = A.map_atoms(phi, atom)
    core = normalize_atoms(conj(*blocks, body))
    return fresh, core


# ---------------------------------------------------------------- constant folding

def fold_term(t: Term) -> Term:
    if isinstance(t, (Const, Var)):
        return t
    if isinstance(t, Not):
        return tnot(fold_term(t.arg))
    if isinstance(t, (A.Univ, A.Diam)):
        a = fold_term(t.arg)
        return a if isinstance(a, Const) else type(t)(a)
    l, r = fold_term(t.left), fold_term(t.right)
    if isinstance(t, A.Sim):
        if isinstance(l, Const) and isinstance(r, Const):
            return Const((not l.value) or r.value)
        return A.Sim(l, r)
    if isinstance(l, Const) and isinstance(r, Const):
        a, b = l.value, r.value
        return Const({A.And: a and b, A.Or: a or b, A.Imp: (not a) or b,
                      A.Iff: a == b, A.Xor: a != b}[type(t)])
    for c, o, first in ((l, r, True), (r, l, False)):
        if not isinstance(c, Const):
            continue
        v = c.value
        if isinstance(t, A.And):
            return o if v else BOT_T
        if isinstance(t, A.Or):
            return TOP_T if v else o
        if isinstance(t, A.Iff):
            return o if v else tnot(o)
        if isinstance(t, A.Xor):
            return tnot(o) if v else o
        if isinstance(t, A.Imp):
            if first:
                return o if v else TOP_T
            return TOP_T if v else tnot(o)
    return type(t)(l, r)


def fold_formula(phi: Formula) -> Formula:
    if isinstance(phi, (A.Top, A.Bottom)):
        return phi
    if isinstance(phi, A._Rel):
        l, r = fold_term(phi.lhs), fold_term(phi.rhs)
        if isinstance(phi, Prec):
            if l == BOT_T or r == TOP_T:
                return TOP
            if l == TOP_T and r == BOT_T:
                return BOTTOM
        elif isinstance(phi, Equation):
            if l == r:
                return TOP
            if isinstance(l, Const) and isinstance(r, Const):
                return BOTTOM
        return type(phi)(l, r)
    if isinstance(phi, Neg):
        return neg(fold_formula(phi.arg))
    if isinstance(phi, A.Conj):
        return conj(*(fold_formula(a) for a in phi.args))
    if isinstance(phi, A.Disj):
        return disj(*(fold_formula(a) for a in phi.args))
    l, r = fold_formula(phi.left), fold_formula(phi.right)
    if isinstance(phi, A.FoImp):
        return disj(neg(l), r)
    if isinstance(l, (A.Top, A.Bottom)):
        return r if isinstance(l, A.Top) else neg(r)
    if isinstance(r, (A.Top, A.Bottom)):
        return l if isinstance(r, A.Top) else neg(l)
    return A.FoIff(l, r)


def _prop_unsat(phi: Formula, limit: int = 12) -> bool:
    """True if ``phi`` is unsatisfiable even with its atoms read as free propositions."""
    ats = A.atoms(phi)
    if len(ats) > limit:
        return False
    idx = {a: i for i, a in enumerate(ats)}

    def ev(f, bits):
        if isinstance(f, A.Top):
            return True
        if isinstance(f, A.Bottom):
            return False
        if isinstance(f, A._Rel):
            return bool(bits >> idx[f] & 1)
        if isinstance(f, Neg):
            return not ev(f.arg, bits)
        if isinstance(f, A.Conj):
            return all(ev(a, bits) for a in f.args)
        if isinstance(f, A.Disj):
            return any(ev(a, bits) for a in f.args)
        if isinstance(f, A.FoImp):
            return (not ev(f.left, bits)) or ev(f.right, bits)
        return ev(f.left, bits) == ev(f.right, bits)

    return not any(ev(phi, b) for b in range(1 << len(ats)))


def tau2_branches(fresh, core: Formula) -> list:
    """Split on every 0/1 value of the witnesses and constant-fold each branch."""
    fresh = list(fresh)
    out = []
    for values in itertools.product((True, False), repeat=len(fresh)):
        branch = fold_formula(A.substitute(core, {w: Const(v) for w, v in zip(fresh, values)}))
        if isinstance(branch, A.Bottom) or _prop_unsat(branch):
            continue
        out.append(branch)
    return out


def projective_unifier(phi: Term, sigma: dict) -> dict:
    """``x -> ([A]phi & x) | (![A]phi & sigma(x))`` for each variable of ``phi``."""
    box = A.Univ(phi)
    out = {}
    for x in A.variables(phi):
        s = sigma.get(x, Var(x))
        s = A._term(s)
        out[x] = A.Or(A.And(box, Var(x)), A.And(Not(box), s))
    return out
