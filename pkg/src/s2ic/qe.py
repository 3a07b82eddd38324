"""Quantifier elimination for contact formulas in the model completion.

Given ``phi(x, y)`` the engine computes the strongest quantifier-free
``psi(x)`` implied by ``exists y. phi``.  Models are analysed through pair
types: a 1-step model is a finite set of related pairs, and the atoms it
satisfies are the intersection of what its pairs satisfy.  Consequences over
``x`` are expressed with minterm atoms ``m_e << !m_d``, which fail in a model
exactly when some edge joins a point of kept type ``e`` to one of type ``d``.
Only the orientation ``e <= d`` is emitted since ``m_e << !m_d`` and
``m_d << !m_e`` are equivalent.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .boolalg import PairSpace, compile_formula, mask_to_bool
from .budget import Budget
from .errors import ResourceLimit
from .sat import entails
from .syntax import ast as A
from .syntax.transform import minterm, normalize_atoms, sign_vectors

MAX_QE_VARS = 8


@dataclass
class QEResult:
    formula: A.Formula
    kept: list
    eliminated: list
    stats: dict = field(default_factory=dict)


class MintermBasis:
    """Unordered minterm atoms over the kept variables.

    Kept valuations are bitmasks (bit ``j`` = kept variable ``j``); they are
    listed in sign-vector order, positive literals first.
    """

    def __init__(self, kept):
        self.kept = list(kept)
        k = len(self.kept)
        self.k = k
        self.signs = sign_vectors(k)
        # valuation bitmask -> position in sign-vector order
        self.order = [sum((0 if a >> j & 1 else 1) << (k - 1 - j) for j in range(k))
                      for a in range(1 << k)]
        m = 1 << k
        self.index = {}
        self.pairs = []
        for e in range(m):
            for d in range(e, m):
                self.index[(e, d)] = len(self.pairs)
                self.pairs.append((e, d))
        self.size = len(self.pairs)
        self.terms = [minterm(s, self.kept) for s in self.signs]

    def killed(self, a: int, b: int) -> int:
        """Minterm atoms failing on a pair whose kept parts are ``a`` and ``b``."""
        ea, eb = self.order[a], self.order[b]
        lo, hi = min(ea, eb), max(ea, eb)
        return (1 << self.index[(ea, ea)]) | (1 << self.index[(eb, eb)]) | \
            (1 << self.index[(lo, hi)])

    def atom(self, i: int) -> A.Prec:
        e, d = self.pairs[i]
        return A.Prec(self.terms[e], A.tnot(self.terms[d]))

    def atoms_of(self, mask: int) -> list:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.atom(low.bit_length() - 1))
            mask ^= low
        return out


def _minimal(masks) -> list:
    """The inclusion-minimal members of a collection of bitmasks, canonically sorted."""
    uniq = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    out = []
    for m in uniq:
        if not any(o & m == o for o in out):
            out.append(m)
    return sorted(out)


def _partial(s, val):
    """Three-valued evaluation of a skeleton; ``val`` maps atom index to bool."""
    op = s[0]
    if op == "c":
        return s[1]
    if op == "a":
        return val.get(s[1])
    if op == "n":
        r = _partial(s[1], val)
        return None if r is None else not r
    if op == "&":
        unknown = False
        for c in s[1]:
            r = _partial(c, val)
            if r is False:
                return False
            unknown |= r is None
        return None if unknown else True
    if op == "|":
        unknown = False
        for c in s[1]:
            r = _partial(c, val)
            if r is True:
                return True
            unknown |= r is None
        return None if unknown else False
    a, b = _partial(s[1], val), _partial(s[2], val)
    if op == ">":
        if a is False or b is True:
            return True
        if a is None or b is None:
            return None
        return False
    if a is None or b is None:
        return None
    return a == b


def eliminate_with_stats(phi: A.Formula, eliminate_vars, kept_vars, *,
                         budget: Budget | None = None, trace=None) -> QEResult:
    budget = budget or Budget()
    t0 = time.monotonic()
    phi = normalize_atoms(phi)
    present = A.term_vars(phi)
    kept_vars, eliminate_vars = list(kept_vars), list(eliminate_vars)
    overlap = set(kept_vars) & set(eliminate_vars)
    if overlap:
        raise ValueError(f"variables both kept and eliminated: {sorted(overlap)}")
    stray = present - set(kept_vars) - set(eliminate_vars)
    if stray:
        raise ValueError(f"variables neither kept nor eliminated: {sorted(stray)}")
    kept = [x for x in kept_vars if x in present]
    elim = [y for y in eliminate_vars if y in present]
    variables = kept + elim
    if len(variables) > MAX_QE_VARS:
        raise ResourceLimit(f"{len(variables)} variables exceed the QE limit {MAX_QE_VARS}",
                            {"vars": len(variables)})

    comp = compile_formula(phi, variables=variables, max_atoms=budget.max_atoms)
    basis = MintermBasis(kept)
    space = PairSpace(len(variables))
    if space.size > budget.max_pair_types:
        raise ResourceLimit(f"{space.size} pair types exceed the limit",
                            {"pair_types": space.size})

    # deduplicate pair types by (atom signature, killed minterms)
    natoms = len(comp.atoms)
    H = np.zeros((natoms, space.size), dtype=bool)
    for i, (t, u) in enumerate(comp.keys):
        H[i] = mask_to_bool(space.holds(t, u), space.size)
    kmask = (1 << len(kept)) - 1
    types = {}
    for p in range(space.size):
        v, w = space.pair(p)
        sig = 0
        for i in np.flatnonzero(H[:, p]):
            sig |= 1 << int(i)
        key = (sig, basis.killed(v & kmask, w & kmask))
        types.setdefault(key, p)
    tlist = list(types)  # canonical: first occurrence in pair order
    T = len(tlist)
    tall = (1 << T) - 1
    Mt = [0] * natoms
    for ti, (sig, _) in enumerate(tlist):
        for i in range(natoms):
            if sig >> i & 1:
                Mt[i] |= 1 << ti
    killed_of = [k for _, k in tlist]

    stats = {"vars": len(variables), "kept": len(kept), "atoms": natoms,
             "pair_types": T, "classes": 0, "families": 0, "minterm_atoms": basis.size}

    classes = []

    def dfs(i, C, val, dead):
        if len(classes) > budget.max_classes:
            raise ResourceLimit("too many classes", stats)
        r = _partial(comp.skeleton, val)
        if r is False:
            return
        if i == natoms:
            classes.append((C, dict(val), list(dead)))
            return
        # atom i true
        C1 = C & Mt[i]
        if C1 and all(C1 & ~Mt[a] for a in dead):
            val[i] = True
            dfs(i + 1, C1, val, dead)
            del val[i]
        # atom i false
        if C & ~Mt[i]:
            val[i] = False
            dead.append(i)
            dfs(i + 1, C, val, dead)
            dead.pop()
            del val[i]

    dfs(0, tall, {}, [])
    budget.check(stats)

    disjuncts = []
    full_k = (1 << basis.size) - 1
    for ci, (C, val, dead) in enumerate(classes):
        budget.check(stats)
        members = [ti for ti in range(T) if C >> ti & 1]
        union = 0
        for ti in members:
            union |= killed_of[ti]
        theta = full_k & ~union
        if dead:
            killers = []
            for a in dead:
                ks = _minimal(killed_of[ti] for ti in members if not Mt[a] >> ti & 1)
                killers.append(ks)
            killers.sort(key=len)
            states = [0]
            for ks in killers:
                states = _minimal(s | k for s in states for k in ks)
                if len(states) > budget.max_families:
                    raise ResourceLimit("too many choice families", stats)
        else:
            states = _minimal(killed_of[ti] for ti in members)
        stats["families"] += len(states)
        chis = [A.conj(*(A.neg(b) for b in basis.atoms_of(s))) for s in states]
        disjuncts.append(A.conj(*basis.atoms_of(theta), A.disj(*chis)))
        if trace is not None:
            trace({"class": ci, "true_atoms": sum(1 for v in val.values() if v),
                   "dead_atoms": len(dead), "pair_types": len(members),
                   "theta_atoms": theta.bit_count(), "families": len(states)})
    stats["classes"] = len(classes)
    stats["time_ms"] = round((time.monotonic() - t0) * 1000, 3)
    return QEResult(A.disj(*disjuncts), kept, elim, stats)


def eliminate(phi: A.Formula, eliminate_vars, kept_vars, **kw) -> A.Formula:
    """The strongest quantifier-free consequence over ``kept_vars`` of ``exists eliminate_vars. phi``."""
    return eliminate_with_stats(phi, eliminate_vars, kept_vars, **kw).formula


def simplify(psi: A.Formula, *, budget: Budget | None = None) -> A.Formula:
    """Drop disjuncts implied by the other disjuncts and conjuncts implied by the rest."""
    while True:
        new = _simplify_once(psi, budget)
        if new == psi:
            return new
        psi = new


def _simplify_once(f, budget):
    if isinstance(f, A.Neg):
        return A.neg(_simplify_once(f.arg, budget))
    if isinstance(f, (A.FoImp, A.FoIff)):
        return type(f)(_simplify_once(f.left, budget), _simplify_once(f.right, budget))
    if not isinstance(f, (A.Conj, A.Disj)):
        return f
    is_conj = isinstance(f, A.Conj)
    build = A.conj if is_conj else A.disj
    node = build(*(_simplify_once(a, budget) for a in f.args))
    if not isinstance(node, type(f)):
        return node
    kept = list(dict.fromkeys(node.args))
    i = 0
    while i < len(kept) and len(kept) > 1:
        rest = build(*(kept[:i] + kept[i + 1:]))
        redundant = entails(rest, kept[i], budget=budget) if is_conj \
            else entails(kept[i], rest, budget=budget)
        if redundant:
            del kept[i]
        else:
            i += 1
    return build(*kept)
