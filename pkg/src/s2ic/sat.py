"""Satisfiability of quantifier-free contact formulas.

Every satisfiable formula has a model on a 1-step frame, i.e. a disjoint union
of related point pairs.  The search abstracts atoms to propositional variables
and checks each candidate against the theory of pair types: a set of positive
atoms ``P`` and negative atoms ``Neg`` is consistent iff some pair satisfies
all of ``P`` and, for each ``a`` in ``Neg``, some pair satisfying ``P`` violates
``a``.  Since the pairs of a 1-step model share no edges, each negative atom
can be witnessed independently and the witnesses glued side by side.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import boolalg
from .boolalg import Compiled, PairSpace, compile_formula, term_eval
from .budget import Budget
from .cdcl import Solver, tseitin
from .errors import ResourceLimit
from .frames.core import ContactFrame, KripkeModel, all_frames
from .syntax import ast as A

ENUM_VARS_LIMIT = 6


class Status(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"

    def __str__(self):
        return self.value


@dataclass
class SatResult:
    status: Status
    model: KripkeModel | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def __bool__(self):
        return self.sat


@dataclass
class Entailment:
    holds: bool
    countermodel: KripkeModel | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


# ---------------------------------------------------------------- pair models

def pair_model(variables, pairs) -> KripkeModel:
    """Disjoint union of 2-cliques ``p_i - q_i`` carrying the given valuation pairs.

    ``pairs`` holds ``(v, w)`` with ``v``, ``w`` dicts from variable to bool.
    """
    pts, edges = [], []
    val = {x: set() for x in variables}
    for i, (v, w) in enumerate(pairs):
        p, q = f"p{i}", f"q{i}"
        pts += [p, q]
        edges.append((p, q))
        for x in variables:
            if v.get(x):
                val[x].add(p)
            if w.get(x):
                val[x].add(q)
    frame = ContactFrame(tuple(pts), frozenset(edges), name="M")
    return KripkeModel(frame, {x: frozenset(s) for x, s in val.items()})


def _valuation(variables, bits_: int) -> dict:
    return {x: bool(bits_ >> j & 1) for j, x in enumerate(variables)}


# ---------------------------------------------------------------- theories

class _EnumTheory:
    """Exact theory propagation over an explicit table of pair types."""

    def __init__(self, atom_vars, holds, full):
        self.atom_vars = atom_vars
        self.var_atom = {v: i for i, v in enumerate(atom_vars)}
        self.M = holds
        self.kill = [full & ~m for m in holds]
        self.full = full
        self.C = full
        self.scan = 0
        self.stack = []
        self.checks = 0
        self.pending = True  # atoms valid outright are found on the first call

    def backtrack(self, n):
        st = self.stack
        while st and st[-1][0] >= n:
            self.C = st.pop()[1]
        self.scan = min(self.scan, n)

    def _explain(self, target):
        cands = list(dict.fromkeys(i for _, _, i in self.stack))
        chosen = []
        remaining = target
        kill = self.kill
        while remaining:
            best = max(cands, key=lambda i: (kill[i] & remaining).bit_count())
            if not kill[best] & remaining:
                raise AssertionError("theory explanation failed")
            chosen.append(best)
            remaining &= ~kill[best]
        return [-self.atom_vars[i] for i in chosen]

    def propagate(self, s):
        trail = s.trail
        changed = False
        for k in range(self.scan, len(trail)):
            i = self.var_atom.get(trail[k])
            if i is not None:
                nc = self.C & self.M[i]
                self.stack.append((k, self.C, i))
                if nc != self.C:
                    changed = True
                    self.C = nc
        self.scan = len(trail)
        if not (changed or self.pending):
            return []
        self.pending = False
        self.checks += 1
        C = self.C
        if C == 0:
            return [self._explain(self.full)]
        out = []
        assign = s.assign
        for j, v in enumerate(self.atom_vars):
            if assign[v] != 1 and C & self.kill[j] == 0:
                out.append([v] + self._explain(self.kill[j]))
        return out

    def final_check(self, s):
        return []


class _SearchTheory:
    """Lazy theory check by propositional search for witness pairs.

    One incremental solver holds the pair constraints of every atom behind a
    selector literal; a check solves under the selectors of the current
    positives (and of the negative being witnessed), so a failure comes with a
    small core and the blocking clause mentions only the atoms in it.
    """

    def __init__(self, atom_vars, atoms, variables, budget):
        self.atom_vars = atom_vars
        self.atoms = atoms
        self.variables = variables
        self.budget = budget
        self.cache = {}
        self.checks = 0
        sv = self.sv = Solver(budget=budget)
        self.side = {x: (sv.new_var(), sv.new_var()) for x in variables}
        self.pos_sel = {}
        self.neg_sel = {}
        self.last_partial = None

    def _lit(self, t, k):
        return _term_lit(t, self.sv, {x: self.side[x][k] for x in self.variables})

    def _pos(self, i):
        if i not in self.pos_sel:
            a = self.atoms[i]
            t = (self._lit(a.lhs, 0), self._lit(a.lhs, 1))
            u = (self._lit(a.rhs, 0), self._lit(a.rhs, 1))
            sel = self.sv.new_var()
            for x in (0, 1):
                for y in (0, 1):
                    self.sv.add_clause([-sel, -t[x], u[y]])
            self.pos_sel[i] = sel
        return self.pos_sel[i]

    def _neg(self, j):
        if j not in self.neg_sel:
            a = self.atoms[j]
            sel = self.sv.new_var()
            self.sv.add_clause([-sel, self._lit(a.lhs, 0)])
            self.sv.add_clause([-sel, -self._lit(a.rhs, 1)])
            self.neg_sel[j] = sel
        return self.neg_sel[j]

    def backtrack(self, n):
        pass

    def propagate(self, s):
        # partial assignments: a failure here persists in every extension
        assign = s.assign
        P = tuple(i for i, v in enumerate(self.atom_vars) if assign[v] == 1)
        if not P or P == self.last_partial:
            return []
        self.last_partial = P
        pair, core = self.check(P, None)
        return [] if pair is not None else [[-self.atom_vars[i] for i in core[0]]]

    def _lemmas(self, P, neg):
        lemmas = []
        for j in neg or [None]:
            pair, core = self.check(P, j)
            if pair is None:
                used, with_j = core
                clause = [-self.atom_vars[i] for i in used]
                if with_j:
                    clause.append(self.atom_vars[j])
                lemmas.append(clause)
                if not with_j:
                    break
        return lemmas

    def check(self, P, j):
        """Witness pair for positives ``P`` and negative ``j``, or the failing core."""
        key = (P, j)
        if key in self.cache:
            return self.cache[key]
        self.checks += 1
        sel = {self._pos(i): i for i in P}
        assume = list(sel)
        if j is not None:
            assume.insert(0, self._neg(j))
        sv = self.sv
        if sv.solve(assume):
            m = sv.model()
            res = (({x: m[self.side[x][0]] for x in self.variables},
                    {x: m[self.side[x][1]] for x in self.variables}), None)
        else:
            core = set(sv.core)
            res = (None, ([sel[l] for l in sel if l in core],
                          j is not None and self.neg_sel[j] in core))
        self.cache[key] = res
        return res

    def witness(self, P, j):
        return self.check(P, j)[0]

    def final_check(self, s):
        assign = s.assign
        P = tuple(i for i, v in enumerate(self.atom_vars) if assign[v] == 1)
        neg = [i for i, v in enumerate(self.atom_vars) if assign[v] != 1]
        return self._lemmas(P, neg)


def _term_lit(t, solver, leaf):
    if isinstance(t, A.Var):
        return leaf[t.name]
    if isinstance(t, A.Const):
        v = solver.new_var()
        solver.add_clause([v if t.value else -v])
        return v
    if isinstance(t, A.Not):
        return -_term_lit(t.arg, solver, leaf)
    a, b = _term_lit(t.left, solver, leaf), _term_lit(t.right, solver, leaf)
    x = solver.new_var()
    if isinstance(t, A.And):
        cls = [[-x, a], [-x, b], [x, -a, -b]]
    elif isinstance(t, A.Or):
        cls = [[x, -a], [x, -b], [-x, a, b]]
    elif isinstance(t, A.Imp):
        cls = [[x, a], [x, -b], [-x, -a, b]]
    elif isinstance(t, A.Iff):
        cls = [[-x, -a, b], [-x, a, -b], [x, a, b], [x, -a, -b]]
    else:
        cls = [[-x, a, b], [-x, -a, -b], [x, -a, b], [x, a, -b]]
    for c in cls:
        solver.add_clause(c)
    return x


# ---------------------------------------------------------------- entry points

def satisfiable_compiled(comp: Compiled, *, budget: Budget | None = None,
                         enum_limit: int = ENUM_VARS_LIMIT,
                         pair_space: PairSpace | None = None, holds=None) -> SatResult:
    budget = budget or Budget()
    stats = {"atoms": len(comp.atoms), "vars": comp.nvars}
    budget.check(stats)
    if len(comp.atoms) > budget.max_atoms:
        raise ResourceLimit(f"{len(comp.atoms)} atoms exceed the limit {budget.max_atoms}", stats)
    enum = comp.masked and comp.nvars <= enum_limit
    stats["mode"] = "enumerate" if enum else "search"

    theory = None
    sv = Solver(budget=budget)
    atom_vars = [sv.new_var() for _ in comp.atoms]
    if enum:
        space = pair_space or PairSpace(comp.nvars)
        if holds is None:
            holds = [space.holds(t, u) for t, u in comp.keys]
        stats["pair_types"] = space.size
        theory = _EnumTheory(atom_vars, holds, space.all)
    else:
        theory = _SearchTheory(atom_vars, comp.atoms, comp.variables, budget)
    sv.theory = theory
    root = tseitin(comp.skeleton, sv, lambda i: atom_vars[i])
    sv.add_clause([root])
    ok = sv.solve()
    stats.update({k: sv.stats[k] for k in ("decisions", "conflicts", "theory_lemmas")})
    stats["theory_checks"] = theory.checks
    if not ok:
        return SatResult(Status.UNSAT, None, stats)

    m = sv.model()
    P = [i for i, v in enumerate(atom_vars) if m[v]]
    neg = [i for i, v in enumerate(atom_vars) if not m[v]]
    pairs = []
    if enum:
        C = space.all
        for i in P:
            C &= holds[i]
        chosen = []
        for j in neg or [None]:
            cand = C if j is None else C & ~holds[j]
            k = (cand & -cand).bit_length() - 1
            if k not in chosen:
                chosen.append(k)
        for k in chosen:
            v, w = space.pair(k)
            pairs.append((_valuation(comp.variables, v), _valuation(comp.variables, w)))
    else:
        P = tuple(P)
        for j in neg or [None]:
            pr = theory.witness(P, j)
            if pr not in pairs:
                pairs.append(pr)
    return SatResult(Status.SAT, pair_model(comp.variables, pairs), stats)


def satisfiable(phi: A.Formula, *, budget: Budget | None = None,
                enum_limit: int = ENUM_VARS_LIMIT) -> SatResult:
    """Decide satisfiability over contact algebras; models live on 1-step frames."""
    budget = budget or Budget()
    try:
        comp = compile_formula(phi, max_atoms=budget.max_atoms)
    except ResourceLimit:
        raise
    return satisfiable_compiled(comp, budget=budget, enum_limit=enum_limit)


def entails(phi: A.Formula, psi: A.Formula, **kw) -> Entailment:
    r = satisfiable(A.conj(phi, A.neg(psi)), **kw)
    return Entailment(not r.sat, r.model, r.stats)


def equivalent(phi: A.Formula, psi: A.Formula, **kw) -> bool:
    return bool(entails(phi, psi, **kw)) and bool(entails(psi, phi, **kw))


def valid(phi: A.Formula, **kw) -> Entailment:
    return entails(A.TOP, phi, **kw)


# ---------------------------------------------------------------- oracle

ORACLE_WORK_LIMIT = 1 << 22


def _np_term(t, arrs, full):
    if isinstance(t, A.Const):
        return full if t.value else 0
    if isinstance(t, A.Var):
        return arrs[t.name]
    if isinstance(t, A.Not):
        return full & ~_np_term(t.arg, arrs, full)
    a, b = _np_term(t.left, arrs, full), _np_term(t.right, arrs, full)
    if isinstance(t, A.And):
        return a & b
    if isinstance(t, A.Or):
        return a | b
    if isinstance(t, A.Imp):
        return (full & ~a) | b
    if isinstance(t, A.Iff):
        return full & ~(a ^ b)
    return a ^ b


def _np_formula(f, atom_val, shape):
    if isinstance(f, (A.Top, A.Bottom)):
        return np.full(shape, isinstance(f, A.Top))
    if isinstance(f, A._Rel):
        return atom_val(f)
    if isinstance(f, A.Neg):
        return ~_np_formula(f.arg, atom_val, shape)
    if isinstance(f, A.Conj):
        out = np.ones(shape, bool)
        for a in f.args:
            out = out & _np_formula(a, atom_val, shape)
        return out
    if isinstance(f, A.Disj):
        out = np.zeros(shape, bool)
        for a in f.args:
            out = out | _np_formula(a, atom_val, shape)
        return out
    l, r = _np_formula(f.left, atom_val, shape), _np_formula(f.right, atom_val, shape)
    if isinstance(f, A.FoImp):
        return ~l | r
    return ~(l ^ r)


def brute_force_oracle(phi: A.Formula, max_points: int = 4) -> SatResult:
    """Search every frame with at most ``max_points`` points and every valuation.

    Frames are taken up to isomorphism, which loses nothing because all
    valuations are tried.  Not restricted to 1-step frames.
    """
    variables = sorted(A.term_vars(phi))
    n = len(variables)
    checked = 0
    for k in range(1, max_points + 1):
        if (1 << (k * n)) > ORACLE_WORK_LIMIT:
            raise ResourceLimit(f"oracle: {n} variables over {k} points is too large",
                                {"vars": n, "points": k})
        full = (1 << k) - 1
        grid = np.arange(1 << (k * n), dtype=np.int64)
        arrs = {x: (grid >> (k * j)) & full for j, x in enumerate(variables)}
        for X in all_frames(k, up_to_iso=True):
            img = np.array([X.image(m) for m in range(1 << k)], dtype=np.int64)

            def atom_val(a, arrs=arrs, img=img, full=full):
                t = np.broadcast_to(_np_term(a.lhs, arrs, full), grid.shape)
                u = np.broadcast_to(_np_term(a.rhs, arrs, full), grid.shape)
                if isinstance(a, A.Prec):
                    return (img[t] & ~u & full) == 0
                if isinstance(a, A.Equation):
                    return t == u
                return (t & ~u & full) != 0

            ok = _np_formula(phi, atom_val, grid.shape)
            checked += 1
            hits = np.flatnonzero(ok)
            if hits.size:
                g = int(hits[0])
                val = {x: X.subset(g >> (k * j) & full) for j, x in enumerate(variables)}
                return SatResult(Status.SAT, KripkeModel(X, val),
                                 {"frames": checked, "points": k})
    return SatResult(Status.UNSAT, None, {"frames": checked})
