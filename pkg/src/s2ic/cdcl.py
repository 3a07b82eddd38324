"""A compact CDCL SAT solver with hooks for a theory.

Literals are nonzero integers, ``-v`` being the negation of variable ``v``.
A theory object may implement

* ``propagate(solver)`` called at every propagation fixpoint; returns a list
  of clauses that are consequences of the theory (implied literals first),
* ``final_check(solver)`` called on full assignments; returns clauses that
  the assignment violates, or an empty list to accept it,
* ``backtrack(trail_len)`` to undo state when the trail shrinks.
"""
from __future__ import annotations

import heapq

from .budget import Budget


def luby(i: int) -> int:
    """The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ... (0-based)."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    def __init__(self, nvars: int = 0, theory=None, budget: Budget | None = None):
        self.theory = theory
        self.budget = budget
        self.n = 0
        self.assign = [0]
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.phase = [False]
        self.watches = {}
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.inc = 1.0
        self.ok = True
        self.core = None
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "theory_lemmas": 0}
        for _ in range(nvars):
            self.new_var()

    # ------------------------------------------------------------ setup

    def new_var(self) -> int:
        self.n += 1
        v = self.n
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        self.watches[v] = []
        self.watches[-v] = []
        heapq.heappush(self.heap, (0.0, v))
        return v

    def value(self, lit: int) -> int:
        a = self.assign[abs(lit)]
        return a if lit > 0 else -a

    def decision_level(self) -> int:
        return len(self.trail_lim)

    def add_clause(self, lits) -> bool:
        """Add a problem clause at decision level 0."""
        if not self.ok:
            return False
        if self.trail_lim:
            self.cancel_until(0)
        seen = set()
        out = []
        for l in lits:
            if -l in seen:
                return True
            if l in seen:
                continue
            v = self.value(l)
            if v == 1 and self.level[abs(l)] == 0:
                return True
            if v == -1 and self.level[abs(l)] == 0:
                continue
            seen.add(l)
            out.append(l)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(out)
        return True

    def _attach(self, c):
        self.watches[-c[0]].append(c)
        self.watches[-c[1]].append(c)

    # ------------------------------------------------------------ core

    def _enqueue(self, lit, reason):
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or ``None``.

        ``watches[l]`` holds clauses to revisit when literal ``l`` becomes true,
        i.e. clauses watching ``-l``.
        """
        trail, value = self.trail, self.value
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = -p
            ws = self.watches[p]
            keep = []
            i, n = 0, len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if value(first) == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    if value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self.watches[-c[1]].append(c)
                        break
                else:
                    keep.append(c)
                    if value(first) == -1:
                        keep.extend(ws[i:])
                        self.watches[p] = keep
                        self.qhead = len(trail)
                        return c
                    self._enqueue(first, c)
            self.watches[p] = keep
        return None

    def cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = lit > 0
            self.assign[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        if self.theory is not None:
            self.theory.backtrack(len(self.trail))

    def _bump(self, v):
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1)
                         if self.assign[u] == 0]
            heapq.heapify(self.heap)
        elif self.assign[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl):
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = self.decision_level()
        clause = confl
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _handle_conflict(self, confl) -> bool:
        """Learn from a falsified clause; returns False when the problem is unsat."""
        self.stats["conflicts"] += 1
        top = max(self.level[abs(l)] for l in confl)
        if top == 0:
            return False
        if top < self.decision_level():
            self.cancel_until(top)
        learnt, bt = self._analyze(confl)
        self.cancel_until(bt)
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
        else:
            self._attach(learnt)
            self._enqueue(learnt[0], learnt)
        self.inc *= 1.05
        return True

    def _add_lemmas(self, lemmas):
        """Install theory clauses; returns a falsified one if any."""
        lemmas = [list(dict.fromkeys(c)) for c in lemmas]
        self.stats["theory_lemmas"] += len(lemmas)
        if any(len(c) == 1 for c in lemmas):
            self.cancel_until(0)
        conflict = None
        for c in lemmas:
            if len(c) == 1:
                v = self.value(c[0])
                if v == -1:
                    return c
                if v == 0:
                    self._enqueue(c[0], None)
                continue
            c.sort(key=lambda l: (self.value(l) == -1,
                                  -self.level[abs(l)] if self.value(l) == -1 else 0))
            self._attach(c)
            v0, v1 = self.value(c[0]), self.value(c[1])
            if v0 == -1:
                conflict = conflict or c
            elif v0 == 0 and v1 == -1 and conflict is None:
                self._enqueue(c[0], c)
        return conflict

    def _pick(self):
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.assign[v] == 0:
                return v
        for v in range(1, self.n + 1):
            if self.assign[v] == 0:
                return v
        return None

    def _analyze_final(self, a) -> list:
        """Assumptions that, together with ``a``, force ``-a``."""
        core = [a]
        if self.level[abs(a)] == 0:
            return core
        seen = {abs(a)}
        for x in reversed(self.trail[self.trail_lim[0]:]):
            v = abs(x)
            if v not in seen:
                continue
            r = self.reason[v]
            if r is None:
                core.append(x)
                continue
            for q in r:
                if abs(q) != v and self.level[abs(q)] > 0:
                    seen.add(abs(q))
        return core

    def solve(self, assumptions=()) -> bool:
        """Search for a model extending ``assumptions``.

        On failure ``self.core`` holds a subset of the assumptions that is
        already inconsistent (empty when the clauses alone are).
        """
        self.core = None
        if not self.ok:
            self.core = []
            return False
        assumptions = list(assumptions)
        if self.trail_lim:
            self.cancel_until(0)
        restart_no, conflicts_here = 0, 0
        limit = 64 * luby(0)
        while True:
            confl = self._propagate()
            if confl is None and self.theory is not None:
                lemmas = self.theory.propagate(self)
                if lemmas:
                    confl = self._add_lemmas(lemmas)
                    if confl is None:
                        continue
            if confl is not None:
                conflicts_here += 1
                if not self._handle_conflict(confl):
                    self.ok = False
                    self.core = []
                    return False
                if self.budget is not None and self.stats["conflicts"] % 64 == 0:
                    self.budget.check(self.stats)
                continue
            if conflicts_here >= limit:
                restart_no += 1
                conflicts_here = 0
                limit = 64 * luby(restart_no)
                self.cancel_until(0)
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                val = self.value(a)
                if val == -1:
                    self.core = self._analyze_final(a)
                    return False
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(a, None)
                continue
            v = self._pick()
            if v is None:
                if self.theory is not None:
                    lemmas = self.theory.final_check(self)
                    if lemmas:
                        confl = self._add_lemmas(lemmas)
                        if confl is not None and not self._handle_conflict(confl):
                            self.ok = False
                            self.core = []
                            return False
                        continue
                return True
            self.stats["decisions"] += 1
            if self.budget is not None and self.stats["decisions"] % 256 == 0:
                self.budget.check(self.stats)
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] else -v, None)

    def model(self) -> list:
        return [self.assign[v] == 1 for v in range(self.n + 1)]


def tseitin(skeleton, solver: Solver, leaf) -> int:
    """Encode a skeleton (see ``boolalg.Compiled``) and return its literal.

    ``leaf(i)`` gives the literal of atom ``i``.
    """
    cache = {}
    true_lit = None

    def const(b):
        nonlocal true_lit
        if true_lit is None:
            true_lit = solver.new_var()
            solver.add_clause([true_lit])
        return true_lit if b else -true_lit

    def enc(s):
        key = id(s)
        if key in cache:
            return cache[key][1]
        op = s[0]
        if op == "c":
            r = const(s[1])
        elif op == "a":
            r = leaf(s[1])
        elif op == "n":
            r = -enc(s[1])
        elif op in ("&", "|"):
            kids = [enc(c) for c in s[1]]
            if not kids:
                r = const(op == "&")
            elif len(kids) == 1:
                r = kids[0]
            else:
                x = solver.new_var()
                if op == "&":
                    for k in kids:
                        solver.add_clause([-x, k])
                    solver.add_clause([x] + [-k for k in kids])
                else:
                    for k in kids:
                        solver.add_clause([x, -k])
                    solver.add_clause([-x] + kids)
                r = x
        elif op == ">":
            a, b = enc(s[1]), enc(s[2])
            x = solver.new_var()
            solver.add_clause([-x, -a, b])
            solver.add_clause([x, a])
            solver.add_clause([x, -b])
            r = x
        else:
            a, b = enc(s[1]), enc(s[2])
            x = solver.new_var()
            solver.add_clause([-x, -a, b])
            solver.add_clause([-x, a, -b])
            solver.add_clause([x, a, b])
            solver.add_clause([x, -a, -b])
            r = x
        cache[key] = (s, r)
        return r

    return enc(skeleton)
