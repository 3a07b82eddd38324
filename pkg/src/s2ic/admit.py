"""Admissibility of inference rules, validity of modal formulas, and the rule library."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .budget import Budget
from .errors import NotFound, ResourceLimit
from .frames.core import KripkeModel, eval_mask, model_check
from .qe import eliminate_with_stats
from .sat import satisfiable
from .syntax import ast as A
from .syntax.parser import parse_rule
from .syntax.printer import pretty
from .syntax.transform import flatten_modal, tau2_branches


class Verdict(str, Enum):
    ADMISSIBLE = "admissible"
    NOT_ADMISSIBLE = "not_admissible"

    def __str__(self):
        return self.value


@dataclass
class Pi2Matrix:
    """Quantifier-free matrix of the sentence ``forall x, z (G </= z => exists p. F </= z)``.

    ``antecedents`` are the witness branches of ``G </= z`` (over ``kept``),
    ``consequents`` those of ``F </= z`` (over ``kept`` and ``eliminated``).
    The sentence holds iff ``OR antecedents`` implies ``exists eliminated. OR consequents``.
    """

    rule: A.Pi2Rule
    kept: list
    eliminated: list
    z: str
    antecedents: list
    consequents: list

    @property
    def branches(self) -> list:
        return [(a, c) for a in self.antecedents for c in self.consequents]


@dataclass
class AdmissibilityReport:
    rule: str
    verdict: Verdict
    eliminated: A.Formula
    countermodel: KripkeModel | None = None
    verified: bool = False
    stats: dict = field(default_factory=dict)
    branch_results: list = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.verdict is Verdict.ADMISSIBLE


@dataclass
class Validity:
    holds: bool
    countermodel: KripkeModel | None = None
    verified: bool = False
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _fresh(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def pi2_matrix(rule: A.Pi2Rule, *, reverse_orientation: bool = False) -> Pi2Matrix:
    z = _fresh("z", set(rule.xvars) | set(rule.pvars))
    zv = A.Var(z)
    fg, core_g = flatten_modal(A.Nleq(rule.G, zv), reverse_orientation=reverse_orientation)
    ff, core_f = flatten_modal(A.Nleq(rule.F, zv), reverse_orientation=reverse_orientation)
    return Pi2Matrix(rule, list(rule.xvars) + [z], list(rule.pvars), z,
                     tau2_branches(fg, core_g), tau2_branches(ff, core_f))


def _split_independent(phi: A.Formula, elim: set):
    """Separate top-level conjuncts free of eliminated variables from the rest."""
    parts = phi.args if isinstance(phi, A.Conj) else (phi,)
    free = [p for p in parts if not A.term_vars(p) & elim]
    bound = [p for p in parts if A.term_vars(p) & elim]
    return A.conj(*free), A.conj(*bound)


def decide_admissible(rule: A.Pi2Rule, *, budget: Budget | None = None, trace=None,
                      reverse_orientation: bool = False) -> AdmissibilityReport:
    """Decide whether ``rule`` is admissible.

    Each consequent branch has its eliminated variables removed by QE; the rule
    is admissible iff the resulting universal sentence has no countermodel.
    """
    budget = budget or Budget()
    t0 = time.monotonic()
    stats = {"antecedent_branches": 0, "consequent_branches": 0, "branches": 0,
             "classes": 0, "pair_types": 0, "families": 0}
    try:
        m = pi2_matrix(rule, reverse_orientation=reverse_orientation)
        stats["antecedent_branches"] = len(m.antecedents)
        stats["consequent_branches"] = len(m.consequents)
        stats["branches"] = len(m.antecedents) + len(m.consequents)
        elim = set(m.eliminated)
        results = []
        for j, branch in enumerate(m.consequents):
            budget.check(stats)
            free, bound = _split_independent(branch, elim)
            entry = {"branch": j, "independent": pretty(free), "dependent": pretty(bound)}
            if isinstance(bound, A.Top):
                q = A.TOP
                entry.update(kept=[], eliminated=[], qe=pretty(q), stats={})
            else:
                present = A.term_vars(bound)
                kept = [x for x in m.kept if x in present]
                gone = [y for y in m.eliminated if y in present]

                def on_class(rec, j=j):
                    if trace is not None:
                        trace({"event": "class", "branch": j, **rec})

                res = eliminate_with_stats(bound, gone, kept, budget=budget, trace=on_class)
                q = res.formula
                for key in ("classes", "families"):
                    stats[key] += res.stats[key]
                stats["pair_types"] += res.stats["pair_types"]
                entry.update(kept=kept, eliminated=gone, qe=pretty(q), stats=res.stats)
            entry["formula"] = A.conj(free, q)
            results.append(entry)
            if trace is not None:
                trace({"event": "branch", **{k: v for k, v in entry.items() if k != "formula"}})

        ante = A.disj(*m.antecedents)
        cons = [e["formula"] for e in results]
        psi = A.disj(A.neg(ante), *cons)
        counter = A.conj(ante, *(A.neg(c) for c in cons))
        r = satisfiable(counter, budget=budget)
        stats["final_check"] = {k: r.stats.get(k) for k in ("atoms", "vars", "conflicts")}
    except ResourceLimit as e:
        stats["time_ms"] = round((time.monotonic() - t0) * 1000, 3)
        e.stats = {**stats, **e.stats}
        raise
    stats["time_ms"] = round((time.monotonic() - t0) * 1000, 3)
    if not r.sat:
        return AdmissibilityReport(rule.name, Verdict.ADMISSIBLE, psi, None, False, stats, results)
    M = _complete(r.model, m.kept)
    verified = model_check(M, counter) and not model_check(M, psi)
    return AdmissibilityReport(rule.name, Verdict.NOT_ADMISSIBLE, psi, M, verified,
                               stats, results)


def _complete(M: KripkeModel, names) -> KripkeModel:
    """Give variables the solver never looked at an empty extension."""
    missing = set(names) - set(M.valuation)
    if not missing:
        return M
    return KripkeModel(M.frame, {**M.valuation, **{x: frozenset() for x in missing}})


def s2ic_valid(psi: A.Term, *, budget: Budget | None = None) -> Validity:
    """Is ``psi == 1`` true in every simple algebra?  Counterexamples are Kripke models."""
    fresh, core = flatten_modal(A.Neg(A.Equation(psi, A.TOP_T)))
    branches = tau2_branches(fresh, core)
    stats = {"witnesses": len(fresh), "branches": len(branches)}
    if not branches:
        return Validity(True, None, False, stats)
    r = satisfiable(A.disj(*branches), budget=budget)
    stats.update(r.stats)
    if not r.sat:
        return Validity(True, None, False, stats)
    M = _complete(r.model, A.term_vars(psi))
    verified = eval_mask(M, psi) != M.frame.full
    return Validity(False, M, verified, stats)


BUILTIN_NAMES = ("rho9", "rho_s1", "rho_s2", "rho_s3", "not_admissible_fixture")


def builtin_rules() -> dict:
    """The packaged rules, keyed by name, in a fixed order."""
    base = resources.files("s2ic") / "rules"
    return {n: parse_rule((base / f"{n}.p2r").read_text()) for n in BUILTIN_NAMES}


def get_rule(name: str) -> A.Pi2Rule:
    rules = builtin_rules()
    if name not in rules:
        raise NotFound(f"no built-in rule named {name!r}")
    return rules[name]


def rule_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise NotFound(f"no built-in rule named {name!r}")
    return (resources.files("s2ic") / "rules" / f"{name}.p2r").read_text()
