"""Random syntax generators shared by the tests (hypothesis strategies and seeded samplers)."""
import random

from hypothesis import strategies as st

from s2ic.syntax import ast as A

VARS = ("x", "y", "z")
_BIN = (A.And, A.Or, A.Imp, A.Iff, A.Xor)


def terms(names=VARS, modal=False, max_leaves=8):
    leaves = st.one_of(st.sampled_from([A.Var(n) for n in names]),
                       st.sampled_from([A.TOP_T, A.BOT_T]))

    def extend(sub):
        ops = [st.builds(A.Not, sub)] + [st.builds(op, sub, sub) for op in _BIN]
        if modal:
            ops += [st.builds(A.Sim, sub, sub), st.builds(A.Univ, sub),
                    st.builds(A.Diam, sub)]
        return st.one_of(*ops)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def formulas(names=VARS, modal=False, relations=(A.Prec, A.Equation), max_leaves=6):
    t = terms(names, modal, max_leaves=4)
    rel = st.one_of(*[st.builds(r, t, t) for r in relations])
    leaves = st.one_of(rel, st.sampled_from([A.TOP, A.BOTTOM]))

    def extend(sub):
        return st.one_of(
            st.builds(A.Neg, sub),
            st.builds(lambda a, b: A.Conj((a, b)), sub, sub),
            st.builds(lambda a, b: A.Disj((a, b)), sub, sub),
            st.builds(A.FoImp, sub, sub),
            st.builds(A.FoIff, sub, sub))

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def random_term(r: random.Random, names, depth):
    if depth == 0 or r.random() < 0.3:
        if r.random() < 0.1:
            return A.Const(r.random() < 0.5)
        return A.Var(r.choice(names))
    op = r.choice((A.Not,) + _BIN)
    if op is A.Not:
        return A.Not(random_term(r, names, depth - 1))
    return op(random_term(r, names, depth - 1), random_term(r, names, depth - 1))


def random_formula(r: random.Random, atoms, depth):
    if depth == 0 or r.random() < 0.3:
        return r.choice(atoms) if r.random() < 0.85 else r.choice([A.TOP, A.BOTTOM])
    op = r.choice("ncdie")
    if op == "n":
        return A.Neg(random_formula(r, atoms, depth - 1))
    a, b = random_formula(r, atoms, depth - 1), random_formula(r, atoms, depth - 1)
    return {"c": lambda: A.Conj((a, b)), "d": lambda: A.Disj((a, b)),
            "i": lambda: A.FoImp(a, b), "e": lambda: A.FoIff(a, b)}[op]()


def random_atoms(r: random.Random, names, count, term_depth=2):
    return [A.Prec(random_term(r, names, term_depth), random_term(r, names, term_depth))
            for _ in range(count)]


def random_minterm_clause(r: random.Random, kept, max_literals=3):
    """A disjunction of literals over the minterm atoms of ``kept``."""
    from s2ic.syntax import minterm_atoms

    basis = minterm_atoms(kept)
    lits = [b if r.random() < 0.5 else A.Neg(b)
            for b in r.sample(basis, r.randint(1, min(max_literals, len(basis))))]
    return A.disj(*lits)


def random_minterm_consequence(r: random.Random, kept):
    """A conjunction of one or two minterm clauses (CNF over minterm literals)."""
    return A.conj(*(random_minterm_clause(r, kept) for _ in range(r.randint(1, 2))))
