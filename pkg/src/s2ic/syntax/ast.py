"""Immutable syntax trees for Boolean/modal terms and first-order contact formulas.

A single :class:`Term` hierarchy covers Boolean terms and modal formulas; a term
is Boolean when it contains no ``Sim``, ``Univ`` or ``Diam`` node.  Formulas
(:class:`Formula`) are quantifier-free first-order combinations of relational
atoms between terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator


class Term:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def __and__(self, other):
        return And(self, _term(other))

    def __or__(self, other):
        return Or(self, _term(other))

    def __xor__(self, other):
        return Xor(self, _term(other))

    def __invert__(self):
        return Not(self)

    def __str__(self):
        from .printer import pretty
        return pretty(self)


def _term(x):
    if isinstance(x, Term):
        return x
    if isinstance(x, bool):
        return Const(x)
    if isinstance(x, str):
        return Var(x)
    raise TypeError(f"cannot coerce {x!r} to a term")


@dataclass(frozen=True, slots=True)
class Const(Term):
    value: bool


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Term):
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class _Binary(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Imp(_Binary):
    __slots__ = ()


class Iff(_Binary):
    __slots__ = ()


class Xor(_Binary):
    __slots__ = ()


class Sim(_Binary):
    """Strict implication ``left ~> right``."""
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Univ(Term):
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Diam(Term):
    arg: Term

    def children(self):
        return (self.arg,)


TOP_T = Const(True)
BOT_T = Const(False)


# ---------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def __str__(self):
        from .printer import pretty
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class _Rel(Formula):
    lhs: Term
    rhs: Term


class Prec(_Rel):
    """Contact atom ``lhs << rhs``."""
    __slots__ = ()


class Equation(_Rel):
    __slots__ = ()


class Nleq(_Rel):
    """``lhs </= rhs``, short for ``~((lhs & !rhs) == 0)``."""
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Conj(Formula):
    args: tuple

    def children(self):
        return self.args


@dataclass(frozen=True, slots=True)
class Disj(Formula):
    args: tuple

    def children(self):
        return self.args


@dataclass(frozen=True, slots=True)
class FoImp(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class FoIff(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


TOP = Top()
BOTTOM = Bottom()
ContactAtom = Prec


@dataclass(frozen=True)
class Pi2Rule:
    name: str
    xvars: tuple
    pvars: tuple
    F: Term
    G: Term

    def __post_init__(self):
        object.__setattr__(self, "xvars", tuple(self.xvars))
        object.__setattr__(self, "pvars", tuple(self.pvars))
        clash = set(self.xvars) & set(self.pvars)
        if clash:
            raise ValueError(f"variables declared both as x and p: {sorted(clash)}")
        extra = term_vars(self.F) - set(self.xvars) - set(self.pvars)
        if extra:
            raise ValueError(f"F uses undeclared variables {sorted(extra)}")
        extra = term_vars(self.G) - set(self.xvars)
        if extra:
            raise ValueError(f"G uses variables outside xvars: {sorted(extra)}")


# ---------------------------------------------------------------- smart constructors

def conj(*args) -> Formula:
    """n-ary conjunction with flattening and constant folding."""
    out = []
    for a in args:
        if isinstance(a, Bottom):
            return BOTTOM
        if isinstance(a, Top):
            continue
        if isinstance(a, Conj):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return TOP
    if len(out) == 1:
        return out[0]
    return Conj(tuple(out))


def disj(*args) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Top):
            return TOP
        if isinstance(a, Bottom):
            continue
        if isinstance(a, Disj):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return BOTTOM
    if len(out) == 1:
        return out[0]
    return Disj(tuple(out))


def neg(a: Formula) -> Formula:
    if isinstance(a, Top):
        return BOTTOM
    if isinstance(a, Bottom):
        return TOP
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def tnot(t: Term) -> Term:
    """Term negation that folds constants and double negation."""
    if isinstance(t, Const):
        return Const(not t.value)
    if isinstance(t, Not):
        return t.arg
    return Not(t)


def tand(*args: Term) -> Term:
    args = [a for a in args if a != TOP_T]
    if any(a == BOT_T for a in args):
        return BOT_T
    if not args:
        return TOP_T
    out = args[0]
    for a in args[1:]:
        out = And(out, a)
    return out


def tor(*args: Term) -> Term:
    args = [a for a in args if a != BOT_T]
    if any(a == TOP_T for a in args):
        return TOP_T
    if not args:
        return BOT_T
    out = args[0]
    for a in args[1:]:
        out = Or(out, a)
    return out


# ---------------------------------------------------------------- traversal

def walk(node) -> Iterator:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, _Rel):
            stack.append(n.rhs)
            stack.append(n.lhs)
        else:
            stack.extend(reversed(n.children()))


def term_vars(node) -> set:
    return {n.name for n in walk(node) if isinstance(n, Var)}


def variables(node) -> list:
    """Variables in order of first occurrence."""
    seen = {}
    for n in walk(node):
        if isinstance(n, Var):
            seen.setdefault(n.name, None)
    return list(seen)


def is_boolean(t: Term) -> bool:
    return not any(isinstance(n, (Sim, Univ, Diam)) for n in walk(t))


def atoms(phi: Formula) -> list:
    """Relational leaves of a formula, in order of first occurrence, deduplicated."""
    seen = {}
    for n in walk(phi):
        if isinstance(n, _Rel):
            seen.setdefault(n, None)
    return list(seen)


def map_atoms(phi: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``phi`` with each relational leaf replaced by ``fn(leaf)``."""
    if isinstance(phi, _Rel):
        return fn(phi)
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Neg):
        return Neg(map_atoms(phi.arg, fn))
    if isinstance(phi, Conj):
        return Conj(tuple(map_atoms(a, fn) for a in phi.args))
    if isinstance(phi, Disj):
        return Disj(tuple(map_atoms(a, fn) for a in phi.args))
    if isinstance(phi, FoImp):
        return FoImp(map_atoms(phi.left, fn), map_atoms(phi.right, fn))
    if isinstance(phi, FoIff):
        return FoIff(map_atoms(phi.left, fn), map_atoms(phi.right, fn))
    raise TypeError(f"not a formula: {phi!r}")


def map_terms(node, fn: Callable[[Term], Term | None]):
    """Bottom-up term rewrite; ``fn`` returns a replacement or ``None`` to keep."""
    if isinstance(node, Formula):
        if isinstance(node, _Rel):
            return type(node)(map_terms(node.lhs, fn), map_terms(node.rhs, fn))
        return map_atoms(node, lambda a: map_terms(a, fn))
    if isinstance(node, (Const, Var)):
        new = node
    elif isinstance(node, _Binary):
        new = type(node)(map_terms(node.left, fn), map_terms(node.right, fn))
    else:
        new = type(node)(map_terms(node.arg, fn))
    r = fn(new)
    return new if r is None else r


def substitute(node, mapping: dict):
    """Simultaneous substitution of terms for variables (names or Var keys)."""
    m = {(k.name if isinstance(k, Var) else k): _term(v) for k, v in mapping.items()}
    return map_terms(node, lambda t: m.get(t.name) if isinstance(t, Var) else None)


def eliminate_diamonds(node):
    """Rewrite every ``<E>a`` as ``![A]!a``."""
    return map_terms(node, lambda t: Not(Univ(Not(t.arg))) if isinstance(t, Diam) else None)
