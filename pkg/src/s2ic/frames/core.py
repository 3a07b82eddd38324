"""Finite contact frames, Kripke models, stable maps and their semantics.

Point sets are handled internally as integer bitmasks over the frame's point
order; the public API speaks in frozensets of point names.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from ..errors import FrameError, SizeLimit
from ..syntax import ast as A

DEFAULT_MAX_POINTS = 16


def bits(mask: int):
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class ContactFrame:
    """A finite set of points with a reflexive symmetric relation.

    Loops are implicit; ``edges`` holds unordered pairs of distinct points,
    normalized so the first component precedes the second in ``points``.
    """

    points: tuple
    edges: frozenset = frozenset()
    name: str = field(default="X", compare=False)

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        if not pts:
            raise FrameError("a contact frame needs at least one point")
        if len(set(pts)) != len(pts):
            raise FrameError("duplicate point names")
        pos = {p: i for i, p in enumerate(pts)}
        norm = set()
        for e in self.edges:
            a, b = tuple(e) if len(tuple(e)) == 2 else (tuple(e)[0],) * 2
            if a not in pos or b not in pos:
                raise FrameError(f"edge {a}-{b} mentions an unknown point")
            if a == b:
                continue
            norm.add((a, b) if pos[a] < pos[b] else (b, a))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_adjacency(cls, points, adj, name="X"):
        pts = tuple(points)
        edges = [(pts[i], pts[j]) for i in range(len(pts)) for j in bits(adj[i]) if j > i]
        return cls(pts, frozenset(edges), name)

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def adj(self) -> tuple:
        n = len(self.points)
        rows = [1 << i for i in range(n)]
        for a, b in self.edges:
            i, j = self.index[a], self.index[b]
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return tuple(rows)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=lambda e: (self.index[e[0]], self.index[e[1]]))

    def related(self, a, b) -> bool:
        return bool(self.adj[self.index[a]] >> self.index[b] & 1)

    def image(self, mask: int) -> int:
        """R[A] for a point mask A."""
        out = 0
        for i in bits(mask):
            out |= self.adj[i]
        return out

    def mask(self, pts: Iterable) -> int:
        m = 0
        for p in pts:
            m |= 1 << self.index[p]
        return m

    def subset(self, mask: int) -> frozenset:
        return frozenset(self.points[i] for i in bits(mask))

    def neighbours(self, p) -> frozenset:
        """R[p] without p itself."""
        return self.subset(self.adj[self.index[p]] & ~(1 << self.index[p]))

    def is_one_step(self) -> bool:
        """Every R-class is a 2-clique: no singletons and no paths of length two."""
        for row in self.adj:
            if row.bit_count() != 2:
                return False
        return True

    def canonical_key(self) -> tuple:
        """Isomorphism-invariant key (brute force over permutations; small frames only)."""
        n = self.size
        best = None
        for perm in itertools.permutations(range(n)):
            rows = tuple(sorted((min(perm[i], perm[j]), max(perm[i], perm[j]))
                                for i in range(n) for j in bits(self.adj[i]) if j > i))
            if best is None or rows < best:
                best = rows
        return (n, best)

    def __str__(self):
        from .io import format_frame
        return format_frame(self)


def all_frames(n: int, up_to_iso: bool = False, prefix: str = "a"):
    """Every reflexive symmetric frame on ``n`` points named ``a0, a1, ...``."""
    pts = tuple(f"{prefix}{i}" for i in range(n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    for choice in range(1 << len(pairs)):
        edges = [(pts[i], pts[j]) for k, (i, j) in enumerate(pairs) if choice >> k & 1]
        fr = ContactFrame(pts, frozenset(edges))
        if up_to_iso:
            key = fr.canonical_key()
            if key in seen:
                continue
            seen.add(key)
        yield fr


def frames_up_to(n: int, up_to_iso: bool = False):
    for k in range(1, n + 1):
        yield from all_frames(k, up_to_iso)


@dataclass(frozen=True)
class KripkeModel:
    frame: ContactFrame
    valuation: Mapping = field(default_factory=dict)

    def __post_init__(self):
        val = {}
        for var, pts in dict(self.valuation).items():
            pts = frozenset(str(p) for p in pts)
            unknown = pts - set(self.frame.points)
            if unknown:
                raise FrameError(f"valuation of {var} uses unknown points {sorted(unknown)}")
            val[var] = pts
        object.__setattr__(self, "valuation", val)

    def mask(self, var: str) -> int:
        return self.frame.mask(self.valuation.get(var, ()))

    def pulled_back(self, f: "StableMap") -> "KripkeModel":
        """The model on ``f.dom`` with valuation ``f^-1 . V``."""
        if f.cod != self.frame:
            raise FrameError("map codomain differs from the model's frame")
        return KripkeModel(f.dom, {v: frozenset(p for p in f.dom.points if f(p) in pts)
                                   for v, pts in self.valuation.items()})


@dataclass(frozen=True)
class StableMap:
    dom: ContactFrame
    cod: ContactFrame
    mapping: Mapping

    def __post_init__(self):
        m = {str(k): str(v) for k, v in dict(self.mapping).items()}
        if set(m) != set(self.dom.points):
            raise FrameError("map must be total on its domain")
        bad = set(m.values()) - set(self.cod.points)
        if bad:
            raise FrameError(f"map sends points outside its codomain: {sorted(bad)}")
        object.__setattr__(self, "mapping", m)

    def __call__(self, p):
        return self.mapping[p]

    def is_stable(self) -> bool:
        return all(self.cod.related(self(a), self(b)) for a, b in self.dom.edges)

    def is_surjective(self) -> bool:
        return set(self.mapping.values()) == set(self.cod.points)

    def then(self, g: "StableMap") -> "StableMap":
        """``g . self``."""
        if g.dom != self.cod:
            raise FrameError("maps do not compose")
        return StableMap(self.dom, g.cod, {p: g(self(p)) for p in self.dom.points})

    @classmethod
    def identity(cls, X: ContactFrame) -> "StableMap":
        return cls(X, X, {p: p for p in X.points})


# ---------------------------------------------------------------- semantics

def _eval(M: KripkeModel, t: A.Term) -> int:
    X = M.frame
    full = X.full
    if isinstance(t, A.Const):
        return full if t.value else 0
    if isinstance(t, A.Var):
        return M.mask(t.name)
    if isinstance(t, A.Not):
        return full & ~_eval(M, t.arg)
    if isinstance(t, A.Univ):
        return full if _eval(M, t.arg) == full else 0
    if isinstance(t, A.Diam):
        return full if _eval(M, t.arg) else 0
    a, b = _eval(M, t.left), _eval(M, t.right)
    if isinstance(t, A.And):
        return a & b
    if isinstance(t, A.Or):
        return a | b
    if isinstance(t, A.Imp):
        return (full & ~a) | b
    if isinstance(t, A.Iff):
        return full & ~(a ^ b)
    if isinstance(t, A.Xor):
        return a ^ b
    if isinstance(t, A.Sim):
        return full if X.image(a) & ~b == 0 else 0
    raise TypeError(f"not a term: {t!r}")


def eval_modal(M: KripkeModel, t: A.Term) -> frozenset:
    """The set of points where ``t`` is true."""
    return M.frame.subset(_eval(M, t))


def eval_mask(M: KripkeModel, t: A.Term) -> int:
    return _eval(M, t)


def model_check(M: KripkeModel, phi: A.Formula) -> bool:
    """Truth of a quantifier-free formula in ``M``.

    Atoms may relate arbitrary (also modal) terms: ``t << u`` holds when every
    edge leaving ``[[t]]`` lands in ``[[u]]``.
    """
    if isinstance(phi, A.Top):
        return True
    if isinstance(phi, A.Bottom):
        return False
    if isinstance(phi, A.Prec):
        return M.frame.image(_eval(M, phi.lhs)) & ~_eval(M, phi.rhs) == 0
    if isinstance(phi, A.Equation):
        return _eval(M, phi.lhs) == _eval(M, phi.rhs)
    if isinstance(phi, A.Nleq):
        return _eval(M, phi.lhs) & ~_eval(M, phi.rhs) != 0
    if isinstance(phi, A.Neg):
        return not model_check(M, phi.arg)
    if isinstance(phi, A.Conj):
        return all(model_check(M, a) for a in phi.args)
    if isinstance(phi, A.Disj):
        return any(model_check(M, a) for a in phi.args)
    if isinstance(phi, A.FoImp):
        return (not model_check(M, phi.left)) or model_check(M, phi.right)
    if isinstance(phi, A.FoIff):
        return model_check(M, phi.left) == model_check(M, phi.right)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------- duality

def check_size(X: ContactFrame, max_points: int = DEFAULT_MAX_POINTS):
    if X.size > max_points:
        raise SizeLimit(f"2^{X.size} subsets exceed the limit 2^{max_points}",
                        {"points": X.size, "max_points": max_points})


@dataclass(frozen=True)
class DualAlgebra:
    """The powerset algebra of a frame with ``A << B`` iff ``R[A]`` is inside ``B``."""

    frame: ContactFrame

    @cached_property
    def images(self) -> tuple:
        X = self.frame
        img = [0] * (1 << X.size)
        for m in range(1, 1 << X.size):
            low = m & -m
            img[m] = img[m ^ low] | X.adj[low.bit_length() - 1]
        return tuple(img)

    @property
    def size(self) -> int:
        return 1 << self.frame.size

    @property
    def top(self) -> int:
        return self.frame.full

    def precedes(self, a: int, b: int) -> bool:
        return self.images[a] & ~b == 0

    def pairs(self):
        """All ``(A, B)`` mask pairs with ``A << B``, in canonical order."""
        n = self.size
        return [(a, b) for a in range(n) for b in range(n) if self.images[a] & ~b == 0]

    def named_pairs(self):
        X = self.frame
        return [(X.subset(a), X.subset(b)) for a, b in self.pairs()]

    def axiom_failures(self) -> dict:
        """Counterexamples to the six contact axioms, by axiom name (empty when all hold)."""
        n, top = self.size, self.top
        p = self.precedes
        bad = {}

        def note(name, ex):
            bad.setdefault(name, ex)

        if not (p(0, 0) and p(top, top)):
            note("S1", ())
        for a in range(n):
            for b in range(n):
                if not p(a, b):
                    continue
                if a & ~b:
                    note("S5", (a, b))
                if not p(top & ~b, top & ~a):
                    note("S6", (a, b))
                for c in range(n):
                    if p(a, c) and not p(a, b & c):
                        note("S2", (a, b, c))
                    if p(c, b) and not p(a | c, b):
                        note("S3", (a, c, b))
                # S4: a' <= a << b <= b' implies a' << b'
                sub = a
                while True:
                    sup_free = top & ~b
                    sup = sup_free
                    while True:
                        if not p(sub, b | sup):
                            note("S4", (sub, a, b, b | sup))
                        if sup == 0:
                            break
                        sup = (sup - 1) & sup_free
                    if sub == 0:
                        break
                    sub = (sub - 1) & a
        return bad


def dual_algebra(X: ContactFrame, max_points: int = DEFAULT_MAX_POINTS) -> DualAlgebra:
    check_size(X, max_points)
    return DualAlgebra(X)


def classify_map(m: StableMap) -> str:
    """``not_stable``, ``stable`` or ``regular_stable``."""
    if not m.is_stable():
        return "not_stable"
    if not m.is_surjective():
        return "stable"
    lifted = {(m(a), m(b)) for a, b in m.dom.edges} | {(m(b), m(a)) for a, b in m.dom.edges}
    for x, y in m.cod.edges:
        if (x, y) not in lifted:
            return "stable"
    # loops lift through any preimage, which exists by surjectivity
    return "regular_stable"
