"""Constructions on finite contact frames: covers, amalgams, quotients, extensions."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import (EmptyPullback, FrameError, NotAPartition, NotRegular, NotSurjective,
                      SpecViolation)
from .core import ContactFrame, StableMap, classify_map


def _unique(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def one_step_cover(X: ContactFrame):
    """A 1-step frame with a regular stable map onto ``X``.

    Isolated points are first doubled into a related pair; the cover then has
    one point per ordered pair of distinct related points, ``(a,b)`` being
    related to ``(b,a)`` and mapped to ``a``.
    """
    taken = set(X.points)
    pts, back, edges = [], {}, []
    for p in X.points:
        if X.neighbours(p):
            pts.append(p)
            back[p] = p
        else:
            d1, d2 = _unique(f"{p}.1", taken), _unique(f"{p}.2", taken)
            pts += [d1, d2]
            back[d1] = back[d2] = p
            edges.append((d1, d2))
    edges += list(X.edges)
    Xd = ContactFrame(tuple(pts), frozenset(edges))

    cover_pts, cover_edges, f = [], [], {}
    for a in Xd.points:
        for b in Xd.points:
            if a != b and Xd.related(a, b):
                name = f"({a},{b})"
                cover_pts.append(name)
                f[name] = back[a]
                if Xd.index[a] < Xd.index[b]:
                    cover_edges.append((name, f"({b},{a})"))
    Y = ContactFrame(tuple(cover_pts), frozenset(cover_edges), name=f"{X.name}_cover")
    return Y, StableMap(Y, X, f)


def _require_regular(m: StableMap, what: str):
    if classify_map(m) != "regular_stable":
        raise NotRegular(f"{what} is not a regular stable map")


def pullback_amalgam(f: StableMap, g: StableMap):
    """Pullback of the cospan ``B -f-> A <-g- C`` with its two projections."""
    if f.cod != g.cod:
        raise FrameError("the two maps need a common codomain")
    _require_regular(f, "first map")
    _require_regular(g, "second map")
    B, C = f.dom, g.dom
    pts = [(b, c) for b in B.points for c in C.points if f(b) == g(c)]
    if not pts:
        raise EmptyPullback("pullback has no points")
    name = {bc: f"({bc[0]},{bc[1]})" for bc in pts}
    edges = []
    for i, (b, c) in enumerate(pts):
        for b2, c2 in pts[i + 1:]:
            if B.related(b, b2) and C.related(c, c2):
                edges.append((name[(b, c)], name[(b2, c2)]))
    D = ContactFrame(tuple(name[p] for p in pts), frozenset(edges),
                     name=f"{B.name}x{C.name}")
    p1 = StableMap(D, B, {name[p]: p[0] for p in pts})
    p2 = StableMap(D, C, {name[p]: p[1] for p in pts})
    return D, p1, p2


def lift_relation(f, X: ContactFrame, name: str = "Y") -> ContactFrame:
    """Relate ``y1, y2`` exactly when their images are related in ``X``.

    ``f`` maps the new points (in the desired order) onto the points of ``X``.
    """
    f = dict(f)
    missing = set(X.points) - set(f.values())
    if missing:
        raise NotSurjective(f"points without preimage: {sorted(missing)}")
    bad = set(f.values()) - set(X.points)
    if bad:
        raise FrameError(f"images outside the frame: {sorted(bad)}")
    ys = list(f)
    edges = [(a, b) for i, a in enumerate(ys) for b in ys[i + 1:] if X.related(f[a], f[b])]
    return ContactFrame(tuple(ys), frozenset(edges), name=name)


def block_name(block, X: ContactFrame) -> str:
    return "{" + ",".join(sorted(block, key=X.index.__getitem__)) + "}"


def validate_partition(X: ContactFrame, P) -> list:
    blocks = [frozenset(b) for b in P]
    if any(not b for b in blocks):
        raise NotAPartition("empty block")
    seen = set()
    for b in blocks:
        if b & seen:
            raise NotAPartition(f"blocks overlap in {sorted(b & seen)}")
        seen |= b
    if seen != set(X.points):
        missing, extra = set(X.points) - seen, seen - set(X.points)
        raise NotAPartition(f"blocks miss {sorted(missing)} or add {sorted(extra)}")
    return sorted(blocks, key=lambda b: min(X.index[p] for p in b))


def quotient_by_partition(X: ContactFrame, P):
    """Collapse each block of ``P``; blocks ``A, B`` are related iff ``A`` meets ``R[B]``."""
    blocks = validate_partition(X, P)
    masks = [X.mask(b) for b in blocks]
    names = [block_name(b, X) for b in blocks]
    edges = []
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if masks[i] & X.image(masks[j]):
                edges.append((names[i], names[j]))
    Q = ContactFrame(tuple(names), frozenset(edges), name=f"{X.name}_quot")
    q = StableMap(X, Q, {p: names[i] for i, b in enumerate(blocks) for p in b})
    return Q, q


@dataclass(frozen=True)
class MinExtSpec:
    x: str
    S1: frozenset
    S2: frozenset
    connect: bool = False


def minimal_extensions(X: ContactFrame, spec: MinExtSpec):
    """Split ``spec.x`` into two points with neighbourhoods ``S1`` and ``S2`` outside the pair.

    Returns the new frame and the regular stable map collapsing the pair back
    onto ``x``.  The edge between the two new points is present iff
    ``spec.connect``.
    """
    x = spec.x
    if x not in X.index:
        raise SpecViolation(f"unknown point {x!r}")
    S1, S2 = frozenset(spec.S1), frozenset(spec.S2)
    others = set(X.points) - {x}
    if not (S1 <= others and S2 <= others):
        raise SpecViolation("S1 and S2 must avoid the split point")
    if S1 | S2 != X.neighbours(x):
        raise SpecViolation("S1 and S2 must together cover the neighbours of the split point")
    taken = set(X.points)
    x1, x2 = _unique(f"{x}.1", taken), _unique(f"{x}.2", taken)
    pts = []
    for p in X.points:
        pts += [x1, x2] if p == x else [p]
    edges = [e for e in X.edges if x not in e]
    edges += [(x1, s) for s in S1] + [(x2, s) for s in S2]
    if spec.connect:
        edges.append((x1, x2))
    Y = ContactFrame(tuple(pts), frozenset(edges), name=f"{X.name}_ext")
    f = StableMap(Y, X, {p: (x if p in (x1, x2) else p) for p in Y.points})
    return Y, f


def compose_chain(chain) -> StableMap:
    """``f1 . f2 . ... . fk`` for a chain listed outermost first."""
    out = chain[-1]
    for g in reversed(chain[:-1]):
        out = out.then(g)
    return out


def factor_minimal(f: StableMap) -> list:
    """Factor a regular stable map into one-point splittings, outermost first.

    An identity yields the empty chain.  A bijective map that is not the
    identity cannot be written with minimal steps and is returned as ``[f]``.
    """
    _require_regular(f, "map")
    chain = _factor(f)
    if chain:
        comp = compose_chain(chain)
        if comp.mapping != f.mapping or comp.dom != f.dom or comp.cod != f.cod:
            raise AssertionError("factorization does not recompose")
    return chain


def _factor(f: StableMap) -> list:
    dom, cod = f.dom, f.cod
    gap = dom.size - cod.size
    if gap == 0:
        same = dom == cod and all(f(p) == p for p in dom.points)
        return [] if same else [f]
    if gap == 1:
        return [f]
    pre = {y: [p for p in dom.points if f(p) == y] for y in cod.points}
    x = next(y for y in cod.points if len(pre[y]) > 1)
    T1, T2 = pre[x][:1], pre[x][1:]
    taken = set(cod.points)
    x1, x2 = _unique(f"{x}.1", taken), _unique(f"{x}.2", taken)
    pts = []
    for p in cod.points:
        pts += [x1, x2] if p == x else [p]
    edges = [e for e in cod.edges if x not in e]
    for xi, T in ((x1, T1), (x2, T2)):
        reach = {f(q) for t in T for q in dom.points if dom.related(t, q)}
        edges += [(xi, u) for u in reach if u != x]
    if any(dom.related(a, b) for a in T1 for b in T2):
        edges.append((x1, x2))
    Z = ContactFrame(tuple(pts), frozenset(edges), name=f"{cod.name}_{x}")
    h = StableMap(Z, cod, {p: (x if p in (x1, x2) else p) for p in Z.points})
    side = {t: x1 for t in T1} | {t: x2 for t in T2}
    ft = StableMap(dom, Z, {p: side.get(p, f(p)) for p in dom.points})
    return [h] + _factor(ft)
