"""Truth-table compilation of Boolean terms and contact formulas.

A Boolean term over ``n`` variables is represented by an integer whose bit
``v`` is its value under valuation ``v`` (bit ``j`` of ``v`` is variable
``j``).  Contact formulas are compiled to a propositional skeleton over a
table of canonical atoms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimit
from .syntax import ast as A
from .syntax.transform import expand_nleq, normalize_atoms

MASK_VARS_LIMIT = 14


def var_masks(n: int) -> list:
    N = 1 << n
    out = []
    for j in range(n):
        block = ((1 << (1 << j)) - 1) << (1 << j)  # 2^j zeros then 2^j ones
        period = 1 << (j + 1)
        m = 0
        for start in range(0, N, period):
            m |= block << start
        out.append(m)
    return out


def term_mask(t: A.Term, masks: dict, full: int) -> int:
    if isinstance(t, A.Const):
        return full if t.value else 0
    if isinstance(t, A.Var):
        return masks[t.name]
    if isinstance(t, A.Not):
        return full & ~term_mask(t.arg, masks, full)
    if not isinstance(t, A._Binary) or isinstance(t, A.Sim):
        raise TypeError(f"not a Boolean term: {t!r}")
    a, b = term_mask(t.left, masks, full), term_mask(t.right, masks, full)
    if isinstance(t, A.And):
        return a & b
    if isinstance(t, A.Or):
        return a | b
    if isinstance(t, A.Imp):
        return (full & ~a) | b
    if isinstance(t, A.Iff):
        return full & ~(a ^ b)
    return a ^ b


def term_eval(t: A.Term, val: dict) -> bool:
    if isinstance(t, A.Const):
        return t.value
    if isinstance(t, A.Var):
        return val.get(t.name, False)
    if isinstance(t, A.Not):
        return not term_eval(t.arg, val)
    a, b = term_eval(t.left, val), term_eval(t.right, val)
    if isinstance(t, A.And):
        return a and b
    if isinstance(t, A.Or):
        return a or b
    if isinstance(t, A.Imp):
        return (not a) or b
    if isinstance(t, A.Iff):
        return a == b
    return a != b


@dataclass
class Compiled:
    """A contact formula as a skeleton over a table of distinct atoms.

    ``keys[i]`` is ``(t_mask, u_mask)`` for atom ``i`` when truth tables are
    available (``masked``), otherwise the atom itself.  Skeleton nodes are
    tuples: ``("c", b)``, ``("a", i)``, ``("n", s)``, ``("&", [..])``,
    ``("|", [..])``, ``(">", s, t)``, ``("=", s, t)``.
    """

    variables: list
    atoms: list
    keys: list
    skeleton: tuple
    masked: bool

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def full(self) -> int:
        return (1 << (1 << self.nvars)) - 1

    def evaluate(self, truth) -> bool:
        """Evaluate the skeleton given ``truth(i)`` for atom indices."""
        return _ev(self.skeleton, truth)


def _ev(s, truth):
    op = s[0]
    if op == "c":
        return s[1]
    if op == "a":
        return truth(s[1])
    if op == "n":
        return not _ev(s[1], truth)
    if op == "&":
        return all(_ev(c, truth) for c in s[1])
    if op == "|":
        return any(_ev(c, truth) for c in s[1])
    if op == ">":
        return (not _ev(s[1], truth)) or _ev(s[2], truth)
    return _ev(s[1], truth) == _ev(s[2], truth)


def compile_formula(phi: A.Formula, variables=None, max_atoms: int | None = None,
                    extra_atoms=()) -> Compiled:
    """Compile ``phi`` (``</=`` and equations are normalized first).

    ``variables`` fixes the variable order (default: sorted).  Atoms that are
    equal as truth-table pairs, or mirror images under ``t << u`` iff
    ``!u << !t``, share an index.  ``extra_atoms`` are registered first.
    """
    phi = normalize_atoms(expand_nleq(phi))
    found = set(A.term_vars(phi))
    for a in extra_atoms:
        found |= A.term_vars(a)
    if variables is None:
        variables = sorted(found)
    else:
        variables = list(variables)
        missing = found - set(variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} not in the given order")
    n = len(variables)
    masked = n <= MASK_VARS_LIMIT
    masks = dict(zip(variables, var_masks(n))) if masked else None
    full = (1 << (1 << n)) - 1
    table: dict = {}
    atoms: list = []
    keys: list = []

    def register(a: A.Prec) -> int:
        if not isinstance(a, A.Prec):
            raise TypeError(f"unexpected atom {a!r}")
        if not (A.is_boolean(a.lhs) and A.is_boolean(a.rhs)):
            raise TypeError("modal operator inside a contact atom")
        if masked:
            t, u = term_mask(a.lhs, masks, full), term_mask(a.rhs, masks, full)
            key = min((t, u), (full & ~u, full & ~t))
        else:
            key = a
        if key not in table:
            table[key] = len(atoms)
            atoms.append(a)
            keys.append(key)
            if max_atoms is not None and len(atoms) > max_atoms:
                raise ResourceLimit(f"more than {max_atoms} distinct atoms",
                                    {"atoms": len(atoms)})
        return table[key]

    for a in extra_atoms:
        register(a)

    def sk(f):
        if isinstance(f, A.Top):
            return ("c", True)
        if isinstance(f, A.Bottom):
            return ("c", False)
        if isinstance(f, A.Prec):
            return ("a", register(f))
        if isinstance(f, A.Neg):
            return ("n", sk(f.arg))
        if isinstance(f, A.Conj):
            return ("&", [sk(x) for x in f.args])
        if isinstance(f, A.Disj):
            return ("|", [sk(x) for x in f.args])
        if isinstance(f, A.FoImp):
            return (">", sk(f.left), sk(f.right))
        if isinstance(f, A.FoIff):
            return ("=", sk(f.left), sk(f.right))
        raise TypeError(f"unexpected formula node {f!r}")

    skel = sk(phi)
    return Compiled(variables, atoms, keys, skel, masked)


# ---------------------------------------------------------------- pair space

def mask_to_bool(mask: int, N: int) -> np.ndarray:
    raw = mask.to_bytes((N + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:N].astype(bool)


def bool_to_mask(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(np.uint8), bitorder="little").tobytes(),
                          "little")


class PairSpace:
    """All unordered valuation pairs ``(v, w)``, ``v <= w``, in canonical order.

    Diagonal pairs come first, then ``v < w`` lexicographically.  A pair
    stands for a 2-clique whose two points carry the valuations ``v`` and
    ``w``; ``holds`` gives, for an atom, the bitmask of pairs satisfying it.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.N = N = 1 << nvars
        diag = np.arange(N)
        iu = np.triu_indices(N, k=1)
        self.V = np.concatenate([diag, iu[0]])
        self.W = np.concatenate([diag, iu[1]])
        self.size = len(self.V)
        self.all = (1 << self.size) - 1

    def holds(self, t_mask: int, u_mask: int) -> int:
        t = mask_to_bool(t_mask, self.N)
        u = mask_to_bool(u_mask, self.N)
        tv, tw, uv, uw = t[self.V], t[self.W], u[self.V], u[self.W]
        ok = ~((tv | tw) & ~(uv & uw))
        return bool_to_mask(ok)

    def pair(self, k: int) -> tuple:
        return int(self.V[k]), int(self.W[k])
