"""Exhaustive checks of the three splitting conditions and of partition splittings."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import PreconditionViolation, SizeLimit
from .constructions import validate_partition
from .core import DEFAULT_MAX_POINTS, ContactFrame, check_size


def submasks(mask: int):
    """All submasks of ``mask``, from ``mask`` down to 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _asc(mask: int):
    return sorted(submasks(mask))


@dataclass
class SplitResult:
    condition: str
    holds: bool
    counterexample: dict | None = None
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def _named(X, **masks):
    return {k: sorted(X.subset(v), key=X.index.__getitem__) for k, v in masks.items()}


def _split_s1(X, A, B1, B2):
    img = X.image
    for A1 in _asc(A):
        A2 = A & ~A1
        if A1 and A2 and img(A1) & ~(A1 | B1) == 0 and img(A2) & ~(A2 | B2) == 0:
            return A1, A2
    return None


def _split_s2(X, A, B):
    RB = X.image(B)
    for A1 in _asc(A):
        A2 = A & ~A1
        if A1 & RB and A2 & RB and not A1 & X.image(A2):
            return A1, A2
    return None


def _split_s3(X, A):
    for A1 in _asc(A):
        R1 = X.image(A1)
        if R1 & ~A == 0 and R1 & ~A1:
            return A1, A & ~A1
    return None


def splitting_check(X: ContactFrame, which: str, max_points: int = DEFAULT_MAX_POINTS,
                    collect: bool = True) -> SplitResult:
    """Test one of the frame conditions ``S1``, ``S2``, ``S3`` over all subsets.

    On failure the first violating premise (in subset order) is reported; on
    success every premise is paired with a witnessing split when ``collect``.
    """
    which = which.upper()
    if which not in ("S1", "S2", "S3"):
        raise ValueError(f"unknown condition {which!r}")
    check_size(X, max_points)
    full = X.full
    res = SplitResult(which, True)

    def record(premise, split):
        if split is None:
            res.holds = False
            res.counterexample = _named(X, **premise)
            return True
        if collect:
            res.witnesses.append((_named(X, **premise), _named(X, A1=split[0], A2=split[1])))
        return False

    for A in range(1, full + 1) if which != "S2" else range(full + 1):
        rest = full & ~A
        if which == "S3":
            if record({"A": A}, _split_s3(X, A)):
                return res
        elif which == "S2":
            for B in _asc(rest):
                if A & X.image(B):
                    if record({"A": A, "B": B}, _split_s2(X, A, B)):
                        return res
        else:
            RA = X.image(A)
            for B2 in _asc(rest):
                for B1 in _asc(rest & ~B2):
                    if RA & ~(A | B1 | B2) == 0:
                        if record({"A": A, "B1": B1, "B2": B2}, _split_s1(X, A, B1, B2)):
                            return res
    return res


@dataclass
class PartitionSplit:
    holds: bool
    disconnected: tuple | None
    connected: tuple | None

    def __bool__(self):
        return self.holds


def partition_split_check(X: ContactFrame, P, A, S1, S2,
                          max_points: int = DEFAULT_MAX_POINTS) -> PartitionSplit:
    """Look for splittings of block ``A`` that reach exactly ``S1`` and ``S2``.

    Two splits are sought: one whose halves are not related to each other and
    one whose halves are.  Both must exist for the result to hold.
    """
    blocks = validate_partition(X, P)
    A = frozenset(A)
    if A not in blocks:
        raise PreconditionViolation("A must be a block of the partition")
    if len(A) > max_points:
        raise SizeLimit(f"2^{len(A)} subsets exceed the limit", {"block": len(A)})
    S1 = {frozenset(c) for c in S1}
    S2 = {frozenset(c) for c in S2}
    if not (S1 | S2) <= set(blocks):
        raise PreconditionViolation("S1 and S2 must consist of blocks")
    am = X.mask(A)
    others = [b for b in blocks if b != A]
    touching = {b for b in others if am & X.image(X.mask(b))}
    if S1 | S2 != touching:
        raise PreconditionViolation("S1 and S2 must cover exactly the blocks touching A")
    reach = [(X.image(X.mask(b)), b in S1, b in S2) for b in others]

    disconnected = connected = None
    for A1 in _asc(am):
        A2 = am & ~A1
        if not A1 or not A2:
            continue
        if any(bool(A1 & r) != s1 or bool(A2 & r) != s2 for r, s1, s2 in reach):
            continue
        touch = bool(A1 & X.image(A2))
        pair = (X.subset(A1), X.subset(A2))
        if touch and connected is None:
            connected = pair
        if not touch and disconnected is None:
            disconnected = pair
        if connected and disconnected:
            break
    return PartitionSplit(connected is not None and disconnected is not None,
                          disconnected, connected)
