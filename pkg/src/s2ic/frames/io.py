"""Text and JSON formats for frames and maps.

Text format, statements separated by ``;``::

    frame X; points a b c; edges a-b b-c;
    map f; dom Y; cod X; y1->a y2->b y3->c;
"""
from __future__ import annotations

import json
import re

from ..errors import FrameError, ParseError
from .core import ContactFrame, KripkeModel, StableMap

_NAME = re.compile(r"[^\s;\-]+")


def _statements(text: str):
    """Yield ``(line, column, words)`` per ``;``-terminated statement, comments stripped."""
    buf, start = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        col = 0
        for part in re.split(r"(;)", line):
            if part == ";":
                if buf:
                    yield start[0], start[1], buf
                buf, start = [], None
                col += 1
                continue
            for m in re.finditer(r"\S+", part):
                if start is None:
                    start = (lineno, col + m.start() + 1)
                buf.append((lineno, col + m.start() + 1, m.group()))
            col += len(part)
    if buf:
        yield start[0], start[1], buf


def parse_frames(text: str):
    """Parse a document into ``(frames, maps)`` dictionaries keyed by name."""
    frames, maps = {}, {}
    cur = None
    order = []

    def close():
        if cur is None:
            return
        kind, name, data, pos = cur
        try:
            if kind == "frame":
                if "points" not in data:
                    raise ParseError(f"frame {name} lacks a points declaration", *pos)
                frames[name] = ContactFrame(tuple(data["points"]),
                                            frozenset(data.get("edges", ())), name=name)
            else:
                for key in ("dom", "cod"):
                    if key not in data:
                        raise ParseError(f"map {name} lacks '{key}'", *pos)
                    if data[key] not in frames:
                        raise ParseError(f"map {name}: unknown frame {data[key]!r}", *pos)
                maps[name] = StableMap(frames[data["dom"]], frames[data["cod"]],
                                       data.get("pairs", {}))
        except FrameError as e:
            raise ParseError(str(e), *pos) from None
        order.append((kind, name))

    for line, col, words in _statements(text):
        head = words[0][2]
        if head in ("frame", "map"):
            close()
            if len(words) != 2 or not _NAME.fullmatch(words[1][2]):
                raise ParseError(f"'{head}' takes one name", line, col, ("name",))
            cur = (head, words[1][2], {}, (line, col))
            continue
        if cur is None:
            raise ParseError(f"unexpected {head!r}", line, col, ("frame", "map"))
        kind, name, data, _ = cur
        if kind == "frame" and head == "points":
            pts = [w for _, _, w in words[1:]]
            for l, c, w in words[1:]:
                if not _NAME.fullmatch(w):
                    raise ParseError(f"bad point name {w!r}", l, c)
            data["points"] = pts
        elif kind == "frame" and head == "edges":
            edges = []
            for l, c, w in words[1:]:
                ab = w.split("-")
                if len(ab) != 2 or not all(_NAME.fullmatch(x) for x in ab):
                    raise ParseError(f"bad edge {w!r}", l, c, ("a-b",))
                edges.append(tuple(ab))
            data["edges"] = edges
        elif kind == "map" and head in ("dom", "cod"):
            if len(words) != 2:
                raise ParseError(f"'{head}' takes one frame name", line, col)
            data[head] = words[1][2]
        elif kind == "map" and "->" in head:
            pairs = data.setdefault("pairs", {})
            for l, c, w in words:
                ab = w.split("->")
                if len(ab) != 2 or not all(_NAME.fullmatch(x) for x in ab):
                    raise ParseError(f"bad assignment {w!r}", l, c, ("a->b",))
                pairs[ab[0]] = ab[1]
        else:
            expected = ("points", "edges") if kind == "frame" else ("dom", "cod", "a->b")
            raise ParseError(f"unexpected {head!r}", line, col, expected)
    close()
    return frames, maps


def parse_frame(text: str) -> ContactFrame:
    frames, _ = parse_frames(text)
    if not frames:
        raise ParseError("no frame declared", 1, 1, ("frame",))
    return next(iter(frames.values()))


def format_frame(X: ContactFrame) -> str:
    edges = " ".join(f"{a}-{b}" for a, b in X.sorted_edges())
    return f"frame {X.name}; points {' '.join(X.points)}; edges{' ' if edges else ''}{edges};"


def format_map(f: StableMap, name: str = "f") -> str:
    pairs = " ".join(f"{p}->{f(p)}" for p in f.dom.points)
    return f"map {name}; dom {f.dom.name}; cod {f.cod.name}; {pairs};"


def frame_to_json(X: ContactFrame) -> dict:
    return {"name": X.name, "points": list(X.points),
            "edges": [list(e) for e in X.sorted_edges()]}


def frame_from_json(d: dict) -> ContactFrame:
    return ContactFrame(tuple(d["points"]), frozenset(tuple(e) for e in d.get("edges", [])),
                        name=d.get("name", "X"))


def map_to_json(f: StableMap) -> dict:
    return {"dom": f.dom.name, "cod": f.cod.name,
            "mapping": {p: f(p) for p in f.dom.points}}


def model_to_json(M: KripkeModel) -> dict:
    X = M.frame
    return {"points": list(X.points),
            "edges": [list(e) for e in X.sorted_edges()],
            "valuation": {v: sorted(pts, key=X.index.__getitem__)
                          for v, pts in sorted(M.valuation.items())}}


def model_from_json(d: dict) -> KripkeModel:
    X = ContactFrame(tuple(d["points"]), frozenset(tuple(e) for e in d.get("edges", [])))
    return KripkeModel(X, {v: frozenset(p) for v, p in d.get("valuation", {}).items()})


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
