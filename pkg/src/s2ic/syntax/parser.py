"""Concrete grammar for terms, contact formulas, modal formulas and rule files."""
from __future__ import annotations

from functools import lru_cache

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from ..errors import ParseError
from . import ast as A

# One LALR grammar covers both sorts; sorts are checked afterwards so that
# error messages can point at the offending subexpression.
GRAMMAR = r"""
?start: fiff

?fiff: fimp
     | fiff "<=>" fimp          -> fo_iff
?fimp: fdisj
     | fdisj "=>" fimp          -> fo_imp
?fdisj: fconj ("\\/" fconj)*
?fconj: fneg ("/\\" fneg)*
?fneg: "~" fneg                 -> neg
     | rel
?rel: sim
    | sim "<<" sim              -> prec
    | sim "==" sim              -> equation
    | sim "</=" sim             -> nleq
?sim: tiff
    | tiff "~>" tiff            -> sim
?tiff: timp
     | tiff "<->" timp          -> iff
?timp: tor
     | tor "->" timp            -> imp
?tor: txor
    | tor "|" txor              -> or_
?txor: tand
     | txor "+" tand            -> xor
?tand: tun
     | tand "&" tun             -> and_
?tun: "!" tun                   -> not_
    | "[A]" tun                 -> univ
    | "<E>" tun                 -> diam
    | atom
?atom: IDENT                    -> var
     | "0"                      -> zero
     | "1"                      -> one
     | "top"                    -> one
     | "bot"                    -> zero
     | "(" fiff ")"

IDENT: /(?!(top|bot)(?![a-zA-Z0-9_]))[a-z][a-zA-Z0-9_]*/

COMMENT: /#[^\n]*/
%import common.WS
%ignore WS
%ignore COMMENT
"""

_TERM_BIN = {"iff": A.Iff, "imp": A.Imp, "or_": A.Or, "xor": A.Xor, "and_": A.And, "sim": A.Sim}
_TERM_UN = {"not_": A.Not, "univ": A.Univ, "diam": A.Diam}
_RELS = {"prec": A.Prec, "equation": A.Equation, "nleq": A.Nleq}
_FORMULA_NODES = {"fo_iff", "fo_imp", "fdisj", "fconj", "neg", *_RELS}


@lru_cache(maxsize=None)
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=False)


def _pos(node):
    if isinstance(node, Token):
        return node.line, node.column
    meta = node.meta
    return getattr(meta, "line", None), getattr(meta, "column", None)


def _describe_expected(parser: Lark, names) -> list:
    out = []
    for name in names:
        try:
            pat = parser.get_terminal(name).pattern
        except KeyError:
            out.append(name)
            continue
        out.append("identifier" if name == "IDENT" else getattr(pat, "value", name))
    return out


def _to_term(node):
    if isinstance(node, Token):  # bare IDENT never reaches here, kept for safety
        return A.Var(str(node))
    d = node.data
    if d == "var":
        return A.Var(str(node.children[0]))
    if d == "zero":
        return A.Const(False)
    if d == "one":
        return A.Const(True)
    if d in _TERM_BIN:
        return _TERM_BIN[d](_to_term(node.children[0]), _to_term(node.children[1]))
    if d in _TERM_UN:
        return _TERM_UN[d](_to_term(node.children[0]))
    line, col = _pos(node)
    raise ParseError("formula connective used inside a term", line, col)


def _to_formula(node):
    if isinstance(node, Tree) and node.data in _FORMULA_NODES:
        d = node.data
        ch = node.children
        if d in _RELS:
            return _RELS[d](_to_term(ch[0]), _to_term(ch[1]))
        if d == "neg":
            return A.Neg(_to_formula(ch[0]))
        if d == "fconj":
            return A.Conj(tuple(_to_formula(c) for c in ch))
        if d == "fdisj":
            return A.Disj(tuple(_to_formula(c) for c in ch))
        if d == "fo_imp":
            return A.FoImp(_to_formula(ch[0]), _to_formula(ch[1]))
        return A.FoIff(_to_formula(ch[0]), _to_formula(ch[1]))
    # A bare term in formula position is only allowed for the constants.
    if isinstance(node, Tree) and node.data in ("zero", "one"):
        return A.TOP if node.data == "one" else A.BOTTOM
    line, col = _pos(node)
    raise ParseError("expected a formula, found a term", line, col, ("<<", "=="))


def _end_position(text: str):
    """Line and column just past the last non-comment character."""
    lines = [l.split("#", 1)[0].rstrip() for l in text.split("\n")]
    for i in range(len(lines) - 1, -1, -1):
        if lines[i]:
            return i + 1, len(lines[i]) + 1
    return 1, 1


def _raw(text: str, line_offset: int = 0):
    p = _parser()
    try:
        return p.parse(text)
    except UnexpectedInput as e:
        line = (e.line + line_offset) if isinstance(e.line, int) and e.line > 0 else None
        col = e.column if isinstance(e.column, int) and e.column > 0 else None
        if isinstance(e, UnexpectedToken):
            tok = e.token
            what = "end of input" if tok.type == "$END" else repr(str(tok))
            if tok.type == "$END":
                line, col = _end_position(text)
                line += line_offset
            raise ParseError(f"unexpected {what}", line, col,
                             _describe_expected(p, e.expected)) from None
        if isinstance(e, UnexpectedCharacters):
            raise ParseError(f"unexpected character {e.char!r}", line, col,
                             _describe_expected(p, e.allowed or ())) from None
        if isinstance(e, UnexpectedEOF):
            line, col = _end_position(text)
            line += line_offset
            raise ParseError("unexpected end of input", line, col,
                             _describe_expected(p, e.expected)) from None
        raise ParseError(str(e), line, col) from None


def _shift(err: ParseError, line_offset: int, col_offset: int) -> ParseError:
    line = None if err.line is None else err.line + line_offset
    col = None if err.column is None else err.column + (col_offset if err.line == 1 else 0)
    return ParseError(err.message, line, col, err.expected)


def parse_term(text: str) -> A.Term:
    """Parse a Boolean term (no modal operators)."""
    t = parse_modal(text)
    if not A.is_boolean(t):
        raise ParseError("modal operator in a Boolean term", 1, 1)
    return t


def parse_modal(text: str) -> A.Term:
    tree = _raw(text)
    if isinstance(tree, Tree) and tree.data in _FORMULA_NODES:
        line, col = _pos(tree)
        raise ParseError("expected a term, found a formula", line, col)
    return _to_term(tree)


def parse_fo(text: str) -> A.Formula:
    """Parse a first-order formula whose atoms may relate modal terms."""
    return _to_formula(_raw(text))


def parse_contact(text: str) -> A.Formula:
    phi = parse_fo(text)
    for a in A.atoms(phi):
        for side in (a.lhs, a.rhs):
            if not A.is_boolean(side):
                raise ParseError("modal operator inside a contact atom", 1, 1)
        if isinstance(a, A.Nleq):
            raise ParseError("'</=' is not part of the contact language", 1, 1)
    return phi


def parse_rule(text: str) -> A.Pi2Rule:
    """Parse the line-oriented rule file format."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped[:2] in ("F:", "G:"):
            key = stripped[0]
            body = stripped[2:]
            col0 = indent + 2
            if key in fields:
                raise ParseError(f"duplicate '{key}:' declaration", lineno, indent + 1)
            try:
                fields[key] = parse_modal(body)
            except ParseError as e:
                raise _shift(e, lineno - 1, col0) from None
            continue
        head, *rest = stripped.split()
        if head not in ("rule", "xvars", "pvars"):
            raise ParseError(f"unknown declaration {head!r}", lineno, indent + 1,
                             ("rule", "xvars", "pvars", "F:", "G:"))
        if head in fields:
            raise ParseError(f"duplicate '{head}' declaration", lineno, indent + 1)
        for name in rest:
            if not _is_ident(name):
                raise ParseError(f"bad identifier {name!r}", lineno, line.index(name) + 1,
                                 ("identifier",))
        if head == "rule" and len(rest) != 1:
            raise ParseError("'rule' takes exactly one name", lineno, indent + 1)
        fields[head] = rest
    for key in ("rule", "F", "G"):
        if key not in fields:
            raise ParseError(f"missing '{key}' declaration", None, None)
    try:
        return A.Pi2Rule(fields["rule"][0], fields.get("xvars", ()), fields.get("pvars", ()),
                         fields["F"], fields["G"])
    except ValueError as e:
        raise ParseError(str(e)) from None


def _is_ident(s: str) -> bool:
    import re
    return bool(re.fullmatch(r"[a-z][a-zA-Z0-9_]*", s)) and s not in ("top", "bot")


def parse(kind: str, text: str):
    """Parse ``text`` as one of ``term``, ``contact``, ``modal``, ``fo`` or ``rule``."""
    fn = {"term": parse_term, "contact": parse_contact, "modal": parse_modal,
          "fo": parse_fo, "rule": parse_rule}.get(kind)
    if fn is None:
        raise ValueError(f"unknown parse kind {kind!r}")
    return fn(text)
