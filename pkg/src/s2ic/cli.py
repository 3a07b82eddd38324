"""Command-line front end.

Exit codes: 0 when a decision was reached (the answer is in the output),
2 on malformed input, 3 when a resource limit stopped the run.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .admit import BUILTIN_NAMES, decide_admissible, get_rule, s2ic_valid
from .budget import Budget
from .errors import FrameError, NotFound, ParseError, ResourceLimit
from .frames import io as fio
from .frames.constructions import (MinExtSpec, compose_chain, factor_minimal, minimal_extensions,
                                   one_step_cover, pullback_amalgam, quotient_by_partition)
from .frames.core import classify_map, dual_algebra, model_check
from .frames.splitting import splitting_check
from .qe import eliminate_with_stats, simplify
from .report import generic_payload, report_json, sat_payload, valid_payload, admit_payload
from .sat import brute_force_oracle, satisfiable
from .syntax import ast as A
from .syntax.parser import parse_fo, parse_modal, parse_rule
from .syntax.printer import pretty

EXIT_OK, EXIT_INPUT, EXIT_LIMIT = 0, 2, 3
_AXIOMS = ("S1", "S2", "S3", "S4", "S5", "S6")
FRAME_OPS = ("dual", "cover", "amalgam", "minext", "factor", "split", "quotient")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    json: bool = False
    max_frame_size: int = 16
    max_atoms: int = 512
    timeout: float = 3600.0
    oracle_check: bool = False
    trace: str | None = None
    figure: str | None = None
    timing: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("max_frame_size", "max_atoms", "timeout"):
            if getattr(self, name) is None or getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def budget(self) -> Budget:
        return Budget(timeout=self.timeout, max_atoms=self.max_atoms)


@dataclass
class Outcome:
    code: int
    payload: dict | None = None
    text: str = ""
    error: str | None = None


class _Tracer:
    def __init__(self, target):
        self.target = target
        self.records = []
        self._fh = None

    def __call__(self, rec):
        self.records.append(rec)
        if self.target is None:
            return
        if self._fh is None:
            self._fh = sys.stderr if self.target == "-" else open(self.target, "w")
        self._fh.write(json.dumps(rec, default=str) + "\n")
        self._fh.flush()

    def close(self):
        if self._fh not in (None, sys.stderr):
            self._fh.close()


def _read(arg: str, from_file: bool) -> str:
    if from_file:
        with open(arg) as fh:
            return fh.read()
    return arg


def _model_text(M) -> list:
    lines = [f"  points: {' '.join(M.frame.points)}",
             "  edges: " + (" ".join(f"{a}-{b}" for a, b in M.frame.sorted_edges()) or "-")]
    for v in sorted(M.valuation):
        pts = sorted(M.valuation[v], key=M.frame.index.__getitem__)
        lines.append(f"  {v} = {{{', '.join(pts)}}}")
    return lines


def _stats_line(stats: dict, timing: bool) -> str:
    keys = [k for k in ("branches", "classes", "pair_types", "atoms", "conflicts")
            if stats.get(k) is not None]
    parts = [f"{k}={stats[k]}" for k in keys]
    if timing and stats.get("time_ms") is not None:
        parts.append(f"time_ms={stats['time_ms']}")
    return "stats: " + " ".join(parts) if parts else ""


# subcommands -----------------------------------------------------------------

def _cmd_sat(cfg: RunConfig) -> Outcome:
    phi = parse_fo(_read(cfg.inputs[0], cfg.options.get("file", False)))
    r = satisfiable(phi, budget=cfg.budget())
    verified = model_check(r.model, phi) if r.model is not None else None
    extra = {}
    if cfg.oracle_check:
        o = brute_force_oracle(phi, cfg.options.get("oracle_points", 4))
        extra["oracle"] = {"status": str(o.status), "agrees": o.status == r.status}
    payload = sat_payload(r, phi, cfg.timing, verified, extra)
    lines = ["SAT" if r.sat else "UNSAT"]
    if r.model is not None:
        lines += _model_text(r.model)
        lines.append(f"verified: {str(bool(verified)).lower()}")
    if "oracle" in extra:
        lines.append(f"oracle: {extra['oracle']['status']} "
                     f"({'agrees' if extra['oracle']['agrees'] else 'DISAGREES'})")
    lines.append(_stats_line(r.stats, cfg.timing))
    if cfg.figure and r.model is not None:
        from .plotting import plot_model
        plot_model(r.model, cfg.figure, title="model")
    return Outcome(EXIT_OK, payload, "\n".join(l for l in lines if l))


def _cmd_valid(cfg: RunConfig) -> Outcome:
    psi = parse_modal(_read(cfg.inputs[0], cfg.options.get("file", False)))
    v = s2ic_valid(psi, budget=cfg.budget())
    lines = ["VALID" if v.holds else "INVALID"]
    if v.countermodel is not None:
        lines.append("countermodel:")
        lines += _model_text(v.countermodel)
        lines.append(f"verified: {str(v.verified).lower()}")
        if cfg.figure:
            from .plotting import plot_model
            plot_model(v.countermodel, cfg.figure, title="countermodel")
    return Outcome(EXIT_OK, valid_payload(v, psi, cfg.timing), "\n".join(lines))


def _names(s: str | None) -> list:
    return [x for x in (s or "").replace(" ", ",").split(",") if x]


def _cmd_qe(cfg: RunConfig) -> Outcome:
    phi = parse_fo(_read(cfg.inputs[0], cfg.options.get("file", False)))
    drop, keep = _names(cfg.options.get("drop")), _names(cfg.options.get("keep"))
    present = A.term_vars(phi)
    if not keep:
        keep = sorted(present - set(drop))
    bad = set(drop) & set(keep)
    if bad:
        raise ParseError(f"variables both kept and dropped: {', '.join(sorted(bad))}", 1, 1)
    unknown = present - set(drop) - set(keep)
    if unknown:
        raise ParseError(f"variables neither kept nor dropped: {', '.join(sorted(unknown))}",
                         1, 1)
    tracer = _Tracer(cfg.trace)
    budget = cfg.budget()
    try:
        res = eliminate_with_stats(phi, drop, keep, budget=budget, trace=tracer)
    finally:
        tracer.close()
    out = simplify(res.formula, budget=budget) if cfg.options.get("simplify") else res.formula
    payload = generic_payload("qe", {"formula": pretty(out), "kept": res.kept,
                                     "eliminated": res.eliminated, "stats": dict(res.stats)},
                              cfg.timing)
    if cfg.figure:
        from .plotting import plot_qe_stats
        plot_qe_stats(tracer.records, cfg.figure)
    text = "\n".join([pretty(out), _stats_line(res.stats, cfg.timing)])
    return Outcome(EXIT_OK, payload, text.rstrip())


def _load_rule(arg: str):
    if os.path.exists(arg):
        return parse_rule(_read(arg, True))
    stem = os.path.splitext(os.path.basename(arg))[0]
    if arg in BUILTIN_NAMES or (arg.endswith(".p2r") and stem in BUILTIN_NAMES):
        return get_rule(stem)
    raise NotFound(f"{arg!r} is neither a rule file nor a built-in rule "
                   f"({', '.join(BUILTIN_NAMES)})")


def _cmd_admit(cfg: RunConfig) -> Outcome:
    rule = _load_rule(cfg.inputs[0])
    tracer = _Tracer(cfg.trace)
    try:
        rep = decide_admissible(rule, budget=cfg.budget(), trace=tracer,
                                reverse_orientation=cfg.options.get("reverse_orientation", False))
    finally:
        tracer.close()
    lines = [f"rule {rep.rule}: {'ADMISSIBLE' if rep.admissible else 'NOT ADMISSIBLE'}"]
    for b in rep.branch_results:
        if b["eliminated"]:
            lines.append(f"  branch {b['branch']}: exists {' '.join(b['eliminated'])} "
                         f"-> {b['qe']}")
    if rep.countermodel is not None:
        lines.append("countermodel:")
        lines += _model_text(rep.countermodel)
        lines.append(f"verified: {str(rep.verified).lower()}")
        if cfg.figure:
            from .plotting import plot_model
            plot_model(rep.countermodel, cfg.figure, title=f"{rep.rule}: countermodel")
    elif cfg.figure:
        from .plotting import plot_qe_stats
        plot_qe_stats(tracer.records, cfg.figure, title=f"{rep.rule}: QE classes")
    lines.append(_stats_line(rep.stats, cfg.timing))
    return Outcome(EXIT_OK, admit_payload(rep, cfg.timing), "\n".join(l for l in lines if l))


def _pick(table: dict, name: str | None, what: str):
    if not table:
        raise ParseError(f"no {what} declared", 1, 1, (what,))
    if name is None:
        return next(iter(table.values()))
    if name not in table:
        raise NotFound(f"no {what} named {name!r}")
    return table[name]


def _cmd_frame(cfg: RunConfig) -> Outcome:
    op = cfg.options["op"]
    frames, maps = fio.parse_frames(_read(cfg.inputs[0], True))
    o = cfg.options
    body, lines, figs = {"op": op}, [], []
    if op == "dual":
        X = _pick(frames, o.get("name"), "frame")
        D = dual_algebra(X, cfg.max_frame_size)
        fails = D.axiom_failures()
        body.update(frame=fio.frame_to_json(X), elements=D.size,
                    pairs=len(list(D.pairs())),
                    axioms={k: k not in fails for k in _AXIOMS},
                    counterexamples={k: [sorted(X.subset(m), key=X.index.__getitem__)
                                         for m in v] for k, v in fails.items()})
        lines.append(f"dual of {X.name}: {D.size} elements, {body['pairs']} pairs in <<")
        lines += [f"  {k}: " + ("ok" if k not in fails else
                                "FAILS " + json.dumps(body["counterexamples"][k]))
                  for k in _AXIOMS]
        figs = [X]
    elif op == "cover":
        X = _pick(frames, o.get("name"), "frame")
        Y, f = one_step_cover(X)
        body.update(frame=fio.frame_to_json(Y), map=fio.map_to_json(f),
                    one_step=Y.is_one_step(), kind=classify_map(f))
        lines += [fio.format_frame(Y), fio.format_map(f, "cover")]
        figs = [Y, X]
    elif op == "amalgam":
        names = _names(o.get("maps"))
        if len(names) != 2:
            raise ParseError("--maps needs exactly two map names", 1, 1, ("f,g",))
        f, g = (_pick(maps, n, "map") for n in names)
        D, p1, p2 = pullback_amalgam(f, g)
        body.update(frame=fio.frame_to_json(D), p1=fio.map_to_json(p1), p2=fio.map_to_json(p2))
        lines += [fio.format_frame(D), fio.format_map(p1, "p1"), fio.format_map(p2, "p2")]
        figs = [D, f.dom, g.dom, f.cod]
    elif op == "minext":
        X = _pick(frames, o.get("name"), "frame")
        spec = MinExtSpec(o.get("point"), frozenset(_names(o.get("s1"))),
                          frozenset(_names(o.get("s2"))), bool(o.get("connect")))
        Y, f = minimal_extensions(X, spec)
        body.update(frame=fio.frame_to_json(Y), map=fio.map_to_json(f), kind=classify_map(f))
        lines += [fio.format_frame(Y), fio.format_map(f, "collapse")]
        figs = [Y, X]
    elif op == "factor":
        f = _pick(maps, o.get("map"), "map")
        chain = factor_minimal(f)
        ok = not chain or compose_chain(chain).mapping == f.mapping
        body.update(chain=[fio.map_to_json(g) for g in chain],
                    frames=[fio.frame_to_json(g.dom) for g in chain], recomposes=ok)
        for i, g in enumerate(chain):
            lines += [fio.format_frame(g.dom), fio.format_map(g, f"f{i + 1}")]
        lines.append(f"{len(chain)} step(s), recomposes: {str(ok).lower()}")
        figs = [g.dom for g in chain] + [f.cod]
    elif op == "split":
        X = _pick(frames, o.get("name"), "frame")
        r = splitting_check(X, o.get("which") or "S1", cfg.max_frame_size, collect=False)
        body.update(frame=fio.frame_to_json(X), condition=r.condition, holds=r.holds,
                    counterexample=r.counterexample)
        lines.append(f"{r.condition} on {X.name}: {'holds' if r.holds else 'fails'}")
        if r.counterexample:
            lines.append("  premise without a split: " + json.dumps(r.counterexample))
        figs = [X]
    else:
        X = _pick(frames, o.get("name"), "frame")
        blocks = [_names(b) for b in (o.get("partition") or "").split(";") if b.strip()]
        Q, q = quotient_by_partition(X, blocks)
        body.update(frame=fio.frame_to_json(Q), map=fio.map_to_json(q))
        lines += [fio.format_frame(Q), fio.format_map(q, "q")]
        figs = [X, Q]
    if cfg.figure and figs:
        from .plotting import plot_frames
        plot_frames(figs, cfg.figure)
    return Outcome(EXIT_OK, generic_payload(f"frame-{op}", body, cfg.timing), "\n".join(lines))


_DISPATCH = {"sat": _cmd_sat, "valid": _cmd_valid, "qe": _cmd_qe, "admit": _cmd_admit,
             "frame": _cmd_frame}


def run(cfg: RunConfig) -> Outcome:
    """Execute one command; never raises for input or resource problems."""
    try:
        return _DISPATCH[cfg.command](cfg)
    except ParseError as e:
        return Outcome(EXIT_INPUT, error=f"parse error: {e}")
    except (NotFound, FrameError, OSError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        return Outcome(EXIT_INPUT, error=f"input error: {msg}")
    except ResourceLimit as e:
        stats = dict(e.stats)
        if not cfg.timing:
            stats.pop("time_ms", None)
        payload = generic_payload("resource-limit", {"status": "resource_limit",
                                                     "message": str(e), "stats": stats},
                                  cfg.timing)
        return Outcome(EXIT_LIMIT, payload, error=f"resource limit: {e}")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--timeout", type=float, default=3600.0, metavar="SECONDS")
    common.add_argument("--max-atoms", type=int, default=512)
    common.add_argument("--max-frame-size", type=int, default=16)
    common.add_argument("--oracle-check", action="store_true",
                        help="cross-check sat answers against finite-frame enumeration")
    common.add_argument("--trace", metavar="FILE", nargs="?", const="-",
                        help="write per-class QE records as JSON lines (default: stderr)")
    common.add_argument("--figure", metavar="PATH", help="render a figure to PATH")
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall-clock fields so reruns are byte-identical")

    p = argparse.ArgumentParser(prog="s2ic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("sat", "satisfiability of a contact formula"),
                           ("valid", "validity of a modal term")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input", help="formula text, or a path with -f")
        s.add_argument("-f", "--file", action="store_true", help="read the input from a file")
        if name == "sat":
            s.add_argument("--oracle-points", type=int, default=4)

    s = sub.add_parser("qe", parents=[common], help="eliminate existential variables")
    s.add_argument("input")
    s.add_argument("-f", "--file", action="store_true")
    s.add_argument("--keep", default="", help="comma separated parameters")
    s.add_argument("--drop", default="", help="comma separated variables to eliminate")
    s.add_argument("--simplify", action="store_true")

    s = sub.add_parser("admit", parents=[common], help="decide admissibility of a rule")
    s.add_argument("input", help=f"rule file or one of: {', '.join(BUILTIN_NAMES)}")
    s.add_argument("--reverse-orientation", action="store_true", help=argparse.SUPPRESS)

    s = sub.add_parser("frame", parents=[common], help="finite frame constructions")
    s.add_argument("op", choices=FRAME_OPS)
    s.add_argument("input", help="frame file")
    s.add_argument("--name", help="frame to use (default: the first)")
    s.add_argument("--map", help="map to factor (default: the first)")
    s.add_argument("--maps", help="two map names f,g for the amalgam")
    s.add_argument("--point", help="point to split (minext)")
    s.add_argument("--s1", default="")
    s.add_argument("--s2", default="")
    s.add_argument("--connect", action="store_true")
    s.add_argument("--which", default="S1", choices=("S1", "S2", "S3", "s1", "s2", "s3"))
    s.add_argument("--partition", help="blocks separated by ';', points by ','")
    return p


def config_from_args(argv=None) -> RunConfig:
    ns = _parser().parse_args(argv)
    base = {"command", "input", "json", "timeout", "max_atoms", "max_frame_size",
            "oracle_check", "trace", "figure", "no_timing"}
    opts = {k: v for k, v in vars(ns).items() if k not in base}
    return RunConfig(command=ns.command, inputs=[ns.input], json=ns.json,
                     max_frame_size=ns.max_frame_size, max_atoms=ns.max_atoms,
                     timeout=ns.timeout, oracle_check=ns.oracle_check, trace=ns.trace,
                     figure=ns.figure, timing=not ns.no_timing, options=opts)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ValueError as e:
        print(f"s2ic: {e}", file=sys.stderr)
        return EXIT_INPUT
    out = run(cfg)
    if out.error:
        print(out.error, file=sys.stderr)
    if cfg.json and out.payload is not None:
        print(report_json(out.payload))
    elif out.code == EXIT_OK:
        print(out.text)
    elif out.payload is not None:
        print(_stats_line(out.payload.get("stats", {}), cfg.timing) or "stats: -",
              file=sys.stderr)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
