"""Machine-readable reports.  Field names are stable across versions of the schema."""
from __future__ import annotations

import json

from .admit import AdmissibilityReport, Validity
from .frames.core import KripkeModel
from .frames.io import model_to_json
from .sat import SatResult
from .syntax.printer import pretty

SCHEMA = "s2ic-report/1"
_STAT_KEYS = ("branches", "classes", "pair_types", "time_ms")


def _stats(raw: dict, timing: bool) -> dict:
    out = {k: raw.get(k) for k in _STAT_KEYS}
    for k in sorted(raw):
        if k not in out:
            out[k] = raw[k]
    if not timing:
        out["time_ms"] = None
        for v in out.values():
            if isinstance(v, dict) and "time_ms" in v:
                v["time_ms"] = None
    return out


def _model(M: KripkeModel | None):
    return None if M is None else model_to_json(M)


def sat_payload(r: SatResult, formula=None, timing=True, verified=None, extra=None) -> dict:
    d = {"schema": SCHEMA, "kind": "sat", "status": str(r.status)}
    if formula is not None:
        d["formula"] = pretty(formula)
    d["model"] = _model(r.model)
    if r.model is not None:
        d["verified"] = bool(verified)
    d["stats"] = _stats(r.stats, timing)
    d.update(extra or {})
    return d


def admit_payload(rep: AdmissibilityReport, timing=True) -> dict:
    return {"schema": SCHEMA, "kind": "admit", "rule": rep.rule, "verdict": str(rep.verdict),
            "formula": pretty(rep.eliminated), "countermodel": _model(rep.countermodel),
            "verified": rep.verified if rep.countermodel is not None else False,
            "stats": _stats(rep.stats, timing)}


def valid_payload(v: Validity, formula, timing=True) -> dict:
    return {"schema": SCHEMA, "kind": "valid", "formula": pretty(formula), "valid": v.holds,
            "countermodel": _model(v.countermodel),
            "verified": v.verified if v.countermodel is not None else False,
            "stats": _stats(v.stats, timing)}


def generic_payload(kind: str, body: dict, timing=True) -> dict:
    d = {"schema": SCHEMA, "kind": kind}
    d.update(body)
    if "stats" in d:
        d["stats"] = _stats(d["stats"], timing)
    return d


def report_json(report, *, timing: bool = True, formula=None) -> str:
    """Serialize a report object (or an already built payload dict) to JSON text."""
    if isinstance(report, AdmissibilityReport):
        d = admit_payload(report, timing)
    elif isinstance(report, SatResult):
        d = sat_payload(report, formula, timing)
    elif isinstance(report, Validity):
        d = valid_payload(report, formula, timing)
    elif isinstance(report, dict):
        d = report
    else:
        raise TypeError(f"cannot report {type(report).__name__}")
    return json.dumps(d, ensure_ascii=False)
