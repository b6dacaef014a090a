"""Rendering to the concrete grammars, plus a structured JSON export."""

from __future__ import annotations

import dataclasses
import json
from enum import Enum

from .names import Pol
from .terms import (
    Base, BasePayload, BoolLit, Branch, Chan, End, Eq, GIn, GOut, In, IntLit,
    NamesPayload, Nil, Out, Par, PChoice, PIn, POut, PPar, PRepl, PSum, PTau,
    PZero, Repl, Res, SBranch, SChoice, Select, SIn, SOut, Sum, TupleType,
)


def render_value(v) -> str:
    match v:
        case IntLit(n):
            return str(n)
        case BoolLit(b):
            return "true" if b else "false"
        case Eq(lhs, rhs):
            return f"{lhs}=={rhs}"
        case Chan():
            return str(v)
        case str():
            return v
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------------- processes


def _render_proc(p) -> str:
    if isinstance(p, Par):
        right = _render_proc(p.right)
        if isinstance(p.right, Par):
            right = f"({right})"
        return f"{_render_proc(p.left)} | {right}"
    if isinstance(p, Sum):
        return " + ".join(_render_prefixed(b) for b in p.branches)
    return _render_prefixed(p)


def _render_prefixed(p) -> str:
    match p:
        case Nil():
            return "0"
        case Par() | Sum():
            return f"({_render_proc(p)})"
        case Repl(body):
            return "!" + _render_prefixed(body)
        case Res(names, body, ann):
            head = ",".join(names)
            if ann is not None:
                head += ":" + render_stype(ann)
            return f"(new {head})" + _render_prefixed(body)
        case Out(subj, payload, cont):
            pl = "" if payload is None else render_value(payload)
            return f"{subj}!<{pl}>" + _cont(cont)
        case In(subj, var, cont):
            return f"{subj}?({var or ''})" + _cont(cont)
        case Branch(subj, branches):
            inner = ", ".join(f"{l}: {_render_proc(q)}" for l, q in branches)
            return f"{subj} >>{{{inner}}}"
        case Select(subj, label, cont):
            return f"{subj} <<{label}" + _cont(cont)
        case GOut(subj, args, cont):
            return f"{subj}!<{','.join(render_value(a) for a in args)}>" + _cont(cont)
        case GIn(subj, params, cont):
            return f"{subj}?({','.join(params)})" + _cont(cont)
    raise TypeError(f"not a process: {p!r}")


def _cont(p) -> str:
    return "." + _render_prefixed(p)


# ---------------------------------------------------------------- session types


def render_stype(s) -> str:
    match s:
        case End():
            return "end"
        case Base(sort):
            return sort
        case SIn(payload, cont):
            return f"?<{render_stype(payload)}>.{_stype_atom(cont)}"
        case SOut(payload, cont):
            return f"!<{render_stype(payload)}>.{_stype_atom(cont)}"
        case SBranch(branches):
            return "&{" + ", ".join(f"{l}:{render_stype(t)}" for l, t in branches) + "}"
        case SChoice(branches):
            return "(+){" + ", ".join(f"{l}:{render_stype(t)}" for l, t in branches) + "}"
    raise TypeError(f"not a session type: {s!r}")


def _stype_atom(s) -> str:
    return render_stype(s)


def render_env(env: dict) -> str:
    return "{" + ", ".join(f"{c}: {render_stype(s)}" for c, s in env.items()) + "}"


# ---------------------------------------------------------------- process types

_PREC = {PPar: 0, PChoice: 1, PSum: 2}


def _prec(g) -> int:
    return _PREC.get(type(g), 3)


def render_ptype(g) -> str:
    match g:
        case PPar(left, right):
            return f"{_wrap(left, 0)} | {_wrap(right, 1)}"
        case PChoice(left, right):
            return f"{_wrap(left, 1)} & {_wrap(right, 2)}"
        case PSum(branches):
            return " + ".join(_wrap(b, 3) for b in branches)
        case PZero():
            return "0"
        case PRepl(body):
            return "*" + _wrap(body, 3)
        case PTau(cont):
            return "tau." + _wrap(cont, 3)
        case POut(subj, payload, cont):
            return f"{subj}!<{render_payload(payload)}>.{_wrap(cont, 3)}"
        case PIn(subj, payload, cont):
            return f"{subj}?<{render_payload(payload)}>.{_wrap(cont, 3)}"
    raise TypeError(f"not a process type: {g!r}")


def _wrap(g, min_prec: int) -> str:
    s = render_ptype(g)
    return s if _prec(g) >= min_prec else f"({s})"


def render_payload(p) -> str:
    match p:
        case BasePayload(sorts):
            return ",".join(sorts)
        case TupleType(binders, body):
            return f"({','.join(binders)}){render_ptype(body)}"
        case NamesPayload(binders):
            return f"[{','.join(binders)}]"
    raise TypeError(f"not a payload: {p!r}")


# ---------------------------------------------------------------- dispatch


def render(term) -> str:
    if isinstance(term, dict):
        return render_env(term)
    if isinstance(term, (End, Base, SIn, SOut, SBranch, SChoice)):
        return render_stype(term)
    if isinstance(term, (PZero, PPar, PChoice, PSum, PRepl, POut, PIn, PTau)):
        return render_ptype(term)
    if isinstance(term, (TupleType, BasePayload, NamesPayload)):
        return render_payload(term)
    return _render_proc(term)


# ---------------------------------------------------------------- structured export


def to_json(term):
    """Plain-data form: every node is ``{"node": <class>, <field>: ...}``."""
    if isinstance(term, dict):
        return {"node": "TypeEnv",
                "entries": [{"channel": to_json(c), "type": to_json(s)} for c, s in term.items()]}
    if dataclasses.is_dataclass(term):
        out = {"node": type(term).__name__}
        for f in dataclasses.fields(term):
            out[f.name] = to_json(getattr(term, f.name))
        return out
    if isinstance(term, Enum):
        return term.value
    if isinstance(term, (tuple, list)):
        return [to_json(x) for x in term]
    return term


def dumps(term) -> str:
    return json.dumps(to_json(term), sort_keys=True)


__all__ = ["render", "render_stype", "render_ptype", "render_env", "render_payload",
           "render_value", "to_json", "dumps", "Pol"]
