"""Free names, alpha-equivalence and capture-avoiding substitution.

Binders: ``Res`` and the input prefixes (``In``/``GIn``) in processes; tuple
binders ``(x~)G`` and name-vector payloads ``[x~]`` in process types.
"""

from __future__ import annotations

from functools import singledispatch

from .names import Pol, variant
from .terms import (
    BasePayload, BoolLit, Branch, Chan, Eq, GIn, GOut, In, IntLit, NamesPayload,
    Nil, Out, Par, PChoice, PIn, POut, PPar, PRepl, PSum, PTau, PZero, Repl,
    Res, Select, Sum, TupleType, eval_value, is_value,
)


class SubstitutionError(Exception):
    """A value was substituted into a channel position."""


# ---------------------------------------------------------------- free names


def free_names(term) -> frozenset:
    """Free names of a term.

    Session processes yield :class:`Chan` values (name plus polarity); generic
    processes and process types yield plain strings.
    """
    if isinstance(term, (Out, In, Branch, Select)) or _is_session(term):
        return frozenset(_fn_session(term))
    if _is_ptype(term):
        return frozenset(_fn_ptype(term))
    return frozenset(_fn_generic(term))


def _is_session(p) -> bool:
    """True when the process contains a session guard (or is ambiguous)."""
    match p:
        case Out() | In() | Branch() | Select():
            return True
        case GOut() | GIn() | Sum():
            return False
        case Par(l, r):
            return _is_session(l) or _is_session(r)
        case Res(_, body, _) | Repl(body):
            return _is_session(body)
    return False


def _is_ptype(t) -> bool:
    return isinstance(t, (PZero, PPar, PChoice, PSum, PRepl, POut, PIn, PTau,
                          TupleType, BasePayload, NamesPayload))


def session_names(p) -> set[str]:
    """All names (free or bound) occurring in a session process."""
    out: set[str] = set()

    def go(q):
        match q:
            case Par(l, r):
                go(l), go(r)
            case Res(names, body, _):
                out.update(names), go(body)
            case Repl(body):
                go(body)
            case Out(subj, payload, cont):
                out.add(subj.name)
                if isinstance(payload, Chan):
                    out.add(payload.name)
                elif isinstance(payload, Eq) and isinstance(payload.lhs, str):
                    out.add(payload.lhs)
                go(cont)
            case In(subj, var, cont):
                out.add(subj.name)
                if var:
                    out.add(var)
                go(cont)
            case Branch(subj, branches):
                out.add(subj.name)
                for _, b in branches:
                    go(b)
            case Select(subj, _, cont):
                out.add(subj.name), go(cont)
    go(p)
    return out


def _fn_session(p) -> set:
    match p:
        case Nil():
            return set()
        case Par(l, r):
            return _fn_session(l) | _fn_session(r)
        case Res(names, body, _):
            return {c for c in _fn_session(body) if c.name not in names}
        case Repl(body):
            return _fn_session(body)
        case Out(subj, payload, cont):
            s = {subj} | _fn_session(cont)
            if isinstance(payload, Chan):
                s.add(payload)
            elif isinstance(payload, Eq) and isinstance(payload.lhs, str):
                s.add(Chan(payload.lhs))
            return s
        case In(subj, var, cont):
            return {subj} | {c for c in _fn_session(cont) if c.name != var}
        case Branch(subj, branches):
            s = {subj}
            for _, b in branches:
                s |= _fn_session(b)
            return s
        case Select(subj, _, cont):
            return {subj} | _fn_session(cont)
    raise TypeError(f"not a session process: {p!r}")


def _arg_names(args) -> set[str]:
    s = set()
    for a in args:
        if isinstance(a, str):
            s.add(a)
        elif isinstance(a, Eq) and isinstance(a.lhs, str):
            s.add(a.lhs)
    return s


def _fn_generic(p) -> set[str]:
    match p:
        case Nil():
            return set()
        case Par(l, r):
            return _fn_generic(l) | _fn_generic(r)
        case Res(names, body, _):
            return _fn_generic(body) - set(names)
        case Repl(body):
            return _fn_generic(body)
        case GOut(subj, args, cont):
            return {subj} | _arg_names(args) | _fn_generic(cont)
        case GIn(subj, params, cont):
            return {subj} | (_fn_generic(cont) - set(params))
        case Sum(branches):
            s = set()
            for b in branches:
                s |= _fn_generic(b)
            return s
    raise TypeError(f"not a generic process: {p!r}")


def _fn_payload(pl) -> set[str]:
    if isinstance(pl, TupleType):
        return _fn_ptype(pl.body) - set(pl.binders)
    return set()


def _fn_ptype(g) -> set[str]:
    match g:
        case PZero():
            return set()
        case PPar(l, r) | PChoice(l, r):
            return _fn_ptype(l) | _fn_ptype(r)
        case PSum(branches):
            s = set()
            for b in branches:
                s |= _fn_ptype(b)
            return s
        case PRepl(body) | PTau(body):
            return _fn_ptype(body)
        case POut(subj, pl, cont) | PIn(subj, pl, cont):
            cont_fn = _fn_ptype(cont)
            if isinstance(pl, NamesPayload):
                cont_fn -= set(pl.binders)
            return {subj} | _fn_payload(pl) | cont_fn
        case TupleType() | BasePayload() | NamesPayload():
            return _fn_payload(g)
    raise TypeError(f"not a process type: {g!r}")


def free_channel_names(p) -> set[str]:
    """Free names of any process, polarity dropped."""
    return {c.name if isinstance(c, Chan) else c for c in free_names(p)}


# ---------------------------------------------------------------- alpha keys


def alpha_key(term, env: dict | None = None):
    """A hashable key equal for exactly the alpha-equivalent terms."""
    return _ak(term, dict(env or {}))


def alpha_eq(a, b) -> bool:
    if type(a) is not type(b) and not (isinstance(a, dict) and isinstance(b, dict)):
        return False
    return alpha_key(a) == alpha_key(b)


def _bind(env: dict, names) -> dict:
    env = dict(env)
    for n in names:
        env[n] = ("#", len(env))
    return env


def _nk(env, name):
    return env.get(name, name)


def _vk(env, v):
    match v:
        case Chan(name, pol):
            return ("chan", _nk(env, name), pol.value)
        case str():
            return ("name", _nk(env, v))
        case Eq(lhs, rhs):
            return ("eq", _nk(env, lhs) if isinstance(lhs, str) else lhs, rhs)
        case IntLit(n):
            return ("int", n)
        case BoolLit(b):
            return ("bool", b)
        case None:
            return None
    raise TypeError(v)


def _ak(t, env):
    match t:
        case dict():
            return ("env", frozenset((c, _ak(s, {})) for c, s in t.items()))
        case Nil():
            return ("0",)
        case Par(l, r):
            return ("|", _ak(l, env), _ak(r, env))
        case Res(names, body, ann):
            return ("new", len(names), _ak(body, _bind(env, names)))
        case Repl(body):
            return ("!", _ak(body, env))
        case Out(subj, payload, cont):
            return ("out", _vk(env, subj), _vk(env, payload), _ak(cont, env))
        case In(subj, var, cont):
            return ("in", _vk(env, subj), var is None,
                    _ak(cont, _bind(env, [var] if var else [])))
        case Branch(subj, branches):
            return ("br", _vk(env, subj), tuple((l, _ak(b, env)) for l, b in branches))
        case Select(subj, label, cont):
            return ("sel", _vk(env, subj), label, _ak(cont, env))
        case GOut(subj, args, cont):
            return ("gout", _nk(env, subj), tuple(_vk(env, a) for a in args), _ak(cont, env))
        case GIn(subj, params, cont):
            return ("gin", _nk(env, subj), len(params), _ak(cont, _bind(env, params)))
        case Sum(branches):
            return ("sum", tuple(_ak(b, env) for b in branches))
        case PZero():
            return ("P0",)
        case PPar(l, r):
            return ("P|", _ak(l, env), _ak(r, env))
        case PChoice(l, r):
            return ("P&", _ak(l, env), _ak(r, env))
        case PSum(branches):
            return ("P+", tuple(_ak(b, env) for b in branches))
        case PRepl(body):
            return ("P*", _ak(body, env))
        case PTau(cont):
            return ("Ptau", _ak(cont, env))
        case POut(subj, pl, cont) | PIn(subj, pl, cont):
            tag = "P!" if isinstance(t, POut) else "P?"
            cenv = _bind(env, pl.binders) if isinstance(pl, NamesPayload) else env
            return (tag, _nk(env, subj), _ak(pl, env), _ak(cont, cenv))
        case TupleType(binders, body):
            return ("tuple", len(binders), _ak(body, _bind(env, binders)))
        case BasePayload(sorts):
            return ("base", sorts)
        case NamesPayload(binders):
            return ("names", len(binders))
    # session types and anything else compare structurally
    return ("lit", t)


# ---------------------------------------------------------------- substitution: session


def _subst_chan(c: Chan, mapping: dict):
    if c.name not in mapping:
        return c
    r = mapping[c.name]
    if isinstance(r, Chan):
        return Chan(r.name, r.pol if c.pol is Pol.NONE else c.pol)
    return r


def _repl_names(mapping: dict) -> set[str]:
    out = set()
    for r in mapping.values():
        if isinstance(r, Chan):
            out.add(r.name)
        elif isinstance(r, str):
            out.add(r)
    return out


def subst_session(p, mapping: dict):
    """Simultaneous substitution ``p{mapping}``.

    ``mapping`` sends unpolarized names to polarized channels or values.
    Raises :class:`SubstitutionError` when a value lands in subject position.
    """
    if not mapping:
        return p
    match p:
        case Nil():
            return p
        case Par(l, r):
            return Par(subst_session(l, mapping), subst_session(r, mapping))
        case Repl(body):
            return Repl(subst_session(body, mapping))
        case Res(names, body, ann):
            names, body, inner = _enter_session(names, body, mapping)
            return Res(names, subst_session(body, inner), ann)
        case Out(subj, payload, cont):
            return Out(_subj(subj, mapping), _subst_payload(payload, mapping),
                       subst_session(cont, mapping))
        case In(subj, var, cont):
            new_subj = _subj(subj, mapping)
            if var is None:
                return In(new_subj, None, subst_session(cont, mapping))
            (var,), cont, inner = _enter_session((var,), cont, mapping)
            return In(new_subj, var, subst_session(cont, inner))
        case Branch(subj, branches):
            return Branch(_subj(subj, mapping),
                          tuple((l, subst_session(b, mapping)) for l, b in branches))
        case Select(subj, label, cont):
            return Select(_subj(subj, mapping), label, subst_session(cont, mapping))
    raise TypeError(f"not a session process: {p!r}")


def _subj(c: Chan, mapping) -> Chan:
    r = _subst_chan(c, mapping)
    if not isinstance(r, Chan):
        raise SubstitutionError(f"value substituted for subject {c}")
    return r


def _subst_payload(v, mapping):
    match v:
        case Chan():
            return eval_value(_subst_chan(v, mapping))
        case Eq(lhs, rhs) if isinstance(lhs, str) and lhs in mapping:
            r = mapping[lhs]
            if isinstance(r, IntLit):
                return eval_value(Eq(r.value, rhs))
            if isinstance(r, Chan):
                return Eq(r.name, rhs)
            if isinstance(r, str):
                return Eq(r, rhs)
            raise SubstitutionError(f"non-integer substituted into {lhs}=={rhs}")
    return v


def _enter_session(binders, body, mapping):
    inner = {k: v for k, v in mapping.items() if k not in binders}
    clash = _repl_names(inner) & set(binders)
    if not clash or not inner:
        return tuple(binders), body, inner
    avoid = _repl_names(inner) | session_names(body) | set(inner)
    renaming = {}
    new = []
    for b in binders:
        if b in clash:
            nb = variant(b, avoid)
            avoid.add(nb)
            renaming[b] = Chan(nb)
            new.append(nb)
        else:
            new.append(b)
    return tuple(new), subst_session(body, renaming), inner


# ---------------------------------------------------------------- substitution: generic


def generic_names(p) -> set[str]:
    out: set[str] = set()

    def go(q):
        match q:
            case Par(l, r):
                go(l), go(r)
            case Res(names, body, _):
                out.update(names), go(body)
            case Repl(body):
                go(body)
            case GOut(subj, args, cont):
                out.add(subj), out.update(_arg_names(args)), go(cont)
            case GIn(subj, params, cont):
                out.add(subj), out.update(params), go(cont)
            case Sum(branches):
                for b in branches:
                    go(b)
    go(p)
    return out


def subst_generic(p, mapping: dict):
    """Simultaneous substitution of names or values for free names."""
    if not mapping:
        return p
    match p:
        case Nil():
            return p
        case Par(l, r):
            return Par(subst_generic(l, mapping), subst_generic(r, mapping))
        case Repl(body):
            return Repl(subst_generic(body, mapping))
        case Res(names, body, ann):
            names, body, inner = _enter_generic(names, body, mapping)
            return Res(names, subst_generic(body, inner), ann)
        case GOut(subj, args, cont):
            return GOut(_gsubj(subj, mapping), tuple(_garg(a, mapping) for a in args),
                        subst_generic(cont, mapping))
        case GIn(subj, params, cont):
            new_subj = _gsubj(subj, mapping)
            params, cont, inner = _enter_generic(params, cont, mapping)
            return GIn(new_subj, params, subst_generic(cont, inner))
        case Sum(branches):
            return Sum(tuple(subst_generic(b, mapping) for b in branches))
    raise TypeError(f"not a generic process: {p!r}")


def _gsubj(x: str, mapping) -> str:
    r = mapping.get(x, x)
    if not isinstance(r, str):
        raise SubstitutionError(f"value substituted for subject {x}")
    return r


def _garg(a, mapping):
    if isinstance(a, str):
        return eval_value(mapping.get(a, a))
    if isinstance(a, Eq) and isinstance(a.lhs, str) and a.lhs in mapping:
        r = mapping[a.lhs]
        if isinstance(r, IntLit):
            return eval_value(Eq(r.value, a.rhs))
        if isinstance(r, str):
            return Eq(r, a.rhs)
        raise SubstitutionError(f"non-integer substituted into {a.lhs}=={a.rhs}")
    return a


def _enter_generic(binders, body, mapping):
    inner = {k: v for k, v in mapping.items() if k not in binders}
    targets = _repl_names(inner)
    clash = targets & set(binders)
    if not clash or not inner:
        return tuple(binders), body, inner
    avoid = targets | generic_names(body) | set(inner) | set(binders)
    renaming = {}
    new = []
    for b in binders:
        if b in clash:
            nb = variant(b, avoid)
            avoid.add(nb)
            renaming[b] = nb
            new.append(nb)
        else:
            new.append(b)
    return tuple(new), subst_generic(body, renaming), inner


# ---------------------------------------------------------------- substitution: process types


def ptype_names(g) -> set[str]:
    out: set[str] = set()

    def go(t):
        match t:
            case PPar(l, r) | PChoice(l, r):
                go(l), go(r)
            case PSum(branches):
                for b in branches:
                    go(b)
            case PRepl(body) | PTau(body):
                go(body)
            case POut(subj, pl, cont) | PIn(subj, pl, cont):
                out.add(subj)
                if isinstance(pl, TupleType):
                    out.update(pl.binders), go(pl.body)
                elif isinstance(pl, NamesPayload):
                    out.update(pl.binders)
                go(cont)
    go(g)
    return out


def subst_ptype(g, mapping: dict):
    """Capture-avoiding renaming of free names in a process type."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return g
    match g:
        case PZero():
            return g
        case PPar(l, r):
            return PPar(subst_ptype(l, mapping), subst_ptype(r, mapping))
        case PChoice(l, r):
            return PChoice(subst_ptype(l, mapping), subst_ptype(r, mapping))
        case PSum(branches):
            return PSum(tuple(subst_ptype(b, mapping) for b in branches))
        case PRepl(body):
            return PRepl(subst_ptype(body, mapping))
        case PTau(cont):
            return PTau(subst_ptype(cont, mapping))
        case POut(subj, pl, cont) | PIn(subj, pl, cont):
            ctor = type(g)
            subj = mapping.get(subj, subj)
            if isinstance(pl, NamesPayload):
                binders, cont, inner = _enter_ptype(pl.binders, cont, mapping)
                return ctor(subj, NamesPayload(binders), subst_ptype(cont, inner))
            return ctor(subj, subst_payload(pl, mapping), subst_ptype(cont, mapping))
    raise TypeError(f"not a process type: {g!r}")


def subst_payload(pl, mapping: dict):
    if isinstance(pl, TupleType):
        binders, body, inner = _enter_ptype(pl.binders, pl.body, mapping)
        return TupleType(binders, subst_ptype(body, inner))
    return pl


def _enter_ptype(binders, body, mapping):
    inner = {k: v for k, v in mapping.items() if k not in binders}
    targets = set(inner.values())
    clash = targets & set(binders)
    if not clash or not inner:
        return tuple(binders), body, inner
    avoid = targets | ptype_names(body) | set(inner) | set(binders)
    renaming = {}
    new = []
    for b in binders:
        if b in clash:
            nb = variant(b, avoid)
            avoid.add(nb)
            renaming[b] = nb
            new.append(nb)
        else:
            new.append(b)
    return tuple(new), subst_ptype(body, renaming), inner


def instantiate(pl: TupleType, args) -> object:
    """``pl.body{args/pl.binders}``."""
    if len(args) != len(pl.binders):
        raise ValueError("arity mismatch")
    return subst_ptype(pl.body, dict(zip(pl.binders, args)))


def strip_annotations(p):
    """Drop every ``(new x:S)`` annotation."""
    match p:
        case Par(l, r):
            return Par(strip_annotations(l), strip_annotations(r))
        case Res(names, body, _):
            return Res(names, strip_annotations(body))
        case Repl(body):
            return Repl(strip_annotations(body))
        case Out(subj, pl, cont):
            return Out(subj, pl, strip_annotations(cont))
        case In(subj, var, cont):
            return In(subj, var, strip_annotations(cont))
        case Branch(subj, branches):
            return Branch(subj, tuple((l, strip_annotations(b)) for l, b in branches))
        case Select(subj, label, cont):
            return Select(subj, label, strip_annotations(cont))
    return p


__all__ = [
    "SubstitutionError", "free_names", "alpha_key", "alpha_eq", "subst_session",
    "subst_generic", "subst_ptype", "subst_payload", "instantiate", "session_names",
    "generic_names", "ptype_names", "free_channel_names", "strip_annotations", "is_value",
]


is_session_proc = _is_session


def proc_names(p) -> set[str]:
    """Every name occurring in a process of either calculus."""
    return session_names(p) if _is_session(p) else generic_names(p)


def rename_proc(p, renaming: dict[str, str]):
    """Capture-avoiding renaming of free names, for either calculus."""
    if not renaming:
        return p
    if _is_session(p):
        return subst_session(p, {k: Chan(v) for k, v in renaming.items()})
    return subst_generic(p, renaming)
