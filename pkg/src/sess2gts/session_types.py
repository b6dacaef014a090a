"""Session types: duality, environments, subtyping and the type checker.

Environments are plain dicts from :class:`Chan` (name plus polarity) to
session types.  Partial operations return ``None`` when undefined.

Checking runs in two passes.  Unannotated restrictions first get a type by
unification over the uses of both endpoints (see :func:`annotate`); the
checker proper then follows the syntax-directed rules with subtyping at
inputs, outputs and offers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .binding import free_names, session_names, subst_session
from .names import Pol, variant
from .printer import render, render_stype
from .terms import (
    Base, BoolLit, Branch, Chan, End, Eq, In, IntLit, Nil, Out, Par, Repl, Res,
    SBranch, SChoice, Select, SIn, SOut,
)


class SessionTypeError(Exception):
    """A failed typing judgement; ``kind`` classifies the failure."""

    KINDS = ("unbound-subject", "polarity-clash", "protocol-mismatch",
             "label-not-offered", "leftover-linear", "not-unlimited")

    def __init__(self, kind: str, msg: str):
        super().__init__(f"{kind}: {msg}")
        self.kind = kind
        self.msg = msg


class EnvError(Exception):
    pass


# ---------------------------------------------------------------- duality and subtyping


def dual(s):
    match s:
        case End():
            return s
        case SIn(p, c):
            return SOut(p, dual(c))
        case SOut(p, c):
            return SIn(p, dual(c))
        case SBranch(bs):
            return SChoice(tuple((l, dual(t)) for l, t in bs))
        case SChoice(bs):
            return SBranch(tuple((l, dual(t)) for l, t in bs))
        case Base():
            raise ValueError("a base type has no dual")
    raise TypeError(f"not a session type: {s!r}")


def subtype_session(s1, s2) -> bool:
    """``s1 ⊑ s2``: fewer branches offered, more choices available."""
    match s1, s2:
        case End(), End():
            return True
        case Base(a), Base(b):
            return a == b
        case SIn(p1, c1), SIn(p2, c2):
            return subtype_session(p1, p2) and subtype_session(c1, c2)
        case SOut(p1, c1), SOut(p2, c2):
            return subtype_session(p2, p1) and subtype_session(c1, c2)
        case SBranch(b1), SBranch(b2):
            right = dict(b2)
            return all(l in right and subtype_session(t, right[l]) for l, t in b1)
        case SChoice(b1), SChoice(b2):
            left = dict(b1)
            return all(l in left and subtype_session(left[l], t) for l, t in b2)
    return False


def is_session(s) -> bool:
    return not isinstance(s, Base)


def is_linear(s) -> bool:
    return not isinstance(s, (Base, End))


# ---------------------------------------------------------------- environments


def env_extend(env: dict, c: Chan, s) -> dict | None:
    """``Δ, c:S``: absorbs an identical binding, otherwise needs ``c`` fresh."""
    if c in env:
        return env if env[c] == s else None
    out = dict(env)
    out[c] = s
    return out


def env_plus(env: dict, c: Chan, s) -> dict | None:
    """``Δ + c:S``: polarized and unpolarized uses of a name are exclusive."""
    if c.pol.polarized:
        if c in env or Chan(c.name) in env:
            return None
    elif any(Chan(c.name, p) in env for p in Pol):
        return None
    return env_extend(env, c, s)


def is_balanced(env: dict) -> bool:
    for c, s in env.items():
        if c.pol is Pol.PLUS and c.dual in env:
            if not is_session(s) or s != dual(env[c.dual]):
                return False
    return True


def env_advance(env: dict, c: Chan, label: str) -> dict:
    """Replace a branch or choice type at ``c`` by its ``label`` continuation."""
    if c not in env:
        raise EnvError(f"{c} is not in the environment")
    s = env[c]
    if not isinstance(s, (SBranch, SChoice)) or s.get(label) is None:
        raise EnvError(f"{c} has no branch {label}")
    out = dict(env)
    out[c] = s.get(label)
    return out


def env_names(env: dict) -> set[str]:
    return {c.name for c in env}


# ---------------------------------------------------------------- inference


class _Var:
    __slots__ = ("ref", "twin", "n")
    _ids = itertools.count()

    def __init__(self):
        self.ref = None
        self.twin = None
        self.n = next(_Var._ids)


class _Row:
    """A partially known branch or choice; ``open`` rows may gain labels."""

    __slots__ = ("kind", "fields", "open", "ref", "twin")

    def __init__(self, kind: str, fields: dict, open_: bool):
        self.kind, self.fields, self.open = kind, dict(fields), open_
        self.ref = None
        self.twin = None


class _Clash(Exception):
    pass


def _find(t):
    while isinstance(t, (_Var, _Row)) and t.ref is not None:
        t = t.ref
    return t


def _as_row(t):
    if isinstance(t, SBranch):
        return _Row("branch", dict(t.branches), False)
    if isinstance(t, SChoice):
        return _Row("choice", dict(t.branches), False)
    return t


def _dual_term(t):
    t = _find(t)
    match t:
        case _Var():
            if t.twin is None:
                tw = _Var()
                tw.twin, t.twin = t, tw
            return t.twin
        case _Row():
            if t.twin is None:
                kind = "choice" if t.kind == "branch" else "branch"
                tw = _Row(kind, {l: _dual_term(s) for l, s in t.fields.items()}, t.open)
                tw.twin, t.twin = t, tw
            return t.twin
        case End():
            return t
        case SIn(p, c):
            return SOut(p, _dual_term(c))
        case SOut(p, c):
            return SIn(p, _dual_term(c))
        case SBranch() | SChoice():
            return _dual_term(_as_row(t))
    raise _Clash("dual of a base type")


def _occurs(v, t) -> bool:
    t = _find(t)
    if t is v:
        return True
    match t:
        case SIn(p, c) | SOut(p, c):
            return _occurs(v, p) or _occurs(v, c)
        case _Row():
            return any(_occurs(v, s) for s in t.fields.values())
    return False


def _bind(node, t):
    if _occurs(node, t):
        raise _Clash("recursive type")
    node.ref = t
    tw = node.twin
    if tw is not None:
        node.twin = tw.twin = None
        _unify(tw, _dual_term(t))


def _unify(a, b):
    a, b = _find(a), _find(b)
    if a is b:
        return
    if isinstance(a, _Var):
        return _bind(a, b)
    if isinstance(b, _Var):
        return _bind(b, a)
    a, b = _as_row(a), _as_row(b)
    if isinstance(a, _Row) or isinstance(b, _Row):
        if not (isinstance(a, _Row) and isinstance(b, _Row)) or a.kind != b.kind:
            raise _Clash("branching against a non-branching use")
        return _unify_rows(a, b)
    match a, b:
        case End(), End():
            return
        case Base(x), Base(y) if x == y:
            return
        case SIn(p1, c1), SIn(p2, c2):
            _unify(p1, p2)
            return _unify(c1, c2)
        case SOut(p1, c1), SOut(p2, c2):
            _unify(p1, p2)
            return _unify(c1, c2)
    raise _Clash(f"incompatible uses")


def _unify_rows(a: _Row, b: _Row):
    if not a.open and not b.open and set(a.fields) != set(b.fields):
        raise _Clash("label sets differ")
    if not a.open and not set(b.fields) <= set(a.fields):
        raise _Clash("selected label not offered")
    if not b.open and not set(a.fields) <= set(b.fields):
        raise _Clash("selected label not offered")
    # a closed row fixes the label order
    first, second = (b, a) if a.open and not b.open else (a, b)
    keys = list(first.fields) + [l for l in second.fields if l not in first.fields]
    shared = [(a.fields[l], b.fields[l]) for l in a.fields if l in b.fields]
    a.fields = {l: a.fields[l] if l in a.fields else b.fields[l] for l in keys}
    a.open = a.open and b.open
    b.ref = a
    tw_b = b.twin
    if tw_b is not None:
        b.twin = tw_b.twin = None
    if a.twin is not None:
        old = a.twin.fields
        a.twin.fields = {l: old[l] if l in old else _dual_term(a.fields[l]) for l in keys}
        a.twin.open = a.open
    for x, y in shared:
        _unify(x, y)
    if tw_b is not None:
        _unify(tw_b, _dual_term(a))


def _resolve(t):
    t = _find(t)
    match t:
        case _Var():
            return End()
        case _Row():
            bs = tuple((l, _resolve(s)) for l, s in t.fields.items())
            return SBranch(bs) if t.kind == "branch" else SChoice(bs)
        case SIn(p, c):
            return SIn(_resolve(p), _resolve(c))
        case SOut(p, c):
            return SOut(_resolve(p), _resolve(c))
        case SBranch(bs):
            return SBranch(tuple((l, _resolve(s)) for l, s in bs))
        case SChoice(bs):
            return SChoice(tuple((l, _resolve(s)) for l, s in bs))
    return t


def _value_sort(v, env) -> str | None:
    match v:
        case IntLit():
            return "int"
        case BoolLit() | Eq():
            return "bool"
    return None


def annotate(env: dict, p):
    """Fill in every missing restriction type by unification.

    Inference ignores subtyping; the checker applies it afterwards.  Types
    that stay unconstrained default to ``end``.  Inconsistent uses leave the
    affected restriction with whatever was solved; checking then reports
    the precise failure.
    """
    state = {"clash": None}

    def unify(a, b):
        try:
            _unify(a, b)
        except _Clash as e:
            state["clash"] = state["clash"] or str(e)

    def go(q, env):
        match q:
            case Nil():
                return q
            case Par(l, r):
                fl = {c.name for c in free_names(l)}
                fr = {c.name for c in free_names(r)}
                el = {c: t for c, t in env.items() if c.name in fl or c.name not in fr}
                er = {c: t for c, t in env.items() if c.name in fr}
                return Par(go(l, el), go(r, er))
            case Repl(body):
                return Repl(go(body, env))
            case Res(names, body, ann):
                (x,) = names
                t = _Var() if ann is None else ann
                inner = {c: s for c, s in env.items() if c.name != x}
                inner[Chan(x, Pol.PLUS)] = t
                inner[Chan(x, Pol.MINUS)] = _dual_term(t) if ann is None else dual(ann)
                return Res(names, go(body, inner), t)
            case Out(subj, payload, cont):
                t = env.get(subj)
                pt = _payload_term(payload, env)
                k = _Var()
                if t is not None and pt is not None:
                    unify(t, SOut(pt, k))
                env2 = dict(env)
                if isinstance(payload, Chan) and payload != subj and not isinstance(pt, Base):
                    env2.pop(payload, None)
                env2[subj] = k
                return Out(subj, payload, go(cont, env2))
            case In(subj, var, cont):
                t = env.get(subj)
                y, k = _Var(), _Var()
                if t is not None:
                    unify(t, SIn(y, k))
                env2 = {c: s for c, s in env.items() if c.name != var}
                env2[subj] = k
                if var is not None:
                    env2[Chan(var)] = y
                return In(subj, var, go(cont, env2))
            case Branch(subj, branches):
                t = env.get(subj)
                ks = {l: _Var() for l, _ in branches}
                if t is not None:
                    unify(t, _Row("branch", ks, False))
                out = []
                for l, b in branches:
                    env2 = dict(env)
                    env2[subj] = ks[l]
                    out.append((l, go(b, env2)))
                return Branch(subj, tuple(out))
            case Select(subj, label, cont):
                t = env.get(subj)
                k = _Var()
                if t is not None:
                    unify(t, _Row("choice", {label: k}, True))
                env2 = dict(env)
                env2[subj] = k
                return Select(subj, label, go(cont, env2))
        raise TypeError(q)

    def _payload_term(payload, env):
        if payload is None:
            return None
        if isinstance(payload, Chan):
            return env.get(payload)
        if isinstance(payload, Eq):
            return Base("bool")
        sort = _value_sort(payload, env)
        return Base(sort) if sort else None

    raw = go(p, dict(env))
    return _finish(raw)


def _finish(q):
    match q:
        case Par(l, r):
            return Par(_finish(l), _finish(r))
        case Repl(body):
            return Repl(_finish(body))
        case Res(names, body, ann):
            return Res(names, _finish(body), _resolve(ann))
        case Out(subj, payload, cont):
            return Out(subj, payload, _finish(cont))
        case In(subj, var, cont):
            return In(subj, var, _finish(cont))
        case Branch(subj, branches):
            return Branch(subj, tuple((l, _finish(b)) for l, b in branches))
        case Select(subj, label, cont):
            return Select(subj, label, _finish(cont))
    return q


# ---------------------------------------------------------------- derivations


@dataclass
class Derivation:
    rule: str
    env: dict
    proc: object
    premises: list = field(default_factory=list)
    note: str = ""

    def judgement(self) -> str:
        env = ", ".join(f"{c}:{render_stype(s)}" for c, s in self.env.items())
        return f"{env} |- {render(self.proc)}"

    def to_text(self, indent: int = 0) -> str:
        pad = "  " * indent
        note = f" [{self.note}]" if self.note else ""
        lines = [f"{pad}{self.rule}{note}: {self.judgement()}"]
        lines.extend(p.to_text(indent + 1) for p in self.premises)
        return "\n".join(lines)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out


# ---------------------------------------------------------------- checking


def typecheck_session(env: dict, p) -> Derivation:
    """Derive ``env ⊢ p`` or raise :class:`SessionTypeError`."""
    return _check(dict(env), annotate(env, p))


def is_typable(env: dict, p) -> bool:
    try:
        typecheck_session(env, p)
        return True
    except SessionTypeError:
        return False


def _fresh_binder(x: str, env: dict, body) -> tuple[str, object]:
    if x not in env_names(env):
        return x, body
    y = variant(x, env_names(env) | session_names(body))
    return y, subst_session(body, {x: Chan(y)})


def _check(env: dict, p) -> Derivation:
    match p:
        case Nil():
            bad = [c for c, s in env.items() if is_linear(s)]
            if bad:
                raise SessionTypeError(
                    "leftover-linear",
                    "unfinished sessions at 0: " + ", ".join(
                        f"{c}:{render_stype(env[c])}" for c in bad))
            return Derivation("T-Nil", env, p)
        case Par(l, r):
            el, er = _split(env, l, r)
            try:
                return Derivation("T-Par", env, p, [_check(el, l), _check(er, r)])
            except SessionTypeError:
                # channels used on neither side may only be absorbed on the right
                # (say when the left is a replication)
                el2, er2 = _split(env, l, r, unused_left=False)
                if el2 == el:
                    raise
                return Derivation("T-Par", env, p, [_check(el2, l), _check(er2, r)])
        case Repl(body):
            bad = [c for c, s in env.items() if is_session(s)]
            if bad:
                raise SessionTypeError(
                    "not-unlimited",
                    "replication under session channels " + ", ".join(map(str, bad)))
            return Derivation("T-Repl", env, p, [_check(env, body)])
        case Res(names, body, ann):
            (x,) = names
            if ann is None:
                raise SessionTypeError("protocol-mismatch", f"no type for {x}")
            x2, body = _fresh_binder(x, env, body)
            inner = env_plus(env, Chan(x2, Pol.PLUS), ann)
            inner = inner and env_plus(inner, Chan(x2, Pol.MINUS), dual(ann))
            if inner is None:
                raise SessionTypeError("polarity-clash", f"cannot bind {x2}")
            return Derivation("T-Res", env, p, [_check(inner, body)],
                              note=f"{x2}:{render_stype(ann)}")
        case Out(subj, payload, cont):
            return _check_out(env, p)
        case In(subj, var, cont):
            t = _lookup(env, subj)
            if not isinstance(t, SIn):
                raise SessionTypeError("protocol-mismatch",
                                       f"{subj} has type {render_stype(t)}, not an input")
            if var is None:
                raise SessionTypeError("protocol-mismatch", f"nullary receive on {subj}")
            y, cont = _fresh_binder(var, env, cont)
            inner = dict(env)
            inner[subj] = t.cont
            inner = env_extend(inner, Chan(y), t.payload)
            if inner is None:
                raise SessionTypeError("polarity-clash", f"cannot bind {y}")
            return Derivation("T-In", env, p, [_check(inner, cont)])
        case Branch(subj, branches):
            t = _lookup(env, subj)
            if not isinstance(t, SBranch):
                raise SessionTypeError("protocol-mismatch",
                                       f"{subj} has type {render_stype(t)}, not a branch")
            offered = dict(branches)
            missing = [l for l in t.labels if l not in offered]
            if missing:
                raise SessionTypeError("label-not-offered",
                                       f"{subj} must offer {', '.join(missing)}")
            prem = []
            for l, s in t.branches:
                inner = dict(env)
                inner[subj] = s
                prem.append(_check(inner, offered[l]))
            return Derivation("T-Offer", env, p, prem)
        case Select(subj, label, cont):
            t = _lookup(env, subj)
            if not isinstance(t, SChoice):
                raise SessionTypeError("protocol-mismatch",
                                       f"{subj} has type {render_stype(t)}, not a choice")
            if t.get(label) is None:
                raise SessionTypeError("label-not-offered",
                                       f"{label} is not among {', '.join(t.labels)}")
            inner = dict(env)
            inner[subj] = t.get(label)
            return Derivation("T-Select", env, p, [_check(inner, cont)])
    raise TypeError(f"not a session process: {p!r}")


def _lookup(env: dict, subj: Chan):
    if subj not in env:
        raise SessionTypeError("unbound-subject", f"{subj} is not in the environment")
    return env[subj]


def _check_out(env: dict, p: Out) -> Derivation:
    subj, payload, cont = p.subj, p.payload, p.cont
    t = _lookup(env, subj)
    if not isinstance(t, SOut):
        raise SessionTypeError("protocol-mismatch",
                               f"{subj} has type {render_stype(t)}, not an output")
    if payload is None:
        raise SessionTypeError("protocol-mismatch", f"nullary send on {subj}")
    sort = _sort_of(env, payload)
    if sort is not None:
        if t.payload != Base(sort):
            raise SessionTypeError(
                "protocol-mismatch",
                f"{subj} expects {render_stype(t.payload)}, got a {sort}")
        inner = dict(env)
        inner[subj] = t.cont
        return Derivation("T-Out", env, p, [_check(inner, cont)], note=f"value:{sort}")
    if payload == subj or payload not in env:
        raise SessionTypeError("unbound-subject", f"payload {payload} is not available")
    sent = env[payload]
    if not subtype_session(sent, t.payload):
        raise SessionTypeError(
            "protocol-mismatch",
            f"{payload}:{render_stype(sent)} is not a subtype of {render_stype(t.payload)}")
    rest = {c: s for c, s in env.items() if c != payload}
    if env_plus(rest, payload, sent) is None:
        raise SessionTypeError("polarity-clash", f"{payload} clashes with another use")
    rest[subj] = t.cont
    return Derivation("T-Out", env, p, [_check(rest, cont)])


def _sort_of(env: dict, v) -> str | None:
    match v:
        case IntLit():
            return "int"
        case BoolLit():
            return "bool"
        case Eq(lhs, _):
            if isinstance(lhs, str) and env.get(Chan(lhs)) != Base("int"):
                raise SessionTypeError("protocol-mismatch", f"{lhs} is not an int")
            return "bool"
        case Chan(name, pol) if not pol.polarized and isinstance(env.get(v), Base):
            return env[v].sort
    return None


def _split(env: dict, l, r, unused_left: bool = True) -> tuple[dict, dict]:
    fl = free_names(l)
    fr = free_names(r)
    el, er = {}, {}
    for c, s in env.items():
        if not is_session(s):
            el[c] = er[c] = s
            continue
        in_l, in_r = c in fl, c in fr
        if in_l and in_r and is_linear(s):
            raise SessionTypeError("polarity-clash", f"{c} is used on both sides of |")
        if (in_r or not unused_left) and not in_l:
            er[c] = s
        else:
            el[c] = s
    return el, er


# ---------------------------------------------------------------- preservation support


def advance_env(env: dict, redex, p_before=None) -> dict:
    """Environment for the reduct of a step on a free channel.

    Steps on restricted channels leave the environment unchanged (their
    types live in annotations, which are re-inferred on the reduct).
    """
    x = redex.subject
    out = dict(env)
    for pol in (Pol.PLUS, Pol.MINUS, Pol.NONE):
        c = Chan(x, pol)
        if c not in out:
            continue
        s = out[c]
        if redex.kind == "com" and isinstance(s, (SIn, SOut)):
            out[c] = s.cont
        elif redex.kind == "sel" and isinstance(s, (SBranch, SChoice)) and s.get(redex.label):
            out[c] = s.get(redex.label)
    return out


__all__ = [
    "SessionTypeError", "EnvError", "dual", "subtype_session", "env_extend", "env_plus",
    "is_balanced", "env_advance", "annotate", "typecheck_session", "is_typable",
    "Derivation", "advance_env", "is_linear",
]
