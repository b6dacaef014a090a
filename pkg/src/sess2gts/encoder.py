"""Translation of session processes and environments into the generic calculus.

A name translation ``phi`` maps each session channel ``x`` to a pair
``(pos, neg)``: ``pos`` carries what ``x+`` receives (and ``x-`` sends),
``neg`` the other direction.  Unpolarized names behave like ``x+``.

Labels become channels: the branching side creates one fresh name per
label, sends them, and waits on the sum of inputs; the selecting side
receives the vector and answers on the name at the label's position.

Two readings of the label case for *types* are provided:

``literal``
    the label vector is bound by a tuple payload whose body is the sum of
    ``λi?<(|Si|)>`` (branch) or the internal choice of ``λi!<(|dual Si|)>``
    (choice), with nothing after the prefix;
``repaired``
    the vector is a bound-name payload and the session continues after the
    empty label message, mirroring the process translation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .binding import session_names, strip_annotations
from .names import FreshSupply, Pol
from .session_types import annotate, dual
from .terms import (
    Base, BasePayload, Branch, Chan, End, GIn, GOut, In, NamesPayload, Nil, Out, Par,
    PIn, POut, PZero, Repl, Res, SBranch, SChoice, Select, SIn, SOut, Sum, TupleType,
    is_value, pchoice_all, ppar_all, psum_all,
)

VARIANTS = ("literal", "repaired")


class EncodeError(Exception):
    pass


@dataclass
class EncodingResult:
    process: object
    annotations: dict = field(default_factory=dict)   # (u, v) -> process type
    phi: dict = field(default_factory=dict)           # source name -> (pos, neg)


# ---------------------------------------------------------------- name translation


def phi_extend(phi: dict, x: str, supply: FreshSupply, pair=None) -> dict:
    """``phi + {x -> pair}`` with a fresh pair unless one is given."""
    if x in phi:
        raise EncodeError(f"{x} is already translated")
    pair = pair or supply.fresh_pair()
    used = {n for p in phi.values() for n in p}
    if pair[0] == pair[1] or used & set(pair):
        raise EncodeError(f"images of {x} clash: {pair}")
    out = dict(phi)
    out[x] = tuple(pair)
    return out


def _pos(phi, x: str) -> str:
    return _pair(phi, x)[0]


def _neg(phi, x: str) -> str:
    return _pair(phi, x)[1]


def _pair(phi, x: str):
    if x not in phi:
        raise EncodeError(f"no translation for {x}")
    return phi[x]


def in_name(phi, c: Chan) -> str:
    """Channel on which ``c`` receives (and is offered labels' replies)."""
    return _neg(phi, c.name) if c.pol is Pol.MINUS else _pos(phi, c.name)


def out_name(phi, c: Chan) -> str:
    return _pos(phi, c.name) if c.pol is Pol.MINUS else _neg(phi, c.name)


def sent_pair(phi, c: Chan) -> tuple[str, str]:
    """The pair transmitted for ``c``, oriented for the receiver."""
    u, v = _pair(phi, c.name)
    return (v, u) if c.pol is Pol.MINUS else (u, v)


# ---------------------------------------------------------------- types


class _TypeEncoder:
    def __init__(self, supply: FreshSupply, variant: str, label_names: bool):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.supply = supply
        self.variant = variant
        self.label_names = label_names

    def label_vector(self, labels) -> tuple[str, ...]:
        if self.label_names:
            return tuple(labels)
        return tuple(self.supply.fresh(l) for l in labels)

    def payload(self, s):
        if isinstance(s, Base):
            return BasePayload((s.sort,))
        return self.tuple_type(s)

    def tuple_type(self, s) -> TupleType:
        u, v = self.supply.fresh_pair()
        return TupleType((u, v), self.thread({"y": (u, v)}, Chan("y"), s))

    def thread(self, phi, c: Chan, s):
        match s:
            case End() | Base():
                return PZero()
            case SIn(pl, cont):
                return PIn(in_name(phi, c), self.payload(pl), self.thread(phi, c, cont))
            case SOut(pl, cont):
                return POut(out_name(phi, c), self.payload(pl), self.thread(phi, c, cont))
            case SBranch(branches):
                lams = self.label_vector([l for l, _ in branches])
                if self.variant == "literal":
                    body = psum_all([PIn(lam, self.tuple_type(si), PZero())
                                     for lam, (_, si) in zip(lams, branches)])
                    return POut(out_name(phi, c), TupleType(lams, body), PZero())
                body = psum_all([PIn(lam, BasePayload(()), self.thread(phi, c, si))
                                 for lam, (_, si) in zip(lams, branches)])
                return POut(out_name(phi, c), NamesPayload(lams), body)
            case SChoice(branches):
                lams = self.label_vector([l for l, _ in branches])
                if self.variant == "literal":
                    body = pchoice_all([POut(lam, self.tuple_type(dual(si)), PZero())
                                        for lam, (_, si) in zip(lams, branches)])
                    return PIn(in_name(phi, c), TupleType(lams, body), PZero())
                body = pchoice_all([POut(lam, BasePayload(()), self.thread(phi, c, si))
                                    for lam, (_, si) in zip(lams, branches)])
                return PIn(in_name(phi, c), NamesPayload(lams), body)
        raise TypeError(f"not a session type: {s!r}")


def encode_tuple(s, supply: FreshSupply | None = None, variant: str = "literal",
                 label_names: bool = False):
    """``(|S|)``: a pair-binding tuple type, or the sort itself for base types."""
    return _TypeEncoder(supply or FreshSupply(), variant, label_names).payload(s)


def encode_env(env: dict, phi: dict, supply: FreshSupply | None = None,
               variant: str = "literal", label_names: bool = False):
    """Parallel composition of one thread per environment entry."""
    supply = supply or FreshSupply().avoid(n for p in phi.values() for n in p)
    enc = _TypeEncoder(supply, variant, label_names)
    return ppar_all([t for c, s in env.items()
                     if not isinstance(t := enc.thread(phi, c, s), PZero)])


# ---------------------------------------------------------------- processes


def encode_process(p, env: dict | None = None, phi: dict | None = None, *,
                   supply: FreshSupply | None = None, pins: dict | None = None,
                   label_names: bool = False, variant: str = "literal",
                   infer: bool = False) -> EncodingResult:
    """Translate ``p`` typed under ``env`` with free names translated by ``phi``.

    ``pins`` fixes the pair chosen for a bound name (first binder wins).
    Restriction types are inferred when missing, so choice-free processes
    need no environment.  With ``infer`` the written restriction types are
    discarded and inferred afresh, which is what a reduct needs: its
    annotations still describe the sessions as they were before the step.
    """
    env = dict(env or {})
    phi = dict(phi or {})
    pins = dict(pins or {})
    supply = supply or FreshSupply()
    supply.avoid(session_names(p))
    supply.avoid(n for pr in list(phi.values()) + list(pins.values()) for n in pr)
    for c in env:
        if c.name not in phi and not isinstance(env[c], Base):
            phi = phi_extend(phi, c.name, supply)
    enc = _ProcessEncoder(supply, pins, _TypeEncoder(supply, variant, label_names))
    if infer:
        p = strip_annotations(p)
    basevars = frozenset(c.name for c, s in env.items() if isinstance(s, Base))
    out = enc.go(annotate(env, p), env, phi, basevars)
    return EncodingResult(out, enc.annotations, phi)


class _ProcessEncoder:
    def __init__(self, supply, pins, types: _TypeEncoder):
        self.supply = supply
        self.pins = pins
        self.types = types
        self.annotations: dict = {}

    def bind(self, phi, x: str, hint: str = ""):
        pair = self.pins.pop(x, None) or self.supply.fresh_pair(hint)
        inner = {k: v for k, v in phi.items() if k != x}
        return phi_extend(inner, x, self.supply, pair), pair

    def go(self, p, env, phi, basevars):
        match p:
            case Nil():
                return Nil()
            case Par(l, r):
                return Par(self.go(l, env, phi, basevars), self.go(r, env, phi, basevars))
            case Repl(body):
                return Repl(self.go(body, env, phi, basevars))
            case Res((x,), body, ann):
                s = ann if ann is not None else End()
                phi2, pair = self.bind(phi, x)
                inner = {c: t for c, t in env.items() if c.name != x}
                inner[Chan(x, Pol.PLUS)] = s
                inner[Chan(x, Pol.MINUS)] = dual(s)
                self.annotations[pair] = ppar_all(
                    [t for t in (self.types.thread(phi2, Chan(x, Pol.PLUS), s),
                                 self.types.thread(phi2, Chan(x, Pol.MINUS), dual(s)))
                     if not isinstance(t, PZero)])
                return Res(pair, self.go(body, inner, phi2, basevars - {x}))
            case Out(subj, payload, cont):
                env2 = _advance(env, subj)
                if payload is None:
                    args = ()
                elif is_value(payload):
                    args = (payload,)
                elif payload.name in basevars:
                    args = (payload.name,)
                else:
                    args = sent_pair(phi, payload)
                return GOut(out_name(phi, subj), args, self.go(cont, env2, phi, basevars))
            case In(subj, var, cont):
                t = env.get(subj)
                env2 = {c: s for c, s in _advance(env, subj).items() if c.name != var}
                if var is None:
                    return GIn(in_name(phi, subj), (), self.go(cont, env2, phi, basevars))
                if isinstance(t, SIn) and isinstance(t.payload, Base):
                    env2[Chan(var)] = t.payload
                    body = self.go(cont, env2, {k: v for k, v in phi.items() if k != var},
                                   basevars | {var})
                    return GIn(in_name(phi, subj), (var,), body)
                phi2, pair = self.bind(phi, var, var)
                if isinstance(t, SIn):
                    env2[Chan(var)] = t.payload
                return GIn(in_name(phi, subj), pair,
                           self.go(cont, env2, phi2, basevars - {var}))
            case Branch(subj, branches):
                t = env.get(subj)
                order = list(t.labels) if isinstance(t, SBranch) else []
                order += [l for l, _ in branches if l not in order]
                offered = dict(branches)
                order = [l for l in order if l in offered]
                lams = self.types.label_vector(order)
                arms = []
                for lam, l in zip(lams, order):
                    env2 = dict(env)
                    if isinstance(t, SBranch) and t.get(l) is not None:
                        env2[subj] = t.get(l)
                    arms.append(GIn(lam, (), self.go(offered[l], env2, phi, basevars)))
                body = arms[0] if len(arms) == 1 else Sum(tuple(arms))
                return Res(lams, GOut(out_name(phi, subj), lams, body))
            case Select(subj, label, cont):
                t = env.get(subj)
                if not isinstance(t, SChoice):
                    raise EncodeError(f"select on {subj} needs a choice type")
                if label not in t.labels:
                    raise EncodeError(f"{label} is not a label of {subj}")
                lams = self.types.label_vector(t.labels)
                chosen = lams[t.labels.index(label)]
                env2 = dict(env)
                env2[subj] = t.get(label)
                return GIn(in_name(phi, subj), lams,
                           GOut(chosen, (), self.go(cont, env2, phi, basevars)))
        raise TypeError(f"not a session process: {p!r}")


def _advance(env: dict, c: Chan) -> dict:
    t = env.get(c)
    if isinstance(t, (SIn, SOut)):
        out = dict(env)
        out[c] = t.cont
        return out
    return env


__all__ = ["EncodeError", "EncodingResult", "phi_extend", "encode_process", "encode_tuple",
           "encode_env", "in_name", "out_name", "sent_pair", "VARIANTS"]
