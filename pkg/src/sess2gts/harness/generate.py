"""Random well-typed session programs.

Generation starts from protocols, not from syntax: each channel gets a
random session type, and the process is grown by discharging obligations
``endpoint : type`` one prefix at a time.  The result is typed by
construction; :func:`gen_typed` re-checks it anyway.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..names import Pol
from ..session_types import dual, typecheck_session
from ..terms import (
    Base, BoolLit, Branch, Chan, End, Eq, In, IntLit, Nil, Out, Par, Repl, Res, SBranch,
    SChoice, Select, SIn, SOut,
)

LABELS = ("a", "b", "c", "d", "e")


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 3           # nesting depth of session types
    max_width: int = 3           # channels created at top level
    fanout: int = 2              # labels per branch type
    restrict_prob: float = 0.7   # chance a top-level channel is restricted
    value_prob: float = 0.6      # chance a payload is a base value
    choice_free: bool = False
    repl_prob: float = 0.05      # chance of adding a replicated closed session

    def __post_init__(self):
        if self.max_depth < 0 or self.max_width < 1 or self.fanout < 1:
            raise ValueError("generator bounds must be positive")
        if self.fanout > len(LABELS):
            raise ValueError(f"fanout is at most {len(LABELS)}")
        for p in (self.restrict_prob, self.value_prob, self.repl_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")


class _Gen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.counter = 0

    def name(self, hint: str) -> str:
        self.counter += 1
        return f"{hint}{self.counter}"

    # -- types

    def stype(self, depth: int, choice_free: bool = False):
        r = self.rng
        if depth <= 0 or r.random() < 0.15:
            return End()
        choice_free = choice_free or self.cfg.choice_free
        kinds = ["in", "out"] + ([] if choice_free else ["branch", "choice"])
        kind = r.choice(kinds)
        if kind in ("in", "out"):
            if r.random() < self.cfg.value_prob:
                payload = Base(r.choice(("int", "bool")))
            else:
                payload = self.stype(depth - 1)
            cont = self.stype(depth - 1)
            return SIn(payload, cont) if kind == "in" else SOut(payload, cont)
        n = r.randint(1, self.cfg.fanout)
        labels = sorted(r.sample(LABELS[:max(self.cfg.fanout, 1)], n))
        branches = tuple((l, self.stype(depth - 1)) for l in labels)
        return SBranch(branches) if kind == "branch" else SChoice(branches)

    # -- processes

    def value(self, sort: str, bases: dict):
        r = self.rng
        ints = [v for v, s in bases.items() if s == "int"]
        bools = [v for v, s in bases.items() if s == "bool"]
        if sort == "int":
            if ints and r.random() < 0.3:
                return Chan(r.choice(ints))
            return IntLit(r.randint(0, 9))
        if ints and r.random() < 0.3:
            return Eq(r.choice(ints), r.randint(0, 9))
        if bools and r.random() < 0.3:
            return Chan(r.choice(bools))
        return BoolLit(r.random() < 0.5)

    def proc(self, obls: list, bases: dict):
        obls = [(c, s) for c, s in obls if not isinstance(s, End)]
        if not obls:
            return Nil()
        r = self.rng
        pols = {}
        for c, _ in obls:
            pols.setdefault(c.name, set()).add(c.pol)
        paired = {x for x, ps in pols.items() if len(ps) > 1}
        # both endpoints in one thread usually deadlock, so mostly separate them
        if len(obls) > 1 and (r.random() < 0.5 or (paired and r.random() < 0.9)):
            left, right = [], []
            flip = {x: r.random() < 0.5 for x in sorted(paired)}
            for ob in obls:
                if ob[0].name in paired:
                    side = (ob[0].pol is Pol.PLUS) == flip[ob[0].name]
                    (left if side else right).append(ob)
                else:
                    (left if r.random() < 0.5 else right).append(ob)
            if not left:
                left.append(right.pop())
            if not right:
                right.append(left.pop())
            return Par(self.proc(left, bases), self.proc(right, bases))
        i = r.randrange(len(obls))
        c, s = obls[i]
        rest = obls[:i] + obls[i + 1:]
        match s:
            case SOut(Base(sort), cont):
                return Out(c, self.value(sort, bases), self.proc(rest + [(c, cont)], bases))
            case SOut(payload, cont):
                return self.delegate(c, payload, cont, rest, bases)
            case SIn(Base(sort), cont):
                v = self.name("i" if sort == "int" else "b")
                return In(c, v, self.proc(rest + [(c, cont)], {**bases, v: sort}))
            case SIn(payload, cont):
                y = self.name("y")
                return In(c, y, self.proc(rest + [(c, cont), (Chan(y), payload)], bases))
            case SBranch(branches):
                return Branch(c, tuple((l, self.proc(rest + [(c, k)], bases))
                                       for l, k in branches))
            case SChoice(branches):
                l, k = r.choice(branches)
                return Select(c, l, self.proc(rest + [(c, k)], bases))
        raise GenerationError(f"unexpected obligation type {s!r}")

    def delegate(self, c: Chan, payload, cont, rest: list, bases: dict):
        """Send an endpoint of type ``payload``: an owned one, or a fresh channel."""
        owned = [j for j, (d, t) in enumerate(rest) if t == payload and d.name != c.name]
        if owned and self.rng.random() < 0.5:
            j = self.rng.choice(owned)
            d = rest[j][0]
            others = rest[:j] + rest[j + 1:]
            return Out(c, d, self.proc(others + [(c, cont)], bases))
        d = self.name("d")
        send = Out(c, Chan(d, Pol.PLUS), self.proc(rest + [(c, cont)], bases))
        peer = self.proc([(Chan(d, Pol.MINUS), dual(payload))], bases)
        return Res((d,), Par(send, peer), payload)

    def program(self):
        cfg, r = self.cfg, self.rng
        if cfg.max_depth == 0:
            return {}, Nil()
        n = r.randint(1, cfg.max_width)
        chans = [(self.name("c"), self.stype(cfg.max_depth)) for _ in range(n)]
        obls = []
        for x, s in chans:
            obls += [(Chan(x, Pol.PLUS), s), (Chan(x, Pol.MINUS), dual(s))]
        body = self.proc(obls, {})
        if r.random() < cfg.repl_prob:
            # a copy must finish in one step on both sides of the encoding,
            # otherwise stalled copies pile up and the state space is infinite
            x = self.name("r")
            s = self.stype(1, choice_free=True)
            inner = self.proc([(Chan(x, Pol.PLUS), s), (Chan(x, Pol.MINUS), dual(s))], {})
            body = Par(body, Repl(Res((x,), inner, s)))
        env = {}
        for x, s in reversed(chans):
            if r.random() < cfg.restrict_prob:
                body = Res((x,), body, s)
            else:
                env[Chan(x, Pol.PLUS)] = s
                env[Chan(x, Pol.MINUS)] = dual(s)
        return env, body


def gen_typed(cfg: GenConfig):
    """A balanced environment and a process typed under it."""
    env, p = _Gen(cfg).program()
    typecheck_session(env, p)
    return env, p


def gen_session_type(seed: int, depth: int, choice_free: bool = False):
    return _Gen(GenConfig(seed=seed, max_depth=depth, choice_free=choice_free)).stype(depth)


__all__ = ["GenConfig", "gen_typed", "gen_session_type", "GenerationError"]
