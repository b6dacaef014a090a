"""Reduction and runtime errors for session processes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .binding import SubstitutionError, free_names, subst_session
from .names import Pol
from .structural import Flat, canon, flatten
from .terms import Branch, Chan, In, Out, Repl, SBranch, SChoice, Select, SIn, SOut

# Each top-level replication contributes this many unfolded copies to the
# pool of redex candidates, enough for two copies to talk to each other.
REPL_COPIES = 2


@dataclass(frozen=True)
class Redex:
    kind: str                # "com" | "sel"
    subject: str
    label: str | None = None
    positions: tuple[int, int] = (0, 0)

    def arrow(self, arity: int | None = None) -> str:
        if self.kind == "sel":
            return f"--[sel {self.subject} {self.label}]-->"
        if arity is not None:
            return f"--[com {self.subject} /{arity}]-->"
        return f"--[com {self.subject}]-->"


def substitute(p, y, x: str):
    """``p{y/x}`` for a polarized name (or value) ``y`` and variable ``x``."""
    return subst_session(p, {x: y})


def substitute_many(p, ys, xs):
    if len(ys) != len(xs):
        raise ValueError("substitution vectors differ in length")
    return subst_session(p, dict(zip(xs, ys)))


# ---------------------------------------------------------------- redex pool


@dataclass
class _Item:
    proc: object
    origin: tuple            # ("top", i) or ("rep", i, copy)


@dataclass
class Pool:
    """Top-level components plus unfolded copies of replications."""

    flat: Flat
    items: list
    copies: dict             # (i, copy) -> Flat

    @classmethod
    def of(cls, p, copies: int = REPL_COPIES) -> Pool:
        used: set[str] = set()
        flat = flatten(p, used)
        items = [_Item(c, ("top", i)) for i, c in enumerate(flat.comps)]
        table = {}
        for i, c in enumerate(flat.comps):
            if isinstance(c, Repl):
                for k in range(copies):
                    cp = flatten(c.body, used, avoid=set(used))
                    table[(i, k)] = cp
                    items.extend(_Item(q, ("rep", i, k)) for q in cp.comps)
        return cls(flat, items, table)

    def pairs(self):
        n = len(self.items)
        for a in range(n):
            for b in range(a + 1, n):
                oa, ob = self.items[a].origin, self.items[b].origin
                if not _canonical_copy_use(oa, ob):
                    continue
                yield a, b

    def rebuild(self, used_items: tuple[int, ...], results: list, advance=None):
        """Reduct with the given items consumed and ``results`` added.

        ``advance`` is a redex whose channel annotation moves on to the
        continuation type, keeping restriction types in step with the term.
        """
        used_copies = sorted({self.items[k].origin[1:] for k in used_items
                              if self.items[k].origin[0] == "rep"})
        binders = list(self.flat.binders)
        comps = []
        for k, it in enumerate(self.items):
            if k in used_items:
                continue
            if it.origin[0] == "top" or it.origin[1:] in used_copies:
                comps.append(it.proc)
        for key in used_copies:
            binders.extend(self.copies[key].binders)
        if advance is not None:
            binders = [(names, _advance_ann(ann, advance) if advance.subject in names else ann)
                       for names, ann in binders]
        return Flat(binders, comps + results).rebuild()

    def rest(self, used_items: tuple[int, ...]) -> list:
        """Components in parallel with the redex (replications stay)."""
        used_copies = {self.items[k].origin[1:] for k in used_items
                       if self.items[k].origin[0] == "rep"}
        return [it.proc for k, it in enumerate(self.items)
                if k not in used_items
                and (it.origin[0] == "top" or it.origin[1:] in used_copies)]


def _advance_ann(ann, redex):
    if redex.kind == "com" and isinstance(ann, (SIn, SOut)):
        return ann.cont
    if redex.kind == "sel" and isinstance(ann, (SBranch, SChoice)) and ann.get(redex.label):
        return ann.get(redex.label)
    return ann


def _canonical_copy_use(oa, ob) -> bool:
    # Copy k>0 of a replication may only be used together with copy k-1.
    for o, other in ((oa, ob), (ob, oa)):
        if o[0] == "rep" and o[2] > 0:
            if not (other[0] == "rep" and other[1] == o[1] and other[2] == o[2] - 1):
                return False
    return True


def _complementary(a: Chan, b: Chan) -> bool:
    return a.name == b.name and a.pol is b.pol.complement()


def _orient(x, y, first, second):
    if isinstance(x, first) and isinstance(y, second):
        return x, y, False
    if isinstance(y, first) and isinstance(x, second):
        return y, x, True
    return None


# ---------------------------------------------------------------- reduction


def reduce_session(p) -> list[tuple[Redex, object]]:
    """All one-step reducts of ``p``, each with its redex."""
    pool = Pool.of(p)
    out, seen = [], set()
    for a, b in pool.pairs():
        x, y = pool.items[a].proc, pool.items[b].proc
        step = _fire(x, y)
        if step is None:
            continue
        kind, subj, label, results = step
        redex = Redex(kind, subj, label, (a, b))
        reduct = pool.rebuild((a, b), results, advance=redex)
        key = (kind, subj, label, canon(reduct))
        if key not in seen:
            seen.add(key)
            out.append((redex, reduct))
    return out


def _fire(x, y):
    pair = _orient(x, y, Out, In)
    if pair is not None:
        snd, rcv, _ = pair
        if not _complementary(snd.subj, rcv.subj):
            return None
        if (snd.payload is None) != (rcv.var is None):
            return None
        try:
            cont = rcv.cont if rcv.var is None else substitute(rcv.cont, snd.payload, rcv.var)
        except SubstitutionError:
            return None
        return "com", snd.subj.name, None, [snd.cont, cont]
    pair = _orient(x, y, Branch, Select)
    if pair is not None:
        br, sel, _ = pair
        if not _complementary(br.subj, sel.subj):
            return None
        chosen = dict(br.branches).get(sel.label)
        if chosen is None:
            return None
        return "sel", br.subj.name, sel.label, [chosen, sel.cont]
    return None


# ---------------------------------------------------------------- errors


def session_error(p) -> str | None:
    """Describe the first runtime error exposed by ``p``, or ``None``.

    Errors are judged up to congruence, which does not unfold replication,
    so replicated bodies only count as a whole.
    """
    pool = Pool.of(p, copies=0)
    for a, b in pool.pairs():
        x, y = pool.items[a].proc, pool.items[b].proc
        pair = _orient(x, y, Out, In)
        kind = "com"
        if pair is None:
            pair = _orient(x, y, Branch, Select)
            kind = "sel"
        if pair is None:
            continue
        l, r, _ = pair
        if not _complementary(l.subj, r.subj):
            continue
        subj = l.subj
        if kind == "com" and (l.payload is None) != (r.var is None):
            return f"arity mismatch on {subj.name}"
        if kind == "sel" and r.label not in l.labels:
            return f"label {r.label} not offered on {subj}"
        if kind == "com" and not subj.pol.polarized:
            continue
        ends = {Chan(subj.name, Pol.PLUS), Chan(subj.name, Pol.MINUS)}
        for q in pool.rest((a, b)):
            if free_names(q) & ends:
                return f"third party holds an endpoint of {subj.name}"
    return None


def is_session_error(p) -> bool:
    return session_error(p) is not None


# ---------------------------------------------------------------- exploration


@dataclass
class Reach:
    states: list             # [(proc, trace)], breadth-first
    bound_hit: bool


def explore(p, reducer, max_depth: int = 16, max_states: int = 5000,
            arrow=lambda redex: redex.arrow()) -> Reach:
    """Breadth-first reachable states (modulo congruence) with traces.

    ``reducer`` maps a term to ``[(redex, reduct)]``.
    """
    start = (p, [])
    seen = {canon(p)}
    states = [start]
    queue = deque([(p, [], 0)])
    hit = False
    while queue:
        q, trace, d = queue.popleft()
        steps = reducer(q)
        if d >= max_depth:
            hit = hit or bool(steps)
            continue
        for redex, r in steps:
            k = canon(r)
            if k in seen:
                continue
            if len(states) >= max_states:
                hit = True
                break
            seen.add(k)
            t = trace + [arrow(redex)]
            states.append((r, t))
            queue.append((r, t, d + 1))
    return Reach(states, hit)


__all__ = ["Redex", "substitute", "substitute_many", "reduce_session", "session_error",
           "is_session_error", "explore", "Reach", "Pool"]
