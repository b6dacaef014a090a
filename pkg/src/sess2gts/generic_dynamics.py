"""Reduction and runtime errors for generic (polyadic) processes."""

from __future__ import annotations

from dataclasses import dataclass

from .binding import SubstitutionError, subst_generic
from .session_dynamics import Pool, Reach, explore
from .structural import canon
from .terms import GIn, GOut, Sum


@dataclass(frozen=True)
class GRedex:
    subject: str
    arity: int
    positions: tuple[int, int] = (0, 0)
    kind: str = "com"

    def arrow(self) -> str:
        return f"--[com {self.subject} /{self.arity}]-->"


def summands(p) -> tuple:
    """Prefix-guarded alternatives of a component (a bare prefix is a sum of one)."""
    if isinstance(p, Sum):
        return p.branches
    if isinstance(p, (GIn, GOut)):
        return (p,)
    return ()


def reduce_generic(p) -> list[tuple[GRedex, object]]:
    """All one-step reducts; a com discards the sibling summands."""
    pool = Pool.of(p)
    out, seen = [], set()
    for a, b in pool.pairs():
        for s in summands(pool.items[a].proc):
            for t in summands(pool.items[b].proc):
                step = _fire(s, t)
                if step is None:
                    continue
                subj, n, results = step
                reduct = pool.rebuild((a, b), results)
                key = (subj, n, canon(reduct))
                if key not in seen:
                    seen.add(key)
                    out.append((GRedex(subj, n, (a, b)), reduct))
    return out


def _fire(s, t):
    if isinstance(s, GIn) and isinstance(t, GOut):
        s, t = t, s
    if not (isinstance(s, GOut) and isinstance(t, GIn)):
        return None
    if s.subj != t.subj or len(s.args) != len(t.params):
        return None
    try:
        cont = subst_generic(t.cont, dict(zip(t.params, s.args)))
    except SubstitutionError:
        return None
    return s.subj, len(s.args), [s.cont, cont]


def generic_error(p) -> str | None:
    """Describe an arity mismatch or race exposed by ``p``, or ``None``."""
    pool = Pool.of(p, copies=0)
    for a, b in pool.pairs():
        for s in summands(pool.items[a].proc):
            for t in summands(pool.items[b].proc):
                if s.subj != t.subj:
                    continue
                if type(s) is type(t):
                    what = "outputs" if isinstance(s, GOut) else "inputs"
                    return f"parallel {what} on {s.subj}"
                n = len(s.args) if isinstance(s, GOut) else len(s.params)
                m = len(t.args) if isinstance(t, GOut) else len(t.params)
                if n != m:
                    return f"arity mismatch on {s.subj} ({n} vs {m})"
    return None


def is_generic_error(p) -> bool:
    return generic_error(p) is not None


def explore_generic(p, max_depth: int = 16, max_states: int = 5000) -> Reach:
    return explore(p, reduce_generic, max_depth, max_states)


__all__ = ["GRedex", "reduce_generic", "generic_error", "is_generic_error",
           "explore_generic", "summands"]
