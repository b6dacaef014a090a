"""Brute-force session subtyping over a finite universe of types.

The oracle never calls :func:`subtype_session`: it starts from the empty
relation and applies the five rules to every pair of the universe until
nothing changes.  Payloads of the universe are drawn from the universe
itself (one level down), so every premise is a pair it already ranges over.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from ..session_types import subtype_session
from ..terms import Base, End, SBranch, SChoice, SIn, SOut

RULES = ("S-End", "S-In", "S-Out", "S-Branch", "S-Choice")


def universe(depth: int = 2, labels=("a", "b"), sorts=("int",)) -> list:
    """All session types of nesting depth at most ``depth``."""
    level = [End()]
    for _ in range(depth):
        payloads = [Base(s) for s in sorts] + level
        nxt = [End()]
        for p, k in itertools.product(payloads, level):
            nxt += [SIn(p, k), SOut(p, k)]
        for n in range(1, len(labels) + 1):
            for ls in itertools.combinations(labels, n):
                for ks in itertools.product(level, repeat=n):
                    br = tuple(zip(ls, ks))
                    nxt += [SBranch(br), SChoice(br)]
        level = nxt
    return level


def _kind(s) -> str:
    return type(s).__name__


def closure(types: list) -> set:
    """Least relation on ``types`` closed under the five rules, as index pairs."""
    index = {t: i for i, t in enumerate(types)}
    by_kind: dict = {}
    for i, t in enumerate(types):
        by_kind.setdefault(_kind(t), []).append(i)
    rel: set = set()

    def pay(a, b) -> bool:
        if isinstance(a, Base) or isinstance(b, Base):
            return a == b
        return (index[a], index[b]) in rel

    changed = True
    while changed:
        changed = False
        for ids in by_kind.values():
            for i, j in itertools.product(ids, ids):
                if (i, j) in rel:
                    continue
                if _derivable(types[i], types[j], pay, index, rel):
                    rel.add((i, j))
                    changed = True
    return rel


def _derivable(a, b, pay, index, rel) -> bool:
    match a, b:
        case End(), End():
            return True
        case SIn(p1, k1), SIn(p2, k2):
            return pay(p1, p2) and (index[k1], index[k2]) in rel
        case SOut(p1, k1), SOut(p2, k2):
            return pay(p2, p1) and (index[k1], index[k2]) in rel
        case SBranch(b1), SBranch(b2):
            right = dict(b2)
            return all(l in right and (index[t], index[right[l]]) in rel for l, t in b1)
        case SChoice(b1), SChoice(b2):
            left = dict(b1)
            return all(l in left and (index[left[l]], index[t]) in rel for l, t in b2)
    return False


RULE_OF = {"End": "S-End", "SIn": "S-In", "SOut": "S-Out",
           "SBranch": "S-Branch", "SChoice": "S-Choice"}


@dataclass
class OracleReport:
    types: int
    pairs: int
    related: int
    per_rule: dict = field(default_factory=dict)   # rule -> (related pairs, checked pairs)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        rules = ", ".join(f"{r} {n}/{m}" for r, (n, m) in self.per_rule.items())
        return (f"subtyping oracle: {self.types} types, {self.pairs} pairs, {self.related} "
                f"related ({rules}), {len(self.mismatches)} mismatches")


def compare_with_oracle(depth: int = 2) -> OracleReport:
    """Check :func:`subtype_session` against the closure on every pair."""
    types = universe(depth)
    rel = closure(types)
    per_rule = {r: [0, 0] for r in RULES}
    mismatches = []
    for i, a in enumerate(types):
        for j, b in enumerate(types):
            want = (i, j) in rel
            got = subtype_session(a, b)
            if _kind(a) == _kind(b):
                cell = per_rule[RULE_OF[_kind(a)]]
                cell[1] += 1
                cell[0] += want
            if want != got:
                mismatches.append((a, b, want, got))
    n = len(types)
    return OracleReport(n, n * n, len(rel), {r: tuple(v) for r, v in per_rule.items()},
                        mismatches)


def related_pairs(depth: int = 2, seed: int = 0, limit: int | None = None) -> list:
    """Pairs ``S1 ⊑ S2`` from the universe; all depth-1 pairs first, then a sample."""
    small = universe(min(depth, 1))
    pairs = [(a, b) for a in small for b in small if subtype_session(a, b)]
    if depth > 1:
        big = universe(depth)
        rng = random.Random(seed)
        extra = []
        for _ in range(20 * (limit or 200)):
            a, b = rng.choice(big), rng.choice(big)
            if subtype_session(a, b) and (a, b) not in extra:
                extra.append((a, b))
            if limit is not None and len(pairs) + len(extra) >= limit:
                break
        pairs += extra
    return pairs if limit is None else pairs[:limit]


__all__ = ["universe", "closure", "compare_with_oracle", "related_pairs", "OracleReport",
           "RULES"]
