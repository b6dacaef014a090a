"""Prenex flattening, canonical forms and the structural preorder.

Both calculi share ``Nil``/``Par``/``Res``/``Repl``, so one engine serves
session and generic processes.  ``canon`` computes a key that is equal for
structurally congruent terms: parallel composition is an associative,
commutative monoid, restrictions float outward (and vanish when unused),
``!0`` is ``0``, bound names are anonymous, and annotations are ignored.
The replication unfolding ``!P ⪯ !P | P`` is the only non-symmetric law; it
is handled by bounded search in :func:`struct_leq`.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
from dataclasses import dataclass, field

from .binding import free_channel_names, proc_names, rename_proc
from .bounds import Verdict
from .names import variant
from .terms import (
    Branch, Chan, Eq, GIn, GOut, In, Nil, Out, Par, Repl, Res, Select, Sum, par_all,
)

MAX_TIE_ORDERINGS = 120


@dataclass
class Flat:
    """``(ν binders)(comps[0] | comps[1] | ...)``; comps are never Nil/Par/Res."""

    binders: list = field(default_factory=list)  # [(names, ann)]
    comps: list = field(default_factory=list)

    @property
    def bound(self) -> list[str]:
        return [n for names, _ in self.binders for n in names]

    def rebuild(self, comps=None):
        body = par_all(self.comps if comps is None else comps)
        for names, ann in reversed(self.binders):
            body = Res(names, body, ann)
        return body


def flatten(p, used: set[str] | None = None, avoid: set[str] | None = None) -> Flat:
    """Lift every top-level restriction, renaming on clashes.

    ``used`` (mutated) collects every name seen so that renamed binders are
    fresh; binders listed in ``avoid`` are always renamed.
    """
    used = set() if used is None else used
    used |= proc_names(p)
    taken = set(free_channel_names(p)) | set(avoid or ())
    flat = Flat()

    def go(q):
        match q:
            case Nil():
                pass
            case Par(l, r):
                go(l)
                go(r)
            case Res(names, body, ann):
                ren, new = {}, []
                for n in names:
                    m = n
                    if n in taken:
                        m = variant(n, used | taken)
                        ren[n] = m
                    taken.add(m)
                    used.add(m)
                    new.append(m)
                flat.binders.append((tuple(new), ann))
                go(rename_proc(body, ren))
            case _:
                flat.comps.append(q)
    go(p)
    return flat


def prenex(p):
    """The prenex form ``(ν x~)(G1 | ... | Gn)`` of ``p``."""
    return flatten(p).rebuild()


# ---------------------------------------------------------------- canonical keys

EMPTY = ("par", ())


@functools.lru_cache(maxsize=65536)
def canon(p):
    """Key identifying ``p`` up to structural congruence and alpha."""
    try:
        return _ckey(p, {}, 0)
    finally:
        _SHAPES.clear()
        _HOLES.clear()


# id(key) -> (key, shape); holding the key keeps its id valid for one canon call
_SHAPES: dict = {}
# id(key) -> (key, unlabelled restricted names inside key by depth)
_HOLES: dict = {}


def _shape(k) -> str:
    """Printed form of ``k`` with placeholders reduced to their depth."""
    if not isinstance(k, tuple):
        return repr(k)
    hit = _SHAPES.get(id(k))
    if hit is not None:
        return hit[1]
    if _is_hole(k):
        out = f"(?{k[1]}{k[3] if len(k) == 4 else ''})"
    else:
        out = "(" + ",".join(_shape(x) for x in k) + ")"
    _SHAPES[id(k)] = (k, out)
    return out


def struct_eq(p, q) -> bool:
    return canon(p) == canon(q)


def _ckey(p, env: dict, depth: int):
    flat = flatten(p)
    restricted = flat.bound
    inner = dict(env)
    for n in restricted:
        inner[n] = ("?", depth, n)
    comp_keys = []
    for c in flat.comps:
        k = _comp_key(c, inner, depth + 1)
        if k is not None:
            comp_keys.append(k)
    if not restricted:
        return ("par", _sorted_keys(comp_keys))
    comp_keys = _with_signatures(comp_keys, depth)
    # Components linked by a restricted name form a molecule; molecules share
    # no restricted names, so each is labelled on its own.
    molecules = _molecules(comp_keys, depth)
    keys = [m[0] if len(m) == 1 and not _placeholders(m[0], depth)
            else ("nu", depth, _label_molecule(m, depth)) for m in molecules]
    return ("par", _sorted_keys(keys))


def _sorted_keys(keys) -> tuple:
    return tuple(sorted(keys, key=lambda k: (_shape(k), repr(k))))


def _is_hole(k) -> bool:
    """A restricted name awaiting its label: ``("?", depth, name[, signature])``."""
    return len(k) in (3, 4) and k[0] == "?"


def _placeholders(k, depth: int) -> frozenset:
    return _holes(k).get(depth, _NONE)


_NONE: frozenset = frozenset()


def _holes(k) -> dict:
    """Unlabelled restricted names inside ``k``, by depth."""
    if not isinstance(k, tuple):
        return {}
    hit = _HOLES.get(id(k))
    if hit is not None:
        return hit[1]
    if _is_hole(k):
        out = {k[1]: frozenset([k[2]])}
    else:
        parts = [h for h in map(_holes, k) if h]
        if not parts:
            out = {}
        elif len(parts) == 1:
            out = parts[0]
        else:
            out = {}
            for h in parts:
                for d, ns in h.items():
                    out[d] = out[d] | ns if d in out else ns
    _HOLES[id(k)] = (k, out)
    return out


def _with_signatures(comp_keys, depth: int) -> list:
    """Tag each restricted name with a digest of the places it occurs in.

    Names used differently then never tie, so labels handed out while
    walking a key no longer depend on the original spelling of the names.
    """
    occurs: dict = {}
    for k in comp_keys:
        for n in _placeholders(k, depth):
            occurs.setdefault(n, []).append(_shape(_mark(k, depth, n)))
    sig = {n: ":" + hashlib.blake2b("|".join(sorted(v)).encode(), digest_size=6).hexdigest()
           for n, v in occurs.items()}
    return [_tag(k, depth, sig) for k in comp_keys]


def _mark(k, depth: int, name):
    if isinstance(k, tuple) and name in _placeholders(k, depth):
        if _is_hole(k):
            return ("?", depth, name, "*") if k[2] == name else k
        out = tuple(_mark(x, depth, name) for x in k)
        return k if all(a is b for a, b in zip(out, k)) else _reorder(out)
    return k


def _tag(k, depth: int, sig: dict):
    if isinstance(k, tuple) and _placeholders(k, depth):
        if _is_hole(k):
            return ("?", depth, k[2], sig[k[2]])
        out = tuple(_tag(x, depth, sig) for x in k)
        return k if all(a is b for a, b in zip(out, k)) else _reorder(out)
    return k


def _molecules(comp_keys, depth: int) -> list[list]:
    names = [_placeholders(k, depth) for k in comp_keys]
    parent = list(range(len(comp_keys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    for i, ns in enumerate(names):
        for n in ns:
            if n in owner:
                parent[find(i)] = find(owner[n])
            else:
                owner[n] = i
    groups: dict = {}
    for i, k in enumerate(comp_keys):
        groups.setdefault(find(i), []).append(k)
    return list(groups.values())


def _label_molecule(comp_keys, depth: int) -> tuple:
    anon = [_shape(k) for k in comp_keys]
    order = sorted(range(len(comp_keys)), key=lambda i: anon[i])
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: anon[i])]
    best = None
    for n, choice in enumerate(itertools.product(*(_perms(g, comp_keys) for g in groups))):
        if n >= MAX_TIE_ORDERINGS:
            break
        seq = [comp_keys[i] for g in choice for i in g]
        labels: dict = {}
        cand = tuple(_relabel(k, labels, depth) for k in seq)
        rank = _shape(cand)
        if best is None or rank < best[0]:
            best = (rank, cand)
    return best[1]


def _perms(group, keys):
    if len(group) == 1:
        return [tuple(group)]
    seen, out = set(), []
    for perm in itertools.permutations(group):
        sig = tuple(keys[i] for i in perm)
        if sig not in seen:
            seen.add(sig)
            out.append(perm)
        if len(out) >= MAX_TIE_ORDERINGS:
            break
    return out


def _relabel(k, labels: dict, depth: int):
    if isinstance(k, tuple) and _placeholders(k, depth):
        if _is_hole(k):
            if k[2] not in labels:
                labels[k[2]] = ("r", depth, len(labels))
            return labels[k[2]]
        out = tuple(_relabel(x, labels, depth) for x in k)
        return k if all(a is b for a, b in zip(out, k)) else _reorder(out)
    return k


def _reorder(k):
    """Redo an inner ordering chosen while outer names were still anonymous."""
    if k[0] == "par" and len(k) == 2 and isinstance(k[1], tuple):
        return ("par", _sorted_keys(k[1]))
    if k[0] == "nu" and len(k) == 3 and isinstance(k[1], int):
        return ("nu", k[1], _label_molecule(list(_unlabel(k[2], k[1])), k[1]))
    return k


def _unlabel(k, depth: int):
    if isinstance(k, tuple):
        if len(k) == 3 and k[0] == "r" and k[1] == depth:
            return ("?", depth, k[2])
        return tuple(_unlabel(x, depth) for x in k)
    return k


def _nm(env, name):
    return env.get(name, ("f", name))


def _val_key(env, v):
    match v:
        case Chan(name, pol):
            return (_nm(env, name), pol.value)
        case str():
            return _nm(env, v)
        case Eq(lhs, rhs):
            return ("eq", _nm(env, lhs) if isinstance(lhs, str) else lhs, rhs)
        case None:
            return None
    return ("val", repr(v))


def _comp_key(c, env, depth):
    match c:
        case Repl(body):
            k = _ckey(body, env, depth)
            return None if k == EMPTY else ("!", k)
        case Out(subj, payload, cont):
            return ("out", _val_key(env, subj), _val_key(env, payload), _ckey(cont, env, depth))
        case In(subj, var, cont):
            inner = dict(env)
            if var is not None:
                inner[var] = ("b", depth, 0)
            return ("in", _val_key(env, subj), var is None, _ckey(cont, inner, depth + 1))
        case Branch(subj, branches):
            return ("br", _val_key(env, subj),
                    tuple((l, _ckey(b, env, depth)) for l, b in branches))
        case Select(subj, label, cont):
            return ("sel", _val_key(env, subj), label, _ckey(cont, env, depth))
        case GOut(subj, args, cont):
            return ("gout", _nm(env, subj), tuple(_val_key(env, a) for a in args),
                    _ckey(cont, env, depth))
        case GIn(subj, params, cont):
            inner = dict(env)
            for i, x in enumerate(params):
                inner[x] = ("b", depth, i)
            return ("gin", _nm(env, subj), len(params), _ckey(cont, inner, depth + 1))
        case Sum(branches):
            if len(branches) == 1:
                return _comp_key(branches[0], env, depth)
            return ("sum", tuple(_comp_key(b, env, depth) for b in branches))
    raise TypeError(f"not a process: {c!r}")


# ---------------------------------------------------------------- preorder


def struct_leq(p, q, k: int = 2) -> Verdict:
    """Decide ``p ⪯ q`` with at most ``k`` replication unfoldings.

    Returns UNKNOWN when no match was found but ``q`` is larger than ``p``
    by more than ``k`` unfoldings could account for.
    """
    target = canon(q)
    if canon(p) == target:
        return Verdict.TRUE
    frontier = [p]
    seen = {canon(p)}
    for _ in range(k):
        nxt = []
        for cur in frontier:
            for unfolded in _unfold_once(cur):
                key = canon(unfolded)
                if key == target:
                    return Verdict.TRUE
                if key not in seen:
                    seen.add(key)
                    nxt.append(unfolded)
        frontier = nxt
    if frontier and _size(target) > max(_size(canon(f)) for f in frontier):
        return Verdict.UNKNOWN
    return Verdict.FALSE


def _unfold_once(p):
    """Every term obtained by one top-level ``!P`` to ``!P | P`` step."""
    flat = flatten(p)
    for i, c in enumerate(flat.comps):
        if isinstance(c, Repl):
            yield flat.rebuild(flat.comps + [c.body])


def _size(key) -> int:
    if isinstance(key, tuple):
        return 1 + sum(_size(x) for x in key)
    return 1


def struct_equiv(p, q, k: int = 2) -> bool:
    """Mutual preorder; coincides with ``struct_eq`` on replication-free terms."""
    return struct_leq(p, q, k) is Verdict.TRUE and struct_leq(q, p, k) is Verdict.TRUE


__all__ = ["Flat", "flatten", "prenex", "canon", "struct_eq", "struct_leq", "struct_equiv"]
