"""Process types: subtyping, type reduction, WF/NULL/LIN and ``Γ ▷ P``.

A process type is handled as a multiset of *threads*: the components of
its top-level parallel composition, with ``0`` and ``*0`` removed.

Type-level communication drops tuple payloads and only introduces fresh
names, so threads never learn each other's names.  Threads that share no
free name (transitively) therefore evolve independently, and the state
exploration behind WF and LIN runs per connected group of threads.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .binding import (
    alpha_key, free_names, generic_names, ptype_names, subst_generic, subst_ptype,
)
from .bounds import ExplorationBound, Outcome, Verdict
from .names import variant
from .printer import render_ptype
from .terms import (
    BasePayload, GIn, GOut, NamesPayload, Nil, Par, PChoice, PIn, POut, PPar, PRepl,
    PSum, PTau, PZero, Repl, Res, Sum, TupleType, payload_arity, ppar_all,
)

MAX_SPLIT_BRANCHES = 4096
MAX_SURRENDER_CANDIDATES = 10


# ---------------------------------------------------------------- threads


def threads(g) -> tuple:
    """Top-level parallel components, without null replications or zeros."""
    match g:
        case PZero():
            return ()
        case PPar(l, r):
            return threads(l) + threads(r)
        case PRepl(body) if not threads(body):
            return ()
    return (g,)


def tkey(t):
    return alpha_key(t)


def state_key(ts) -> tuple:
    return tuple(sorted((tkey(t) for t in ts), key=repr))


def compose(ts):
    return ppar_all(sorted(ts, key=lambda t: repr(tkey(t))))


def fn(t) -> frozenset:
    return free_names(t)


# ---------------------------------------------------------------- NULL


def is_null(g) -> bool:
    """True when no input or output prefix occurs (payloads are not looked into)."""
    match g:
        case PZero():
            return True
        case PPar(l, r) | PChoice(l, r):
            return is_null(l) and is_null(r)
        case PSum(branches):
            return all(is_null(b) for b in branches)
        case PRepl(body) | PTau(body):
            return is_null(body)
    return False


def nullable(t) -> bool:
    """``t ⊑ Γ`` for some NULL ``Γ`` (internal choices may pick a null arm)."""
    if is_null(t):
        return True
    if isinstance(t, PChoice):
        return all(nullable(x) for x in threads(t.left)) or \
            all(nullable(x) for x in threads(t.right))
    return False


# ---------------------------------------------------------------- subtyping


def payload_sub(p1, p2) -> bool:
    """Payload subtyping: equal arity, tuple bodies compared covariantly."""
    match p1, p2:
        case BasePayload(a), BasePayload(b):
            return a == b
        case NamesPayload(a), NamesPayload(b):
            return len(a) == len(b)
        case TupleType(xs, g1), TupleType(ys, g2):
            if len(xs) != len(ys):
                return False
            b1, b2 = _common_binders(xs, g1, ys, g2)
            return subtype_generic(b1, b2)
    return False


def payload_equiv(p1, p2) -> bool:
    return payload_sub(p1, p2) and payload_sub(p2, p1)


def _common_binders(xs, g1, ys, g2):
    avoid = ptype_names(g1) | ptype_names(g2) | set(xs) | set(ys)
    common = []
    for x in xs:
        c = variant(f"{x}_", avoid)
        avoid.add(c)
        common.append(c)
    return (subst_ptype(g1, dict(zip(xs, common))),
            subst_ptype(g2, dict(zip(ys, common))))


def subtype_generic(g1, g2, unfold: int = 2) -> bool:
    """``g1 ⊑ g2`` in the process-type preorder."""
    return _msub(state_key(threads(g1)), state_key(threads(g2)), unfold,
                 _Lookup.of(g1, g2))


def equiv_generic(g1, g2) -> bool:
    return subtype_generic(g1, g2) and subtype_generic(g2, g1)


class _Lookup:
    """Maps alpha keys back to threads (keys are hashable, threads too)."""

    table: dict = {}

    @classmethod
    def of(cls, *types):
        for g in types:
            cls.register(g)
        return cls

    @classmethod
    def register(cls, g):
        for t in threads(g):
            cls.table.setdefault(tkey(t), t)
            match t:
                case PChoice(l, r):
                    cls.register(l)
                    cls.register(r)
                case PRepl(body):
                    cls.register(body)


def _t(key):
    return _Lookup.table[key]


@lru_cache(maxsize=200_000)
def _msub(left: tuple, right: tuple, unfold: int, _lk=None) -> bool:
    if not right:
        if not left:
            return True
        return any(_msub(tuple(sorted(rest, key=repr)), right, unfold, _lk)
                   for rest in _expand_choices(left))
    r = _t(right[0])
    right_rest = right[1:]
    for i, lk in enumerate(left):
        if lk == right[0] or _thread_sub(_t(lk), r, unfold):
            if _msub(left[:i] + left[i + 1:], right_rest, unfold, _lk):
                return True
    for rest in _expand_choices(left):
        if _msub(tuple(sorted(rest, key=repr)), right, unfold, _lk):
            return True
    if unfold > 0:
        for i, lk in enumerate(left):
            t = _t(lk)
            if isinstance(t, PRepl):
                body = threads(t.body)
                _Lookup.register(t.body)
                grown = tuple(sorted(left + tuple(tkey(b) for b in body), key=repr))
                if _msub(grown, right, unfold - 1, _lk):
                    return True
    return False


def _expand_choices(left: tuple):
    """Replace one internal choice on the left by one of its arms."""
    for i, lk in enumerate(left):
        t = _t(lk)
        if isinstance(t, PChoice):
            for arm in (t.left, t.right):
                _Lookup.register(arm)
                yield left[:i] + left[i + 1:] + tuple(tkey(x) for x in threads(arm))


def _thread_sub(t1, t2, unfold: int) -> bool:
    match t1, t2:
        case POut(x, p1, c1), POut(y, p2, c2) if x == y:
            return _prefix_sub(p1, c1, p2, c2)
        case PIn(x, p1, c1), PIn(y, p2, c2) if x == y:
            return _prefix_sub(p1, c1, p2, c2)
        case PTau(c1), PTau(c2):
            return subtype_generic(c1, c2, unfold)
        case PRepl(b1), PRepl(b2):
            return subtype_generic(b1, b2, unfold)
        case PChoice(l1, r1), PChoice(l2, r2):
            return subtype_generic(l1, l2, unfold) and subtype_generic(r1, r2, unfold)
        case PSum(bs1), PSum(bs2) if len(bs1) == len(bs2):
            return any(all(_thread_sub(a, b, unfold) for a, b in zip(bs1, perm))
                       for perm in itertools.permutations(bs2))
    return False


def _prefix_sub(p1, c1, p2, c2) -> bool:
    if isinstance(p1, NamesPayload) and isinstance(p2, NamesPayload):
        if len(p1.binders) != len(p2.binders):
            return False
        c1, c2 = _common_binders(p1.binders, c1, p2.binders, c2)
        return subtype_generic(c1, c2)
    return payload_equiv(p1, p2) and subtype_generic(c1, c2)


# ---------------------------------------------------------------- type reduction


@dataclass(frozen=True)
class TStep:
    label: str               # "com x", "tau", "&"

    def arrow(self) -> str:
        return f"--[{self.label}]-->"


def _prefixes(t):
    if isinstance(t, PSum):
        return t.branches
    if isinstance(t, (POut, PIn, PTau)):
        return (t,)
    return ()


def _pool(ts, copies: int):
    items = [(t, ("top", i)) for i, t in enumerate(ts)]
    for i, t in enumerate(ts):
        if isinstance(t, PRepl):
            for k in range(copies):
                items.extend((b, ("rep", i, k)) for b in threads(t.body))
    return items


def _copy_ok(oa, ob=None) -> bool:
    for o, other in ((oa, ob), (ob, oa)):
        if o is not None and o[0] == "rep" and o[2] > 0:
            if other is None or not (other[0] == "rep" and other[1] == o[1]
                                     and other[2] == o[2] - 1):
                return False
    return True


def _rebuild(items, used: set[int], results) -> tuple:
    copies = {items[k][1][1:] for k in used if items[k][1][0] == "rep"}
    out = []
    for k, (t, o) in enumerate(items):
        if k in used:
            continue
        if o[0] == "top" or o[1:] in copies:
            out.append(t)
    for r in results:
        out.extend(threads(r))
    return tuple(out)


def _fresh_for(binders, names):
    avoid = set(names)
    out = []
    for b in binders:
        n = variant(b, avoid)
        avoid.add(n)
        out.append(n)
    return out


def reduce_threads(ts: tuple, copies: int = 2) -> list[tuple[TStep, tuple]]:
    items = _pool(ts, copies)
    names = set()
    for t in ts:
        names |= ptype_names(t)
    out = []
    for k, (t, o) in enumerate(items):
        if not _copy_ok(o):
            continue
        if isinstance(t, PChoice):
            for arm in (t.left, t.right):
                out.append((TStep("&"), _rebuild(items, {k}, [arm])))
        for pre in _prefixes(t):
            if isinstance(pre, PTau):
                out.append((TStep("tau"), _rebuild(items, {k}, [pre.cont])))
    for a, b in itertools.combinations(range(len(items)), 2):
        (ta, oa), (tb, ob) = items[a], items[b]
        if not _copy_ok(oa, ob):
            continue
        for s in _prefixes(ta):
            for r in _prefixes(tb):
                if isinstance(s, PIn) and isinstance(r, POut):
                    s, r = r, s
                if not (isinstance(s, POut) and isinstance(r, PIn)) or s.subj != r.subj:
                    continue
                c1, c2 = s.cont, r.cont
                if isinstance(s.payload, NamesPayload) and isinstance(r.payload, NamesPayload) \
                        and len(s.payload.binders) == len(r.payload.binders):
                    fresh = _fresh_for(s.payload.binders, names)
                    c1 = subst_ptype(c1, dict(zip(s.payload.binders, fresh)))
                    c2 = subst_ptype(c2, dict(zip(r.payload.binders, fresh)))
                out.append((TStep(f"com {s.subj}"), _rebuild(items, {a, b}, [c1, c2])))
    return out


def type_reduce(g, copies: int = 2) -> list:
    """One-step reducts of a process type."""
    seen, out = set(), []
    for _, ts in reduce_threads(threads(g), copies):
        k = state_key(ts)
        if k not in seen:
            seen.add(k)
            out.append(compose(ts))
    return out


def components(ts: tuple) -> list[tuple]:
    """Group threads connected by shared free names."""
    parent = list(range(len(ts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, t in enumerate(ts):
        for n in fn(t):
            if n in owner:
                parent[find(i)] = find(owner[n])
            else:
                owner[n] = i
    groups: dict[int, list] = {}
    for i, t in enumerate(ts):
        groups.setdefault(find(i), []).append(t)
    return [tuple(g) for g in groups.values()]


@dataclass
class _Space:
    states: dict             # key -> (threads, trace)
    edges: dict              # key -> [succ keys]
    bound_hit: bool


def _explore(ts: tuple, bound: ExplorationBound) -> _Space:
    start = state_key(ts)
    states = {start: (ts, [])}
    edges: dict = {}
    queue = deque([(ts, 0)])
    hit = False
    while queue:
        cur, depth = queue.popleft()
        key = state_key(cur)
        steps = reduce_threads(cur, bound.unfold)
        edges[key] = []
        if depth >= bound.max_depth:
            hit = hit or bool(steps)
            continue
        for step, nxt in steps:
            nk = state_key(nxt)
            edges[key].append(nk)
            if nk in states:
                continue
            if len(states) >= bound.max_states:
                hit = True
                continue
            states[nk] = (nxt, states[key][1] + [step.arrow()])
            queue.append((nxt, depth + 1))
    return _Space(states, edges, hit)


# ---------------------------------------------------------------- WF and LIN


def _pairs(ts: tuple, copies: int):
    items = _pool(ts, copies)
    for a, b in itertools.combinations(range(len(items)), 2):
        (ta, oa), (tb, ob) = items[a], items[b]
        if not _copy_ok(oa, ob):
            continue
        for s in _prefixes(ta):
            for r in _prefixes(tb):
                yield s, r


def _wf_violation(ts: tuple, copies: int) -> str | None:
    for s, r in _pairs(ts, copies):
        if isinstance(s, PIn) and isinstance(r, POut):
            s, r = r, s
        if isinstance(s, POut) and isinstance(r, PIn) and s.subj == r.subj:
            if not payload_sub(s.payload, r.payload):
                return (f"payload mismatch on {s.subj}: "
                        f"{_pl(s.payload)} vs {_pl(r.payload)}")
    return None


def _pl(p) -> str:
    from .printer import render_payload
    return f"<{render_payload(p)}>"


def _exposed(t) -> set:
    out = set()
    for pre in _prefixes(t):
        if isinstance(pre, POut):
            out.add((pre.subj, "!"))
        elif isinstance(pre, PIn):
            out.add((pre.subj, "?"))
    if isinstance(t, PRepl):
        for b in threads(t.body):
            out |= _exposed(b)
    return out


def is_wf(g, bound: ExplorationBound | None = None) -> Outcome:
    """Every reachable communication has compatible payloads."""
    bound = bound or ExplorationBound()
    return _check_groups(g, bound, lin=False)


def is_lin(g, bound: ExplorationBound | None = None) -> Outcome:
    """WF, and no two sends (or receives) on one channel can ever be in parallel."""
    bound = bound or ExplorationBound()
    return _check_groups(g, bound, lin=True)


def _check_groups(g, bound, lin: bool) -> Outcome:
    total, hit = 0, False
    for group in components(threads(g)):
        res = _check_group(group, bound, lin)
        total += res.states
        if res.verdict is Verdict.FALSE:
            res.states = total
            return res
        hit = hit or res.bound_hit
    if hit:
        return Outcome(Verdict.UNKNOWN, reason=f"bound {bound}", states=total, bound_hit=True)
    note = f"replication unfolded at most {bound.unfold} times" if _replicates(g) else ""
    return Outcome(Verdict.TRUE, reason=note, states=total)


def _replicates(g) -> bool:
    match g:
        case PRepl():
            return True
        case PPar(l, r) | PChoice(l, r):
            return _replicates(l) or _replicates(r)
        case PSum(items):
            return any(_replicates(x) for x in items)
        case POut(_, _, k) | PIn(_, _, k) | PTau(k):
            return _replicates(k)
    return False


def _check_group(ts: tuple, bound, lin: bool) -> Outcome:
    space = _explore(ts, bound)
    n = len(space.states)
    for key, (cur, trace) in space.states.items():
        bad = _wf_violation(cur, bound.unfold)
        if bad:
            return Outcome(Verdict.FALSE, trace + [compose_text(cur)], bad, n)
    if lin:
        reach = _ExposureOracle(bound)
        for key, (cur, trace) in space.states.items():
            bad = _lin_violation(cur, reach)
            if bad:
                return Outcome(Verdict.FALSE, trace + [compose_text(cur)], bad, n)
        if reach.bound_hit:
            return Outcome(Verdict.UNKNOWN, reason="bound", states=n, bound_hit=True)
    return Outcome(Verdict.TRUE, states=n, bound_hit=space.bound_hit)


def compose_text(ts) -> str:
    return render_ptype(compose(ts))


class _ExposureOracle:
    """Memoised: which (name, direction) pairs can a thread multiset expose?"""

    def __init__(self, bound):
        self.bound = bound
        self.memo: dict = {}
        self.bound_hit = False

    def __call__(self, ts: tuple) -> set:
        key = state_key(ts)
        if key not in self.memo:
            out = set()
            for group in components(ts):
                space = _explore(group, self.bound)
                self.bound_hit |= space.bound_hit
                for cur, _ in space.states.values():
                    for t in cur:
                        out |= _exposed(t)
            self.memo[key] = out
        return self.memo[key]


def _lin_violation(ts: tuple, reach) -> str | None:
    for i, t in enumerate(ts):
        exposed = _exposed(t)
        if not exposed:
            continue
        # a replicated thread stays behind after lending a copy
        rest = ts if isinstance(t, PRepl) else ts[:i] + ts[i + 1:]
        again = reach(rest) & exposed
        if again:
            x, d = sorted(again)[0]
            what = "sends" if d == "!" else "receives"
            return f"parallel {what} on {x}"
    return None


# ---------------------------------------------------------------- typing Γ ▷ P


@dataclass
class GCheck:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def typecheck_generic(gamma, p, annotations: dict | None = None,
                      bound: ExplorationBound | None = None) -> GCheck:
    """Check ``gamma ▷ p``.

    ``annotations`` maps each restricted name group (a tuple of names, as
    written in ``p``) to the process type of those names.
    """
    checker = _Checker(annotations or {}, bound or ExplorationBound())
    ok = checker.check(threads(gamma), p)
    return GCheck(ok, "" if ok else checker.reason)


def _heads(t) -> set:
    match t:
        case POut(x, _, _):
            return {(x, "!")}
        case PIn(x, _, _):
            return {(x, "?")}
        case PTau(c):
            return set().union(*(_heads(s) for s in threads(c))) if threads(c) else set()
        case PSum(bs):
            return set().union(*(_heads(b) for b in bs))
        case PChoice(l, r):
            return set().union(set(), *(_heads(s) for s in threads(l) + threads(r)))
        case PRepl(body):
            return set().union(set(), *(_heads(s) for s in threads(body)))
    return set()


def _acts(p, bound=frozenset()) -> set:
    """Free (subject, direction) pairs and sent names of a generic process."""
    out = set()
    match p:
        case Par(l, r):
            return _acts(l, bound) | _acts(r, bound)
        case Res(names, body, _):
            return _acts(body, bound | set(names))
        case Repl(body):
            return _acts(body, bound)
        case Sum(bs):
            for b in bs:
                out |= _acts(b, bound)
            return out
        case GOut(x, args, cont):
            if x not in bound:
                out.add((x, "!"))
            out |= {("arg", a) for a in args if isinstance(a, str) and a not in bound}
            return out | _acts(cont, bound)
        case GIn(x, params, cont):
            if x not in bound:
                out.add((x, "?"))
            return out | _acts(cont, bound | set(params))
    return out


class _Checker:
    def __init__(self, annotations: dict, bound: ExplorationBound):
        self.ann = {tuple(k): v for k, v in annotations.items()}
        self.bound = bound
        self.reason = ""
        self.memo: dict = {}
        self.lin_memo: dict = {}

    def fail(self, msg: str) -> bool:
        self.reason = msg
        return False

    def check(self, ts: tuple, p) -> bool:
        key = (state_key(ts), alpha_key(p))
        if key not in self.memo:
            self.memo[key] = False
            self.memo[key] = self._check(ts, p)
        return self.memo[key]

    def _check(self, ts: tuple, p) -> bool:
        match p:
            case Nil():
                bad = [t for t in ts if not nullable(t)]
                if bad:
                    return self.fail("unused behaviour at 0: " + compose_text(bad))
                return True
            case Par(l, r):
                return self._check_par(ts, l, r)
            case Res(names, body, _):
                return self._check_res(ts, names, body)
            case Repl(body):
                inner = []
                for t in ts:
                    if isinstance(t, PRepl):
                        inner.extend(threads(t.body))
                    elif not nullable(t):
                        return self.fail("replicated process under a linear type "
                                         + render_ptype(t))
                return self.check(tuple(inner), body)
            case Sum(bs) if len(bs) > 1:
                return self._check_sum(ts, bs)
            case Sum(bs):
                return self._check_prefix(ts, bs[0])
            case GIn() | GOut():
                return self._check_prefix(ts, p)
        raise TypeError(f"not a generic process: {p!r}")

    # -- parallel

    def _check_par(self, ts, l, r) -> bool:
        al, ar = _acts(l), _acts(r)
        fixed_l, fixed_r, both = [], [], []
        for t in ts:
            h = _heads(t) | {("arg", n) for n in fn(t)}
            in_l, in_r = bool(h & al), bool(h & ar)
            if in_l and in_r:
                both.append(t)
            elif in_r:
                fixed_r.append(t)
            else:
                fixed_l.append(t)
        for n, mask in enumerate(itertools.product((0, 1), repeat=len(both))):
            if n >= MAX_SPLIT_BRANCHES:
                return self.fail("too many ways to split the environment")
            left = fixed_l + [t for t, m in zip(both, mask) if m == 0]
            right = fixed_r + [t for t, m in zip(both, mask) if m == 1]
            if self.check(tuple(left), l) and self.check(tuple(right), r):
                return True
        return False

    # -- restriction

    def _check_res(self, ts, names, body) -> bool:
        ann = self.ann.get(tuple(names), PZero())
        taken = set()
        for t in ts:
            taken |= ptype_names(t)
        clash = taken & set(names)
        if clash:
            avoid = taken | generic_names(body) | ptype_names(ann)
            ren = {}
            for x in names:
                if x in clash:
                    ren[x] = variant(x, avoid)
                    avoid.add(ren[x])
            body = subst_generic(body, ren)
            ann = subst_ptype(ann, ren)
        k = alpha_key(ann)
        if k not in self.lin_memo:
            self.lin_memo[k] = is_lin(ann, self.bound)
        lin = self.lin_memo[k]
        if lin.verdict is not Verdict.TRUE:
            return self.fail(f"restriction type not linear: {lin.describe()}")
        return self.check(ts + threads(ann), body)

    # -- prefixes

    def _matches(self, ts, x: str, kind, depth: int = 0):
        """Yield ``(thread, rest)`` with ``thread`` a ``kind`` prefix on ``x``."""
        for i, t in enumerate(ts):
            rest = ts[:i] + ts[i + 1:]
            if isinstance(t, kind) and t.subj == x:
                yield t, rest
            elif isinstance(t, PRepl):
                body = threads(t.body)
                for j, b in enumerate(body):
                    if isinstance(b, kind) and b.subj == x:
                        yield b, ts + body[:j] + body[j + 1:]
            elif isinstance(t, PChoice) and depth < 4:
                for arm in (t.left, t.right):
                    yield from self._matches(rest + threads(arm), x, kind, depth + 1)

    def _check_prefix(self, ts, p) -> bool:
        kind = PIn if isinstance(p, GIn) else POut
        found = False
        for t, rest in self._matches(ts, p.subj, kind):
            found = True
            if isinstance(p, GIn) and self._check_in(rest, t, p):
                return True
            if isinstance(p, GOut) and self._check_out(rest, t, p):
                return True
        if not found:
            d = "input" if kind is PIn else "output"
            return self.fail(f"no {d} on {p.subj} in {compose_text(ts) or '0'}")
        return False

    def _check_in(self, rest, t: PIn, p: GIn) -> bool:
        pl = t.payload
        if payload_arity(pl) != len(p.params):
            return self.fail(f"arity mismatch on {p.subj}")
        taken = set()
        for r in rest:
            taken |= ptype_names(r)
        taken |= ptype_names(t.cont)
        params, cont = list(p.params), p.cont
        clash = taken & set(params)
        if clash:
            avoid = taken | generic_names(cont)
            ren = {}
            for x in params:
                if x in clash:
                    ren[x] = variant(x, avoid)
                    avoid.add(ren[x])
            params = [ren.get(x, x) for x in params]
            cont = subst_generic(cont, ren)
        tc = t.cont
        extra = ()
        match pl:
            case TupleType(binders, body):
                extra = threads(subst_ptype(body, dict(zip(binders, params))))
            case NamesPayload(binders):
                tc = subst_ptype(tc, dict(zip(binders, params)))
        return self.check(rest + threads(tc) + extra, cont)

    def _check_out(self, rest, t: POut, p: GOut) -> bool:
        pl = t.payload
        if payload_arity(pl) != len(p.args):
            return self.fail(f"arity mismatch on {p.subj}")
        match pl:
            case BasePayload():
                return self.check(rest + threads(t.cont), p.cont)
            case NamesPayload(binders):
                if not all(isinstance(a, str) for a in p.args):
                    return self.fail(f"values sent where names are expected on {p.subj}")
                tc = subst_ptype(t.cont, dict(zip(binders, p.args)))
                return self.check(rest + threads(tc), p.cont)
            case TupleType(binders, body):
                if not all(isinstance(a, str) for a in p.args):
                    return self.fail(f"values sent where names are expected on {p.subj}")
                target = subst_ptype(body, dict(zip(binders, p.args)))
                sent = set(p.args)
                cands = [i for i, r in enumerate(rest) if fn(r) & sent]
                if len(cands) > MAX_SURRENDER_CANDIDATES:
                    return self.fail("too many candidate behaviours to surrender")
                for size in range(len(cands), -1, -1):
                    for pick in itertools.combinations(cands, size):
                        given = [rest[i] for i in pick]
                        if not subtype_generic(compose(given), target):
                            continue
                        kept = tuple(r for i, r in enumerate(rest) if i not in pick)
                        if self.check(kept + threads(t.cont), p.cont):
                            return True
                return self.fail(f"cannot surrender {render_ptype(target)} on {p.subj}")
        return False

    def _check_sum(self, ts, bs) -> bool:
        for i, t in enumerate(ts):
            if not (isinstance(t, PSum) and len(t.branches) == len(bs)):
                continue
            rest = ts[:i] + ts[i + 1:]
            for perm in itertools.permutations(t.branches):
                if all(self.check(rest + (tb,), pb) for tb, pb in zip(perm, bs)):
                    return True
        return self.fail("no external choice matches the sum")


__all__ = [
    "threads", "is_null", "payload_sub", "subtype_generic", "equiv_generic", "type_reduce",
    "reduce_threads", "is_wf", "is_lin", "typecheck_generic", "GCheck", "components",
    "TStep", "nullable",
]
