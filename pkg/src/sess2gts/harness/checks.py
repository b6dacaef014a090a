"""Executable correspondence, typing and safety checks.

Every ``check_*`` function examines one case and returns a
:class:`CaseOutcome`; :func:`run_suite` drives a seeded corpus through one of
them and aggregates a :class:`CheckReport`.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from ..binding import alpha_eq, free_names, strip_annotations, subst_session
from ..bounds import ExplorationBound, Verdict
from ..encoder import EncodeError, encode_env, encode_process, encode_tuple
from ..generic_dynamics import generic_error, reduce_generic
from ..gts import is_lin, payload_sub, typecheck_generic
from ..names import FreshSupply, Pol
from ..printer import render, render_env
from ..session_dynamics import explore, reduce_session, session_error
from ..session_types import (
    SessionTypeError, advance_env, annotate, dual, is_balanced, is_typable, subtype_session,
)
from ..structural import canon
from ..terms import (
    Base, Branch, Chan, End, In, IntLit, Nil, Out, Par, PZero, Repl, Res, SBranch, SChoice, Select,
    SIn, SOut,
)
from .generate import GenConfig, gen_typed

OC_STATES = 12        # source states visited per correspondence case


@dataclass
class CaseOutcome:
    ok: bool
    detail: str = ""
    trace: list = field(default_factory=list)
    bound_hit: bool = False
    excluded: bool = False
    stats: dict = field(default_factory=dict)


@dataclass
class Failure:
    seed: int
    detail: str
    witness: str
    trace: list = field(default_factory=list)


@dataclass
class CheckReport:
    theorem: str
    cases: int = 0
    passes: int = 0
    failures: list = field(default_factory=list)
    bound_hits: int = 0
    excluded: int = 0
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, seed: int, outcome: CaseOutcome, witness: str = ""):
        self.cases += 1
        for k, v in outcome.stats.items():
            self.stats[k] = self.stats.get(k, 0) + v
        if outcome.bound_hit:
            self.bound_hits += 1
        if outcome.excluded:
            self.excluded += 1
            return
        if outcome.ok:
            self.passes += 1
        else:
            self.failures.append(Failure(seed, outcome.detail, witness, outcome.trace))

    def summary(self) -> str:
        extra = "".join(f", {k}={v}" for k, v in sorted(self.stats.items()))
        return (f"{self.theorem}: {self.cases} cases, {self.passes} passed, "
                f"{len(self.failures)} failed, {self.excluded} excluded, "
                f"{self.bound_hits} bound hits{extra} ({self.seconds:.1f}s)")

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem, "cases": self.cases, "passes": self.passes,
            "failures": [f.__dict__ for f in self.failures],
            "bound_hits": self.bound_hits, "excluded": self.excluded,
            "stats": dict(sorted(self.stats.items())), "seconds": round(self.seconds, 3),
        }


# ---------------------------------------------------------------- helpers


def _source_states(env: dict, p, limit: int):
    """Reachable source states with their advanced environments (breadth-first)."""
    seen = {canon(p)}
    queue = deque([(env, p, [])])
    hit = False
    while queue:
        e, q, trace = queue.popleft()
        steps = reduce_session(q)
        yield e, q, trace, steps
        for redex, r in steps:
            k = canon(r)
            if k in seen:
                continue
            if len(seen) >= limit:
                hit = True
                continue
            seen.add(k)
            queue.append((advance_env(e, redex), r, trace + [redex.arrow()]))
    if hit:
        yield None


def _encode(p, env, phi, **kw):
    return encode_process(p, env, phi, supply=FreshSupply(), **kw).process


def _target_keys(tp, depth: int) -> list[set]:
    """Canonical keys reachable from ``tp`` in exactly 1..depth steps."""
    layers, frontier = [], [tp]
    for _ in range(depth):
        nxt = [r for q in frontier for _, r in reduce_generic(q)]
        layers.append({canon(r) for r in nxt})
        frontier = nxt
    return layers


def _initial_phi(env: dict, p):
    return encode_process(p, env, supply=FreshSupply()).phi


# ---------------------------------------------------------------- operational correspondence


def check_forward_oc(env: dict, p, phi: dict | None = None,
                     states: int = OC_STATES) -> CaseOutcome:
    """Each source step is matched by one target step, or two for a label."""
    phi = phi if phi is not None else _initial_phi(env, p)
    stats = {"com": 0, "sel": 0}
    hit = False
    for item in _source_states(env, p, states):
        if item is None:
            hit = True
            break
        e, q, trace, steps = item
        if not steps:
            continue
        try:
            tq = _encode(q, e, phi)
            layers = _target_keys(tq, 2)
            for redex, r in steps:
                want = canon(_encode(r, advance_env(e, redex), phi))
                n = 2 if redex.kind == "sel" else 1
                if want not in layers[n - 1]:
                    return CaseOutcome(False, f"{redex.arrow()} from {render(q)} is not "
                                       f"matched in {n} target step(s)", trace + [redex.arrow()])
                stats[redex.kind] += 1
        except EncodeError as ex:
            return CaseOutcome(False, f"encoding failed: {ex}", trace)
    # the initial state is always checked in full; the cap only limits how
    # many further reachable states are sampled
    stats["truncated"] = int(hit)
    return CaseOutcome(True, stats=stats)


def check_reverse_oc(env: dict, p, phi: dict | None = None,
                     states: int = OC_STATES) -> CaseOutcome:
    """Each target step leads to an encoded reduct, directly or via a label handshake."""
    phi = phi if phi is not None else _initial_phi(env, p)
    stats = {"direct": 0, "intermediate": 0}
    hit = False
    for item in _source_states(env, p, states):
        if item is None:
            hit = True
            break
        e, q, trace, steps = item
        try:
            tq = _encode(q, e, phi)
            direct = {canon(_encode(r, advance_env(e, rx), phi)) for rx, r in steps}
            labelled = {canon(_encode(r, advance_env(e, rx), phi))
                        for rx, r in steps if rx.kind == "sel"}
        except EncodeError as ex:
            return CaseOutcome(False, f"encoding failed: {ex}", trace)
        for gx, t in reduce_generic(tq):
            if canon(t) in direct:
                stats["direct"] += 1
                continue
            if any(canon(t2) in labelled for _, t2 in reduce_generic(t)):
                stats["intermediate"] += 1
                continue
            return CaseOutcome(False, f"target step {gx.arrow()} from {render(tq)} has no "
                               f"source counterpart", trace)
    stats["truncated"] = int(hit)
    return CaseOutcome(True, stats=stats)


# ---------------------------------------------------------------- typing correspondence


def check_completeness(env: dict, p, variant: str = "literal") -> CaseOutcome:
    """``env ⊢ p`` implies ``[[env]] ▷ [[p]]`` with a linear ``[[env]]``."""
    try:
        enc = encode_process(p, env, supply=FreshSupply(), variant=variant)
    except EncodeError as ex:
        return CaseOutcome(False, f"encoding failed: {ex}")
    gamma = encode_env(env, enc.phi, variant=variant)
    lin = is_lin(gamma)
    if lin.verdict is not Verdict.TRUE:
        return CaseOutcome(False, f"encoded environment not linear: {lin.describe()}",
                           bound_hit=lin.bound_hit)
    res = typecheck_generic(gamma, enc.process, enc.annotations)
    if not res:
        return CaseOutcome(False, f"encoding not typable: {res.reason}")
    return CaseOutcome(True)


MUTATIONS = ("duplicate", "flip", "payload")


def mutate(p, how: str, k: int = 0):
    """A small edit of ``p`` aimed at breaking session typability."""
    sites = []

    def walk(q, rebuild):
        match q:
            case Par(l, r):
                walk(l, lambda x: rebuild(Par(x, r)))
                walk(r, lambda x: rebuild(Par(l, x)))
            case Res(names, body, ann):
                walk(body, lambda x: rebuild(Res(names, x, ann)))
            case Repl(body):
                walk(body, lambda x: rebuild(Repl(x)))
            case Out(subj, payload, cont):
                sites.append((q, rebuild))
                walk(cont, lambda x: rebuild(Out(subj, payload, x)))
            case In(subj, var, cont):
                sites.append((q, rebuild))
                walk(cont, lambda x: rebuild(In(subj, var, x)))
            case Branch(subj, branches):
                sites.append((q, rebuild))
                for i, (l, b) in enumerate(branches):
                    walk(b, lambda x, i=i: rebuild(Branch(
                        subj, branches[:i] + ((branches[i][0], x),) + branches[i + 1:])))
            case Select(subj, label, cont):
                sites.append((q, rebuild))
                walk(cont, lambda x: rebuild(Select(subj, label, x)))

    walk(p, lambda x: x)
    if not sites:
        return None
    q, rebuild = sites[k % len(sites)]
    match how:
        case "duplicate":
            return rebuild(Par(q, q))
        case "flip" if q.subj.pol.polarized:
            return rebuild(type(q)(q.subj.dual, *[getattr(q, f) for f in _fields(q)[1:]]))
        case "payload" if isinstance(q, Out) and q.payload is not None:
            other = Chan(q.subj.name, q.subj.pol) if not isinstance(q.payload, Chan) \
                else None
            if other is None:
                other = IntLit(0)
            return rebuild(Out(q.subj, other, q.cont))
    return None


def _fields(q):
    return list(q.__dataclass_fields__)


def check_soundness(p, candidates=None) -> CaseOutcome:
    """For a closed ``p`` without a session typing, no linear candidate types ``[[p]]``."""
    if is_typable({}, p):
        return CaseOutcome(True, "typable", excluded=True)
    try:
        enc = encode_process(p, {}, supply=FreshSupply(), variant="repaired")
    except (EncodeError, SessionTypeError) as ex:
        return CaseOutcome(True, f"not encodable: {ex}", excluded=True)
    for gamma in candidates or [PZero()]:
        if is_lin(gamma).verdict is not Verdict.TRUE:
            continue
        if typecheck_generic(gamma, enc.process, enc.annotations):
            return CaseOutcome(False, f"untypable {render(p)} has a generic typing")
    return CaseOutcome(True)


# ---------------------------------------------------------------- safety and preservation

# Per-case cap for the safety suites.  Dense interleavings of large encoded
# terms exceed it in well under 1% of generated cases; those are reported as
# bound hits and excluded, never counted as passes.
SAFETY_BOUND = ExplorationBound(max_depth=64, max_states=1000)


def check_fidelity(env: dict, p, bound: ExplorationBound | None = None) -> CaseOutcome:
    """No reachable session error."""
    bound = bound or SAFETY_BOUND
    reach = explore(p, reduce_session, bound.max_depth, bound.max_states)
    for q, trace in reach.states:
        err = session_error(q)
        if err:
            return CaseOutcome(False, err, trace)
    return CaseOutcome(True, bound_hit=reach.bound_hit, excluded=reach.bound_hit,
                       stats={"states": len(reach.states)})


def check_generic_safety(env: dict, p, bound: ExplorationBound | None = None,
                         variant: str = "repaired") -> CaseOutcome:
    """A linearly typed encoding reaches no generic error."""
    bound = bound or SAFETY_BOUND
    enc = encode_process(p, env, supply=FreshSupply(), variant=variant)
    gamma = encode_env(env, enc.phi, variant=variant)
    if not (is_lin(gamma) and typecheck_generic(gamma, enc.process, enc.annotations)):
        return CaseOutcome(True, "no linear typing", excluded=True)
    reach = explore(enc.process, reduce_generic, bound.max_depth, bound.max_states)
    for q, trace in reach.states:
        err = generic_error(q)
        if err:
            return CaseOutcome(False, err, trace)
    return CaseOutcome(True, bound_hit=reach.bound_hit, excluded=reach.bound_hit,
                       stats={"states": len(reach.states)})


def check_preservation(env: dict, p, states: int = 64) -> CaseOutcome:
    """Every reduct is typed by a balanced advanced environment."""
    hit = False
    for item in _source_states(env, p, states):
        if item is None:
            hit = True
            break
        e, q, trace, _ = item
        if not is_balanced(e) or not is_typable(e, q):
            return CaseOutcome(False, f"{render(q)} not typed under {render_env(e)}", trace)
    return CaseOutcome(True, bound_hit=hit)


# ---------------------------------------------------------------- substitution


def input_contexts(env: dict, p):
    """``(env, var, type, continuation)`` for each input of a session-typed channel."""
    out = []

    def go(q, e):
        match q:
            case Par(l, r):
                go(l, e)
                go(r, e)
            case Repl(body):
                go(body, e)
            case Res((x,), body, ann):
                inner = {c: s for c, s in e.items() if c.name != x}
                s = ann if ann is not None else End()
                inner[Chan(x, Pol.PLUS)] = s
                inner[Chan(x, Pol.MINUS)] = dual(s)
                go(body, inner)
            case Out(subj, payload, cont):
                go(cont, _adv(e, subj))
            case In(subj, var, cont):
                t = e.get(subj)
                e2 = {c: s for c, s in _adv(e, subj).items() if c.name != var}
                if isinstance(t, SIn) and var is not None:
                    e2[Chan(var)] = t.payload
                    if not isinstance(t.payload, Base):
                        out.append((e2, var, t.payload, cont))
                go(cont, e2)
            case Branch(subj, branches):
                t = e.get(subj)
                for l, b in branches:
                    e2 = dict(e)
                    if isinstance(t, SBranch) and t.get(l) is not None:
                        e2[subj] = t.get(l)
                    go(b, e2)
            case Select(subj, label, cont):
                t = e.get(subj)
                e2 = dict(e)
                if isinstance(t, SChoice) and t.get(label) is not None:
                    e2[subj] = t.get(label)
                go(cont, e2)

    go(annotate(env, p), dict(env))
    return out


def _adv(e, c):
    t = e.get(c)
    if isinstance(t, (SIn, SOut)):
        e = dict(e)
        e[c] = t.cont
    return e


def check_substitution(env: dict, var: str, stype, body, pol: Pol) -> CaseOutcome:
    """Encoding commutes with substituting ``x^pol`` for the variable ``var``."""
    taken = {c.name for c in env} | {c.name for c in free_names(body)}
    x = "x"
    while x in taken:
        x += "'"
    supply = FreshSupply()
    supply.avoid(taken | {x})
    phi = {}
    for c in sorted({c.name for c in free_names(body)} - {var}):
        if not isinstance(env.get(Chan(c)), Base):
            phi[c] = supply.fresh_pair(c)
    phi[x] = supply.fresh_pair(x)
    px, mx = phi[x]
    pair = (px, mx) if pol is not Pol.MINUS else (mx, px)
    rest = {c: s for c, s in env.items() if c.name != var}
    try:
        left = encode_process(subst_session(body, {var: Chan(x, pol)}),
                              {**rest, Chan(x, pol): stype}, phi,
                              supply=FreshSupply(), infer=True).process
        right = encode_process(body, {**rest, Chan(var): stype}, {**phi, var: pair},
                               supply=FreshSupply(), infer=True).process
    except EncodeError as ex:
        return CaseOutcome(False, f"encoding failed: {ex}")
    if not alpha_eq(left, right):
        return CaseOutcome(False, f"{render(left)} differs from {render(right)}")
    return CaseOutcome(True)


# ---------------------------------------------------------------- subtyping preservation


def check_subtyping_preservation(s1, s2, variant: str = "literal") -> CaseOutcome:
    """Records whether ``(|s1|) ⊑ (|s2|)``; the outcome is a verdict, not a pass."""
    if not subtype_session(s1, s2):
        return CaseOutcome(True, "not related", excluded=True)
    t1 = encode_tuple(s1, FreshSupply(), variant)
    t2 = encode_tuple(s2, FreshSupply(), variant)
    kept = payload_sub(t1, t2)
    return CaseOutcome(True, "preserved" if kept else "not preserved",
                       stats={"preserved": int(kept), "broken": int(not kept)})


# ---------------------------------------------------------------- minimisation


def minimize(p, still_fails, rounds: int = 100):
    """Greedy subterm deletion that keeps ``still_fails`` true."""
    for _ in range(rounds):
        for cand in _shrinks(p):
            try:
                if still_fails(cand):
                    p = cand
                    break
            except Exception:
                continue
        else:
            return p
    return p


def _shrinks(p):
    match p:
        case Par(l, r):
            yield l
            yield r
            for x in _shrinks(l):
                yield Par(x, r)
            for x in _shrinks(r):
                yield Par(l, x)
        case Res(names, body, ann):
            for x in _shrinks(body):
                yield Res(names, x, ann)
        case Repl(body):
            yield Nil()
            for x in _shrinks(body):
                yield Repl(x)
        case Out(subj, payload, cont):
            yield Nil()
            for x in _shrinks(cont):
                yield Out(subj, payload, x)
        case In(subj, var, cont):
            yield Nil()
            for x in _shrinks(cont):
                yield In(subj, var, x)
        case Select(subj, label, cont):
            yield Nil()
            for x in _shrinks(cont):
                yield Select(subj, label, x)
        case Branch(subj, branches):
            yield Nil()
            for i, (l, b) in enumerate(branches):
                for x in _shrinks(b):
                    yield Branch(subj, branches[:i] + ((l, x),) + branches[i + 1:])


# ---------------------------------------------------------------- suites

THEOREMS = ("foc", "roc", "compl", "sound", "fidelity", "safety", "subpres",
            "preservation", "subst")


SUBST_RESAMPLES = 50
RESAMPLE_STRIDE = 1_000_003


def run_suite(theorem: str, cases: int = 100, seed: int = 0,
              bound: ExplorationBound | None = None, choice_free: bool = False,
              variant: str = "literal", depth: int = 3, minimise: bool = True) -> CheckReport:
    """Run ``cases`` generated cases of ``theorem``; case ``i`` uses seed ``seed + i``."""
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}")
    report = CheckReport(theorem)
    start = time.perf_counter()
    if theorem == "subpres":
        from .oracle import related_pairs
        for i, (s1, s2) in enumerate(related_pairs(depth=min(depth, 2), seed=seed,
                                                   limit=cases)):
            report.add(seed + i, check_subtyping_preservation(s1, s2, variant))
        report.seconds = time.perf_counter() - start
        return report
    for i in range(cases):
        case_seed = seed + i
        cfg = GenConfig(seed=case_seed, max_depth=depth, choice_free=choice_free)
        env, p = gen_typed(cfg)
        for name, outcome, witness in _run_case(theorem, env, p, case_seed, bound, variant,
                                                  depth, choice_free):
            if not outcome.ok and not outcome.excluded and minimise:
                witness = _minimal_witness(theorem, env, p, bound, variant) or witness
            report.add(case_seed, outcome, witness)
    report.seconds = time.perf_counter() - start
    return report


def _run_case(theorem, env, p, case_seed, bound, variant, depth=3, choice_free=False):
    w = render(p)
    if theorem == "foc":
        yield theorem, check_forward_oc(env, p), w
    elif theorem == "roc":
        yield theorem, check_reverse_oc(env, p), w
    elif theorem == "compl":
        yield theorem, check_completeness(env, p, variant), w
    elif theorem == "fidelity":
        yield theorem, check_fidelity(env, p, bound), w
    elif theorem == "safety":
        yield theorem, check_generic_safety(env, p, bound), w
    elif theorem == "preservation":
        yield theorem, check_preservation(env, p), w
    elif theorem == "sound":
        closed = _close(env, p)
        how = MUTATIONS[case_seed % len(MUTATIONS)]
        m = mutate(closed, how, case_seed)
        if m is None:
            yield theorem, CaseOutcome(True, "no mutation site", excluded=True), w
        else:
            yield theorem, check_soundness(m), render(m)
    elif theorem == "subst":
        ctxs = input_contexts(env, p)
        # programs without a channel input say nothing here, so draw another
        retry = case_seed
        for _ in range(SUBST_RESAMPLES):
            if ctxs:
                break
            retry += RESAMPLE_STRIDE
            env, p = gen_typed(GenConfig(seed=retry, max_depth=depth, choice_free=choice_free))
            ctxs = input_contexts(env, p)
        if not ctxs:
            yield theorem, CaseOutcome(True, "no channel input", excluded=True), w
            return
        e, var, stype, body = ctxs[case_seed % len(ctxs)]
        pol = (Pol.PLUS, Pol.MINUS, Pol.NONE)[case_seed % 3]
        yield theorem, check_substitution(e, var, stype, body, pol), render(body)


def _close(env, p):
    """Restrict every free channel of ``p`` (the environment is balanced)."""
    done = set()
    for c, s in env.items():
        if c.name in done or c.pol is not Pol.PLUS:
            continue
        done.add(c.name)
        p = Res((c.name,), p, s)
    return p


def _minimal_witness(theorem, env, p, bound, variant) -> str | None:
    if theorem not in ("foc", "roc", "compl", "fidelity", "safety", "preservation"):
        return None

    def fails(q):
        if not is_typable(env, q):
            return False
        for _, outcome, _ in _run_case(theorem, env, q, 0, bound, variant):
            return not outcome.ok and not outcome.excluded
        return False

    return render(minimize(p, fails))


__all__ = [
    "CaseOutcome", "CheckReport", "Failure", "check_forward_oc", "check_reverse_oc",
    "check_completeness", "check_soundness", "check_fidelity", "check_generic_safety",
    "check_preservation", "check_substitution", "check_subtyping_preservation",
    "input_contexts", "minimize", "mutate", "run_suite", "THEOREMS",
]
