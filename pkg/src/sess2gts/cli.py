"""Command-line front end.

Program files hold one term.  A session program may start with a line
``env: c+:S, c-:T`` giving its typing environment, and a generic program
with ``gamma: G`` giving its process type.  ``#`` starts a comment.  ``-``
reads standard input.

Exit status: 0 for success or a true verdict, 1 for a violated property,
a type error or an inconclusive verdict, 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter

from .bounds import ExplorationBound, Verdict
from .encoder import VARIANTS, EncodeError, encode_env, encode_process
from .generic_dynamics import explore_generic, generic_error, reduce_generic
from .gts import is_lin, is_wf, subtype_generic, typecheck_generic
from .names import FreshSupply
from .parser import ParseError, parse
from .printer import dumps, render, render_env, render_ptype
from .session_dynamics import explore, reduce_session, session_error
from .session_types import SessionTypeError, subtype_session, typecheck_session
from .terms import PZero

KINDS = ("session-proc", "generic-proc", "session-type", "process-type", "type-env")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise UsageError(f"cannot read {path}: {ex.strerror}") from None


def _split_headers(text: str) -> tuple[dict, str]:
    headers, body = {}, []
    for line in text.splitlines():
        stripped = line.strip()
        key = stripped.split(":", 1)[0]
        if not body and key in ("env", "gamma") and ":" in stripped:
            headers[key] = stripped.split(":", 1)[1]
        else:
            body.append(line)
    return headers, "\n".join(body)


def _program(path: str):
    """``(kind, env or gamma, term)`` with the kind guessed from the text."""
    headers, body = _split_headers(_read(path))
    if "gamma" in headers:
        return "generic", parse("process-type", headers["gamma"]), parse("generic-proc", body)
    env = parse("type-env", headers["env"]) if "env" in headers else {}
    try:
        return "session", env, parse("session-proc", body)
    except ParseError as first:
        try:
            return "generic", PZero(), parse("generic-proc", body)
        except ParseError:
            raise first from None


def _bound(args) -> ExplorationBound:
    try:
        if args.bound:
            return ExplorationBound.parse(args.bound)
        return ExplorationBound.from_env()
    except ValueError as ex:
        raise UsageError(f"bad bound: {ex}") from None


def _annotations(path: str | None) -> dict:
    if not path:
        return {}
    try:
        raw = json.loads(_read(path))
    except json.JSONDecodeError as ex:
        raise UsageError(f"{path}: not JSON ({ex.msg})") from None
    return {tuple(k.split(",")): parse("process-type", v) for k, v in raw.items()}


def _dump_annotations(ann: dict) -> str:
    return json.dumps({",".join(k): render_ptype(v) for k, v in ann.items()},
                      indent=2, ensure_ascii=False)


def _pins(items) -> dict:
    out = {}
    for item in items or []:
        try:
            name, pair = item.split("=", 1)
            u, v = pair.split(",")
        except ValueError:
            raise UsageError(f"--phi expects x=u,v, got {item!r}") from None
        out[name.strip()] = (u.strip(), v.strip())
    return out


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    term = parse(args.kind, _read(args.file))
    print(dumps(term) if args.json else render(term))
    return 0


def cmd_check(args) -> int:
    kind, env, p = _program(args.file)
    if kind != "session":
        raise UsageError("check expects a session program (use gcheck for generic ones)")
    try:
        d = typecheck_session(env, p)
    except SessionTypeError as ex:
        print(f"type error ({ex.kind}): {ex}")
        return 1
    counts = Counter(d.rules())
    print(f"typed: {render_env(env)} |- {render(p)}")
    print("rules: " + ", ".join(f"{r} x{n}" for r, n in sorted(counts.items())))
    if args.derivation:
        print(d.to_text())
    return 0


def cmd_gcheck(args) -> int:
    kind, gamma, p = _program(args.file)
    if kind != "generic":
        raise UsageError("gcheck expects a generic program")
    if args.gamma:
        gamma = parse("process-type", args.gamma)
    res = typecheck_generic(gamma, p, _annotations(args.ann), _bound(args))
    if res:
        print(f"typed: {render_ptype(gamma)} |> {render(p)}")
        return 0
    print(f"not typable: {res.reason}")
    return 1


def cmd_encode(args) -> int:
    kind, env, p = _program(args.file)
    if kind != "session":
        raise UsageError("encode expects a session program")
    pins = _pins(args.phi)
    free = {c.name for c in env}
    phi = {x: pr for x, pr in pins.items() if x in free}
    bound_pins = {x: pr for x, pr in pins.items() if x not in free}
    try:
        res = encode_process(p, env, phi, supply=FreshSupply(), pins=bound_pins,
                             label_names=args.label_names, variant=args.variant)
    except EncodeError as ex:
        print(f"cannot encode: {ex}")
        return 1
    print(render(res.process))
    if env:
        gamma = encode_env(env, res.phi, variant=args.variant, label_names=args.label_names)
        print(f"gamma: {render_ptype(gamma)}")
    if args.ann_out:
        with open(args.ann_out, "w", encoding="utf-8") as fh:
            fh.write(_dump_annotations(res.annotations) + "\n")
    return 0


def _reducer(kind):
    return reduce_session if kind == "session" else reduce_generic


def cmd_reduce(args) -> int:
    kind, _, p = _program(args.file)
    print(render(p))
    for _ in range(args.steps):
        steps = _reducer(kind)(p)
        if not steps:
            print("(no further step)")
            break
        redex, p = steps[0]
        print(f"{redex.arrow()} {render(p)}")
    return 0


def cmd_trace(args) -> int:
    kind, _, p = _program(args.file)
    bound = _bound(args)
    if kind == "session":
        reach = explore(p, reduce_session, bound.max_depth, bound.max_states)
        detect = session_error
    else:
        reach = explore_generic(p, bound.max_depth, bound.max_states)
        detect = generic_error
    errors = 0
    for q, trace in reach.states:
        err = detect(q)
        mark = f"  ERROR: {err}" if err else ""
        errors += bool(err)
        print(" ".join(trace + [render(q)]) + mark)
    print(f"{len(reach.states)} states, {errors} errors"
          + (f", bound {bound} reached" if reach.bound_hit else ""))
    return 1 if errors else 0


def _verdict(outcome) -> int:
    print(outcome.describe())
    if outcome.verdict is Verdict.TRUE and outcome.reason:
        print(f"note: {outcome.reason}")
    return 0 if outcome.verdict is Verdict.TRUE else 1


def cmd_lin(args) -> int:
    return _verdict(is_lin(parse("process-type", _read(args.file)), _bound(args)))


def cmd_wf(args) -> int:
    return _verdict(is_wf(parse("process-type", _read(args.file)), _bound(args)))


def cmd_sub(args) -> int:
    if args.kind == "session":
        ok = subtype_session(parse("session-type", args.left), parse("session-type", args.right))
    else:
        ok = subtype_generic(parse("process-type", args.left), parse("process-type", args.right))
    print("true" if ok else "false")
    return 0 if ok else 1


def cmd_sim(args) -> int:
    from .harness.checks import run_suite
    # without an explicit bound each suite uses its own per-case default
    explicit = args.bound or os.environ.get("SESS2GTS_BOUND")
    report = run_suite(args.theorem, cases=args.cases, seed=args.seed,
                       bound=_bound(args) if explicit else None,
                       choice_free=args.choice_free, variant=args.variant, depth=args.depth)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    print(report.summary())
    for f in report.failures[:args.show]:
        print(f"  seed {f.seed}: {f.detail}")
        print(f"    witness: {f.witness}")
    return 0 if report.ok else 1


def cmd_fuzz(args) -> int:
    from .harness.generate import GenConfig, gen_typed
    for i in range(args.count):
        cfg = GenConfig(seed=args.seed + i, max_depth=args.depth, choice_free=args.choice_free)
        env, p = gen_typed(cfg)
        print(f"# seed {cfg.seed}")
        if env:
            print(f"env: {render_env(env)[1:-1]}")
        print(render(p))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sess2gts",
                                 description="Session processes, their encoding and checks.")
    ap.add_argument("--bound", help="exploration bound, e.g. depth=64,states=20000,unfold=2 "
                                    "(default: $SESS2GTS_BOUND)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a term")
    p.add_argument("file")
    p.add_argument("--kind", choices=KINDS, default="session-proc")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("check", help="session typecheck")
    p.add_argument("file")
    p.add_argument("--derivation", action="store_true", help="print the full derivation")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("gcheck", help="check a generic process against a process type")
    p.add_argument("file")
    p.add_argument("--gamma", help="process type (overrides the file header)")
    p.add_argument("--ann", help="JSON file mapping restricted name groups to types")
    p.set_defaults(run=cmd_gcheck)

    p = sub.add_parser("encode", help="translate a session program")
    p.add_argument("file")
    p.add_argument("--phi", action="append", metavar="x=u,v", help="pin a name translation")
    p.add_argument("--variant", choices=VARIANTS, default="literal",
                   help="label translation for types")
    p.add_argument("--label-names", action="store_true", help="use labels as label channels")
    p.add_argument("--ann-out", help="write restriction annotations (JSON) here")
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("reduce", help="follow the first reduction repeatedly")
    p.add_argument("file")
    p.add_argument("--steps", type=int, default=1)
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("trace", help="list reachable states and errors")
    p.add_argument("file")
    p.set_defaults(run=cmd_trace)

    for name, fn, what in (("lin", cmd_lin, "linearity"), ("wf", cmd_wf, "well-formedness")):
        p = sub.add_parser(name, help=f"{what} of a process type")
        p.add_argument("file")
        p.set_defaults(run=fn)

    p = sub.add_parser("sub", help="subtyping between two types")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--kind", choices=("session", "generic"), default="session")
    p.set_defaults(run=cmd_sub)

    from .harness.checks import THEOREMS
    p = sub.add_parser("sim", help="run a generated check suite")
    p.add_argument("--theorem", choices=THEOREMS, required=True)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--choice-free", action="store_true")
    p.add_argument("--variant", choices=VARIANTS, default="literal")
    p.add_argument("--json", action="store_true")
    p.add_argument("--show", type=int, default=5, help="failures to print")
    p.set_defaults(run=cmd_sim)

    p = sub.add_parser("fuzz", help="print generated typed programs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--choice-free", action="store_true")
    p.set_defaults(run=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0) and 2
    try:
        return args.run(args)
    except (UsageError, ParseError, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
