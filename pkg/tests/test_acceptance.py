"""The twelve acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict in ``CRITERIA``; the lines are printed
in the terminal summary whether the test passed or not.
"""

import time

from conftest import CLIENT, CRITERIA, SERVER_TYPE, SYSTEM, env, gp, pt, sp, st
from sess2gts.binding import alpha_eq
from sess2gts.bounds import Verdict
from sess2gts.encoder import encode_env, encode_process, encode_tuple
from sess2gts.generic_dynamics import generic_error
from sess2gts.gts import is_lin, payload_sub, typecheck_generic
from sess2gts.harness.checks import run_suite
from sess2gts.harness.oracle import RULES, compare_with_oracle
from sess2gts.printer import render, render_ptype
from sess2gts.session_types import is_typable, subtype_session, typecheck_session

CASES = 500
MAX_EXCLUDED = CASES // 100        # bound hits may exclude at most 1% of a corpus


def record(n, ok, detail):
    CRITERIA[n] = (bool(ok), detail)
    assert ok, detail


def test_worked_example_pipeline():
    start = time.perf_counter()
    p = sp(SYSTEM)
    typecheck_session({}, p)
    pins = {"z": ("v", "w"), "c": ("d", "e"), "x": ("t", "u")}
    got = encode_process(p, pins=pins, label_names=True).process
    client = encode_process(sp(CLIENT), env("c-: (+){service: !<int>.?<bool>.end, quit: end}"),
                            {"c": ("d", "e")}, label_names=True).process
    server = encode_process(sp("x >>{service: x?(i).x!<i==3>.0, quit: 0}"),
                            env(f"x: {SERVER_TYPE}"), {"x": ("t", "u")},
                            label_names=True).process
    display = gp(f"(new v,w)((new d,e)w!<d,e>.{render(client)} | w?(t,u).{render(server)})")
    seconds = time.perf_counter() - start
    ok = alpha_eq(got, display) and seconds < 1.0
    record(1, ok, f"system typed and encoded to the displayed target in {seconds:.3f}s")


def test_environment_encoding():
    g = encode_env(env("c+: ?<int>.!<bool>.end, c-: !<int>.?<bool>.end"), {"c": ("d", "e")})
    lin = is_lin(g)
    text = render_ptype(g)
    ok = (text == "d?<int>.e!<bool>.0 | d!<int>.e?<bool>.0"
          and lin.verdict is Verdict.TRUE and not lin.bound_hit)
    record(2, ok, f"{text}; LIN {lin.describe()} over {lin.states} states")


def test_linearity_witnesses():
    lin = is_lin(pt("u!<>.0 | u!<>.0"))
    err = generic_error(gp("x?(z1,z2).0 | x!<y>.0"))
    ok = lin.verdict is Verdict.FALSE and "u" in lin.reason and lin.witness \
        and err is not None and "arity" in err
    record(3, ok, f"LIN {lin.describe()}; detector: {err}")


def _suite(theorem, choice_free, variant="literal", **kw):
    report = run_suite(theorem, cases=CASES, seed=0, choice_free=choice_free,
                       variant=variant, minimise=False, **kw)
    corpus = "choice-free" if choice_free else "full"
    return report, f"{corpus} {report.summary()}"


def test_forward_choice_free():
    report, line = _suite("foc", True)
    ok = report.ok and report.passes == CASES and report.stats.get("sel", 0) == 0 \
        and report.seconds <= 60
    record(4, ok, line)


def test_forward_full():
    report, line = _suite("foc", False)
    # the check itself demands two target steps for every label step
    ok = report.ok and report.passes == CASES and report.stats.get("sel", 0) > 0
    record(5, ok, line)


def test_reverse_both_corpora():
    free, free_line = _suite("roc", True)
    full, full_line = _suite("roc", False)
    ok = free.ok and full.ok and free.passes == full.passes == CASES \
        and full.stats.get("intermediate", 0) > 0
    record(6, ok, f"{free_line} | {full_line}")


def test_completeness_choice_free():
    report, line = _suite("compl", True)
    record(7, report.ok and report.passes == CASES, line)


def test_converse_of_completeness_fails():
    bang = sp("!0")
    target = encode_process(bang).process
    typed = bool(typecheck_generic(pt("0"), target))
    source = is_typable(env("x+: end"), bang)
    record(8, typed and not source,
           f"0 |> {render(target)} is {typed}; x+:end |- !0 is {source}")


def test_subtyping_against_oracle():
    report = compare_with_oracle(depth=2)
    every_rule = all(report.per_rule[r][0] > 0 for r in RULES)
    s1, s2 = st("&{l1: end}"), st("&{l1: end, l2: end}")
    session_side = subtype_session(s1, s2)
    generic_side = payload_sub(encode_tuple(s1), encode_tuple(s2))
    ok = report.ok and every_rule and session_side and not generic_side
    record(9, ok, f"{report.summary()}; counterexample session {session_side}, "
                  f"generic {generic_side}")


def test_safety_suites():
    lines, ok = [], True
    for theorem, variant in (("fidelity", "literal"), ("safety", "repaired")):
        for choice_free in (True, False):
            report, line = _suite(theorem, choice_free, variant)
            ok = ok and not report.failures and report.excluded <= MAX_EXCLUDED \
                and report.passes + report.excluded == CASES
            lines.append(line)
    record(10, ok, " | ".join(lines))


def test_substitution_property():
    report, line = _suite("subst", False)
    record(11, report.ok and report.passes == CASES, line)


def test_branch_select_completeness_reported():
    verdicts = {}
    for variant in ("literal", "repaired"):
        first, _ = _suite("compl", False, variant)
        again, _ = _suite("compl", False, variant)
        same = [f.seed for f in first.failures] == [f.seed for f in again.failures]
        verdicts[variant] = (first, same)
    reproducible = all(same for _, same in verdicts.values())
    text = "; ".join(f"{v}: {r.passes}/{CASES} typable" for v, (r, _) in verdicts.items())
    record(12, reproducible, f"{text}; reruns identical: {reproducible}")

