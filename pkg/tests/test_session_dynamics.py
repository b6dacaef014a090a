"""Substitution, structural congruence, reduction and errors of session processes."""

from hypothesis import given, strategies as st_

from conftest import CLIENT, SERVER, SYSTEM, gp, sp
from sess2gts.binding import alpha_eq, free_names
from sess2gts.bounds import Verdict
from sess2gts.harness.generate import GenConfig, gen_typed
from sess2gts.names import Pol
from sess2gts.printer import render
from sess2gts.session_dynamics import explore, reduce_session, session_error, substitute
from sess2gts.structural import canon, prenex, struct_eq, struct_leq
from sess2gts.terms import Chan, Par

CPLUS = Chan("c", Pol.PLUS)


class TestSubstitute:
    def test_output_subject(self):
        assert render(substitute(sp("x!<3>.0"), CPLUS, "x")) == "c+!<3>.0"

    def test_bound_variable_untouched(self):
        assert render(substitute(sp("x?(z).z!<>.0"), CPLUS, "x")) == "c+?(z).z!<>.0"

    def test_server_instance(self):
        generic = sp("x >>{service: x?(i).x!<i==3>.0, quit: 0}")
        assert alpha_eq(substitute(generic, CPLUS, "x"), sp(SERVER.replace("x+", "c+")))

    def test_shadowing_input(self):
        p = substitute(sp("y!<1>.x?(y).y!<2>.0"), CPLUS, "y")
        assert render(p) == "c+!<1>.x?(y).y!<2>.0"


class TestStructural:
    def test_replicated_nil_is_nil(self):
        assert struct_leq(sp("!0"), sp("0")) is Verdict.TRUE
        assert struct_leq(sp("0"), sp("!0")) is Verdict.TRUE

    def test_replication_unfolds_one_way(self):
        bang = sp("!(a+!<1>.0)")
        unfolded = sp("!(a+!<1>.0) | a+!<1>.0")
        assert struct_leq(bang, unfolded) is Verdict.TRUE
        assert struct_leq(unfolded, bang) is Verdict.FALSE

    def test_nil_unit(self):
        p = sp("a+!<1>.0")
        assert struct_eq(Par(p, sp("0")), p)

    def test_scope_extrusion(self):
        assert struct_eq(sp("(new a)(a+!<1>.0) | b+!<2>.0"),
                         sp("(new a)(a+!<1>.0 | b+!<2>.0)"))

    def test_scope_not_split(self):
        assert not struct_eq(sp("(new a)(a+!<1>.0 | a-?(i).0)"),
                             sp("(new a)a+!<1>.0 | (new a)a-?(i).0"))

    def test_inner_order_follows_outer_names(self):
        # the last two threads tie until the outer names are told apart
        body = ("(v{1}?(b).(new a)u{1}!<a>.a?().0 | v{0}?(b).b!<>.(new a)u{0}!<a>.a?().0"
                " | {2}v{0}!<b>.b?().v{1}!<true>.(u{1}?(a).a!<>.0 | u{0}?(a).a!<>.0))")
        left = "(new u3,v3)(new u19,v19)" + body.format(3, 19, "(new b)")
        right = "(new b)(new u15,v15)(new u31,v31)" + body.format(15, 31, "")
        assert struct_eq(gp(left), gp(right))

    def test_prenex_lifts_restrictions(self):
        assert render(prenex(sp("a+!<1>.0 | (new b)b+!<2>.0"))).startswith("(new b)")


@given(st_.integers(0, 5000))
def test_parallel_commutes(seed):
    _, p = gen_typed(GenConfig(seed=seed))
    q = sp("(new k)(k+!<1>.0 | k-?(i).0)")
    assert canon(Par(p, q)) == canon(Par(q, p))


class TestReduce:
    def test_system_first_step(self):
        steps = reduce_session(sp(SYSTEM))
        assert len(steps) == 1
        redex, reduct = steps[0]
        assert (redex.kind, redex.subject) == ("com", "z")
        want = sp(f"(new z)(new c)({CLIENT} | {SERVER.replace('x+', 'c+')})")
        assert struct_eq(reduct, want)

    def test_nil_is_stuck(self):
        assert reduce_session(sp("0")) == []

    def test_branch_select(self):
        [(redex, reduct)] = reduce_session(sp("x+ >>{l: a+!<1>.0} | x- <<l.b+!<2>.0"))
        assert (redex.kind, redex.label) == ("sel", "l")
        assert struct_eq(reduct, sp("a+!<1>.0 | b+!<2>.0"))

    def test_same_polarity_never_synchronises(self):
        assert reduce_session(sp("x+ >>{l: 0} | x+ <<l.0")) == []
        assert reduce_session(sp("x+!<1>.0 | x+?(i).0")) == []

    def test_value_evaluated(self):
        [(_, reduct)] = reduce_session(sp("x+!<4==4>.0 | x-?(b).y+!<b>.0"))
        assert struct_eq(reduct, sp("y+!<true>.0"))

    def test_replicated_session_runs(self):
        p = sp("!(new r)(r+!<1>.0 | r-?(i).0)")
        assert len(reduce_session(p)) >= 1


class TestErrors:
    def test_missing_label(self):
        assert session_error(sp("x+ >>{l1: 0} | x- <<l2.0")) is not None

    def test_system_safe_everywhere(self):
        reach = explore(sp(SYSTEM), reduce_session, 8, 1000)
        assert not reach.bound_hit
        assert all(session_error(q) is None for q, _ in reach.states)

    def test_nil(self):
        assert session_error(sp("0")) is None


@given(st_.integers(0, 5000))
def test_reduction_adds_no_free_names(seed):
    _, p = gen_typed(GenConfig(seed=seed))
    before = {c.name for c in free_names(p)}
    for _, q in reduce_session(p):
        assert {c.name for c in free_names(q)} <= before
