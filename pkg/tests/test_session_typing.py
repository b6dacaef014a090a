"""Duality, environments, subtyping and the session typechecker."""

import pytest
from hypothesis import given, strategies as st_

from conftest import SERVER, SERVER_TYPE, SYSTEM, env, sp, st
from sess2gts.harness.checks import check_preservation
from sess2gts.harness.generate import GenConfig, gen_session_type, gen_typed
from sess2gts.harness.oracle import compare_with_oracle
from sess2gts.names import Pol
from sess2gts.session_dynamics import reduce_session
from sess2gts.session_types import (
    EnvError, SessionTypeError, advance_env, dual, env_advance, env_extend, env_plus,
    is_balanced, subtype_session, typecheck_session,
)
from sess2gts.terms import Chan, End

XP, XM, X = Chan("x", Pol.PLUS), Chan("x", Pol.MINUS), Chan("x")


class TestDual:
    def test_server_protocol(self):
        assert dual(st(SERVER_TYPE)) == st("(+){service: !<int>.?<bool>.end, quit: end}")

    def test_payload_kept(self):
        assert dual(st("!<?<int>.end>.end")) == st("?<?<int>.end>.end")


@given(st_.integers(0, 100_000), st_.integers(0, 5))
def test_dual_involution(seed, depth):
    s = gen_session_type(seed, depth)
    assert dual(dual(s)) == s


@given(st_.integers(0, 100_000), st_.integers(0, 4))
def test_subtyping_reflexive(seed, depth):
    s = gen_session_type(seed, depth)
    assert subtype_session(s, s)


@given(st_.integers(0, 100_000), st_.integers(0, 3))
def test_subtyping_flips_with_dual(seed, depth):
    rng_seed = seed * 7 + 1
    a, b = gen_session_type(seed, depth), gen_session_type(rng_seed, depth)
    assert subtype_session(a, b) == subtype_session(dual(b), dual(a))


class TestEnvironments:
    def test_plus_rejects_mixed_use(self):
        assert env_plus({XP: End()}, X, End()) is None

    def test_plus_into_empty(self):
        s = st("!<int>.end")
        assert env_plus({}, XP, s) == {XP: s}

    def test_extend_absorbs_same_binding(self):
        e = {XP: End()}
        assert env_extend(e, XP, End()) == e

    def test_balanced(self):
        assert is_balanced(env("c+: ?<int>.!<bool>.end, c-: !<int>.?<bool>.end"))
        assert not is_balanced(env("c+: end, c-: ?<int>.end"))
        assert is_balanced({})

    def test_advance(self):
        e = {XP: st(SERVER_TYPE)}
        assert env_advance(e, XP, "service") == {XP: st("?<int>.!<bool>.end")}

    def test_advance_missing_label(self):
        with pytest.raises(EnvError):
            env_advance({XP: st(SERVER_TYPE)}, XP, "nope")

    def test_advance_both_ends_stays_balanced(self):
        e = {XP: st(SERVER_TYPE), XM: dual(st(SERVER_TYPE))}
        assert is_balanced(env_advance(env_advance(e, XP, "quit"), XM, "quit"))


class TestSubtyping:
    def test_more_branches_offered(self):
        assert subtype_session(st("&{l1: end}"), st("&{l1: end, l2: end}"))

    def test_fewer_choices(self):
        assert subtype_session(st("(+){l1: end, l2: end}"), st("(+){l1: end}"))
        assert not subtype_session(st("(+){l1: end}"), st("(+){l1: end, l2: end}"))

    def test_output_contravariant(self):
        assert subtype_session(st("!<&{l1: end, l2: end}>.end"), st("!<&{l1: end}>.end"))
        assert not subtype_session(st("!<&{l1: end}>.end"), st("!<&{l1: end, l2: end}>.end"))

    def test_base_sorts_fixed(self):
        assert not subtype_session(st("?<int>.end"), st("?<bool>.end"))

    def test_agrees_with_oracle_depth_one(self):
        report = compare_with_oracle(depth=1)
        assert report.ok, report.mismatches[:3]


class TestTypecheck:
    def test_system(self):
        d = typecheck_session({}, sp(SYSTEM))
        assert {"T-Res", "T-Out", "T-In", "T-Offer", "T-Select"} <= set(d.rules())

    def test_server_alone(self):
        typecheck_session(env(f"x+: {SERVER_TYPE}"), sp(SERVER))

    def test_nil(self):
        assert typecheck_session({}, sp("0")).rule == "T-Nil"

    def test_replicated_nil_needs_unlimited_env(self):
        with pytest.raises(SessionTypeError) as ex:
            typecheck_session(env("x+: end"), sp("!0"))
        assert ex.value.kind == "not-unlimited"

    def test_unused_channel_skips_replication(self):
        assert typecheck_session({}, sp("(new d:end)(!0 | 0)")).rule == "T-Res"

    def test_parallel_same_endpoint(self):
        with pytest.raises(SessionTypeError) as ex:
            typecheck_session({}, sp("(new x:!<int>.end)(x+!<1>.0 | x+!<1>.0)"))
        assert ex.value.kind == "polarity-clash"

    def test_wrong_payload_sort(self):
        with pytest.raises(SessionTypeError) as ex:
            typecheck_session(env("x+: !<int>.end, x-: ?<int>.end"), sp("x+!<true>.0 | x-?(i).0"))
        assert ex.value.kind == "protocol-mismatch"

    def test_derivation_text(self):
        text = typecheck_session({}, sp("0")).to_text()
        assert text.startswith("T-Nil")


@given(st_.integers(0, 100_000), st_.booleans())
def test_generated_programs_typed_and_balanced(seed, choice_free):
    e, p = gen_typed(GenConfig(seed=seed, choice_free=choice_free))
    assert is_balanced(e)
    typecheck_session(e, p)


@given(st_.integers(0, 100_000))
def test_preservation(seed):
    e, p = gen_typed(GenConfig(seed=seed))
    outcome = check_preservation(e, p, states=16)
    assert outcome.ok, outcome.detail


def test_advance_env_follows_selection():
    p = sp(f"{SERVER} | x- <<quit.0")
    e = env(f"x+: {SERVER_TYPE}, x-: {'(+){service: !<int>.?<bool>.end, quit: end}'}")
    [(redex, _)] = reduce_session(p)
    assert advance_env(e, redex) == {XP: End(), XM: End()}
