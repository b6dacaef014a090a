"""Generic processes and process types: reduction, errors, subtyping, WF, LIN, typing."""

import pytest
from hypothesis import given, strategies as st_

from conftest import SYSTEM, gp, pt, sp, st
from sess2gts.bounds import ExplorationBound, Verdict
from sess2gts.encoder import encode_process, encode_tuple
from sess2gts.generic_dynamics import explore_generic, generic_error, reduce_generic
from sess2gts.gts import (
    equiv_generic, is_lin, is_null, is_wf, payload_sub, subtype_generic, type_reduce,
    typecheck_generic,
)
from sess2gts.harness.generate import gen_session_type
from sess2gts.printer import render_payload, render_ptype
from sess2gts.structural import struct_eq

PSI = "d?<int>.e!<bool>.0 | d!<int>.e?<bool>.0"
PINS = {"z": ("v", "w"), "c": ("d", "e")}


def encoded_system(variant="literal"):
    return encode_process(sp(SYSTEM), pins=PINS, label_names=True, variant=variant)


class TestReduce:
    def test_system_first_on_w_then_on_e(self):
        [(first, after)] = reduce_generic(encoded_system().process)
        assert first.subject == "w"
        assert [r.subject for r, _ in reduce_generic(after)] == ["e"]

    def test_sum_resolves_one_summand(self):
        [(_, reduct)] = reduce_generic(gp("(l1?().a!<>.0 + l2?().b!<>.0) | l1!<>.c!<>.0"))
        assert struct_eq(reduct, gp("a!<>.0 | c!<>.0"))

    def test_nil(self):
        assert reduce_generic(gp("0")) == []

    def test_polyadic_substitution(self):
        [(_, reduct)] = reduce_generic(gp("x!<a,b>.0 | x?(p,q).p!<q>.0"))
        assert struct_eq(reduct, gp("a!<b>.0"))


class TestErrors:
    def test_arity_mismatch(self):
        assert "arity" in generic_error(gp("x?(z1,z2).0 | x!<y>.0"))

    def test_race(self):
        assert generic_error(gp("u!<>.0 | u!<>.0")) is not None

    def test_encoded_system_never_errs(self):
        reach = explore_generic(encoded_system().process, 8, 1000)
        assert not reach.bound_hit
        assert all(generic_error(q) is None for q, _ in reach.states)


class TestSubtyping:
    def test_nil_unit(self):
        assert subtype_generic(pt("0"), pt("0 | 0"))
        assert subtype_generic(pt("0 | 0"), pt("0"))

    def test_output_continuation_covariant(self):
        assert subtype_generic(pt("x!<int>.(a!<>.0 & b!<>.0)"), pt("x!<int>.a!<>.0"))

    def test_internal_choice_axiom(self):
        assert subtype_generic(pt("a!<>.0 & b!<>.0"), pt("a!<>.0"))
        assert not subtype_generic(pt("a!<>.0"), pt("a!<>.0 & b!<>.0"))

    def test_sum_needs_same_summands(self):
        assert not subtype_generic(pt("a?<>.0 + b?<>.0"), pt("a?<>.0"))

    def test_replication_unfolds(self):
        assert subtype_generic(pt("*(x!<int>.0)"), pt("*(x!<int>.0) | x!<int>.0"))

    def test_encoded_branch_types_unrelated(self):
        small, big = encode_tuple(st("&{l1: end}")), encode_tuple(st("&{l1: end, l2: end}"))
        assert not payload_sub(small, big)
        assert not payload_sub(big, small)


@given(st_.integers(0, 100_000), st_.integers(0, 3))
def test_encoded_type_self_related(seed, depth):
    t = encode_tuple(gen_session_type(seed, depth))
    assert payload_sub(t, t)


@given(st_.integers(0, 100_000), st_.integers(0, 2))
def test_parallel_order_irrelevant(seed, depth):
    body = encode_tuple(gen_session_type(seed, depth))
    g1 = pt(f"x!<{render_payload(body)}>.0 | y?<bool>.0")
    g2 = pt(f"y?<bool>.0 | x!<{render_payload(body)}>.0")
    assert equiv_generic(g1, g2)


class TestTypeReduce:
    def test_env_of_worked_example(self):
        [g] = type_reduce(pt(PSI))
        assert equiv_generic(g, pt("e!<bool>.0 | e?<bool>.0"))

    def test_choice_commits_both_ways(self):
        got = {render_ptype(g) for g in type_reduce(pt("(a!<>.0 & b!<>.0) | c?<>.0"))}
        assert got == {"a!<>.0 | c?<>.0", "b!<>.0 | c?<>.0"}

    def test_nil(self):
        assert type_reduce(pt("0")) == []


class TestPredicates:
    @pytest.mark.parametrize("text", ["0", "*0", "0 | 0", "tau.0"])
    def test_null(self, text):
        assert is_null(pt(text))

    def test_prefix_not_null(self):
        assert not is_null(pt("x!<int>.0"))

    def test_wf_worked_example(self):
        out = is_wf(pt(PSI))
        assert out.verdict is Verdict.TRUE and not out.bound_hit

    def test_wf_payload_mismatch(self):
        out = is_wf(pt("x!<(u,v)0>.0 | x?<int>.0"))
        assert out.verdict is Verdict.FALSE
        assert "payload" in out.reason

    def test_wf_replicated_reports_unfold(self):
        out = is_wf(pt("*(x!<int>.0) | x?<int>.0"))
        assert out.verdict is Verdict.TRUE
        assert "unfolded" in out.reason

    def test_lin_worked_example(self):
        out = is_lin(pt(PSI))
        assert out.verdict is Verdict.TRUE and not out.bound_hit

    def test_lin_race(self):
        out = is_lin(pt("u!<>.0 | u!<>.0"))
        assert out.verdict is Verdict.FALSE
        assert out.witness and "u" in out.reason

    def test_lin_nil(self):
        assert is_lin(pt("0")).verdict is Verdict.TRUE

    def test_lin_replicated_output(self):
        assert is_lin(pt("*(x!<int>.0) | x?<int>.0")).verdict is Verdict.FALSE

    def test_tiny_bound_is_unknown(self):
        g = pt("*(x!<int>.0) | *(x?<int>.0)")
        out = is_lin(g, ExplorationBound(max_states=1))
        assert out.verdict in (Verdict.UNKNOWN, Verdict.FALSE)


class TestTypecheck:
    def test_replicated_nil(self):
        assert typecheck_generic(pt("0"), gp("!0"))

    def test_race_typed_but_not_linear(self):
        g = pt("u!<>.0 | u!<>.0")
        assert typecheck_generic(g, gp("u!<>.0 | u!<>.0"))
        assert is_lin(g).verdict is Verdict.FALSE

    def test_worked_example_body(self):
        assert typecheck_generic(pt(PSI), gp("d?(i).e!<i==3>.0 | d!<3>.e?(b).0"))

    def test_missing_output(self):
        res = typecheck_generic(pt("0"), gp("u!<>.0"))
        assert not res and "u" in res.reason

    def test_encoded_system_repaired_types(self):
        enc = encoded_system("repaired")
        assert typecheck_generic(pt("0"), enc.process, enc.annotations)

    def test_encoded_system_literal_labels_clash(self):
        enc = encoded_system("literal")
        res = typecheck_generic(pt("0"), enc.process, enc.annotations)
        assert not res and "payload mismatch" in res.reason
