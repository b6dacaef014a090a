"""Generators, correspondence checks, shrinking and suite reports."""

import pytest
from hypothesis import given, strategies as st_

from conftest import CLIENT, SERVER, SERVER_TYPE, SYSTEM, env, sp, st
from sess2gts.harness.checks import (
    MUTATIONS, check_completeness, check_fidelity, check_forward_oc, check_generic_safety,
    check_reverse_oc, check_soundness, check_subtyping_preservation, minimize, mutate,
    run_suite,
)
from sess2gts.harness.generate import GenConfig, gen_typed
from sess2gts.printer import render
from sess2gts.session_types import is_balanced, is_typable
from sess2gts.terms import Nil

BRANCH_ENV = env(f"x+: {SERVER_TYPE}, x-: (+){{service: !<int>.?<bool>.end, quit: end}}")
BRANCH_PROC = f"{SERVER} | {CLIENT.replace('c-', 'x-')}"
PSI_ENV = env("c+: ?<int>.!<bool>.end, c-: !<int>.?<bool>.end")
PSI_PROC = "c+?(i).c+!<i==3>.0 | c-!<3>.c-?(b).0"


class TestGenerate:
    def test_depth_zero(self):
        assert gen_typed(GenConfig(seed=5, max_depth=0)) == ({}, Nil())

    def test_choice_free_seed(self):
        e, p = gen_typed(GenConfig(seed=1, choice_free=True))
        assert is_typable(e, p)
        assert " >>" not in render(p) and " <<" not in render(p)

    def test_same_seed_same_program(self):
        assert gen_typed(GenConfig(seed=9)) == gen_typed(GenConfig(seed=9))

    def test_bad_config(self):
        with pytest.raises(ValueError):
            GenConfig(restrict_prob=2.0)


@given(st_.integers(0, 1_000_000))
def test_generated_environments_balanced(seed):
    e, _ = gen_typed(GenConfig(seed=seed))
    assert is_balanced(e)


class TestCorrespondence:
    def test_system_forward(self):
        out = check_forward_oc({}, sp(SYSTEM))
        assert out.ok and out.stats["com"] >= 1 and out.stats["sel"] == 1

    def test_branch_needs_two_target_steps(self):
        out = check_forward_oc(BRANCH_ENV, sp(BRANCH_PROC))
        assert out.ok and out.stats["sel"] == 1

    def test_nil_vacuous(self):
        out = check_forward_oc({}, sp("0"))
        assert out.ok and out.stats["com"] == out.stats["sel"] == 0

    def test_system_reverse(self):
        out = check_reverse_oc({}, sp(SYSTEM))
        assert out.ok and out.stats["intermediate"] == 1

    def test_stuck_source_has_no_target_step(self):
        assert check_reverse_oc({}, sp("0")).ok


@given(st_.integers(0, 100_000), st_.booleans())
def test_correspondence_on_generated(seed, choice_free):
    e, p = gen_typed(GenConfig(seed=seed, choice_free=choice_free))
    forward, reverse = check_forward_oc(e, p), check_reverse_oc(e, p)
    assert forward.ok, forward.detail
    assert reverse.ok, reverse.detail


@pytest.mark.parametrize("seed,choice_free", [(1346, False), (2285, True)])
def test_correspondence_on_tied_names(seed, choice_free):
    # reducts whose canonical forms once depended on how names were spelled
    e, p = gen_typed(GenConfig(seed=seed, choice_free=choice_free))
    assert check_forward_oc(e, p).ok and check_reverse_oc(e, p).ok


class TestCompleteness:
    def test_worked_example(self):
        assert check_completeness(PSI_ENV, sp(PSI_PROC)).ok

    def test_branching_system_repaired(self):
        assert check_completeness({}, sp(SYSTEM), "repaired").ok

    def test_branching_system_literal(self):
        out = check_completeness({}, sp(SYSTEM), "literal")
        assert not out.ok and "payload mismatch" in out.detail


class TestSafety:
    def test_system_fidelity(self):
        assert check_fidelity({}, sp(SYSTEM)).ok

    def test_system_generic_safety(self):
        out = check_generic_safety({}, sp(SYSTEM))
        assert out.ok and not out.excluded


class TestSoundness:
    def test_mutations_change_program(self):
        _, p = gen_typed(GenConfig(seed=12))
        for how in MUTATIONS:
            m = mutate(p, how, 0)
            if m is not None:
                assert m != p

    def test_duplicated_endpoint(self):
        assert check_soundness(sp("(new x:!<int>.end)(x+!<1>.0 | x+!<1>.0)")).ok


class TestSubtypingPreservation:
    def test_branch_pair_broken(self):
        out = check_subtyping_preservation(st("&{l1: end}"), st("&{l1: end, l2: end}"))
        assert out.detail == "not preserved"

    def test_reflexive_kept(self):
        s = st("?<&{a: end}>.end")
        assert check_subtyping_preservation(s, s).detail == "preserved"


def test_minimize_keeps_property():
    smaller = minimize(sp(SYSTEM), lambda q: "z" in render(q))
    assert "z" in render(smaller)
    assert len(render(smaller)) < len(SYSTEM)


class TestSuites:
    def test_report_counts(self):
        report = run_suite("foc", cases=5, seed=0, choice_free=True)
        assert report.cases == 5 and report.ok
        assert report.to_dict()["passes"] == 5

    def test_substitution_suite_draws_inputs(self):
        report = run_suite("subst", cases=10, seed=0)
        assert report.ok and report.excluded == 0

    def test_unknown_theorem(self):
        with pytest.raises(ValueError):
            run_suite("nope")
