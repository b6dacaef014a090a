"""Name translations, process and type encodings, and the substitution property."""

import pytest
from hypothesis import given, strategies as st_

from conftest import CLIENT, SERVER, SERVER_TYPE, SYSTEM, env, gp, pt, sp, st
from sess2gts.binding import alpha_eq, free_names
from sess2gts.bounds import Verdict
from sess2gts.encoder import (
    EncodeError, encode_env, encode_process, encode_tuple, in_name, out_name, phi_extend,
    sent_pair,
)
from sess2gts.gts import is_lin, is_wf
from sess2gts.harness.checks import check_substitution, input_contexts
from sess2gts.harness.generate import GenConfig, gen_typed
from sess2gts.names import FreshSupply, Pol
from sess2gts.printer import render, render_payload
from sess2gts.terms import Chan

PHI = {"x": ("t", "u")}


class TestPhi:
    def test_pinned_pair(self):
        assert phi_extend({}, "z", FreshSupply(), ("v", "w")) == {"z": ("v", "w")}

    def test_twice_rejected(self):
        phi = phi_extend({}, "z", FreshSupply())
        with pytest.raises(EncodeError):
            phi_extend(phi, "z", FreshSupply())

    def test_clashing_images_rejected(self):
        with pytest.raises(EncodeError):
            phi_extend({"a": ("v", "w")}, "b", FreshSupply(), ("w", "k"))

    def test_images_disjoint(self):
        supply, phi = FreshSupply(), {}
        for i in range(1000):
            phi = phi_extend(phi, f"x{i}", supply)
        images = [n for pair in phi.values() for n in pair]
        assert len(images) == len(set(images)) == 2000

    def test_directions(self):
        plus, minus = Chan("x", Pol.PLUS), Chan("x", Pol.MINUS)
        assert (in_name(PHI, plus), out_name(PHI, plus)) == ("t", "u")
        assert (in_name(PHI, minus), out_name(PHI, minus)) == ("u", "t")
        assert sent_pair(PHI, minus) == ("u", "t")


class TestProcesses:
    def test_server(self):
        got = encode_process(sp(SERVER), env(f"x+: {SERVER_TYPE}"), PHI, label_names=True)
        want = gp("(new service,quit)u!<service,quit>."
                  "(service?().t?(i).u!<i==3>.0 + quit?().0)")
        assert alpha_eq(got.process, want)

    def test_client_select_reads_label_list(self):
        e = env("c-: (+){service: !<int>.?<bool>.end, quit: end}")
        got = encode_process(sp(CLIENT), e, {"c": ("d", "e")})
        want = gp("e?(l1,l2).l1!<>.d!<3>.e?(b).0")
        assert alpha_eq(got.process, want)

    def test_system_pinned(self):
        pins = {"z": ("v", "w"), "c": ("d", "e"), "x": ("t", "u")}
        got = encode_process(sp(SYSTEM), pins=pins, label_names=True)
        assert render(got.process) == (
            "(new v,w)((new d,e)w!<d,e>.e?(service,quit).service!<>.d!<3>.e?(b).0"
            " | w?(t,u).(new service,quit)u!<service,quit>."
            "(service?().t?(i).u!<i==3>.0 + quit?().0))")

    def test_free_names_within_images(self):
        e, p = gen_typed(GenConfig(seed=3))
        res = encode_process(p, e)
        images = {n for pair in res.phi.values() for n in pair}
        assert free_names(res.process) <= images

    def test_unknown_label_rejected(self):
        with pytest.raises(EncodeError):
            encode_process(sp("x+ <<nope.0"), env("x+: (+){l: end}"), PHI)


class TestTypes:
    def test_input_of_base(self):
        got = render_payload(encode_tuple(st("?<int>.end")))
        assert alpha_eq(pt(f"k!<{got}>.0"), pt("k!<(u,v)u?<int>.0>.0"))

    def test_branch_literal(self):
        got = render_payload(encode_tuple(st("&{l1: end}")))
        assert alpha_eq(pt(f"k!<{got}>.0"), pt("k!<(u,v)v!<(l1)l1?<(p,q)0>.0>.0>.0"))

    def test_branch_repaired(self):
        got = render_payload(encode_tuple(st("&{l1: end}"), variant="repaired"))
        assert alpha_eq(pt(f"k!<{got}>.0"), pt("k!<(u,v)v!<[l1]>.l1?<>.0>.0"))

    def test_worked_environment(self):
        g = encode_env(env("c+: ?<int>.!<bool>.end, c-: !<int>.?<bool>.end"),
                       {"c": ("d", "e")})
        assert alpha_eq(g, pt("d?<int>.e!<bool>.0 | d!<int>.e?<bool>.0"))
        assert is_lin(g).verdict is Verdict.TRUE

    def test_branch_pair_repaired_well_formed(self):
        g = encode_env(env("x+: &{l: end}, x-: (+){l: end}"), PHI, variant="repaired")
        assert is_wf(g).verdict is Verdict.TRUE
        assert is_lin(g).verdict is Verdict.TRUE

    def test_branch_pair_literal_not_well_formed(self):
        g = encode_env(env("x+: &{l: end}, x-: (+){l: end}"), PHI)
        assert is_wf(g).verdict is Verdict.FALSE


@given(st_.integers(0, 100_000), st_.integers(0, 2))
def test_substitution_commutes(seed, pick):
    e, p = gen_typed(GenConfig(seed=seed))
    ctxs = input_contexts(e, p)
    if not ctxs:
        return
    e2, var, stype, body = ctxs[pick % len(ctxs)]
    pol = (Pol.PLUS, Pol.MINUS, Pol.NONE)[pick]
    outcome = check_substitution(e2, var, stype, body, pol)
    assert outcome.ok, outcome.detail


@given(st_.integers(0, 100_000))
def test_encoding_deterministic_up_to_alpha(seed):
    e, p = gen_typed(GenConfig(seed=seed))
    first = encode_process(p, e, supply=FreshSupply())
    again = encode_process(p, e, dict(first.phi), supply=FreshSupply(10_000))
    assert alpha_eq(first.process, again.process)
