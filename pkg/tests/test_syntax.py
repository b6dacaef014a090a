"""Parsing, printing, free names and alpha-equivalence."""

import pytest
from hypothesis import given, strategies as st_

from conftest import SERVER, SYSTEM, gp, pt, sp, st
from sess2gts.binding import alpha_eq, free_names
from sess2gts.encoder import encode_process
from sess2gts.harness.generate import GenConfig, gen_session_type, gen_typed
from sess2gts.names import FreshSupply, Pol
from sess2gts.parser import ParseError, parse
from sess2gts.printer import dumps, render, render_ptype, render_stype
from sess2gts.terms import Branch, Chan, Eq, In, Nil, Out, SIn, Base, End


class TestParse:
    def test_service_body(self):
        x = Chan("x", Pol.PLUS)
        assert sp("x+?(i).x+!<i==3>.0") == In(x, "i", Out(x, Eq("i", 3), Nil()))

    def test_nil(self):
        assert sp("0") == Nil()

    def test_duplicate_label_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            sp("(new z)(x >>{l:0, l:0})")

    def test_error_position(self):
        with pytest.raises(ParseError) as ex:
            sp("x+!<.0")
        assert (ex.value.line, ex.value.col) == (1, 5)

    def test_comments_ignored(self):
        assert sp("# a comment\n0  # trailing") == Nil()

    def test_session_type(self):
        assert st("?<int>.end") == SIn(Base("int"), End())

    def test_unguarded_summand_rejected(self):
        with pytest.raises(ParseError, match="guarded"):
            pt("(a!<>.0 & b!<>.0) + c?<>.0")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            parse("nonsense", "0")


class TestRender:
    def test_nil(self):
        assert render(Nil()) == "0"

    def test_branch(self):
        p = sp(SERVER)
        assert isinstance(p, Branch)
        assert render(p) == SERVER

    @pytest.mark.parametrize("text", [
        SYSTEM,
        "!(new r)(r+!<1>.0 | r-?(i).0)",
    ])
    def test_session_roundtrip(self, text):
        p = sp(text)
        assert alpha_eq(sp(render(p)), p)

    @pytest.mark.parametrize("text", [
        "(new u,v)(v!<1>.0 | v?(i).0)",
        "a?().0 + b?().0",
        "x?(z1,z2).0 | x!<y>.0",
    ])
    def test_generic_roundtrip(self, text):
        assert render(gp(render(gp(text)))) == render(gp(text))

    @pytest.mark.parametrize("text", [
        "d?<int>.e!<bool>.0 | d!<int>.e?<bool>.0",
        "*(x!<int>.0) | tau.0",
        "x!<(u,v)v!<(a,b)a?<(p,q)0>.0>.0>.0",
        "(a!<>.0 + b?<>.0) & c?<>.0",
    ])
    def test_ptype_roundtrip(self, text):
        assert render_ptype(pt(render_ptype(pt(text)))) == render_ptype(pt(text))

    def test_json_dump_is_text(self):
        assert '"Nil"' in dumps(Nil())


@given(st_.integers(0, 10_000))
def test_fuzzed_process_roundtrip(seed):
    _, p = gen_typed(GenConfig(seed=seed))
    assert alpha_eq(sp(render(p)), p)


@given(st_.integers(0, 10_000), st_.integers(0, 4))
def test_fuzzed_type_roundtrip(seed, depth):
    s = gen_session_type(seed, depth)
    assert st(render_stype(s)) == s


class TestFreeNames:
    def test_nil(self):
        assert free_names(Nil()) == frozenset()

    def test_system_closed(self):
        assert free_names(sp(SYSTEM)) == frozenset()

    def test_output(self):
        assert free_names(sp("x+!<y->.0")) == {Chan("x", Pol.PLUS), Chan("y", Pol.MINUS)}

    def test_input_binds(self):
        assert free_names(sp("x+?(y).y!<1>.0")) == {Chan("x", Pol.PLUS)}


class TestAlpha:
    def test_renamed_restriction(self):
        assert alpha_eq(sp("(new x)x+!<1>.0"), sp("(new y)y+!<1>.0"))

    def test_free_names_differ(self):
        assert not alpha_eq(sp("x+!<1>.0"), sp("y+!<1>.0"))

    def test_generic_binders(self):
        assert alpha_eq(gp("(new a,b)a!<b>.0"), gp("(new c,d)c!<d>.0"))
        assert not alpha_eq(gp("(new a,b)a!<b>.0"), gp("(new c,d)d!<c>.0"))

    def test_encoder_independent_of_supply(self):
        p = sp(SYSTEM)
        one = encode_process(p, supply=FreshSupply()).process
        two = encode_process(p, supply=FreshSupply(500)).process
        assert render(one) != render(two)
        assert alpha_eq(one, two)
