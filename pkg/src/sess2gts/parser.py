"""Recursive-descent parsers for the concrete grammars.

Kinds: ``session-proc``, ``session-type``, ``generic-proc``,
``process-type`` and ``type-env``.  Every failure raises :class:`ParseError`
carrying a 1-based line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .names import Pol
from .terms import (
    Base, BasePayload, BoolLit, Branch, Chan, End, Eq, GIn, GOut, In, IntLit,
    NamesPayload, Nil, Out, Par, PChoice, PIn, POut, PPar, PRepl, PSum, PTau,
    PZero, Repl, Res, SBranch, SChoice, Select, SIn, SOut, Sum, TupleType,
    PREFIX_TYPES,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int
    end: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<choice>\(\+\))
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*(?:\$[0-9]+)?)
  | (?P<num>[0-9]+)
  | (?P<op>>>|<<|==|[!?<>(){}\[\],:.|+\-&*])
    """,
    re.VERBOSE,
)

KEYWORDS = {"new", "end", "int", "bool", "true", "false", "tau"}


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = _linecol(text, pos)
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group(kind)
            if kind == "name" and tok in KEYWORDS:
                kind = tok
            elif kind == "op":
                kind = tok
            out.append(Token(kind, tok, m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        line, col = _linecol(self.text, tok.pos)
        raise ParseError(msg, line, col)

    def expect(self, kind: str) -> Token:
        if kind == ">" and self.tok.kind == ">>":
            t = self.tok
            self.toks[self.i:self.i + 1] = [
                Token(">", ">", t.pos, t.pos + 1), Token(">", ">", t.pos + 1, t.end)]
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.error(f"expected {kind!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    def done(self):
        if not self.at("eof"):
            self.error(f"unexpected {self.tok.text!r}")

    def name(self) -> str:
        return self.expect("name").text

    def polarity(self, name_tok: Token) -> Pol:
        # A polarity is a '+' or '-' written immediately after the name.
        if self.at("+", "-") and self.tok.pos == name_tok.end:
            return Pol(self.expect(self.tok.kind).text)
        return Pol.NONE

    def binder(self) -> str:
        t = self.expect("name")
        if self.at("+", "-") and self.tok.pos == t.end:
            self.error("polarity on a binder")
        return t.text

    def names(self, close: str) -> tuple[str, ...]:
        out = []
        if not self.at(close):
            out.append(self.binder())
            while self.accept(","):
                out.append(self.binder())
        return tuple(out)

    # -- values

    def value_or_chan(self):
        t = self.tok
        if self.accept("true"):
            return BoolLit(True)
        if self.accept("false"):
            return BoolLit(False)
        if t.kind == "num":
            self.i += 1
            if self.accept("=="):
                return Eq(int(t.text), int(self.expect("num").text))
            return IntLit(int(t.text))
        nt = self.expect("name")
        pol = self.polarity(nt)
        if self.at("=="):
            if pol.polarized:
                self.error("polarized name in an expression")
            self.i += 1
            return Eq(nt.text, int(self.expect("num").text))
        return Chan(nt.text, pol)

    # -- session processes

    def session_proc(self):
        left = self.session_prefixed()
        while self.accept("|"):
            left = Par(left, self.session_prefixed())
        return left

    def session_cont(self):
        if self.accept("."):
            return self.session_prefixed()
        return Nil()

    def session_prefixed(self):
        t = self.tok
        if t.kind == "num":
            if t.text != "0":
                self.error("only 0 may appear as a process")
            self.i += 1
            return Nil()
        if self.accept("!"):
            return Repl(self.session_prefixed())
        if t.kind == "(":
            if self.peek().kind == "new":
                self.i += 2
                x = self.binder()
                ann = None
                if self.accept(":"):
                    ann = self.session_type()
                self.expect(")")
                return Res((x,), self.session_prefixed(), ann)
            self.i += 1
            p = self.session_proc()
            self.expect(")")
            return p
        if t.kind != "name":
            self.error(f"expected a process, found {t.text or 'end of input'!r}")
        self.i += 1
        subj = Chan(t.text, self.polarity(t))
        if self.accept("!"):
            self.expect("<")
            payload = None if self.at(">") else self.value_or_chan()
            self.expect(">")
            return Out(subj, payload, self.session_cont())
        if self.accept("?"):
            self.expect("(")
            var = None if self.at(")") else self.binder()
            self.expect(")")
            return In(subj, var, self.session_cont())
        if self.accept(">>"):
            self.expect("{")
            branches = []
            seen = set()
            while True:
                lt = self.expect("name")
                if lt.text in seen:
                    self.error(f"duplicate branch label {lt.text!r}", lt)
                seen.add(lt.text)
                self.expect(":")
                branches.append((lt.text, self.session_proc()))
                if not self.accept(","):
                    break
            self.expect("}")
            return Branch(subj, tuple(branches))
        if self.accept("<<"):
            label = self.name()
            return Select(subj, label, self.session_cont())
        self.error("expected '!', '?', '>>' or '<<' after a channel")

    # -- generic processes

    def generic_proc(self):
        left = self.generic_sum()
        while self.accept("|"):
            left = Par(left, self.generic_sum())
        return left

    def generic_sum(self):
        start = self.tok
        first = self.generic_prefixed()
        if not self.at("+"):
            return first
        branches = [first]
        while self.accept("+"):
            branches.append(self.generic_prefixed())
        for b in branches:
            if not isinstance(b, (GIn, GOut)):
                self.error("summands must be input- or output-prefixed", start)
        return Sum(tuple(branches))

    def generic_cont(self):
        if self.accept("."):
            return self.generic_prefixed()
        return Nil()

    def generic_prefixed(self):
        t = self.tok
        if t.kind == "num":
            if t.text != "0":
                self.error("only 0 may appear as a process")
            self.i += 1
            return Nil()
        if self.accept("!"):
            return Repl(self.generic_prefixed())
        if t.kind == "(":
            if self.peek().kind == "new":
                self.i += 2
                xs = self.names(")")
                if len(set(xs)) != len(xs):
                    self.error("duplicate restricted name", t)
                self.expect(")")
                return Res(xs, self.generic_prefixed())
            self.i += 1
            p = self.generic_proc()
            self.expect(")")
            return p
        if t.kind != "name":
            self.error(f"expected a process, found {t.text or 'end of input'!r}")
        self.i += 1
        if self.at("+", "-") and self.tok.pos == t.end:
            self.error("polarity in a generic process")
        if self.accept("!"):
            self.expect("<")
            args = []
            if not self.at(">"):
                args.append(self._generic_arg())
                while self.accept(","):
                    args.append(self._generic_arg())
            self.expect(">")
            return GOut(t.text, tuple(args), self.generic_cont())
        if self.accept("?"):
            self.expect("(")
            params = self.names(")")
            if len(set(params)) != len(params):
                self.error("duplicate bound name in input", t)
            self.expect(")")
            return GIn(t.text, params, self.generic_cont())
        self.error("expected '!' or '?' after a channel")

    def _generic_arg(self):
        v = self.value_or_chan()
        if isinstance(v, Chan):
            if v.pol.polarized:
                self.error("polarity in a generic process")
            return v.name
        return v

    # -- session types

    def session_type(self):
        t = self.tok
        if self.accept("end"):
            return End()
        if self.accept("int"):
            return Base("int")
        if self.accept("bool"):
            return Base("bool")
        if self.at("?", "!"):
            self.i += 1
            self.expect("<")
            payload = self.session_type()
            self.expect(">")
            cont = self.session_type() if self.accept(".") else End()
            return SIn(payload, cont) if t.kind == "?" else SOut(payload, cont)
        if self.at("&", "choice"):
            self.i += 1
            self.expect("{")
            branches = []
            seen = set()
            while True:
                lt = self.expect("name")
                if lt.text in seen:
                    self.error(f"duplicate label {lt.text!r}", lt)
                seen.add(lt.text)
                self.expect(":")
                branches.append((lt.text, self.session_type()))
                if not self.accept(","):
                    break
            self.expect("}")
            return SBranch(tuple(branches)) if t.kind == "&" else SChoice(tuple(branches))
        if self.accept("("):
            s = self.session_type()
            self.expect(")")
            return s
        self.error(f"expected a session type, found {t.text or 'end of input'!r}")

    # -- type environments

    def type_env(self) -> dict:
        braces = bool(self.accept("{"))
        env: dict = {}
        if not self.at("}", "eof"):
            while True:
                nt = self.expect("name")
                c = Chan(nt.text, self.polarity(nt))
                self.expect(":")
                s = self.session_type()
                if c in env and env[c] != s:
                    self.error(f"conflicting bindings for {c}", nt)
                env[c] = s
                if not self.accept(","):
                    break
        if braces:
            self.expect("}")
        return env

    # -- process types

    def ptype(self):
        left = self.pchoice()
        while self.accept("|"):
            left = PPar(left, self.pchoice())
        return left

    def pchoice(self):
        left = self.psum()
        while self.accept("&"):
            left = PChoice(left, self.psum())
        return left

    def psum(self):
        start = self.tok
        first = self.pprefixed()
        if not self.at("+"):
            return first
        branches = [first]
        while self.accept("+"):
            branches.append(self.pprefixed())
        for b in branches:
            if not isinstance(b, PREFIX_TYPES):
                self.error("summands must be prefix-guarded", start)
        return PSum(tuple(branches))

    def pcont(self):
        if self.accept("."):
            return self.pprefixed()
        return PZero()

    def pprefixed(self):
        t = self.tok
        if t.kind == "num":
            if t.text != "0":
                self.error("only 0 may appear as a type")
            self.i += 1
            return PZero()
        if self.accept("*"):
            return PRepl(self.pprefixed())
        if self.accept("tau"):
            return PTau(self.pcont())
        if self.accept("("):
            g = self.ptype()
            self.expect(")")
            return g
        if t.kind != "name":
            self.error(f"expected a process type, found {t.text or 'end of input'!r}")
        self.i += 1
        if not self.at("!", "?"):
            self.error("expected '!' or '?' after a channel")
        kind = self.expect(self.tok.kind).kind
        self.expect("<")
        payload = self.payload()
        self.expect(">")
        cont = self.pcont()
        return (POut if kind == "!" else PIn)(t.text, payload, cont)

    def payload(self):
        if self.at(">"):
            return BasePayload(())
        if self.accept("("):
            xs = self.names(")")
            if len(set(xs)) != len(xs):
                self.error("duplicate tuple binder")
            self.expect(")")
            return TupleType(xs, self.ptype())
        if self.accept("["):
            xs = self.names("]")
            if len(set(xs)) != len(xs):
                self.error("duplicate name binder")
            self.expect("]")
            return NamesPayload(xs)
        sorts = [self._sort()]
        while self.accept(","):
            sorts.append(self._sort())
        return BasePayload(tuple(sorts))

    def _sort(self) -> str:
        if self.accept("int"):
            return "int"
        if self.accept("bool"):
            return "bool"
        self.error("expected a payload type")


_ENTRY = {
    "session-proc": _Parser.session_proc,
    "generic-proc": _Parser.generic_proc,
    "session-type": _Parser.session_type,
    "process-type": _Parser.ptype,
    "type-env": _Parser.type_env,
}

KINDS = tuple(_ENTRY)


def parse(kind: str, text: str):
    if kind not in _ENTRY:
        raise ValueError(f"unknown term kind {kind!r}")
    p = _Parser(text)
    try:
        result = _ENTRY[kind](p)
        p.done()
    except RecursionError:
        raise ParseError("term nested too deeply", 1, 1) from None
    return result


def parse_session(text: str):
    return parse("session-proc", text)


def parse_generic(text: str):
    return parse("generic-proc", text)


def parse_stype(text: str):
    return parse("session-type", text)


def parse_ptype(text: str):
    return parse("process-type", text)


def parse_env(text: str) -> dict:
    return parse("type-env", text)
