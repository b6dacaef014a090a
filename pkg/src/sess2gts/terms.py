"""Abstract syntax for the four term languages.

Session processes and generic processes share the constructors ``Nil``,
``Par``, ``Res`` and ``Repl``; they differ in their guarded forms.  Session
processes use ``Out``/``In``/``Branch``/``Select`` on polarized channels,
generic processes use ``GOut``/``GIn`` and mixed guarded sums ``Sum``.

Session types are ``End``, ``SIn``, ``SOut``, ``SBranch``, ``SChoice`` and
``Base``.  Process types (the behavioural types of the generic calculus) are
``PZero``, ``PPar``, ``PChoice`` (internal choice ``&``), ``PSum`` (external
choice ``+``), ``PRepl``, ``POut``, ``PIn`` and ``PTau``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .names import Pol


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Eq:
    """``lhs == rhs`` where ``lhs`` is a variable name or an int literal."""

    lhs: Union[str, int]
    rhs: int


Value = Union[IntLit, BoolLit, Eq]


def is_value(x) -> bool:
    return isinstance(x, (IntLit, BoolLit, Eq))


def eval_value(v: Value) -> Value:
    if isinstance(v, Eq) and isinstance(v.lhs, int):
        return BoolLit(v.lhs == v.rhs)
    return v


# ---------------------------------------------------------------- shared process constructors


@dataclass(frozen=True)
class Chan:
    name: str
    pol: Pol = Pol.NONE

    @property
    def dual(self) -> Chan:
        return Chan(self.name, self.pol.complement())

    def __str__(self) -> str:
        return f"{self.name}{self.pol.value}"


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Par:
    left: "Proc"
    right: "Proc"


@dataclass(frozen=True)
class Res:
    """Restriction of one (session) or several (generic) names.

    ``ann`` is an optional session-type annotation ``(new x:S)``; it is only
    meaningful on single-name session restrictions.
    """

    names: tuple[str, ...]
    body: "Proc"
    ann: "SessionType | None" = None


@dataclass(frozen=True)
class Repl:
    body: "Proc"


# ---------------------------------------------------------------- session guarded forms


@dataclass(frozen=True)
class Out:
    """``subj!<payload>.cont``; payload ``None`` is the nullary send."""

    subj: Chan
    payload: Union[Chan, Value, None]
    cont: "Proc"


@dataclass(frozen=True)
class In:
    """``subj?(var).cont``; ``var`` ``None`` is the nullary receive."""

    subj: Chan
    var: Union[str, None]
    cont: "Proc"


@dataclass(frozen=True)
class Branch:
    subj: Chan
    branches: tuple[tuple[str, "Proc"], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.branches)


@dataclass(frozen=True)
class Select:
    subj: Chan
    label: str
    cont: "Proc"


# ---------------------------------------------------------------- generic guarded forms


@dataclass(frozen=True)
class GOut:
    subj: str
    args: tuple[Union[str, IntLit, BoolLit, Eq], ...]
    cont: "Proc"


@dataclass(frozen=True)
class GIn:
    subj: str
    params: tuple[str, ...]
    cont: "Proc"


@dataclass(frozen=True)
class Sum:
    branches: tuple[Union[GOut, GIn], ...]


Proc = Union[Nil, Par, Res, Repl, Out, In, Branch, Select, GOut, GIn, Sum]
SESSION_GUARDS = (Out, In, Branch, Select)
GENERIC_GUARDS = (GOut, GIn, Sum)


def par_all(procs) -> "Proc":
    """Left-nested parallel composition; ``0`` for the empty list."""
    procs = list(procs)
    if not procs:
        return Nil()
    acc = procs[0]
    for p in procs[1:]:
        acc = Par(acc, p)
    return acc


def par_list(p: "Proc") -> list:
    if isinstance(p, Par):
        return par_list(p.left) + par_list(p.right)
    return [p]


# ---------------------------------------------------------------- session types


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class Base:
    sort: str  # "int" | "bool"


@dataclass(frozen=True)
class SIn:
    payload: "SessionType"
    cont: "SessionType"


@dataclass(frozen=True)
class SOut:
    payload: "SessionType"
    cont: "SessionType"


@dataclass(frozen=True)
class SBranch:
    """External choice ``&{l: S, ...}``."""

    branches: tuple[tuple[str, "SessionType"], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.branches)

    def get(self, label: str):
        return dict(self.branches).get(label)


@dataclass(frozen=True)
class SChoice:
    """Internal choice ``(+){l: S, ...}``."""

    branches: tuple[tuple[str, "SessionType"], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.branches)

    def get(self, label: str):
        return dict(self.branches).get(label)


SessionType = Union[End, Base, SIn, SOut, SBranch, SChoice]


# ---------------------------------------------------------------- process types


@dataclass(frozen=True)
class TupleType:
    """``(x1,...,xn)G``: the behaviour on the transmitted names."""

    binders: tuple[str, ...]
    body: "PType"


@dataclass(frozen=True)
class BasePayload:
    """``int``, ``int,bool``, or the empty payload ``<>``."""

    sorts: tuple[str, ...]


@dataclass(frozen=True)
class NamesPayload:
    """``[l1,...,ln]``: a vector of names bound in the prefix continuation.

    On an output it is a bound output of fresh names; on an input the
    received names are bound in the continuation.  Used by the repaired
    label encoding only.
    """

    binders: tuple[str, ...]


Payload = Union[TupleType, BasePayload, NamesPayload]


def payload_arity(p: Payload) -> int:
    if isinstance(p, BasePayload):
        return len(p.sorts)
    return len(p.binders)


@dataclass(frozen=True)
class PZero:
    pass


@dataclass(frozen=True)
class PPar:
    left: "PType"
    right: "PType"


@dataclass(frozen=True)
class PChoice:
    """Internal choice ``G & G``."""

    left: "PType"
    right: "PType"


@dataclass(frozen=True)
class PSum:
    """External choice over prefix-guarded types, ``G + G``."""

    branches: tuple["PType", ...]


@dataclass(frozen=True)
class PRepl:
    body: "PType"


@dataclass(frozen=True)
class POut:
    subj: str
    payload: Payload
    cont: "PType"


@dataclass(frozen=True)
class PIn:
    subj: str
    payload: Payload
    cont: "PType"


@dataclass(frozen=True)
class PTau:
    cont: "PType"


PType = Union[PZero, PPar, PChoice, PSum, PRepl, POut, PIn, PTau]
PREFIX_TYPES = (POut, PIn, PTau)


def ppar_all(types) -> "PType":
    types = list(types)
    if not types:
        return PZero()
    acc = types[0]
    for t in types[1:]:
        acc = PPar(acc, t)
    return acc


def pchoice_all(types) -> "PType":
    types = list(types)
    acc = types[-1]
    for t in reversed(types[:-1]):
        acc = PChoice(t, acc)
    return acc


def psum_all(types) -> "PType":
    types = list(types)
    return types[0] if len(types) == 1 else PSum(tuple(types))
