"""Polarities and name generation."""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable
from enum import Enum

# Machine-generated names carry a ``$<n>`` suffix.  The parser accepts them so
# that printed terms round-trip, but fresh supplies always skip past any such
# name already present in the input.
_MACHINE = re.compile(r"^(.*)\$(\d+)$")


class Pol(Enum):
    PLUS = "+"
    MINUS = "-"
    NONE = ""

    def complement(self) -> Pol:
        if self is Pol.PLUS:
            return Pol.MINUS
        if self is Pol.MINUS:
            return Pol.PLUS
        return Pol.NONE

    @property
    def polarized(self) -> bool:
        return self is not Pol.NONE

    def __str__(self) -> str:
        return self.value


def base_of(name: str) -> str:
    m = _MACHINE.match(name)
    return m.group(1) if m else name


def variant(name: str, avoid: Iterable[str] | set[str]) -> str:
    """Return ``name`` or the smallest ``base$k`` not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    if name not in avoid:
        return name
    base = base_of(name)
    for k in itertools.count(1):
        cand = f"{base}${k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


class FreshSupply:
    """Monotone counter producing ``hint$n`` names.

    Two supplies started from the same state produce the same names, so an
    encoding is deterministic given its supply.
    """

    def __init__(self, start: int = 0):
        self.counter = start
        self._avoid: set[str] = set()

    def avoid(self, names: Iterable[str]) -> FreshSupply:
        for n in names:
            self._avoid.add(n)
            m = _MACHINE.match(n)
            if m:
                self.counter = max(self.counter, int(m.group(2)))
        return self

    def fresh(self, hint: str = "n") -> str:
        hint = base_of(hint) or "n"
        while True:
            self.counter += 1
            name = f"{hint}${self.counter}"
            if name not in self._avoid:
                self._avoid.add(name)
                return name

    def fresh_pair(self, hint: str = "") -> tuple[str, str]:
        if hint:
            return self.fresh(hint + "p"), self.fresh(hint + "m")
        return self.fresh("u"), self.fresh("v")
