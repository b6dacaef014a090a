"""Three-valued verdicts and exploration bounds."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum


class Verdict(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, b: bool) -> Verdict:
        return cls.TRUE if b else cls.FALSE


@dataclass(frozen=True)
class ExplorationBound:
    """Limits for state-space exploration.

    ``unfold`` caps how many times each replicated type or process may be
    unfolded along one path.
    """

    max_depth: int = 64
    max_states: int = 20000
    unfold: int = 2

    def __post_init__(self):
        if min(self.max_depth, self.max_states, self.unfold) <= 0:
            raise ValueError("exploration bounds must be positive")

    @classmethod
    def parse(cls, text: str) -> ExplorationBound:
        """Parse ``depth=N,states=M,unfold=K`` (any subset, any order)."""
        keys = {"depth": "max_depth", "states": "max_states", "unfold": "unfold"}
        kwargs = {}
        for part in filter(None, (s.strip() for s in text.split(","))):
            key, sep, val = part.partition("=")
            if not sep or key.strip() not in keys:
                raise ValueError(f"bad bound component: {part!r}")
            kwargs[keys[key.strip()]] = int(val)
        return cls(**kwargs)

    @classmethod
    def from_env(cls, default: ExplorationBound | None = None) -> ExplorationBound:
        text = os.environ.get("SESS2GTS_BOUND")
        if text:
            return cls.parse(text)
        return default or cls()

    def __str__(self) -> str:
        return f"depth={self.max_depth},states={self.max_states},unfold={self.unfold}"


@dataclass
class Outcome:
    """A verdict plus the evidence behind it."""

    verdict: Verdict
    witness: list[str] = field(default_factory=list)
    reason: str = ""
    states: int = 0
    bound_hit: bool = False

    def __bool__(self) -> bool:
        return self.verdict is Verdict.TRUE

    def describe(self) -> str:
        match self.verdict:
            case Verdict.TRUE:
                return "true"
            case Verdict.UNKNOWN:
                return f"unknown({self.reason or 'bound'})"
        trace = " ; ".join(self.witness)
        return f"false({self.reason}{': ' if trace else ''}{trace})"
