"""Generators, property checks and the subtyping oracle."""

from .checks import THEOREMS, CheckReport, run_suite
from .generate import GenConfig, gen_session_type, gen_typed
from .oracle import compare_with_oracle

__all__ = ["THEOREMS", "CheckReport", "run_suite", "GenConfig", "gen_session_type",
           "gen_typed", "compare_with_oracle"]
