"""Session-typed processes, their encoding into generic process types, and checks.

Typical use::

    from sess2gts import parse, typecheck_session, encode_process, typecheck_generic

    p = parse("session-proc", "(new x:!<int>.end)(x+!<1>.0 | x-?(i).0)")
    typecheck_session({}, p)
    target = encode_process(p)
    typecheck_generic(parse("process-type", "0"), target.process, target.annotations)
"""

from .bounds import ExplorationBound, Outcome, Verdict
from .encoder import EncodeError, EncodingResult, encode_env, encode_process, encode_tuple
from .generic_dynamics import explore_generic, generic_error, reduce_generic
from .gts import (
    GCheck, equiv_generic, is_lin, is_wf, payload_sub, subtype_generic, type_reduce,
    typecheck_generic,
)
from .parser import ParseError, parse
from .printer import render, render_env, render_ptype, render_stype
from .session_dynamics import explore, reduce_session, session_error
from .session_types import (
    SessionTypeError, dual, is_balanced, is_typable, subtype_session, typecheck_session,
)
from .structural import canon, struct_eq

__version__ = "0.1.0"

__all__ = [
    "ExplorationBound", "Outcome", "Verdict", "EncodeError", "EncodingResult", "encode_env",
    "encode_process", "encode_tuple", "explore_generic", "generic_error", "reduce_generic",
    "GCheck", "equiv_generic", "is_lin", "is_wf", "payload_sub", "subtype_generic",
    "type_reduce", "typecheck_generic", "ParseError", "parse", "render", "render_env",
    "render_ptype", "render_stype", "explore", "reduce_session", "session_error",
    "SessionTypeError", "dual", "is_balanced", "is_typable", "subtype_session",
    "typecheck_session", "canon", "struct_eq",
]
