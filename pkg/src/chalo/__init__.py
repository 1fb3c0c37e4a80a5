"""Checker for snapshot/change specifications of synchronous systems.

A universe declares places and their alphabets; formulas describe
partial snapshots of those places, changes between snapshots, and
nested changes of changes.  The engine decides satisfaction exactly,
enumerates finite model spaces, and checks execution traces window by
window.
"""

from .values import ABS, Nat, Sym, Value
from .snapshots import Change, Leaf, Node, Snapshot
from .trees import TreeGeometry
from .universe import Universe, UniverseError
from .formulas import level_of, pretty
from .parser import ParseError, parse_formula, parse_universe
from .desugar import NormalizeError, desugar, frame_complete, normalize
from .semantics import Engine, EvalError
from .enumeration import (
    CardinalityError, ModelSpace, entails, satisfiable, valid,
)
from .traces import Trace, TraceError, conform, load_trace, window

__version__ = "0.1.0"

__all__ = [
    "ABS", "Nat", "Sym", "Value",
    "Change", "Leaf", "Node", "Snapshot",
    "TreeGeometry", "Universe", "UniverseError",
    "level_of", "pretty",
    "ParseError", "parse_formula", "parse_universe",
    "NormalizeError", "desugar", "frame_complete", "normalize",
    "Engine", "EvalError",
    "CardinalityError", "ModelSpace", "entails", "satisfiable", "valid",
    "Trace", "TraceError", "conform", "load_trace", "window",
]
