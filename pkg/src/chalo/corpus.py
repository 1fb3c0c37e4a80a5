"""Access to the universe files shipped with the package."""

from __future__ import annotations

from importlib import resources

from .parser import parse_formula, parse_universe
from .universe import Universe

BUILTIN = ("subway", "stopwatch", "switch", "switch_large")


def builtin_names():
    return BUILTIN


def load_text(name: str) -> str:
    if name not in BUILTIN:
        raise KeyError("no builtin universe %r; have %s" % (name, ", ".join(BUILTIN)))
    ref = resources.files("chalo").joinpath("specs", name + ".uni")
    return ref.read_text(encoding="utf-8")


def load(name: str) -> Universe:
    return parse_universe(load_text(name))


def named_formula(uni: Universe, name: str):
    """Look up a zero-argument def in a universe and return its body."""
    by_arity = uni.macros.get(name)
    if by_arity is None or 0 not in by_arity:
        raise KeyError("universe %s has no zero-argument def %r" % (uni.name, name))
    return parse_formula(name, uni)
