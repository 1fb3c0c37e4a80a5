"""Ground values and heap paths.

A value is a natural number, a symbolic constant drawn from some finite
alphabet, or the absent marker ``abs``.  "Undefined" (the result of a
partial operation such as ``0 - 1``) is deliberately *not* a value; it is
represented by ``None`` wherever it can occur, and anything comparing a
value against ``None`` is unsatisfied rather than an error.

Paths address places.  A flat place is a one-segment path like
``("mode",)``; a bit inside a tree of buffers is a longer mixed path like
``("i0", 3, 7)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, order=True)
class Nat:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("naturals only: %r" % (self.n,))

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True, order=True)
class Sym:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class AbsType:
    def __str__(self):
        return "abs"


ABS = AbsType()

Value = Union[Nat, Sym, AbsType]

PathSeg = Union[str, int]
Path = tuple  # tuple[PathSeg, ...]


def seg_key(seg: PathSeg):
    # ints before strs so bit offsets sort numerically within an entry
    return (0, seg, "") if isinstance(seg, int) else (1, 0, seg)


def path_key(path: Path):
    return tuple(seg_key(s) for s in path)


def value_key(v: Value):
    """Total order used for deterministic enumeration: naturals ascending,
    then abs, then symbols in lexicographic order."""
    if isinstance(v, Nat):
        return (0, v.n, "")
    if isinstance(v, AbsType):
        return (1, 0, "")
    return (2, 0, v.name)


def path_str(path: Path) -> str:
    return ".".join(str(s) for s in path)


def parse_value_token(tok: str) -> Value:
    if tok == "abs":
        return ABS
    if tok.isdigit():
        return Nat(int(tok))
    return Sym(tok)
