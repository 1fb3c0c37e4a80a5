"""Formula and expression syntax trees.

Two layers share these node types.  The surface layer is what the parser
produces and may use every construct below, including the sugared ones
(&&, ||, !, ~, ->, <->, forall, angle tuples, macro calls, the hole _).
The core layer is the image of ``desugar``: atoms, emp, false, relations,
pair, *, (+), ;, =>, exists and frame, nothing else.

Atoms carry a pattern tree: a bare expression at level 0, a pair of
pattern trees one level up, e.g. ``((a,b),(c,d))@p``.  Paths are tuples
of raw segments; identifier segments are resolved against universe and
binding context only when an atom is grounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .values import Value


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: Value

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Hole:
    def __str__(self):
        return "_"


@dataclass(frozen=True)
class Arith:
    op: str  # + - mod
    left: "Expr"
    right: "Expr"

    def __str__(self):
        op = " %s " % self.op if self.op == "mod" else " %s " % self.op
        return "(%s%s%s)" % (self.left, op, self.right)


Expr = Union[Lit, Var, Hole, Arith]


@dataclass(frozen=True)
class Tup:
    left: "Pattern"
    right: "Pattern"

    def __str__(self):
        return "(%s,%s)" % (self.left, self.right)


Pattern = Union[Expr, Tup]


def pattern_depth(p: Pattern) -> int:
    """Nesting depth of a pattern tree; raises on lopsided tuples."""
    if isinstance(p, Tup):
        l, r = pattern_depth(p.left), pattern_depth(p.right)
        if l != r:
            raise LevelError("lopsided tuple pattern %s" % (p,))
        return l + 1
    return 0


def pattern_leaves(p: Pattern):
    if isinstance(p, Tup):
        return pattern_leaves(p.left) + pattern_leaves(p.right)
    return (p,)


def pattern_of_leaves(leaves) -> Pattern:
    leaves = list(leaves)
    assert leaves and (len(leaves) & (len(leaves) - 1)) == 0
    while len(leaves) > 1:
        leaves = [Tup(leaves[i], leaves[i + 1]) for i in range(0, len(leaves), 2)]
    return leaves[0]


# --- path segments ---------------------------------------------------------

@dataclass(frozen=True)
class RangeSeg:
    lo: object  # int, or str for a not-yet-substituted name
    hi: object

    def __str__(self):
        return "%s-%s" % (self.lo, self.hi)


PathExpr = tuple  # segments: str | int | RangeSeg


def path_expr_str(path: PathExpr) -> str:
    return ".".join(str(s) for s in path)


# --- formulas --------------------------------------------------------------

class LevelError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    pattern: Pattern
    path: PathExpr


@dataclass(frozen=True)
class Emp:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Rel:
    op: str  # = != < <=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pair:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Star:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Overlap:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Seq:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class FramedImp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class FramedIff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class NotPat:
    atom: Atom


@dataclass(frozen=True)
class MacroCall:
    name: str
    args: tuple  # exprs; identifier args may also name buffers


@dataclass(frozen=True)
class TupleStar:
    items: tuple


@dataclass(frozen=True)
class Frame:
    prefixes: frozenset  # of path tuples; model may bind only inside these

Formula = object  # any of the dataclasses above


# --- free variables --------------------------------------------------------

def expr_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Arith):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Tup):
        return expr_vars(e.left) | expr_vars(e.right)
    return frozenset()


def path_vars(path: PathExpr, known_names) -> frozenset:
    """Identifier segments that are not static names (places, buffers,
    aliases) act as variables."""
    out = set()
    for seg in path:
        if isinstance(seg, str) and seg not in known_names:
            out.add(seg)
        elif isinstance(seg, RangeSeg):
            for bound in (seg.lo, seg.hi):
                if isinstance(bound, str) and bound not in known_names:
                    out.add(bound)
    return frozenset(out)


def free_vars(f, known_names=frozenset()) -> frozenset:
    """Free variable names; ``known_names`` are identifiers that resolve
    statically (place, buffer and alias names) and never count as vars."""
    if isinstance(f, Atom):
        return expr_vars(f.pattern) | path_vars(f.path, known_names)
    if isinstance(f, NotPat):
        return free_vars(f.atom, known_names)
    if isinstance(f, Rel):
        return expr_vars(f.left) | expr_vars(f.right)
    if isinstance(f, (Pair, Star, Overlap, Seq, Implies, And, Or, FramedImp, FramedIff)):
        return free_vars(f.left, known_names) | free_vars(f.right, known_names)
    if isinstance(f, Not):
        return free_vars(f.body, known_names)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body, known_names) - {f.var}
    if isinstance(f, MacroCall):
        out = frozenset()
        for a in f.args:
            if isinstance(a, str):
                if a not in known_names:
                    out |= {a}
            else:
                out |= expr_vars(a)
        return out
    if isinstance(f, TupleStar):
        out = frozenset()
        for item in f.items:
            out |= free_vars(item, known_names)
        return out
    return frozenset()


# --- levels ----------------------------------------------------------------

def level_of(f, fallback: Optional[int] = None) -> Optional[int]:
    """Model level a formula speaks about, or None when polymorphic.

    Raises LevelError on mismatched operands.  Works on macro-free trees;
    sugar nodes are accepted because their level is structural."""

    def join(a, b, what):
        if a is None:
            return b
        if b is None or a == b:
            return a
        raise LevelError("level mismatch in %s: %d vs %d" % (what, a, b))

    if isinstance(f, Atom):
        return pattern_depth(f.pattern)
    if isinstance(f, NotPat):
        return level_of(f.atom)
    if isinstance(f, Emp):
        return 0
    if isinstance(f, (FalseF, TrueF, Rel, Frame)):
        return None
    if isinstance(f, Pair):
        sub = join(level_of(f.left), level_of(f.right), "pair")
        return None if sub is None else sub + 1
    if isinstance(f, (Star, Overlap, Implies, And, Or, FramedImp, FramedIff)):
        return join(level_of(f.left), level_of(f.right), type(f).__name__)
    if isinstance(f, Seq):
        lev = join(level_of(f.left), level_of(f.right), "seq")
        if lev == 0:
            raise LevelError("; needs changes, not snapshots")
        return lev
    if isinstance(f, Not):
        return level_of(f.body)
    if isinstance(f, (Exists, Forall)):
        return level_of(f.body)
    if isinstance(f, TupleStar):
        lev = None
        for item in f.items:
            lev = join(lev, level_of(item), "tuple")
        return lev
    if isinstance(f, MacroCall):
        raise LevelError("level of unexpanded macro %s" % f.name)
    raise TypeError("not a formula: %r" % (f,))


# --- pretty printing -------------------------------------------------------

_CHAIN = {Star: "*", Overlap: "(+)", Seq: ";"}


def pretty(f) -> str:
    return _pp(f, 0)


def _pp(f, ctx: int) -> str:
    # ctx precedence: 0 any, 1 under arrow, 2 under ||, 3 under &&,
    # 4 chain operand, 5 unary operand
    def wrap(s, mine):
        return "(" + s + ")" if mine < ctx else s

    if isinstance(f, Atom):
        return "%s@%s" % (f.pattern, path_expr_str(f.path))
    if isinstance(f, NotPat):
        return "~" + _pp(f.atom, 5)
    if isinstance(f, Emp):
        return "emp"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Rel):
        return wrap("%s %s %s" % (f.left, f.op, f.right), 4)
    if isinstance(f, Pair):
        return "(%s, %s)" % (_pp(f.left, 0), _pp(f.right, 0))
    if type(f) in _CHAIN:
        op = _CHAIN[type(f)]

        def operand(g):
            s = _pp(g, 4)
            # a different chain operator must re-parenthesize: mixed
            # unbracketed chains do not parse
            if type(g) in _CHAIN and type(g) is not type(f):
                s = "(" + s + ")"
            return s

        return wrap("%s %s %s" % (operand(f.left), op, operand(f.right)), 4)
    if isinstance(f, Implies):
        return wrap("%s => %s" % (_pp(f.left, 2), _pp(f.right, 1)), 1)
    if isinstance(f, FramedImp):
        return wrap("%s -> %s" % (_pp(f.left, 2), _pp(f.right, 1)), 1)
    if isinstance(f, FramedIff):
        return wrap("%s <-> %s" % (_pp(f.left, 2), _pp(f.right, 1)), 1)
    if isinstance(f, Or):
        return wrap("%s || %s" % (_pp(f.left, 3), _pp(f.right, 2)), 2)
    if isinstance(f, And):
        return wrap("%s && %s" % (_pp(f.left, 4), _pp(f.right, 3)), 3)
    if isinstance(f, Not):
        return "!" + _pp(f.body, 5)
    if isinstance(f, Exists):
        # quantifiers only parse at the top of a group, so any operand
        # position needs parentheses
        return wrap("exists %s. %s" % (f.var, _pp(f.body, 0)), 0)
    if isinstance(f, Forall):
        return wrap("forall %s. %s" % (f.var, _pp(f.body, 0)), 0)
    if isinstance(f, MacroCall):
        return f.name + "".join(
            "[%s]" % (a if isinstance(a, str) else str(a)) for a in f.args
        )
    if isinstance(f, TupleStar):
        return "<%s>" % ", ".join(_pp(i, 0) for i in f.items)
    if isinstance(f, Frame):
        inner = ",".join(sorted(".".join(str(s) for s in p) for p in f.prefixes))
        return "frame(%s)" % inner
    raise TypeError("not a formula: %r" % (f,))
