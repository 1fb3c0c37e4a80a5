"""Snapshots, changes, and nested changes.

A snapshot is a finite partial map from paths to values.  Changes pair two
snapshots (before/after); nested changes are perfect binary trees of
changes and model windows of 2^k consecutive changes.

The separation algebra lives here: ``disjoint`` (shared-nothing domains)
and ``combine`` (union of disjoint maps, ``None`` on overlap -- undefined
is not a snapshot).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .values import Path, Value, path_key, path_str


class Snapshot:
    """Immutable partial map Path -> Value."""

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Union[dict, Iterable] = ()):
        m = dict(bindings)
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_hash", hash(frozenset(m.items())))

    def __contains__(self, path: Path) -> bool:
        return path in self._map

    def get(self, path: Path) -> Optional[Value]:
        return self._map.get(path)

    def __getitem__(self, path: Path) -> Value:
        return self._map[path]

    def paths(self):
        return self._map.keys()

    def sorted_paths(self):
        return sorted(self._map.keys(), key=path_key)

    def items(self):
        return self._map.items()

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        return isinstance(other, Snapshot) and self._map == other._map

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(
            "%s=%s" % (path_str(p), self._map[p]) for p in self.sorted_paths()
        )
        return "{%s}" % inner

    def disjoint(self, other: "Snapshot") -> bool:
        a, b = self._map, other._map
        if len(b) < len(a):
            a, b = b, a
        return not any(p in b for p in a)

    def combine(self, other: "Snapshot") -> Optional["Snapshot"]:
        """Union of two disjoint snapshots, or None when domains overlap."""
        if not self.disjoint(other):
            return None
        m = dict(self._map)
        m.update(other._map)
        return Snapshot(m)

    def restrict(self, paths) -> "Snapshot":
        return Snapshot({p: v for p, v in self._map.items() if p in paths})

    def without(self, paths) -> "Snapshot":
        return Snapshot({p: v for p, v in self._map.items() if p not in paths})

    def update(self, bindings) -> "Snapshot":
        m = dict(self._map)
        m.update(bindings)
        return Snapshot(m)


EMPTY = Snapshot()


@dataclass(frozen=True)
class Change:
    fst: Snapshot
    snd: Snapshot

    def __repr__(self):
        return "(%r ~> %r)" % (self.fst, self.snd)


@dataclass(frozen=True)
class Leaf:
    change: Change


@dataclass(frozen=True)
class Node:
    left: "Nested"
    right: "Nested"


Nested = Union[Leaf, Node]

# A model is a snapshot (level 0), a change (level 1), or a Node tree
# whose leaves hold changes (level = tree depth + 1).
Model = Union[Snapshot, Change, Node]


def nested_depth(t: Nested) -> int:
    d = 0
    while isinstance(t, Node):
        d += 1
        t = t.left
    return d


def model_level(m: Model) -> int:
    if isinstance(m, Snapshot):
        return 0
    if isinstance(m, Change):
        return 1
    if isinstance(m, Node):
        return nested_depth(m) + 1
    raise TypeError("not a model: %r" % (m,))


def slots(m: Model) -> tuple:
    """Snapshot positions of a model, left to right.

    Level 0 has one slot, level k >= 1 has 2^k (in/out of every leaf
    change, so glued seams appear twice)."""
    if isinstance(m, Snapshot):
        return (m,)
    if isinstance(m, Change):
        return (m.fst, m.snd)
    if isinstance(m, Leaf):
        return (m.change.fst, m.change.snd)
    return slots(m.left) + slots(m.right)


def model_from_slots(level: int, snaps) -> Model:
    snaps = list(snaps)
    assert len(snaps) == slot_count(level)
    if level == 0:
        return snaps[0]

    def build(vals):
        if len(vals) == 2:
            return Leaf(Change(vals[0], vals[1]))
        half = len(vals) // 2
        return Node(build(vals[:half]), build(vals[half:]))

    if level == 1:
        return Change(snaps[0], snaps[1])
    t = build(snaps)
    assert isinstance(t, Node)
    return t


def slot_count(level: int) -> int:
    return 1 if level == 0 else 2 ** level


def halves(m: Model):
    """Split a level-k (k >= 1) model into its two level-(k-1) parts."""
    if isinstance(m, Change):
        return m.fst, m.snd
    if isinstance(m, Node):
        return unwrap(m.left), unwrap(m.right)
    raise TypeError("no halves at level 0: %r" % (m,))


def unwrap(t: Nested) -> Model:
    return t.change if isinstance(t, Leaf) else t


def wrap(m: Model) -> Nested:
    return Leaf(m) if isinstance(m, Change) else m


def join_halves(left: Model, right: Model) -> Model:
    """Inverse of halves()."""
    if isinstance(left, Snapshot):
        return Change(left, right)
    return Node(wrap(left), wrap(right))


def leftmost_snapshot(m: Model) -> Snapshot:
    return slots(m)[0]


def rightmost_snapshot(m: Model) -> Snapshot:
    return slots(m)[-1]


def seam_ok(m: Model) -> bool:
    """True when every internal seam agrees: the out-snapshot of each leaf
    equals the in-snapshot of the next leaf.  Levels 0 and 1 have no seams."""
    if isinstance(m, (Snapshot, Change)):
        return True
    ss = slots(m)
    return all(ss[i] == ss[i + 1] for i in range(1, len(ss) - 1, 2))


def models_disjoint(a: Model, b: Model) -> bool:
    sa, sb = slots(a), slots(b)
    return len(sa) == len(sb) and all(x.disjoint(y) for x, y in zip(sa, sb))


def combine_models(a: Model, b: Model) -> Optional[Model]:
    sa, sb = slots(a), slots(b)
    if len(sa) != len(sb):
        return None
    out = []
    for x, y in zip(sa, sb):
        c = x.combine(y)
        if c is None:
            return None
        out.append(c)
    return model_from_slots(model_level(a), out)


def empty_model(level: int) -> Model:
    return model_from_slots(level, [EMPTY] * slot_count(level))


def restrict_model(m: Model, paths) -> Model:
    return model_from_slots(
        model_level(m), [s.restrict(paths) for s in slots(m)]
    )


def model_bindings(m: Model):
    """All (slot index, path) pairs bound anywhere in the model."""
    out = []
    for i, s in enumerate(slots(m)):
        for p in s.sorted_paths():
            out.append((i, p))
    return out


def format_model(m: Model) -> str:
    """One-line rendering; glued windows print as a snapshot sequence."""
    if isinstance(m, Snapshot):
        return repr(m)
    ss = slots(m)
    if seam_ok(m):
        shown = [ss[0]] + [ss[i] for i in range(1, len(ss), 2)]
        return " ~> ".join(repr(s) for s in shown)
    return " | ".join(repr(s) for s in ss)


def model_to_dict(m: Model):
    """JSON-friendly rendering keyed by slot."""
    def snap_dict(s):
        return {".".join(str(seg) for seg in p): str(s[p]) for p in s.sorted_paths()}

    if isinstance(m, Snapshot):
        return {"level": 0, "snapshot": snap_dict(m)}
    ss = slots(m)
    return {
        "level": model_level(m),
        "slots": [snap_dict(s) for s in ss],
    }
