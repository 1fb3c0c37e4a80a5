"""Finite model spaces and the sat / valid / entails queries.

A model space fixes a level and a set of addressable paths.  Models are
domain-homogeneous: each path is either absent from every snapshot
position or carries one value of its declared domain at each position.
At level two and up the positions along the window are glued by
construction: neighbouring changes share their boundary snapshot.

Enumeration order is deterministic: paths sorted, absent before values,
per-path value tuples in domain order with the leftmost position varying
slowest, later paths varying fastest.  ``satisfiable`` therefore returns
the same first model on every run."""

from __future__ import annotations

import itertools

from .desugar import free_in, normalize
from .formulas import Exists, Not
from .semantics import Engine
from .snapshots import Snapshot, model_from_slots
from .values import path_key, value_key

DEFAULT_CAP = 10 ** 7


class CardinalityError(ValueError):
    def __init__(self, size, cap):
        self.size, self.cap = size, cap
        super().__init__(
            "model space holds %d models, over the limit of %d; "
            "restrict the paths or raise the limit" % (size, cap))


class ModelSpace:
    def __init__(self, universe, level, paths=None, cap=DEFAULT_CAP):
        self.uni = universe
        self.level = level
        if paths is None:
            paths = list(universe.flat_paths())
            if universe.tree is not None:
                for b in universe.tree.buffer_names:
                    for e in range(universe.tree.entries):
                        paths.extend(universe.tree.bit_paths(b, e))
        self.paths = sorted(paths, key=path_key)
        self.domains = [
            sorted(universe.domain_of_path(p), key=value_key) for p in self.paths
        ]
        self.cap = cap

    @property
    def positions(self) -> int:
        if self.level == 0:
            return 1
        if self.level == 1:
            return 2
        return 2 ** (self.level - 1) + 1

    def snapshot_count(self) -> int:
        n = 1
        for d in self.domains:
            n *= len(d) + 1
        return n

    def size(self) -> int:
        n = 1
        for d in self.domains:
            n *= 1 + len(d) ** self.positions
        return n

    def check_cap(self):
        if self.cap is not None and self.size() > self.cap:
            raise CardinalityError(self.size(), self.cap)

    def snapshots(self):
        pools = [[None] + d for d in self.domains]
        for combo in itertools.product(*pools):
            yield Snapshot(
                {p: v for p, v in zip(self.paths, combo) if v is not None})

    def models(self):
        self.check_cap()
        npos = self.positions
        if npos == 1:
            yield from self.snapshots()
            return
        # one choice per path: absent, or a value for every position
        pools = [
            [None] + list(itertools.product(d, repeat=npos))
            for d in self.domains
        ]
        for choice in itertools.product(*pools):
            shots = [
                Snapshot({p: c[k] for p, c in zip(self.paths, choice)
                          if c is not None})
                for k in range(npos)
            ]
            yield self._assemble(shots)

    def _assemble(self, position_snaps):
        if self.level == 0:
            return position_snaps[0]
        if self.level == 1:
            return model_from_slots(1, list(position_snaps))
        ss = []
        for k in range(len(position_snaps) - 1):
            ss.extend((position_snaps[k], position_snaps[k + 1]))
        return model_from_slots(self.level, ss)


def close_formula(f, universe):
    """Existentially close the free variables, outermost first in sorted
    order, after normalizing."""
    g = normalize(f, universe)
    for var in sorted(free_in(g, universe), reverse=True):
        g = Exists(var, g)
    return g


def satisfiable(f, space: ModelSpace, engine=None):
    """First model of the space satisfying the closed formula, or None."""
    engine = engine or Engine(space.uni)
    g = close_formula(f, space.uni)
    for m in space.models():
        if engine.sat(g, m):
            return m
    return None


def valid(f, space: ModelSpace, engine=None):
    """(True, None) when every model satisfies f, else (False, witness)."""
    engine = engine or Engine(space.uni)
    g = Not(close_formula(f, space.uni))
    for m in space.models():
        if engine.sat(g, m):
            return False, m
    return True, None


def entails(p, q, space: ModelSpace, engine=None):
    """(True, None) when every model of p also satisfies q, else a
    counterexample model of p but not q."""
    engine = engine or Engine(space.uni)
    gp = close_formula(p, space.uni)
    gq = close_formula(q, space.uni)
    for m in space.models():
        if engine.sat(gp, m) and not engine.sat(gq, m):
            return False, m
    return True, None
