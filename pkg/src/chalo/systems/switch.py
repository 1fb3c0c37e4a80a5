"""Two-by-two packet switch simulator.

Each buffer is a circular FIFO over the tree geometry: data entries
0..e-3, head pointer at entry e-2, tail at e-1, pointer arithmetic mod
e-2, and capacity e-3 because head == tail means empty.  Per step the
outputs each drain one packet, then each input forwards its head packet
to the output named by the packet's bit 0 (i0 wins a collision, i1 is
delayed; a full output blocks the move), then scripted arrivals are
enqueued.  An arrival on a full input is dropped and reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..snapshots import Snapshot
from ..traces import Trace
from ..trees import bits_of
from ..values import Nat

SCENARIOS = ("quiet", "random", "flood")


@dataclass
class _Fifo:
    entries: list
    head: int = 0
    tail: int = 0

    def occupancy(self, mod):
        return (self.tail - self.head) % mod


@dataclass
class SwitchResult:
    trace: Trace
    # per-step event lists: (step, buffer, value)
    arrivals: list = field(default_factory=list)
    moves: list = field(default_factory=list)
    drains: list = field(default_factory=list)
    drops: list = field(default_factory=list)
    max_occupancy: dict = field(default_factory=dict)


def _snapshot(tree, fifos):
    binding = {}
    for name in tree.buffer_names:
        f = fifos[name]
        for e, val in enumerate(f.entries):
            for off, bit in enumerate(bits_of(val, 0, tree.width - 1)):
                binding[(name, e, off)] = Nat(bit)
        for e, val in ((tree.entries - 2, f.head), (tree.entries - 1, f.tail)):
            for off, bit in enumerate(bits_of(val, 0, tree.width - 1)):
                binding[(name, e, off)] = Nat(bit)
    return Snapshot(binding)


def _arrival_plan(script, steps, seed, width):
    """Map step -> list of (input buffer, packet value)."""
    plan = {}
    if script == "quiet":
        return plan
    if script == "flood":
        # even packets on both inputs every step: i0 keeps draining to o0,
        # i1 loses every collision and fills up
        for t in range(1, steps):
            plan[t] = [("i0", (2 * t) % (1 << width)),
                       ("i1", (2 * t + 4) % (1 << width))]
        return plan
    if script == "random":
        rng = random.Random(seed)
        for t in range(1, steps):
            events = []
            for buf in ("i0", "i1"):
                if rng.random() < 0.5:
                    events.append((buf, rng.randrange(1 << width)))
            if events:
                plan[t] = events
        return plan
    raise ValueError("switch scripts are quiet, random or flood, got %r" % script)


def run(uni, steps: int = 200, script: str = "random", seed: int = 0) -> SwitchResult:
    tree = uni.tree
    if tree is None:
        raise ValueError("switch simulation needs a universe with a tree")
    mod = tree.modulus
    cap = tree.capacity
    fifos = {name: _Fifo([0] * (tree.entries - 2)) for name in tree.buffer_names}
    plan = _arrival_plan(script, steps, seed, tree.width)

    result = SwitchResult(trace=None)
    result.max_occupancy = {name: 0 for name in tree.buffer_names}
    snaps = [_snapshot(tree, fifos)]

    for t in range(1, steps):
        # outputs drain one packet each
        for name in ("o0", "o1"):
            f = fifos[name]
            if f.head != f.tail:
                result.drains.append((t, name, f.entries[f.head]))
                f.head = (1 + f.head) % mod
        # inputs forward their head packet, i0 first
        receiving = set()
        for name in ("i0", "i1"):
            f = fifos[name]
            if f.head == f.tail:
                continue
            value = f.entries[f.head]
            dest = "o0" if value % 2 == 0 else "o1"
            g = fifos[dest]
            if dest in receiving or g.occupancy(mod) >= cap:
                continue  # collision loser or full output: packet is delayed
            f.head = (1 + f.head) % mod
            g.entries[g.tail] = value
            g.tail = (1 + g.tail) % mod
            receiving.add(dest)
            result.moves.append((t, name, value))
        # scripted arrivals
        for buf, value in plan.get(t, ()):
            f = fifos[buf]
            if f.occupancy(mod) >= cap:
                result.drops.append((t, buf, value))
                continue
            f.entries[f.tail] = value
            f.tail = (1 + f.tail) % mod
            result.arrivals.append((t, buf, value))
        for name, f in fifos.items():
            occ = f.occupancy(mod)
            if occ > result.max_occupancy[name]:
                result.max_occupancy[name] = occ
        snaps.append(_snapshot(tree, fifos))

    result.trace = Trace(uni, snaps)
    return result
