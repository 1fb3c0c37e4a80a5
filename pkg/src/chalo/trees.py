"""Bit-addressed buffer trees.

A tree declaration ``tree b e w`` introduces b circular buffers, each with
e entries of w bits.  The first half of the buffers are inputs (i0, i1,
...), the rest outputs (o0, ...).  Entries 0 .. e-3 hold data; the last
two entries are the head and tail pointers, addressable through the
aliases ``first`` (entry e-2) and ``last`` (entry e-1).  Pointer
arithmetic is modulo e-2, and a buffer holds at most e-3 packets since
head == tail means empty.

Bits are addressed ``buffer.entry.offset`` with the least significant bit
at the lowest offset.
"""

from __future__ import annotations

from dataclasses import dataclass

from .values import Nat, Path


class BitRangeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeGeometry:
    buffers: int
    entries: int
    width: int

    def __post_init__(self):
        if self.buffers < 2 or self.entries < 4 or self.width < 1:
            raise ValueError("degenerate tree geometry")

    @property
    def buffer_names(self):
        half = self.buffers // 2
        ins = tuple("i%d" % k for k in range(half))
        outs = tuple("o%d" % k for k in range(self.buffers - half))
        return ins + outs

    @property
    def modulus(self) -> int:
        # pointer wrap-around excludes the two pointer entries
        return self.entries - 2

    @property
    def capacity(self) -> int:
        return self.entries - 3

    def entry_index(self, seg) -> int:
        if seg == "first":
            return self.entries - 2
        if seg == "last":
            return self.entries - 1
        if isinstance(seg, int):
            if not 0 <= seg < self.entries:
                raise BitRangeError("entry %r out of range 0..%d" % (seg, self.entries - 1))
            return seg
        raise BitRangeError("bad entry %r" % (seg,))

    def check_offsets(self, n1: int, n2: int):
        if not (0 <= n1 <= n2 < self.width):
            raise BitRangeError(
                "bit range %d-%d outside 0..%d" % (n1, n2, self.width - 1)
            )

    def bit_paths(self, buf: str, entry, n1=None, n2=None):
        """Concrete bit paths of an entry (or of a sub-range of it)."""
        if buf not in self.buffer_names:
            raise BitRangeError("unknown buffer %r" % (buf,))
        idx = self.entry_index(entry)
        if n1 is None:
            n1, n2 = 0, self.width - 1
        self.check_offsets(n1, n2)
        return [(buf, idx, off) for off in range(n1, n2 + 1)]


def bits_of(value: int, n1: int, n2: int):
    """Little-endian bits of ``value`` across offsets n1..n2.

    Raises BitRangeError when the value needs more than n2-n1+1 bits."""
    if n2 < n1:
        raise BitRangeError("empty bit range %d-%d" % (n1, n2))
    width = n2 - n1 + 1
    if value < 0 or value >= (1 << width):
        raise BitRangeError(
            "%d does not fit in bits %d-%d" % (value, n1, n2)
        )
    return [(value >> k) & 1 for k in range(width)]


def assemble_bits(bits) -> int:
    """Inverse of bits_of for a full offset range."""
    out = 0
    for k, b in enumerate(bits):
        out |= (b & 1) << k
    return out


def assemble_value(snapshot_get, paths):
    """Read bit paths from a snapshot-like getter and reassemble the natural.

    Returns None when any bit is unbound or not a 0/1 natural."""
    bits = []
    for p in paths:
        v = snapshot_get(p)
        if not isinstance(v, Nat) or v.n not in (0, 1):
            return None
        bits.append(v.n)
    return assemble_bits(bits)


def is_tree_path(path: Path) -> bool:
    return len(path) >= 2
