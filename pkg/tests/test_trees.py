"""Bit-addressed buffer geometry."""

import pytest

from chalo.trees import (
    BitRangeError, TreeGeometry, assemble_bits, assemble_value, bits_of,
)
from chalo.values import Nat


def test_buffer_split_and_names():
    g = TreeGeometry(4, 8, 8)
    assert g.buffer_names == ("i0", "i1", "o0", "o1")
    assert g.modulus == 6
    assert g.capacity == 5
    g2 = TreeGeometry(4, 1024, 32)
    assert g2.modulus == 1022 and g2.capacity == 1021


def test_pointer_aliases():
    g = TreeGeometry(4, 8, 8)
    assert g.entry_index("first") == 6
    assert g.entry_index("last") == 7
    assert g.entry_index(0) == 0
    with pytest.raises(BitRangeError):
        g.entry_index(8)
    with pytest.raises(BitRangeError):
        g.entry_index("head")


def test_degenerate_geometry_rejected():
    with pytest.raises(ValueError):
        TreeGeometry(1, 8, 8)
    with pytest.raises(ValueError):
        TreeGeometry(4, 3, 8)


def test_bit_paths_full_and_ranged():
    g = TreeGeometry(4, 8, 8)
    assert g.bit_paths("i0", 3) == [("i0", 3, k) for k in range(8)]
    assert g.bit_paths("o1", "first", 2, 4) == [
        ("o1", 6, 2), ("o1", 6, 3), ("o1", 6, 4)]
    with pytest.raises(BitRangeError):
        g.bit_paths("x9", 0)
    with pytest.raises(BitRangeError):
        g.bit_paths("i0", 0, 5, 3)
    with pytest.raises(BitRangeError):
        g.bit_paths("i0", 0, 0, 8)


def test_bits_little_endian():
    assert bits_of(5, 0, 7) == [1, 0, 1, 0, 0, 0, 0, 0]
    assert bits_of(2, 1, 10) == [0, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    assert assemble_bits([1, 0, 1]) == 5
    with pytest.raises(BitRangeError):
        bits_of(8, 0, 2)  # needs four bits


def test_assemble_round_trip():
    for v in (0, 1, 5, 200, 255):
        assert assemble_bits(bits_of(v, 0, 7)) == v


def test_assemble_value_needs_every_bit():
    paths = [("i0", 0, k) for k in range(4)]
    table = {p: Nat(b) for p, b in zip(paths, bits_of(9, 0, 3))}
    assert assemble_value(table.get, paths) == 9
    del table[("i0", 0, 2)]
    assert assemble_value(table.get, paths) is None
    table[("i0", 0, 2)] = Nat(7)  # not a bit
    assert assemble_value(table.get, paths) is None
