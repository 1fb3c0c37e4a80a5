"""Snapshots, changes, and the glued window trees."""

import pytest

from chalo.snapshots import (
    EMPTY, Change, Leaf, Node, Snapshot, combine_models, empty_model, halves,
    join_halves, model_bindings, model_from_slots, model_level,
    models_disjoint, restrict_model, seam_ok, slot_count, slots,
)
from chalo.values import Nat, Sym

from conftest import shot


def test_snapshot_is_immutable_and_hashable():
    s = shot(A=0, B=1)
    assert len(s) == 2
    assert s[("A",)] == Nat(0)
    assert s.get(("Z",)) is None
    assert hash(s) == hash(shot(B=1, A=0))
    d = {s: 1}
    assert d[shot(A=0, B=1)] == 1


def test_combine_requires_disjoint_domains():
    a, b = shot(A=0), shot(B=1)
    assert a.disjoint(b)
    assert a.combine(b) == shot(A=0, B=1)
    assert a.combine(shot(A=1)) is None
    assert a.combine(shot(A=0)) is None  # equal bindings still collide


def test_combine_unit_and_commutativity():
    s = shot(A=0, SenS="BC")
    assert s.combine(EMPTY) == s
    assert EMPTY.combine(s) == s
    t = shot(L_B="G")
    assert s.combine(t) == t.combine(s)


def test_restrict_without_update():
    s = shot(A=0, B=1, C=0)
    assert s.restrict({("A",), ("B",)}) == shot(A=0, B=1)
    assert s.without({("A",)}) == shot(B=1, C=0)
    assert s.update({("B",): Nat(0)}) == shot(A=0, B=0, C=0)
    assert s == shot(A=0, B=1, C=0)  # originals untouched


def test_model_levels_and_slots():
    s = shot(A=0)
    ch = Change(shot(A=0), shot(A=1))
    assert model_level(s) == 0 and slots(s) == (s,)
    assert model_level(ch) == 1 and slots(ch) == (ch.fst, ch.snd)
    w = model_from_slots(2, [shot(A=0), shot(A=1), shot(A=1), shot(A=0)])
    assert model_level(w) == 2
    assert isinstance(w, Node) and isinstance(w.left, Leaf)
    assert slot_count(3) == 8


def test_model_from_slots_round_trip():
    ss = [shot(A=k % 2) for k in range(8)]
    m = model_from_slots(3, ss)
    assert list(slots(m)) == ss
    l, r = halves(m)
    assert model_level(l) == model_level(r) == 2
    assert join_halves(l, r) == m


def test_seam_ok_only_cares_about_interior():
    glued = model_from_slots(2, [shot(A=0), shot(A=1), shot(A=1), shot(A=0)])
    torn = model_from_slots(2, [shot(A=0), shot(A=1), shot(A=0), shot(A=1)])
    assert seam_ok(glued)
    assert not seam_ok(torn)
    assert seam_ok(Change(shot(A=0), shot(B=1)))  # level 1 has no seam


def test_combine_models_slotwise():
    a = Change(shot(A=0), shot(A=1))
    b = Change(shot(B=1), shot(B=1))
    c = combine_models(a, b)
    assert c == Change(shot(A=0, B=1), shot(A=1, B=1))
    assert models_disjoint(a, b)
    assert combine_models(a, a) is None
    assert combine_models(a, shot(B=1)) is None  # level mismatch


def test_empty_restrict_bindings():
    assert empty_model(2) == model_from_slots(2, [EMPTY] * 4)
    m = Change(shot(A=0, B=1), shot(A=1, B=1))
    assert restrict_model(m, {("A",)}) == Change(shot(A=0), shot(A=1))
    assert model_bindings(m) == [
        (0, ("A",)), (0, ("B",)), (1, ("A",)), (1, ("B",))]
