import pytest

from chalo.values import (
    ABS, Nat, Sym, parse_value_token, path_key, path_str, value_key,
)


def test_naturals_reject_negative():
    with pytest.raises(ValueError):
        Nat(-1)


def test_value_token_round_trip():
    for v in (Nat(0), Nat(37), Sym("G"), ABS):
        assert parse_value_token(str(v)) == v


def test_value_order_nats_then_abs_then_symbols():
    vals = [Sym("b"), ABS, Nat(2), Sym("a"), Nat(0)]
    assert sorted(vals, key=value_key) == [Nat(0), Nat(2), ABS, Sym("a"), Sym("b")]


def test_path_order_is_numeric_within_entries():
    paths = [("i0", 3, 10), ("i0", 3, 2), ("i0", 10, 0), ("i0", 2, 0), ("A",)]
    assert sorted(paths, key=path_key) == [
        ("i0", 2, 0), ("i0", 3, 2), ("i0", 3, 10), ("i0", 10, 0), ("A",)]


def test_path_str():
    assert path_str(("i0", 3, 7)) == "i0.3.7"
    assert path_str(("mode",)) == "mode"
