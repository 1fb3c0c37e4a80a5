import pytest

from chalo import corpus
from chalo.parser import parse_universe
from chalo.snapshots import Snapshot
from chalo.values import ABS, Nat, Sym


TINY = """
universe tiny
place P { 0, 1 }
place Q { 0, 1, 2 }
place R { a, b }
natbound 2
"""


@pytest.fixture(scope="session")
def subway():
    return corpus.load("subway")


@pytest.fixture(scope="session")
def stopwatch():
    return corpus.load("stopwatch")


@pytest.fixture(scope="session")
def switch():
    return corpus.load("switch")


@pytest.fixture(scope="session")
def switch_large():
    return corpus.load("switch_large")


@pytest.fixture(scope="session")
def tiny():
    return parse_universe(TINY)


def mkval(v):
    if isinstance(v, int):
        return Nat(v)
    if v == "abs":
        return ABS
    if isinstance(v, str):
        return Sym(v)
    return v


def shot(**bindings):
    """Snapshot from place=value keywords; ints become naturals, strings
    symbols, 'abs' the absent marker."""
    return Snapshot({(k,): mkval(v) for k, v in bindings.items()})
