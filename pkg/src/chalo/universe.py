"""Universe declarations: places, alphabets, tree geometry, macros."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .trees import TreeGeometry
from .values import ABS, AbsType, Nat, Path, Sym, Value


@dataclass
class MacroDef:
    name: str
    params: tuple
    body: object  # surface-syntax formula


class UniverseError(ValueError):
    pass


@dataclass(frozen=True)
class Alpha:
    """Alphabet of one flat place: optionally all naturals up to the
    universe bound, plus explicitly listed extra values."""

    nat: bool = False
    extras: tuple = ()


@dataclass
class Universe:
    name: str = "anon"
    place_order: list = field(default_factory=list)
    alphabets: dict = field(default_factory=dict)  # place -> Alpha
    tree: Optional[TreeGeometry] = None
    nat_bound: int = 16
    macros: dict = field(default_factory=dict)

    def add_place(self, name: str, alpha: Alpha):
        if name in self.alphabets:
            raise UniverseError("duplicate place %r" % name)
        self.place_order.append(name)
        self.alphabets[name] = alpha

    def is_flat_place(self, name: str) -> bool:
        return name in self.alphabets

    def is_buffer(self, name: str) -> bool:
        return self.tree is not None and name in self.tree.buffer_names

    def flat_places(self):
        return list(self.place_order)

    def alphabet(self, place: str):
        """Values a flat place may hold, in enumeration order."""
        alpha = self.alphabets[place]
        nats = tuple(Nat(k) for k in range(self.nat_bound + 1)) if alpha.nat else ()
        return nats + alpha.extras

    def symbols(self):
        seen, out = set(), []
        for p in self.place_order:
            for v in self.alphabets[p].extras:
                if isinstance(v, Sym) and v.name not in seen:
                    seen.add(v.name)
                    out.append(v)
        return out

    def has_abs(self) -> bool:
        return any(
            any(isinstance(v, AbsType) for v in alpha.extras)
            for alpha in self.alphabets.values()
        )

    def is_symbol(self, name: str) -> bool:
        return any(v.name == name for v in self.symbols())

    def value_space(self):
        """Quantifier domain: naturals ascending, abs if any place uses it,
        then symbols in declaration order.  Lazy so huge nat bounds stay
        cheap to construct."""

        def gen():
            for k in range(self.nat_bound + 1):
                yield Nat(k)
            if self.has_abs():
                yield ABS
            yield from self.symbols()

        return gen()

    def domain_of_path(self, path: Path):
        """Values a bound path may carry in a model."""
        if len(path) == 1 and path[0] in self.alphabets:
            return self.alphabet(path[0])
        if self.tree is not None and len(path) == 3 and path[0] in self.tree.buffer_names:
            return (Nat(0), Nat(1))
        raise UniverseError("path %r not addressable here" % (path,))

    def is_concrete_path(self, path: Path) -> bool:
        try:
            self.domain_of_path(path)
            return True
        except UniverseError:
            return False

    def flat_paths(self):
        return [(p,) for p in self.place_order]

    def check_flat_value(self, place: str, v: Value):
        alpha = self.alphabets[place]
        if alpha.nat and isinstance(v, Nat) and v.n <= self.nat_bound:
            return True
        return v in alpha.extras
