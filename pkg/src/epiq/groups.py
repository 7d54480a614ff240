"""Finite group actions on finite spaces: orbits, invariant sets, permissible
sub-variables, induced actions, and the largest group a variable descends to.

Only finite actions live here; continuous symmetries enter through their
finite shadows (reflections, permutations, discretized rotation orbits), so
every claim is exhaustively decidable.  The usual topological/richness side
conditions of the continuous theory have no finite analogue and are treated
as modeling assumptions, not checks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .errors import NotAGroup, NotPermissible, SpaceTooLarge

Perm = tuple[int, ...]


def _compose(g: Perm, h: Perm) -> Perm:
    """(g h)(i) = g[h[i]]: apply h first."""
    return tuple(g[h[i]] for i in range(len(h)))


def _inverse(g: Perm) -> Perm:
    inv = [0] * len(g)
    for i, gi in enumerate(g):
        inv[gi] = i
    return tuple(inv)


@dataclass(frozen=True)
class FiniteAction:
    """A set of permutations of `space`, eagerly verified to form a group."""

    space: tuple[Hashable, ...]
    elements: tuple[Perm, ...]

    def __post_init__(self):
        object.__setattr__(self, "space", tuple(self.space))
        object.__setattr__(self, "elements", tuple(tuple(g) for g in self.elements))
        n = len(self.space)
        members = set(self.elements)
        for g in self.elements:
            if sorted(g) != list(range(n)):
                raise NotAGroup(f"{g} is not a permutation of {n} points")
        if tuple(range(n)) not in members:
            raise NotAGroup("identity element missing")
        for g in self.elements:
            if _inverse(g) not in members:
                raise NotAGroup(f"inverse of {g} missing")
            for h in self.elements:
                if _compose(g, h) not in members:
                    raise NotAGroup(f"composition {g} o {h} escapes the element set")

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, point: Hashable) -> int:
        return self.space.index(point)

    def apply(self, g: Perm, point: Hashable) -> Hashable:
        return self.space[g[self.index(point)]]

    @classmethod
    def from_generators(
        cls, space: Sequence[Hashable], generators: Sequence[Perm], max_order: int = 10**6
    ) -> "FiniteAction":
        """Close a generator set under composition (inverses come for free in
        a finite closed set)."""
        n = len(space)
        closure = {tuple(range(n))}
        frontier = [tuple(g) for g in generators]
        closure.update(frontier)
        while frontier:
            new = []
            for g in frontier:
                for h in list(closure):
                    for prod in (_compose(g, h), _compose(h, g)):
                        if prod not in closure:
                            closure.add(prod)
                            new.append(prod)
            if len(closure) > max_order:
                raise SpaceTooLarge(f"closure exceeded {max_order} elements")
            frontier = new
        return cls(space=tuple(space), elements=tuple(sorted(closure)))

    @classmethod
    def from_json(cls, text: str) -> "FiniteAction":
        doc = json.loads(text)
        return cls(space=tuple(doc["space"]), elements=tuple(tuple(g) for g in doc["elements"]))

    def to_json(self) -> str:
        return json.dumps(
            {"space": list(self.space), "elements": [list(g) for g in self.elements]}
        )


@dataclass(frozen=True)
class ConceptVariable:
    """Total function from the point space to a finite value set."""

    mapping: dict

    def __call__(self, point: Hashable) -> Hashable:
        return self.mapping[point]

    @classmethod
    def from_function(cls, space: Sequence[Hashable], f: Callable) -> "ConceptVariable":
        return cls(mapping={point: f(point) for point in space})


def orbits(action: FiniteAction) -> list[tuple[Hashable, ...]]:
    """Partition of the space into reachability classes, in space order."""
    n = len(action.space)
    seen = [False] * n
    blocks = []
    for start in range(n):
        if seen[start]:
            continue
        block = {start}
        frontier = [start]
        while frontier:
            i = frontier.pop()
            for g in action.elements:
                j = g[i]
                if j not in block:
                    block.add(j)
                    frontier.append(j)
        for i in block:
            seen[i] = True
        blocks.append(tuple(action.space[i] for i in sorted(block)))
    return blocks


def is_invariant_set(action: FiniteAction, subset: Sequence[Hashable]) -> bool:
    """True iff the subset is a union of orbit blocks."""
    wanted = set(subset)
    if not wanted <= set(action.space):
        raise ValueError("subset contains points outside the space")
    for block in orbits(action):
        hit = wanted & set(block)
        if hit and hit != set(block):
            return False
    return True


def is_transitive(action: FiniteAction) -> bool:
    return len(orbits(action)) == 1


def is_permissible(action: FiniteAction, eta: ConceptVariable) -> bool:
    """eta(p1) = eta(p2) must imply eta(g p1) = eta(g p2) for every element."""
    values = [eta(p) for p in action.space]
    n = len(action.space)
    for i in range(n):
        for j in range(i + 1, n):
            if values[i] != values[j]:
                continue
            for g in action.elements:
                if values[g[i]] != values[g[j]]:
                    return False
    return True


def induced_action(action: FiniteAction, eta: ConceptVariable) -> FiniteAction:
    """The action the group induces on eta's value set (requires permissibility).

    Distinct group elements may induce the same value permutation; duplicates
    are collapsed so the result is again a valid group.
    """
    if not is_permissible(action, eta):
        raise NotPermissible("variable does not descend to a well-defined action")
    values: list[Hashable] = []
    for p in action.space:
        if eta(p) not in values:
            values.append(eta(p))
    rep = {v: next(p for p in action.space if eta(p) == v) for v in values}
    perms = []
    for g in action.elements:
        perm = tuple(values.index(eta(action.apply(g, rep[v]))) for v in values)
        if perm not in perms:
            perms.append(perm)
    return FiniteAction(space=tuple(values), elements=tuple(sorted(perms)))


def maximal_permissible_group(space: Sequence[Hashable], eta: ConceptVariable) -> FiniteAction:
    """All permutations preserving eta's level partition (as a partition).

    Enumerates the full symmetric group, so the space is capped at 8 points.
    """
    space = tuple(space)
    n = len(space)
    if n > 8:
        raise SpaceTooLarge(f"symmetric-group enumeration capped at 8 points, got {n}")
    values = [eta(p) for p in space]
    elements = []
    for perm in itertools.permutations(range(n)):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if (values[i] == values[j]) != (values[perm[i]] == values[perm[j]]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            elements.append(perm)
    return FiniteAction(space=space, elements=tuple(elements))


__all__ = [
    "FiniteAction",
    "ConceptVariable",
    "orbits",
    "is_invariant_set",
    "is_transitive",
    "is_permissible",
    "induced_action",
    "maximal_permissible_group",
]
