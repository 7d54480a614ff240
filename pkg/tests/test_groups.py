import itertools
import math

import pytest

from epiq.errors import NotAGroup, NotPermissible, SpaceTooLarge
from epiq.groups import (
    ConceptVariable,
    FiniteAction,
    induced_action,
    is_invariant_set,
    is_permissible,
    is_transitive,
    maximal_permissible_group,
    orbits,
)


def trivial_action(space):
    return FiniteAction(space=tuple(space), elements=(tuple(range(len(space))),))


def cyclic_action(n):
    shift = tuple((i + 1) % n for i in range(n))
    return FiniteAction.from_generators(tuple(range(n)), [shift])


def two_strata_action():
    """All independent within-stratum permutations of {1,2} and {3,4,5}."""
    space = (1, 2, 3, 4, 5)
    elements = []
    for pa in itertools.permutations(range(2)):
        for pb in itertools.permutations(range(2, 5)):
            elements.append(tuple(pa) + tuple(pb))
    return FiniteAction(space=space, elements=tuple(elements))


def reflection_action():
    """x -> -x on {-c, 0, c}."""
    return FiniteAction(space=(-1.0, 0.0, 1.0), elements=((0, 1, 2), (2, 1, 0)))


# --- group validation -----------------------------------------------------------


def test_rejects_missing_identity():
    with pytest.raises(NotAGroup):
        FiniteAction(space=(0, 1), elements=((1, 0),))


def test_rejects_non_closed_set():
    # two transpositions of 3 points without their product
    with pytest.raises(NotAGroup):
        FiniteAction(space=(0, 1, 2), elements=((0, 1, 2), (1, 0, 2), (0, 2, 1)))


def test_rejects_non_permutation():
    with pytest.raises(NotAGroup):
        FiniteAction(space=(0, 1), elements=((0, 0), (0, 1)))


def test_from_generators_closes():
    g = FiniteAction.from_generators((0, 1, 2), [(1, 0, 2), (0, 2, 1)])
    assert g.order == 6  # adjacent transpositions generate all of S3


# --- orbits ---------------------------------------------------------------------


def test_trivial_group_singleton_orbits():
    assert orbits(trivial_action((1, 2, 3))) == [(1,), (2,), (3,)]


def test_stratified_orbits_are_strata():
    assert orbits(two_strata_action()) == [(1, 2), (3, 4, 5)]


def test_reflection_orbits():
    assert orbits(reflection_action()) == [(-1.0, 1.0), (0.0,)]


def test_orbits_match_brute_force_reachability():
    space = tuple(range(7))
    # 4-cycle on the first block, transposition in the middle, fixed point
    gens = [(1, 2, 3, 0, 4, 5, 6), (0, 1, 2, 3, 5, 4, 6)]
    action = FiniteAction.from_generators(space, gens)
    fast = {frozenset(b) for b in orbits(action)}
    # oracle: transitive closure of one-step reachability
    reach = {i: {i} for i in space}
    changed = True
    while changed:
        changed = False
        for i in space:
            for j in list(reach[i]):
                for g in action.elements:
                    if g[j] not in reach[i]:
                        reach[i].add(g[j])
                        changed = True
    slow = {frozenset(v) for v in reach.values()}
    assert fast == slow


# --- invariant sets and transitivity ------------------------------------------------


def test_single_orbit_is_invariant():
    assert is_invariant_set(two_strata_action(), (1, 2))


def test_half_orbit_is_not_invariant():
    assert not is_invariant_set(reflection_action(), (1.0,))


def test_union_of_strata_invariant():
    assert is_invariant_set(two_strata_action(), (1, 2, 3, 4, 5))
    assert is_invariant_set(two_strata_action(), (3, 4, 5))


def test_rejects_foreign_points():
    with pytest.raises(ValueError):
        is_invariant_set(trivial_action((1, 2)), (9,))


def test_cyclic_rotation_transitive():
    assert is_transitive(cyclic_action(4))


def test_trivial_group_not_transitive():
    assert not is_transitive(trivial_action((1, 2)))


def test_two_strata_not_transitive():
    assert len(orbits(two_strata_action())) == 2
    assert not is_transitive(two_strata_action())


def test_transitive_group_admits_no_reduction():
    g = cyclic_action(5)
    invariant = [
        s
        for r in range(6)
        for s in itertools.combinations(range(5), r)
        if is_invariant_set(g, s)
    ]
    assert invariant == [(), (0, 1, 2, 3, 4)]


def test_invariant_set_iff_restriction_is_group():
    g = two_strata_action()
    for r in range(6):
        for subset in itertools.combinations(g.space, r):
            idx = [g.index(p) for p in subset]
            closes = all(set(perm[i] for i in idx) == set(idx) for perm in g.elements)
            restricts = False
            if closes:
                pos = {i: k for k, i in enumerate(idx)}
                restricted = {tuple(pos[perm[i]] for i in idx) for perm in g.elements}
                FiniteAction(space=subset, elements=tuple(restricted))  # must validate
                restricts = True
            assert is_invariant_set(g, subset) == restricts


# --- permissibility and induced actions ------------------------------------------------


def test_constant_variable_permissible():
    g = cyclic_action(4)
    eta = ConceptVariable.from_function(g.space, lambda p: "same")
    assert is_permissible(g, eta)
    assert induced_action(g, eta).order == 1


def test_parity_permissible_under_rotation():
    g = cyclic_action(4)
    eta = ConceptVariable.from_function(g.space, lambda p: p % 2)
    assert is_permissible(g, eta)
    induced = induced_action(g, eta)
    assert induced.space == (0, 1)
    assert set(induced.elements) == {(0, 1), (1, 0)}  # swap action on parity


def test_indicator_not_permissible_under_rotation():
    g = cyclic_action(4)
    eta = ConceptVariable.from_function(g.space, lambda p: 1 if p == 0 else 0)
    assert not is_permissible(g, eta)
    with pytest.raises(NotPermissible):
        induced_action(g, eta)


def test_absolute_value_under_reflection_induces_identity():
    g = reflection_action()
    eta = ConceptVariable.from_function(g.space, abs)
    induced = induced_action(g, eta)
    assert induced.order == 1  # reflection acts trivially on |phi|


def test_induced_action_commutes_with_eta():
    g = cyclic_action(6)
    eta = ConceptVariable.from_function(g.space, lambda p: p % 3)
    induced = induced_action(g, eta)
    values = induced.space
    for h in g.elements:
        image = {eta(g.apply(h, p)) for p in g.space}
        assert image == set(values)
        perm = tuple(
            values.index(eta(g.apply(h, next(p for p in g.space if eta(p) == v))))
            for v in values
        )
        assert perm in induced.elements


def test_induced_action_passes_group_invariants():
    g = cyclic_action(6)
    eta = ConceptVariable.from_function(g.space, lambda p: p % 2)
    induced = induced_action(g, eta)  # constructor re-validates closure/identity/inverses
    assert induced.order >= 1


# --- maximal permissible group ------------------------------------------------------------


def test_maximal_group_constant_variable():
    space = (0, 1, 2)
    eta = ConceptVariable.from_function(space, lambda p: "k")
    assert maximal_permissible_group(space, eta).order == math.factorial(3)


def test_maximal_group_injective_variable():
    space = (0, 1, 2)
    eta = ConceptVariable.from_function(space, lambda p: p)
    assert maximal_permissible_group(space, eta).order == math.factorial(3)


def test_maximal_group_parity_blocks():
    space = (0, 1, 2, 3)
    eta = ConceptVariable.from_function(space, lambda p: p % 2)
    g = maximal_permissible_group(space, eta)
    assert g.order == 8  # block-preserving or block-swapping permutations
    assert is_permissible(g, eta)


def test_maximal_group_space_cap():
    space = tuple(range(9))
    eta = ConceptVariable.from_function(space, lambda p: 0)
    with pytest.raises(SpaceTooLarge):
        maximal_permissible_group(space, eta)


# --- JSON interface ----------------------------------------------------------------------


def test_action_json_round_trip():
    g = two_strata_action()
    back = FiniteAction.from_json(g.to_json())
    assert back.space == g.space
    assert set(back.elements) == set(g.elements)
