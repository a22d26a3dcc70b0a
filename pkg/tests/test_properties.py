"""Randomized checks, CASES seeded cases per property"""
import random
from collections import deque

import numpy as np
import pytest

from app.core.config import settings
from app.models.automaton import all_symmetry_ops, parse_recursion
from app.services.contraction_service import ContractionService
from app.services.group_service import GroupService, level_permutations, word_level_permutation
from app.services.mealy_service import NUMBER_COUNT
from app.services.tree_action_service import ElementIndex

SEED = 20240611
CASES = 1000
ORACLE_LEVEL = 4
ORACLE_ORDER_CAP = 2048
SYMMETRY_OPS = list(all_symmetry_ops(3, 2))


def cases(seed: int):
    """(automaton number, per-case rng) pairs over the nontrivial numbers"""
    rng = random.Random(seed)
    for _ in range(CASES):
        yield rng.randint(730, NUMBER_COUNT), random.Random(rng.getrandbits(32))


def random_word(rng: random.Random, m: int, length: int):
    return tuple(rng.randrange(2 * m) for _ in range(length))


def random_vertex(rng: random.Random, depth: int, d: int = 2):
    return tuple(rng.randrange(d) for _ in range(depth))


def test_section_chain_rule(engine):
    for n, rng in cases(SEED):
        e = engine(n)
        u = random_word(rng, 3, rng.randint(0, 4))
        v = random_word(rng, 3, rng.randint(0, 4))
        vertex = random_vertex(rng, rng.randint(1, 4))
        left = e.section_symbols(u + v, vertex)
        right = e.section_symbols(u, e.act(v, vertex)) + e.section_symbols(v, vertex)
        assert e.equals(left, right), (n, u, v, vertex)


def test_level_action_is_a_homomorphism(numbered):
    for n, rng in cases(SEED + 1):
        automaton = numbered(n)
        u = random_word(rng, 3, rng.randint(0, 4))
        v = random_word(rng, 3, rng.randint(0, 4))
        composed = word_level_permutation(automaton, u + v, 6)
        expected = word_level_permutation(automaton, u, 6)[word_level_permutation(automaton, v, 6)]
        assert np.array_equal(composed, expected), (n, u, v)


def test_minimization_preserves_the_action(mealy, numbered):
    for n, _ in cases(SEED + 2):
        automaton = numbered(n)
        reduced, image = mealy.minimize_with_map(automaton)
        original = level_permutations(automaton, 5)
        minimized = level_permutations(reduced, 5)
        for s in range(automaton.m):
            assert np.array_equal(original[s], minimized[image[s]]), (n, s)


def test_inverse_automaton_acts_by_inverses(mealy, numbered):
    for n, _ in cases(SEED + 3):
        automaton = numbered(n)
        original = level_permutations(automaton, 5)
        inverted = level_permutations(mealy.invert(automaton), 5)
        for s in range(automaton.m):
            assert np.array_equal(inverted[s], original[s + automaton.m]), (n, s)


def test_symmetries_keep_the_class(mealy, numbered):
    for n, rng in cases(SEED + 4):
        automaton = numbered(n)
        op = rng.choice(SYMMETRY_OPS)
        assert mealy.symmetry_class(mealy.apply_symmetry(automaton, op)) == mealy.symmetry_class(automaton), (n, op)


@pytest.mark.slow
def test_symmetries_keep_growth_and_quotients(mealy, numbered):
    groups = GroupService()
    for n, rng in cases(SEED + 5):
        automaton = numbered(n)
        image = mealy.apply_symmetry(automaton, rng.choice(SYMMETRY_OPS))
        assert groups.growth_sequence(image, 3) == groups.growth_sequence(automaton, 3), n
        for level in range(1, 6):
            assert groups.level_quotient_order(image, level) == groups.level_quotient_order(automaton, level), (n, level)


def bfs_order(generators, degree: int, cap: int) -> int:
    """Size of the generated permutation group, or cap + 1 once it is exceeded"""
    identity = tuple(range(degree))
    seen = {identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for g in generators:
            product = tuple(g[x] for x in current)
            if product not in seen:
                seen.add(product)
                if len(seen) > cap:
                    return cap + 1
                queue.append(product)
    return len(seen)


@pytest.mark.slow
def test_level_group_order_matches_exhaustive_closure(numbered):
    groups = GroupService()
    for n, _ in cases(SEED + 6):
        automaton = numbered(n)
        perms = level_permutations(automaton, ORACLE_LEVEL)
        generators = [tuple(int(x) for x in perms[s]) for s in automaton.generators]
        brute = bfs_order(generators, 2 ** ORACLE_LEVEL, ORACLE_ORDER_CAP)
        order = groups.level_quotient_order(automaton, ORACLE_LEVEL)
        if brute > ORACLE_ORDER_CAP:
            assert order > ORACLE_ORDER_CAP, n
        else:
            assert order == brute, n


def test_activity_samples_agree_with_the_class(numbered):
    contraction = ContractionService()
    for n, rng in cases(SEED + 9):
        state = rng.randrange(3)
        assert contraction.activity_class(numbered(n), state).sample_agrees, (n, state)


CONTRACTING = ["a=σ(1,a)", 731, 852]


@pytest.fixture(scope="module")
def nuclei(numbered, engine):
    """(automaton, engine, nucleus record, index of nucleus elements) per contracting automaton"""
    contraction = ContractionService()
    found = []
    for target in CONTRACTING:
        automaton = parse_recursion(target) if isinstance(target, str) else numbered(target)
        e = engine(automaton)
        nucleus = contraction.nucleus_search(automaton, settings.nucleus_size_cap, settings.nucleus_depth_cap)
        index = ElementIndex(e)
        for word in contraction.nucleus_words(automaton, settings.nucleus_size_cap, settings.nucleus_depth_cap):
            index.add(word)
        found.append((automaton, e, nucleus, index))
    return found


def test_nucleus_is_closed_under_sections(nuclei):
    rng = random.Random(SEED + 7)
    for _ in range(CASES):
        automaton, e, _, index = rng.choice(nuclei)
        element = rng.choice(index.elements)
        vertex = random_vertex(rng, rng.randint(1, 6))
        assert index.find(e.section_symbols(element, vertex)) is not None, (automaton, element, vertex)


def test_long_sections_fall_into_the_nucleus(nuclei):
    rng = random.Random(SEED + 8)
    for _ in range(CASES):
        automaton, e, nucleus, index = rng.choice(nuclei)
        # pairs land within nucleus.depth; four halvings take a word of length 12 to one element
        depth = 4 * nucleus.depth + nucleus.closure_size
        word = random_word(rng, automaton.m, rng.randint(1, 12))
        vertex = random_vertex(rng, depth)
        assert index.find(e.section_symbols(word, vertex)) is not None, (automaton, word, vertex)
