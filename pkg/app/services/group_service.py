import itertools
import logging
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

from app.core.config import settings
from app.core.errors import LevelTooDeepError, ShapeError
from app.models.automaton import Automaton, OrderStatus, Verdict
from app.models.level_group import LevelGroup
from app.models.word import GenWord, Symbols, cyclically_reduce, invert_symbol, inverse_word
from app.schemas.analysis import GrowthRecord, SelfReplicatingResult
from app.services.tree_action_service import (
    ElementIndex, TreeActionService, WordLike, reduced_words,
)

logger = logging.getLogger(__name__)


def check_level(automaton: Automaton, level: int) -> None:
    if level < 0:
        raise ValueError("level must be non-negative")
    if automaton.d ** level > settings.max_level_points:
        raise LevelTooDeepError(automaton.d, level, settings.max_level_points)


@lru_cache(maxsize=128)
def level_permutations(automaton: Automaton, level: int) -> np.ndarray:
    """Row per symbol (states, then inverses): image index of every level vertex.

    Vertex x_1...x_n has index sum x_i d^(n-i), so the first letter is the
    most significant digit.
    """
    check_level(automaton, level)
    m, d = automaton.m, automaton.d
    perms = np.zeros((m, 1), dtype=np.int64)
    for k in range(1, level + 1):
        block = d ** (k - 1)
        nxt = np.empty((m, d * block), dtype=np.int64)
        for s in range(m):
            for x in range(d):
                nxt[s, x * block:(x + 1) * block] = (
                    automaton.output[s][x] * block + perms[automaton.transition[s][x]]
                )
        perms = nxt
    full = np.vstack([perms, np.argsort(perms, axis=1)])
    full.flags.writeable = False
    return full


def word_level_permutation(automaton: Automaton, word: Sequence[int], level: int) -> np.ndarray:
    """Level action of a symbol word; the rightmost symbol acts first"""
    perms = level_permutations(automaton, level)
    images = np.arange(perms.shape[1])
    for symbol in reversed(tuple(word)):
        images = perms[symbol][images]
    return images


def level_vertices(d: int, level: int) -> List[str]:
    """Level vertices as strings, ordered by their permutation index"""
    return ["".join(str(x) for x in v) for v in itertools.product(range(d), repeat=level)]


def cyclic_class(symbols: Sequence[int], m: int) -> Symbols:
    """Least rotation of the word or its inverse"""
    word = tuple(symbols)
    if not word:
        return word
    inverse = inverse_word(word, m)
    return min(
        min(word[i:] + word[:i] for i in range(len(word))),
        min(inverse[i:] + inverse[:i] for i in range(len(inverse))),
    )


class _SymbolAliases:
    """Union-find over symbols driven by relators of length at most 2"""

    def __init__(self, m: int):
        self.m = m
        self.parent = list(range(2 * m))
        self.trivial: Set[int] = set()

    def find(self, symbol: int) -> int:
        while self.parent[symbol] != symbol:
            self.parent[symbol] = self.parent[self.parent[symbol]]
            symbol = self.parent[symbol]
        return symbol

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        keep, drop = min(rx, ry), max(rx, ry)
        self.parent[drop] = keep
        if drop in self.trivial:
            self.trivial.add(keep)

    def mark_trivial(self, symbol: int):
        for s in (symbol, invert_symbol(symbol, self.m)):
            self.trivial.add(self.find(s))

    def add_relator(self, word: Symbols):
        if len(word) == 1:
            self.mark_trivial(word[0])
        elif len(word) == 2:
            x, y = word
            self.union(x, invert_symbol(y, self.m))
            self.union(invert_symbol(x, self.m), y)

    def normalize(self, word: Symbols) -> Symbols:
        out = []
        for symbol in word:
            root = self.find(symbol)
            if root not in self.trivial:
                out.append(root)
        return cyclically_reduce(out, self.m)


class GroupService:
    """Level quotients, growth, finiteness, relators, transitivity and self-replication"""

    def _engine(self, automaton: Automaton) -> TreeActionService:
        return TreeActionService(automaton)

    def _generator_symbols(self, automaton: Automaton) -> List[int]:
        """Distinct nontrivial elements among the states and their inverses"""
        engine = self._engine(automaton)
        index = ElementIndex(engine)
        index.add(())
        symbols = []
        for s in automaton.generators:
            for symbol in (s, s + automaton.m):
                if index.add((symbol,))[1]:
                    symbols.append(symbol)
        return symbols

    def level_group(self, automaton: Automaton, level: int) -> LevelGroup:
        """Stabilizer chain of the group induced on level n"""
        check_level(automaton, level)
        degree = automaton.d ** level
        perms = level_permutations(automaton, level)
        generators = [
            Permutation(perms[s].tolist()) for s in automaton.generators
            if not np.array_equal(perms[s], np.arange(degree))
        ]
        if not generators:
            return LevelGroup(level=level, degree=degree, order=1)
        group = PermutationGroup(generators)
        group.schreier_sims()
        return LevelGroup(
            level=level,
            degree=degree,
            base=list(group.base),
            orbit_lengths=[len(orbit) for orbit in group.basic_orbits],
            strong_generator_count=len(group.strong_gens),
            order=int(group.order()),
        )

    def level_quotient_order(self, automaton: Automaton, level: int) -> int:
        """Order of the group induced on level n, by Schreier-Sims"""
        return self.level_group(automaton, level).order

    def sf_exponents(self, automaton: Automaton, max_level: int) -> List[int]:
        """log2 |G/Stab(n)| for n = 0..max_level (binary alphabet)"""
        if automaton.d != 2:
            raise ShapeError("SF exponents are defined for a binary alphabet")
        return [self.level_group(automaton, n).exponent for n in range(max_level + 1)]

    def _bfs(self, automaton: Automaton, radius: Optional[int], cap: Optional[int] = None) -> Iterator[Tuple[int, Symbols]]:
        """Distinct elements in BFS order as (word length, canonical word)"""
        engine = self._engine(automaton)
        index = ElementIndex(engine)
        index.add(())
        yield 0, ()
        generators = self._generator_symbols(automaton)
        frontier: List[Symbols] = [()]
        length = 0
        while frontier and (radius is None or length < radius):
            length += 1
            new_frontier = []
            for word in frontier:
                for symbol in generators:
                    candidate = engine.canonical(word + (symbol,))
                    _, is_new = index.add(candidate)
                    if is_new:
                        new_frontier.append(candidate)
                        yield length, candidate
                        if cap is not None and len(index) > cap:
                            return
            frontier = new_frontier

    def growth_elements(self, automaton: Automaton, radius: int) -> Iterator[Symbols]:
        """Distinct elements of the ball of the radius in BFS order"""
        for _, word in self._bfs(automaton, radius):
            yield word

    def growth_sequence(self, automaton: Automaton, radius: int) -> GrowthRecord:
        """gamma(k) = number of elements of length at most k"""
        counts = [0] * (radius + 1)
        for length, _ in self._bfs(automaton, radius):
            counts[length] += 1
        for k in range(1, radius + 1):
            counts[k] += counts[k - 1]
        return GrowthRecord(radius=radius, counts=counts)

    def quotient_exceeding(self, automaton: Automaton, cap: int) -> Optional[int]:
        """Least level whose quotient G/Stab(n) has more than cap elements, if any within max_level_points"""
        level = 1
        while automaton.d ** level <= settings.max_level_points:
            if self.level_quotient_order(automaton, level) > cap:
                return level
            level += 1
        return None

    def enumerate_if_finite(self, automaton: Automaton, cap: int) -> Union[int, OrderStatus]:
        """Group order when it is at most cap, otherwise Unknown.

        A level quotient larger than cap bounds |G| from below, so the
        breadth-first enumeration only runs when every quotient fits.
        """
        level = self.quotient_exceeding(automaton, cap)
        if level is not None:
            logger.debug(f"Level {level} quotient exceeds cap {cap}; skipping enumeration")
            return OrderStatus.UNKNOWN
        count = 0
        for _ in self._bfs(automaton, None, cap):
            count += 1
            if count > cap:
                logger.warning(f"Enumeration exceeded cap {cap}")
                return OrderStatus.UNKNOWN
        return count

    def verify_relator(self, automaton: Automaton, word: WordLike) -> bool:
        """Whether the word acts trivially on the whole tree"""
        return self._engine(automaton).is_identity(word)

    def relator_search(self, automaton: Automaton, radius: int) -> List[GenWord]:
        """Identity words up to the radius, one per cyclic class, minus consequences of shorter ones.

        A word is dropped when aliasing symbols through relators of length at
        most 2 changes it, or when a rotation contains more than half of a
        rotation of a known relator.
        """
        engine = self._engine(automaton)
        m = automaton.m
        aliases = _SymbolAliases(m)
        found: List[Symbols] = []
        pieces: Set[Symbols] = set()
        for word in reduced_words(m, radius):
            if len(word) > 1 and word[0] == invert_symbol(word[-1], m):
                continue
            if word != cyclic_class(word, m):
                continue
            if cyclic_class(aliases.normalize(word), m) != word:
                continue
            if self._contains_piece(word, pieces):
                continue
            if not engine.is_identity(word):
                continue
            found.append(word)
            aliases.add_relator(word)
            if len(word) > 2:
                pieces |= self._long_pieces(word, m)
            logger.debug(f"Relator {engine.format(word)}")
        return [engine.gen_word(word) for word in found]

    @staticmethod
    def _long_pieces(relator: Symbols, m: int) -> Set[Symbols]:
        """Subwords of rotations of r^(+-1) longer than half of r"""
        pieces = set()
        n = len(relator)
        for word in (relator, inverse_word(relator, m)):
            for i in range(n):
                rotation = word[i:] + word[:i]
                for length in range(n // 2 + 1, n + 1):
                    pieces.add(rotation[:length])
        return pieces

    @staticmethod
    def _contains_piece(word: Symbols, pieces: Set[Symbols]) -> bool:
        if not pieces:
            return False
        n = len(word)
        doubled = word + word
        lengths = {len(p) for p in pieces}
        return any(
            doubled[i:i + length] in pieces
            for length in lengths if length <= n
            for i in range(n)
        )

    def level_is_transitive(self, automaton: Automaton, level: int) -> bool:
        """Whether the generators act transitively on the vertices of the level"""
        perms = level_permutations(automaton, level)
        degree = perms.shape[1]
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for s in automaton.generators:
                image = int(perms[s][v])
                if image not in seen:
                    seen.add(image)
                    stack.append(image)
        return len(seen) == degree

    def group_level_transitive(self, automaton: Automaton, depth: int) -> Verdict:
        """Decide level transitivity (equivalently, infiniteness on the binary tree)"""
        checked = 0
        for level in range(1, depth + 1):
            if automaton.d ** level > settings.max_level_points:
                break
            if not self.level_is_transitive(automaton, level):
                return Verdict.NO
            checked = level
        engine = self._engine(automaton)
        if automaton.d == 2:
            generators = [s for s in range(2 * automaton.m) if s % automaton.m in automaton.generators]
            for word in reduced_words(automaton.m, 3):
                if all(symbol in generators for symbol in word) and engine.is_level_transitive(word):
                    return Verdict.YES
        if self.enumerate_if_finite(automaton, settings.enumeration_cap) != OrderStatus.UNKNOWN:
            return Verdict.NO
        if checked == depth:
            return Verdict.YES
        logger.warning(f"Level transitivity checked only to level {checked}")
        return Verdict.UNKNOWN

    def projected_generators(self, automaton: Automaton) -> List[Symbols]:
        """Sections at a fixed vertex of Schreier generators of the first level stabilizer"""
        if automaton.d != 2:
            raise ShapeError("self-replication check needs a binary alphabet")
        engine = self._engine(automaton)
        m = automaton.m
        active = [s for s in automaton.generators if automaton.is_active(s)]
        candidates: List[Tuple[Symbols, int]] = []
        if active:
            # transversal of the level-1 action: t_0 = 1, t_1 = an active generator
            transversal = {0: (), 1: (active[0],)}
            for x, t_x in transversal.items():
                for s in automaton.generators:
                    t_image = transversal[engine.perms[s][x]]
                    candidates.append((inverse_word(t_image, m) + (s,) + t_x, 0))
        else:
            for s in automaton.generators:
                candidates.append(((s,), 0))
                candidates.append(((s,), 1))

        index = ElementIndex(engine)
        index.add(())
        projected: List[Symbols] = []
        for schreier, vertex in candidates:
            section = engine.canonical(engine.section_symbols(schreier, (vertex,)))
            if index.add(section)[1]:
                projected.append(section)
        return projected

    def self_replicating_check(self, automaton: Automaton, radius: int, depth: int) -> SelfReplicatingResult:
        """Project the first-level stabilizer to vertex 0 and compare with the whole group.

        Yes needs every projected generator written back within the radius,
        No a level up to depth where the two level quotients differ.
        """
        engine = self._engine(automaton)
        projected = self.projected_generators(automaton)
        names = [engine.format(word) for word in projected]

        # Yes: every generator is a short product of projected generators
        targets = {s for s in automaton.generators if not engine.is_identity((s,))}
        if not targets:
            return SelfReplicatingResult(status=Verdict.YES, projected_generators=names)
        steps = projected + [inverse_word(word, automaton.m) for word in projected]
        index = ElementIndex(engine)
        index.add(())
        frontier: List[Symbols] = [()]
        for _ in range(radius):
            new_frontier = []
            for word in frontier:
                for step in steps:
                    candidate = engine.canonical(word + step)
                    if index.add(candidate)[1]:
                        new_frontier.append(candidate)
            frontier = new_frontier
            targets = {s for s in targets if index.find((s,)) is None}
            if not targets:
                return SelfReplicatingResult(status=Verdict.YES, projected_generators=names)

        # No: the level quotients of the projection and of the group differ
        for level in range(1, depth + 1):
            if automaton.d ** level > settings.max_level_points:
                break
            group_order = self.level_quotient_order(automaton, level)
            perms = [word_level_permutation(automaton, word, level).tolist() for word in projected]
            perms = [p for p in perms if p != list(range(len(p)))]
            projected_order = int(PermutationGroup([Permutation(p) for p in perms]).order()) if perms else 1
            if projected_order != group_order:
                return SelfReplicatingResult(
                    status=Verdict.NO, projected_generators=names, separating_level=level,
                )
        logger.warning(f"Self-replication undecided within radius {radius} and depth {depth}")
        return SelfReplicatingResult(status=Verdict.UNKNOWN, projected_generators=names)
