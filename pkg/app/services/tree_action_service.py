import itertools
import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy

from app.core.config import settings
from app.core.errors import ShapeError
from app.models.automaton import Automaton, OrderStatus, inverse_permutation
from app.models.series import T, RationalSeries
from app.models.word import (
    GenWord, Symbols, format_word, free_reduce, inverse_word, power,
)
from app.schemas.analysis import CertificateReason, NotFreeWitness, OrderCertificate
from app.services.mealy_service import state_partition

logger = logging.getLogger(__name__)

WordLike = Union[GenWord, Sequence[int]]
VertexLike = Union[str, Sequence[int]]

ONE = sympy.Poly(1, T, modulus=2)
T_POLY = sympy.Poly(T, T, modulus=2)

CERTIFICATE_POWERS = 4
CERTIFICATE_DEPTH = 6


def to_vertex(v: VertexLike) -> Tuple[int, ...]:
    if isinstance(v, str):
        return tuple(int(ch) for ch in v)
    return tuple(v)


def vertex_str(v: Sequence[int]) -> str:
    return "".join(str(x) for x in v)


class TreeActionService:
    """Exact calculus of the tree automorphisms defined by one automaton.

    Memo tables are per instance and bounded by engine_memo_limit. Services
    build one engine per call; an instance must not be shared between threads.
    """

    def __init__(self, automaton: Automaton):
        self.automaton = automaton
        self.m = automaton.m
        self.d = automaton.d
        m = self.m
        self.perms: List[Tuple[int, ...]] = list(automaton.output)
        self.sections: List[Tuple[int, ...]] = [tuple(row) for row in automaton.transition]
        for s in range(m):
            inv = inverse_permutation(automaton.output[s])
            self.perms.append(inv)
            self.sections.append(tuple(automaton.transition[s][inv[x]] + m for x in range(self.d)))

        # Equivalent states share one representative; trivial states vanish
        classes = state_partition(automaton)
        trivial = set(automaton.trivial_states())
        first_of_class: Dict[int, int] = {}
        for s in range(m):
            first_of_class.setdefault(classes[s], s)
        self._rename: List[Optional[int]] = []
        for symbol in range(2 * m):
            s = symbol % m
            if s in trivial:
                self._rename.append(None)
            else:
                rep = first_of_class[classes[s]]
                self._rename.append(rep if symbol < m else rep + m)

        self._steps: Dict[Symbols, Tuple[Tuple[int, ...], Tuple[Symbols, ...]]] = {}
        self._identity: Dict[Symbols, bool] = {}
        self._portraits: Dict[Tuple[Symbols, int], int] = {}
        self._portrait_ids: Dict[tuple, int] = {}
        self._certificates: Dict[Symbols, Optional[OrderCertificate]] = {}
        self._partition = None
        self._partition_ready = False

    @staticmethod
    def _remember(table: dict, key, value) -> None:
        """Store a memo entry, dropping the whole table once it reaches the memo limit"""
        if len(table) >= settings.engine_memo_limit:
            logger.debug(f"Memo table reached {len(table)} entries; clearing")
            table.clear()
        table[key] = value

    # -- words ---------------------------------------------------------

    def symbols(self, word: WordLike) -> Symbols:
        if isinstance(word, GenWord):
            return word.symbols
        return tuple(word)

    def canonical(self, word: WordLike) -> Symbols:
        """Free reduction after merging equivalent states and dropping trivial ones"""
        renamed = [self._rename[s] for s in self.symbols(word)]
        return free_reduce([s for s in renamed if s is not None], self.m)

    def gen_word(self, symbols: Sequence[int]) -> GenWord:
        return GenWord.from_symbols(self.automaton, symbols)

    def format(self, symbols: Sequence[int]) -> str:
        return format_word(symbols, self.automaton)

    def step(self, word: Symbols) -> Tuple[Tuple[int, ...], Tuple[Symbols, ...]]:
        """Root images and canonical first-level sections of a canonical word"""
        cached = self._steps.get(word)
        if cached is not None:
            return cached
        images = []
        children = []
        for x in range(self.d):
            y = x
            collected = []
            for symbol in reversed(word):
                collected.append(self.sections[symbol][y])
                y = self.perms[symbol][y]
            images.append(y)
            children.append(self.canonical(collected[::-1]))
        result = (tuple(images), tuple(children))
        self._remember(self._steps, word, result)
        return result

    # -- action --------------------------------------------------------

    def root_perm(self, word: WordLike) -> Tuple[int, ...]:
        images = list(range(self.d))
        for symbol in reversed(self.symbols(word)):
            images = [self.perms[symbol][y] for y in images]
        return tuple(images)

    def _act_symbol(self, symbol: int, vertex: Tuple[int, ...]) -> Tuple[int, ...]:
        out = []
        for x in vertex:
            out.append(self.perms[symbol][x])
            symbol = self.sections[symbol][x]
        return tuple(out)

    def act(self, word: WordLike, vertex: VertexLike):
        """Image of a vertex; returns a string when given a string"""
        v = to_vertex(vertex)
        for symbol in reversed(self.symbols(word)):
            v = self._act_symbol(symbol, v)
        return vertex_str(v) if isinstance(vertex, str) else v

    def section_symbols(self, word: WordLike, vertex: VertexLike) -> Symbols:
        current = self.symbols(word)
        for x in to_vertex(vertex):
            collected = []
            y = x
            for symbol in reversed(current):
                collected.append(self.sections[symbol][y])
                y = self.perms[symbol][y]
            current = free_reduce(collected[::-1], self.m)
        return current

    def section(self, word: WordLike, vertex: VertexLike) -> GenWord:
        """Section by the chain rule (fg)|u = f|g(u) g|u, freely reduced only"""
        return self.gen_word(self.section_symbols(word, vertex))

    # -- word problem --------------------------------------------------

    def is_identity(self, word: WordLike) -> bool:
        start = self.canonical(word)
        if not start:
            return True
        cached = self._identity.get(start)
        if cached is not None:
            return cached
        identity = tuple(range(self.d))
        seen = {start}
        queue = deque([start])
        result = True
        while queue:
            images, children = self.step(queue.popleft())
            if images != identity:
                result = False
                break
            for child in children:
                if child and child not in seen:
                    seen.add(child)
                    queue.append(child)
        self._remember(self._identity, start, result)
        return result

    def equals(self, first: WordLike, second: WordLike) -> bool:
        return self.is_identity(self.symbols(first) + inverse_word(self.symbols(second), self.m))

    def portrait_id(self, word: Symbols, depth: int) -> int:
        """Interned id of the action portrait to the given depth (equal elements share ids)"""
        if depth <= 0:
            return 0
        key = (word, depth)
        cached = self._portraits.get(key)
        if cached is not None:
            return cached
        images, children = self.step(word)
        signature = (images, tuple(self.portrait_id(c, depth - 1) for c in children))
        pid = self._portrait_ids.setdefault(signature, len(self._portrait_ids) + 1)
        self._remember(self._portraits, key, pid)
        return pid

    # -- orders --------------------------------------------------------

    def order_bounded(self, word: WordLike, cap: int) -> Union[int, OrderStatus]:
        """Least k <= cap with w^k = 1, Infinite when certified, else Unknown"""
        w = self.canonical(word)
        if not w or self.is_identity(w):
            return 1
        if self.infinite_order_certificate(w) is not None:
            return OrderStatus.INFINITE
        if self.d == 2:
            # finite orders on the binary tree are powers of two
            k = 2
            while k <= cap:
                if self.is_identity(power(w, k, self.m)):
                    return k
                k *= 2
        else:
            for k in range(2, cap + 1):
                if self.is_identity(power(w, k, self.m)):
                    return k
        return OrderStatus.UNKNOWN

    def infinite_order_certificate(self, word: WordLike) -> Optional[OrderCertificate]:
        """Sound, incomplete proof of infinite order on the binary tree.

        Searches powers w^k (k <= 4) and vertices v (depth <= 6) fixed by w^k
        for a section u = (w^k)|v that is level transitive, lies in the
        non-torsion parity class, or equals w^(+-1) with k even.
        """
        if self.d != 2:
            return None
        w = self.canonical(word)
        if w in self._certificates:
            return self._certificates[w]
        certificate = None
        if w and not self.is_identity(w):
            certificate = self._search_certificate(w)
        self._certificates[w] = certificate
        return certificate

    def _search_certificate(self, w: Symbols) -> Optional[OrderCertificate]:
        w_inverse = inverse_word(w, self.m)
        for k in range(1, CERTIFICATE_POWERS + 1):
            wk = self.canonical(power(w, k, self.m))
            if self.is_identity(wk):
                return None
            queue = deque([(wk, ())])
            while queue:
                u, v = queue.popleft()
                if not u:
                    continue
                reason = self._certify_section(u, k, w, w_inverse)
                if reason is not None:
                    logger.debug(f"Infinite order of {self.format(w)} via {reason.value} at power {k}")
                    return OrderCertificate(
                        word=self.format(w), power=k, vertex=vertex_str(v),
                        section=self.format(u), reason=reason,
                    )
                if len(v) < CERTIFICATE_DEPTH:
                    images, children = self.step(u)
                    for x in range(self.d):
                        if images[x] == x:
                            queue.append((children[x], v + (x,)))
        return None

    def _certify_section(self, u: Symbols, k: int, w: Symbols, w_inverse: Symbols) -> Optional[CertificateReason]:
        if self.nontorsion_partition() is not None and self.in_nontorsion_class(u):
            return CertificateReason.NONTORSION_PARITY
        if k % 2 == 0:
            for target in (w, w_inverse):
                if self.portrait_id(u, 4) == self.portrait_id(target, 4) and self.equals(u, target):
                    return CertificateReason.SELF_SIMILAR_POWER
        if self._quick_transitive(u) and self.transitivity_series(u) == RationalSeries.geometric():
            return CertificateReason.LEVEL_TRANSITIVE
        return None

    # -- transitivity --------------------------------------------------

    def _quick_transitive(self, w: Symbols, level: int = 3) -> bool:
        """Necessary condition: the all-zero vertex has a full orbit at a small level"""
        start = (0,) * level
        v = start
        for _ in range(self.d ** level - 1):
            v = self.act(w, v)
            if v == start:
                return False
        return self.act(w, v) == start

    def transitivity_series(self, word: WordLike) -> RationalSeries:
        """Solve g = i(g) + t(g_0 + g_1) over GF(2)(t) for the series of w"""
        if self.d != 2:
            raise ShapeError("transitivity series needs a binary alphabet")
        w = self.canonical(word)
        if not w:
            return RationalSeries()

        nodes = [w]
        index = {w: 0}
        position = 0
        while position < len(nodes):
            _, children = self.step(nodes[position])
            for child in children:
                if child not in index:
                    index[child] = len(nodes)
                    nodes.append(child)
            position += 1

        rows = []
        for u in nodes:
            images, children = self.step(u)
            row: Dict[int, sympy.Poly] = {index[u]: ONE}
            for child in children:
                col = index[child]
                row[col] = row.get(col, sympy.Poly(0, T, modulus=2)) + T_POLY
            row = {col: coeff for col, coeff in row.items() if not coeff.is_zero}
            rhs = ONE if images[0] != 0 else sympy.Poly(0, T, modulus=2)
            rows.append((row, rhs))

        # Eliminate every unknown but w's (index 0); w's row is what remains
        remaining = list(range(len(rows)))
        for col in range(1, len(nodes)):
            candidates = [r for r in remaining if col in rows[r][0]]
            if not candidates:
                continue
            pivot = min(candidates, key=lambda r: (rows[r][0][col].degree(), len(rows[r][0]), r))
            remaining.remove(pivot)
            pivot_row, pivot_rhs = rows[pivot]
            p = pivot_row[col]
            for r in remaining:
                row, rhs = rows[r]
                if col not in row:
                    continue
                q = row[col]
                combined = {c: coeff * p for c, coeff in row.items()}
                for c, coeff in pivot_row.items():
                    combined[c] = combined.get(c, sympy.Poly(0, T, modulus=2)) - coeff * q
                combined = {c: coeff for c, coeff in combined.items() if not coeff.is_zero}
                new_rhs = rhs * p - pivot_rhs * q
                rows[r] = self._remove_content(combined, new_rhs)

        for r in remaining:
            row, rhs = rows[r]
            if 0 in row:
                return RationalSeries.from_polys(rhs, row[0])
        raise ArithmeticError("transitivity system is singular")

    @staticmethod
    def _remove_content(row: Dict[int, sympy.Poly], rhs: sympy.Poly):
        content = None
        for coeff in list(row.values()) + ([rhs] if not rhs.is_zero else []):
            content = coeff if content is None else content.gcd(coeff)
        if content is None or content.degree() <= 0:
            return row, rhs
        return {c: coeff.exquo(content) for c, coeff in row.items()}, rhs.exquo(content)

    def is_level_transitive(self, word: WordLike) -> bool:
        if self.d != 2:
            raise ShapeError("level transitivity test needs a binary alphabet")
        w = self.canonical(word)
        if not w or not self._quick_transitive(w):
            return False
        return self.transitivity_series(w) == RationalSeries.geometric()

    def orbit_sizes(self, word: WordLike, level: int) -> List[int]:
        """Cycle lengths of w on the level vertices (brute force)"""
        w = self.symbols(word)
        seen = set()
        sizes = []
        for vertex in itertools.product(range(self.d), repeat=level):
            if vertex in seen:
                continue
            size = 0
            v = vertex
            while v not in seen:
                seen.add(v)
                size += 1
                v = self.act(w, v)
            sizes.append(size)
        return sorted(sizes)

    # -- torsion and freeness lemmas ------------------------------------

    def nontorsion_partition(self) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Split (P, Q) of the states satisfying the non-torsion conditions"""
        if self._partition_ready:
            return self._partition
        if self.d != 2:
            raise ShapeError("non-torsion partition needs a binary alphabet")
        automaton = self.automaton
        active = {s for s in range(self.m) if automaton.is_active(s)}
        inactive = set(range(self.m)) - active
        result = None
        for mask in range(1, 2 ** self.m - 1):
            part_p = {s for s in range(self.m) if mask >> s & 1}
            if part_p != active and part_p != inactive:
                continue
            in_p = [t in part_p for t in range(self.m)]
            ok = all(
                len({in_p[t] for t in automaton.transition[s]}) == 1
                if in_p[s] else
                sorted(in_p[t] for t in automaton.transition[s]) == [False, True]
                for s in range(self.m)
            )
            if ok:
                result = (tuple(sorted(part_p)), tuple(s for s in range(self.m) if s not in part_p))
                break
        self._partition = result
        self._partition_ready = True
        return result

    def in_nontorsion_class(self, word: WordLike) -> bool:
        """Odd number of active letters and odd number of inactive letters"""
        active = sum(1 for s in self.symbols(word) if self.automaton.is_active(s % self.m))
        inactive = len(self.symbols(word)) - active
        return active % 2 == 1 and inactive % 2 == 1

    def not_free_witness(self, radius: int) -> Optional[NotFreeWitness]:
        """Shortlex search for nontrivial (1, u) and (v, 1) in the level-1 stabilizer"""
        if self.d != 2:
            raise ShapeError("not-free witness search needs a binary alphabet")
        identity = tuple(range(self.d))
        first = second = None
        for word in reduced_words(self.m, radius):
            w = self.canonical(word)
            if not w:
                continue
            images, (left, right) = self.step(w)
            if images != identity:
                continue
            left_trivial = self.is_identity(left)
            right_trivial = self.is_identity(right)
            if first is None and left_trivial and not right_trivial:
                first = (word, right)
            elif second is None and right_trivial and not left_trivial:
                second = (word, left)
            if first and second:
                return NotFreeWitness(
                    first=self.format(first[0]), first_section=self.format(first[1]),
                    second=self.format(second[0]), second_section=self.format(second[1]),
                )
        return None


def reduced_words(m: int, max_length: int, min_length: int = 1):
    """Freely reduced words over 2m symbols in shortlex order"""
    frontier: List[Symbols] = [()]
    for length in range(1, max_length + 1):
        extended = []
        for word in frontier:
            for symbol in range(2 * m):
                if word and word[-1] == (symbol + m if symbol < m else symbol - m):
                    continue
                extended.append(word + (symbol,))
        frontier = extended
        if length >= min_length:
            yield from frontier


class ElementIndex:
    """Set of distinct group elements keyed by exact word, then portrait, then equality"""

    def __init__(self, engine: TreeActionService, depth: Optional[int] = None):
        self.engine = engine
        self.depth = depth if depth is not None else settings.portrait_depth
        self.elements: List[Symbols] = []
        self._exact: Dict[Symbols, int] = {}
        self._buckets: Dict[int, List[int]] = {}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, word) -> bool:
        return self.find(word) is not None

    def find(self, word: WordLike) -> Optional[int]:
        w = self.engine.canonical(word)
        found = self._exact.get(w)
        if found is not None:
            return found
        pid = self.engine.portrait_id(w, self.depth)
        for idx in self._buckets.get(pid, ()):
            if self.engine.equals(self.elements[idx], w):
                self._exact[w] = idx
                return idx
        return None

    def add(self, word: WordLike) -> Tuple[int, bool]:
        """Index of the element and whether it was new"""
        found = self.find(word)
        if found is not None:
            return found, False
        w = self.engine.canonical(word)
        idx = len(self.elements)
        self.elements.append(w)
        self._exact[w] = idx
        self._buckets.setdefault(self.engine.portrait_id(w, self.depth), []).append(idx)
        return idx, True

