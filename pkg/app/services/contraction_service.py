import logging
from collections import deque
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np

from app.core.config import settings
from app.core.errors import NotContractingError
from app.core.logging_config import metrics_logger
from app.models.automaton import ActivityKind, Automaton, Verdict, format_recursion
from app.models.word import Symbols
from app.schemas.analysis import ActivityClass, ContractionResult, NoncontractionWitness, Nucleus
from app.services.group_service import GroupService, check_level, level_vertices, word_level_permutation
from app.services.mealy_service import moore_graph
from app.services.tree_action_service import ElementIndex, TreeActionService, vertex_str

logger = logging.getLogger(__name__)

ACTIVITY_SAMPLES = 12


def sample_agrees(kind: ActivityKind, degree: Optional[int], counts: List[int]) -> bool:
    """Coarse check of an activity class against f(0..12).

    f(6) and f(12) share a residue class for every cycle period dividing 6.
    Bounded counts reach no new maximum after n = 6. Polynomial counts grow
    from f(6) to f(12) by a factor of at most 4^degree; exponential ones grow.
    """
    middle = len(counts) // 2
    early, late = counts[middle], counts[-1]
    if kind == ActivityKind.BOUNDED:
        return late <= max(counts[:middle + 1])
    if kind == ActivityKind.POLYNOMIAL:
        return early < late <= 4 ** (degree or 0) * max(early, 1)
    return late > early


class _SectionSet:
    """Element set closed under sections, with its section graph"""

    def __init__(self, engine: TreeActionService):
        self.engine = engine
        self.index = ElementIndex(engine)
        self.graph = nx.DiGraph()

    def __len__(self) -> int:
        return len(self.index)

    def add_closed(self, word: Symbols) -> None:
        """Add an element together with all of its sections"""
        idx, is_new = self.index.add(word)
        if not is_new:
            return
        queue = deque([idx])
        self.graph.add_node(idx)
        while queue:
            current = queue.popleft()
            _, children = self.engine.step(self.index.elements[current])
            for child in children:
                child_idx, child_new = self.index.add(child)
                self.graph.add_edge(current, child_idx)
                if child_new:
                    queue.append(child_idx)

    def recurrent(self) -> List[int]:
        """Indices lying on cycles of the section graph (self-loops included)"""
        cyclic = set()
        for component in nx.strongly_connected_components(self.graph):
            if len(component) > 1:
                cyclic |= component
            else:
                node = next(iter(component))
                if self.graph.has_edge(node, node):
                    cyclic.add(node)
        return sorted(cyclic)


class ContractionService:
    def __init__(self):
        self.group_service = GroupService()

    def _engine(self, automaton: Automaton) -> TreeActionService:
        return TreeActionService(automaton)

    def _settle(self, engine: TreeActionService, sections: _SectionSet, product: Symbols,
                depth_cap: int) -> Tuple[Optional[int], List[Symbols]]:
        """Follow the sections of a product until they land in the set.

        Returns the landing depth and the unlanded elements that recur on
        cycles; the depth is None when some branch survives depth_cap. The
        landing depth counts the longest branch, where a branch lands on the
        set or on a recurring element.
        """
        local = ElementIndex(engine)
        graph = nx.DiGraph()
        queue = deque([(product, 0, None)])
        while queue:
            word, depth, parent = queue.popleft()
            if sections.index.find(word) is not None:
                continue
            idx, is_new = local.add(word)
            graph.add_node(idx)
            if parent is not None:
                graph.add_edge(parent, idx)
            if not is_new:
                continue
            if depth >= depth_cap:
                return None, []
            _, children = engine.step(local.elements[idx])
            for child in children:
                queue.append((child, depth + 1, idx))
        if not len(local):
            return 0, []

        persistent = set()
        for component in nx.strongly_connected_components(graph):
            node = next(iter(component))
            if len(component) > 1 or graph.has_edge(node, node):
                persistent |= component
        if 0 in persistent:
            return 0, [local.elements[i] for i in sorted(persistent)]
        # transient elements form a DAG below the product (index 0)
        transient = graph.subgraph(n for n in graph if n not in persistent)
        longest = {0: 0}
        for node in nx.topological_sort(transient):
            if node not in longest:
                continue
            for child in transient.successors(node):
                longest[child] = max(longest.get(child, 0), longest[node] + 1)
        return max(longest.values()) + 1, [local.elements[i] for i in sorted(persistent)]

    def _nucleus(self, automaton: Automaton, size_cap: int, depth_cap: int) -> Optional[Tuple[Nucleus, List[Symbols]]]:
        engine = self._engine(automaton)
        sections = _SectionSet(engine)
        sections.add_closed(())
        for s in automaton.generators:
            sections.add_closed((s,))
            sections.add_closed((s + automaton.m,))

        deepest = 0
        done = 0
        while done < len(sections):
            size = len(sections)
            added = False
            for i in range(size):
                for j in range(size):
                    if i < done and j < done:
                        continue
                    first, second = sections.index.elements[i], sections.index.elements[j]
                    depth, persistent = self._settle(engine, sections, engine.canonical(first + second), depth_cap)
                    if depth is None:
                        logger.warning(f"Nucleus search hit depth cap {depth_cap}")
                        return None
                    deepest = max(deepest, depth)
                    for word in persistent:
                        sections.add_closed(word)
                        added = True
                    if len(sections) > size_cap:
                        logger.warning(f"Nucleus search exceeded size cap {size_cap}")
                        return None
            done = size
            if not added:
                break

        nucleus_ids: Set[int] = set(sections.recurrent())
        for idx in list(nucleus_ids):
            nucleus_ids |= nx.descendants(sections.graph, idx)
        members = sorted(nucleus_ids)
        words = sections.index.elements
        nucleus = Nucleus(
            elements=[engine.format(words[i]) for i in members],
            closure=[engine.format(w) for w in words],
            size=len(members),
            closure_size=len(words),
            depth=deepest,
        )
        logger.info(f"Nucleus of size {nucleus.size} (closure with generators {nucleus.closure_size})")
        return nucleus, [words[i] for i in members]

    def nucleus_search(self, automaton: Automaton, size_cap: int, depth_cap: int) -> Optional[Nucleus]:
        """Nucleus of a contracting group, or None (Unknown) within the caps"""
        found = self._nucleus(automaton, size_cap, depth_cap)
        return found[0] if found else None

    def nucleus_words(self, automaton: Automaton, size_cap: int, depth_cap: int) -> Optional[List[Symbols]]:
        """Nucleus elements as canonical words"""
        found = self._nucleus(automaton, size_cap, depth_cap)
        return found[1] if found else None

    def _witness_search(self, automaton: Automaton, word_radius: int,
                        vertex_depth: int) -> Tuple[Optional[NoncontractionWitness], List[Tuple[str, str]]]:
        engine = self._engine(automaton)
        candidates: List[Tuple[str, str]] = []
        for w in self.group_service.growth_elements(automaton, word_radius):
            if not w:
                continue
            signature = engine.portrait_id(w, 4)
            stack = []
            images, children = engine.step(w)
            for x in range(automaton.d):
                if images[x] == x:
                    stack.append((children[x], (x,)))
            while stack:
                u, v = stack.pop()
                if u and engine.portrait_id(u, 4) == signature and engine.equals(u, w):
                    certificate = engine.infinite_order_certificate(w)
                    if certificate is not None:
                        return NoncontractionWitness(
                            word=engine.format(w), vertex=vertex_str(v), certificate=certificate,
                        ), candidates
                    candidates.append((engine.format(w), vertex_str(v)))
                    break
                if u and len(v) < vertex_depth:
                    images, children = engine.step(u)
                    for x in range(automaton.d):
                        if images[x] == x:
                            stack.append((children[x], v + (x,)))
        return None, candidates

    def noncontraction_witness(self, automaton: Automaton, word_radius: int,
                               vertex_depth: int) -> Optional[NoncontractionWitness]:
        """Element of infinite order fixing a vertex and equal to its section there"""
        if automaton.d != 2:
            return None
        return self._witness_search(automaton, word_radius, vertex_depth)[0]

    def contraction_status(self, automaton: Automaton) -> ContractionResult:
        """Witness search first, then the nucleus search; Unknown keeps the uncertified candidates"""
        recursion = format_recursion(automaton)
        timer = metrics_logger.start_timer(f"contraction_status:{recursion}")
        candidates: List[Tuple[str, str]] = []
        try:
            if automaton.d == 2:
                witness, candidates = self._witness_search(
                    automaton, settings.witness_word_radius, settings.witness_vertex_depth,
                )
                if witness is not None:
                    metrics_logger.end_timer(timer, outcome="no")
                    return ContractionResult(status=Verdict.NO, witness=witness)
            nucleus = self.nucleus_search(automaton, settings.nucleus_size_cap, settings.nucleus_depth_cap)
        except Exception as e:
            metrics_logger.end_timer(timer)
            logger.error(f"Contraction status of {recursion} failed: {e}")
            raise
        metrics_logger.end_timer(timer, outcome="yes" if nucleus else "unknown")
        if nucleus is not None:
            return ContractionResult(status=Verdict.YES, nucleus=nucleus)
        return ContractionResult(status=Verdict.UNKNOWN, candidates=candidates)

    def activity_class(self, automaton: Automaton, state: int) -> ActivityClass:
        """Growth of the number of active sections of a state, structurally and by sampling"""
        graph = moore_graph(automaton)
        components = list(nx.strongly_connected_components(graph))
        component_of = {node: i for i, comp in enumerate(components) for node in comp}
        internal = [0] * len(components)
        for u, v in graph.edges():
            if component_of[u] == component_of[v]:
                internal[component_of[u]] += 1

        active = [s for s in range(automaton.m) if automaton.is_active(s)]
        reaches_active = set(active)
        for s in active:
            reaches_active |= nx.ancestors(graph, s)
        reachable = nx.descendants(graph, state) | {state}
        relevant = {component_of[s] for s in reachable & reaches_active}

        counts = self._sample_counts(automaton, state)
        name = automaton.name(state)
        if any(internal[c] > len(components[c]) for c in relevant):
            kind, degree = ActivityKind.EXPONENTIAL, None
        else:
            condensation = nx.condensation(graph, scc=components)
            cycles: Dict[int, int] = {}
            for c in reversed(list(nx.topological_sort(condensation))):
                if c not in relevant:
                    continue
                own = 1 if internal[c] >= 1 else 0
                cycles[c] = own + max((cycles[n] for n in condensation.successors(c) if n in cycles), default=0)
            count = cycles.get(component_of[state], 0)
            if count <= 1:
                kind, degree = ActivityKind.BOUNDED, 0
            else:
                kind, degree = ActivityKind.POLYNOMIAL, count - 1

        agrees = sample_agrees(kind, degree, counts)
        if not agrees:
            logger.warning(
                f"Activity of state {name} classified {kind.value} (degree {degree}) "
                f"but sampled counts {counts} disagree"
            )
        return ActivityClass(state=name, kind=kind, degree=degree, counts=counts, sample_agrees=agrees)

    @staticmethod
    def _sample_counts(automaton: Automaton, state: int) -> List[int]:
        adjacency = np.zeros((automaton.m, automaton.m), dtype=np.int64)
        for s in range(automaton.m):
            for t in automaton.transition[s]:
                adjacency[s, t] += 1
        vector = np.array([1 if automaton.is_active(s) else 0 for s in range(automaton.m)], dtype=np.int64)
        counts = []
        for _ in range(ACTIVITY_SAMPLES + 1):
            counts.append(int(vector[state]))
            vector = adjacency @ vector
        return counts

    def is_bounded(self, automaton: Automaton) -> bool:
        """Every state has bounded activity"""
        return all(
            self.activity_class(automaton, s).kind == ActivityKind.BOUNDED for s in range(automaton.m)
        )

    def tile_graph(self, automaton: Automaton, level: int) -> nx.Graph:
        """Level-n tile adjacency: v1 ~ v2 when a nucleus element maps v1 to v2"""
        check_level(automaton, level)
        words = self.nucleus_words(automaton, settings.nucleus_size_cap, settings.nucleus_depth_cap)
        if words is None:
            raise NotContractingError(f"no nucleus found for {automaton.name(0)}-machine within the caps")
        n = automaton.d ** level
        labels = level_vertices(automaton.d, level)
        graph = nx.Graph()
        graph.add_nodes_from(labels)
        for word in words:
            images = word_level_permutation(automaton, word, level)
            for v in range(n):
                if images[v] != v:
                    graph.add_edge(labels[v], labels[int(images[v])])
        return graph
