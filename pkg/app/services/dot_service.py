import logging

import graphviz

from app.models.automaton import Automaton, cycle_notation
from app.services.contraction_service import ContractionService
from app.services.spectra_service import SpectraService

logger = logging.getLogger(__name__)


class DotService:
    """DOT text for Moore diagrams, level Schreier graphs and tile graphs"""

    def moore_dot(self, automaton: Automaton) -> str:
        dot = graphviz.Digraph("moore")
        dot.attr(rankdir="LR")
        for s in range(automaton.m):
            label = f"{automaton.name(s)}:{cycle_notation(automaton.output[s])}"
            dot.node(str(s), label, shape="circle" if automaton.is_active(s) else "ellipse")
        for s in range(automaton.m):
            for x, t in enumerate(automaton.transition[s]):
                dot.edge(str(s), str(t), label=str(x))
        return dot.source

    def schreier_dot(self, automaton: Automaton, level: int) -> str:
        graph = SpectraService().schreier_level_graph(automaton, level)
        dot = graphviz.Digraph(f"schreier_{level}")
        for vertex in graph.vertices:
            dot.node(vertex or "root", vertex or "root")
        for arc in graph.arcs:
            dot.edge(arc.source or "root", arc.target or "root", label=arc.label)
        return dot.source

    def tile_dot(self, automaton: Automaton, level: int) -> str:
        graph = ContractionService().tile_graph(automaton, level)
        dot = graphviz.Graph(f"tile_{level}")
        for vertex in sorted(graph.nodes):
            dot.node(vertex or "root", vertex or "root")
        for u, v in sorted(tuple(sorted(edge)) for edge in graph.edges):
            dot.edge(u, v)
        logger.debug(f"Tile graph level {level}: {graph.number_of_edges()} edges")
        return dot.source
