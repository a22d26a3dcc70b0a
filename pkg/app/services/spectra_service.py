import logging
import math
from typing import Optional

import numpy as np

from app.core.config import settings
from app.core.errors import NonSymmetricMatrixError
from app.core.logging_config import metrics_logger
from app.models.automaton import Automaton, format_recursion
from app.schemas.analysis import SchreierArc, SchreierLevelGraph, SpectrumResult
from app.services.group_service import check_level, level_permutations, level_vertices

logger = logging.getLogger(__name__)

MAX_SWEEPS = 100


class SpectraService:
    """Level Schreier graphs and spectra of the averaged generator operators"""

    def schreier_level_graph(self, automaton: Automaton, level: int) -> SchreierLevelGraph:
        """Arcs v -> s(v) for every generator s and vertex v of the level"""
        check_level(automaton, level)
        vertices = level_vertices(automaton.d, level)
        perms = level_permutations(automaton, level)
        arcs = [
            SchreierArc(source=vertices[v], label=automaton.name(s), target=vertices[int(perms[s][v])])
            for s in automaton.generators
            for v in range(len(vertices))
        ]
        return SchreierLevelGraph(level=level, vertices=vertices, arcs=arcs)

    def operator_matrix(self, automaton: Automaton, level: int, symmetrize: bool = True) -> np.ndarray:
        """Average of the generators' level permutation matrices (and their inverses when symmetrized)"""
        check_level(automaton, level)
        perms = level_permutations(automaton, level)
        size = perms.shape[1]
        rows = np.arange(size)
        symbols = list(automaton.generators)
        if symmetrize:
            symbols += [s + automaton.m for s in automaton.generators]
        matrix = np.zeros((size, size))
        for symbol in symbols:
            np.add.at(matrix, (rows, perms[symbol]), 1.0)
        if symbols:
            matrix /= len(symbols)
        else:
            matrix = np.eye(size)
        return matrix

    def symmetric_spectrum(self, matrix: np.ndarray, tol: Optional[float] = None,
                           bins: Optional[int] = None) -> SpectrumResult:
        """Eigenvalues by cyclic Jacobi rotations, with a histogram over [-1, 1]"""
        tol = settings.spectrum_tol if tol is None else tol
        bins = bins or settings.histogram_bins
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or not np.allclose(a, a.T, atol=1e-12):
            raise NonSymmetricMatrixError("matrix is not square and symmetric")
        n = a.shape[0]

        sweeps = 0
        residual = self._off_diagonal(a)
        while residual >= tol and sweeps < MAX_SWEEPS:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(a[p, q]) < tol:
                        continue
                    self._rotate(a, p, q)
            sweeps += 1
            residual = self._off_diagonal(a)
        if residual >= tol:
            logger.warning(f"Jacobi stopped after {sweeps} sweeps with residual {residual:.3g}")

        eigenvalues = np.sort(np.diag(a))
        counts, edges = np.histogram(np.clip(eigenvalues, -1.0, 1.0), bins=bins, range=(-1.0, 1.0))
        return SpectrumResult(
            eigenvalues=[float(x) for x in eigenvalues],
            bin_edges=[float(x) for x in edges],
            counts=[int(c) for c in counts],
            residual=float(residual),
            sweeps=sweeps,
        )

    @staticmethod
    def _off_diagonal(a: np.ndarray) -> float:
        if a.shape[0] < 2:
            return 0.0
        return float(np.max(np.abs(a - np.diag(np.diag(a)))))

    @staticmethod
    def _rotate(a: np.ndarray, p: int, q: int) -> None:
        """Rotation in the (p, q) plane that zeroes a[p, q]"""
        theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
        c = 1.0 / math.sqrt(t * t + 1.0)
        s = t * c
        col_p = a[:, p].copy()
        col_q = a[:, q].copy()
        a[:, p] = c * col_p - s * col_q
        a[:, q] = s * col_p + c * col_q
        row_p = a[p, :].copy()
        row_q = a[q, :].copy()
        a[p, :] = c * row_p - s * row_q
        a[q, :] = s * row_p + c * row_q
        a[p, q] = a[q, p] = 0.0

    def spectrum(self, automaton: Automaton, level: int, symmetrize: bool = True,
                 tol: Optional[float] = None) -> SpectrumResult:
        """Real spectrum of the level operator, logged with the automaton it belongs to"""
        recursion = format_recursion(automaton)
        timer = metrics_logger.start_timer(f"spectrum:{recursion}:{level}")
        try:
            matrix = self.operator_matrix(automaton, level, symmetrize)
            if not symmetrize and not np.allclose(matrix, matrix.T, atol=1e-12):
                raise NonSymmetricMatrixError(
                    f"level {level} operator without inverses is not symmetric; its spectrum is not real"
                )
            result = self.symmetric_spectrum(matrix, tol)
        except Exception as e:
            metrics_logger.end_timer(timer)
            logger.error(f"Spectrum of {recursion} at level {level} failed: {e}")
            raise
        duration = metrics_logger.end_timer(timer, level=level) or 0.0
        metrics_logger.log_spectrum(
            automaton=recursion, level=level, size=len(result.eigenvalues),
            sweeps=result.sweeps, residual=result.residual, duration_ms=duration,
        )
        return result
