import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import networkx as nx

from app.core.config import settings
from app.core.errors import OutOfRangeError, ShapeError
from app.core.logging_config import metrics_logger
from app.models.automaton import (
    Automaton, Invertibility, SmallGroup, SymmetryOp, all_symmetry_ops,
    automaton_count, inverse_permutation,
)
from app.schemas.analysis import ClassTable, StructuralFlags

logger = logging.getLogger(__name__)

MachineKey = Tuple[int, int, tuple, tuple]

NUMBERED_STATES = 3
NUMBER_COUNT = automaton_count(NUMBERED_STATES, 2)
ACTIVITY_RADIX = 729
SWAP = (1, 0)
FIX = (0, 1)

# Two-state recursions with one active state a (state 0) and one inactive state b
TWO_STATE_CATALOG: Dict[SmallGroup, List[Tuple[Tuple[int, int], Tuple[int, int]]]] = {
    SmallGroup.KLEIN: [((0, 0), (0, 0)), ((1, 1), (0, 0))],
    SmallGroup.D_INFINITY: [((0, 0), (0, 1)), ((0, 0), (1, 0)), ((1, 1), (0, 1)), ((1, 1), (1, 0))],
    SmallGroup.C2: [((0, 0), (1, 1)), ((1, 1), (1, 1))],
    SmallGroup.Z: [((0, 1), (0, 0)), ((1, 0), (0, 0)), ((0, 1), (1, 1)), ((1, 0), (1, 0))],
    SmallGroup.LAMPLIGHTER: [((0, 1), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (0, 1)), ((1, 0), (1, 0))],
}

# The lone active state σ(μ,μ) is identified with the 2-state C2 machine
MIRROR = Automaton(d=2, m=2, output=(SWAP, FIX), transition=((0, 0), (1, 1)))


def state_partition(automaton: Automaton) -> List[int]:
    """Moore partition refinement: class index per state, numbered by first occurrence"""
    classes = _renumber([automaton.output[s] for s in range(automaton.m)])
    while True:
        refined = _renumber([
            (classes[s], tuple(classes[t] for t in automaton.transition[s]))
            for s in range(automaton.m)
        ])
        if max(refined) == max(classes):
            return refined
        classes = refined


def _renumber(signatures) -> List[int]:
    ids: Dict[object, int] = {}
    return [ids.setdefault(sig, len(ids)) for sig in signatures]


def moore_graph(automaton: Automaton) -> nx.MultiDiGraph:
    """Moore diagram: one arc per (state, letter) labelled with the letter"""
    graph = nx.MultiDiGraph()
    for s in range(automaton.m):
        graph.add_node(s, active=automaton.is_active(s))
    for s in range(automaton.m):
        for x, t in enumerate(automaton.transition[s]):
            graph.add_edge(s, t, letter=x)
    return graph


def _apply_raw(output, transition, op: SymmetryOp):
    m = len(output)
    d = len(op.letter_perm)
    p, lam = op.state_perm, op.letter_perm
    new_output = [None] * m
    new_transition = [None] * m
    for s in range(m):
        out = [0] * d
        trans = [0] * d
        for x in range(d):
            out[lam[x]] = lam[output[s][x]]
            trans[lam[x]] = p[transition[s][x]]
        new_output[p[s]] = tuple(out)
        new_transition[p[s]] = tuple(trans)
    return tuple(new_output), tuple(new_transition)


def _invert_raw(output, transition):
    inverses = [inverse_permutation(perm) for perm in output]
    return (
        tuple(inverses),
        tuple(tuple(transition[s][inverses[s][x]] for x in range(len(output[s]))) for s in range(len(output))),
    )


def _encode_raw(output, transition) -> int:
    activity = sum(1 << i for i in range(NUMBERED_STATES) if output[i] == SWAP)
    low = 0
    for i in reversed(range(NUMBERED_STATES)):
        low = low * 9 + transition[i][1] * 3 + transition[i][0]
    return ACTIVITY_RADIX * activity + low + 1


@lru_cache(maxsize=None)
def _ops(m: int, d: int) -> Tuple[SymmetryOp, ...]:
    return tuple(all_symmetry_ops(m, d))


class MealyService:
    """Numbering, inversion, duality, minimization and symmetry reduction of automata"""

    def decode_number(self, n: int) -> Automaton:
        """Automaton with number n in 1..5832.

        n - 1 = 729 * activity + low, where bit i of the activity marks state i
        as active and low holds the base-3 targets (a_i2, a_i3) of each state.
        """
        if not 1 <= n <= NUMBER_COUNT:
            error = OutOfRangeError(n, 1, NUMBER_COUNT)
            logger.error(f"Cannot decode automaton number: {error}")
            raise error
        r = n - 1
        activity, low = divmod(r, ACTIVITY_RADIX)
        output = []
        transition = []
        for i in range(NUMBERED_STATES):
            output.append(SWAP if activity >> i & 1 else FIX)
            low, a_i2 = divmod(low, 3)
            low, a_i3 = divmod(low, 3)
            transition.append((a_i2, a_i3))
        return Automaton(d=2, m=NUMBERED_STATES, output=tuple(output), transition=tuple(transition))

    def encode_number(self, automaton: Automaton) -> int:
        """Inverse of decode_number; only (3,2)-automata carry a number"""
        if automaton.d != 2 or automaton.m != NUMBERED_STATES:
            error = ShapeError(f"numbering covers (3,2)-automata, got ({automaton.m},{automaton.d})")
            logger.error(f"Cannot number automaton: {error}")
            raise error
        return _encode_raw(automaton.output, automaton.transition)

    def invert(self, automaton: Automaton) -> Automaton:
        """State s of the result acts as s^-1"""
        output, transition = _invert_raw(automaton.output, automaton.transition)
        return automaton.model_copy(update={"output": output, "transition": transition})

    def dual(self, automaton: Automaton) -> Union[Automaton, Invertibility]:
        """Exchange states and letters; NotInvertible when some letter does not permute the states"""
        m, d = automaton.m, automaton.d
        output = tuple(tuple(automaton.transition[s][x] for s in range(m)) for x in range(d))
        if any(sorted(row) != list(range(m)) for row in output):
            return Invertibility.NOT_INVERTIBLE
        transition = tuple(tuple(automaton.output[s][x] for s in range(m)) for x in range(d))
        labels = tuple(chr(ord("A") + x) for x in range(d)) if d <= 26 else None
        return Automaton(d=m, m=d, output=output, transition=transition, labels=labels)

    def is_fully_invertible(self, automaton: Automaton) -> bool:
        """Both the automaton and its inverse have invertible duals"""
        return (
            self.dual(automaton) != Invertibility.NOT_INVERTIBLE
            and self.dual(self.invert(automaton)) != Invertibility.NOT_INVERTIBLE
        )

    def minimize_with_map(self, automaton: Automaton) -> Tuple[Automaton, List[int]]:
        """Minimized machine plus the image of every original state.

        Classes are numbered in depth-first visiting order from state 0;
        classes unreachable from state 0 follow in order of their least member.
        """
        classes = state_partition(automaton)
        members: Dict[int, List[int]] = {}
        for s, c in enumerate(classes):
            members.setdefault(c, []).append(s)

        order: List[int] = []
        seen = set()
        for root in [classes[0]] + sorted(members, key=lambda c: members[c][0]):
            stack = [root]
            while stack:
                c = stack.pop()
                if c in seen:
                    continue
                seen.add(c)
                order.append(c)
                rep = members[c][0]
                for t in reversed(automaton.transition[rep]):
                    stack.append(classes[t])
        new_index = {c: i for i, c in enumerate(order)}

        output = tuple(automaton.output[members[c][0]] for c in order)
        transition = tuple(
            tuple(new_index[classes[t]] for t in automaton.transition[members[c][0]]) for c in order
        )
        labels = None
        if automaton.labels is not None:
            labels = tuple(automaton.labels[members[c][0]] for c in order)
        identity_state = None
        if automaton.identity_state is not None:
            identity_state = new_index[classes[automaton.identity_state]]
        minimized = Automaton(
            d=automaton.d, m=len(order), output=output, transition=transition,
            labels=labels, identity_state=identity_state,
        )
        return minimized, [new_index[classes[s]] for s in range(automaton.m)]

    def minimize(self, automaton: Automaton) -> Automaton:
        """Minimized machine alone; see minimize_with_map"""
        return self.minimize_with_map(automaton)[0]

    def apply_symmetry(self, automaton: Automaton, op: SymmetryOp) -> Automaton:
        """Image under optional inversion, then the state and letter relabelling of op"""
        if len(op.state_perm) != automaton.m or len(op.letter_perm) != automaton.d:
            logger.error(f"Symmetry op on {len(op.state_perm)} states applied to an automaton with {automaton.m}")
            raise ShapeError("symmetry op does not match the automaton shape")
        output, transition = automaton.output, automaton.transition
        if op.invert:
            output, transition = _invert_raw(output, transition)
        output, transition = _apply_raw(output, transition, op)
        return Automaton(d=automaton.d, m=automaton.m, output=output, transition=transition)

    def symmetry_class(self, automaton: Automaton) -> Tuple[Automaton, Optional[int]]:
        """Least representative of the minimal-symmetry class.

        For 3-state binary minimizations the number is the least automaton
        number of the orbit; smaller machines get the least machine key and
        no number.
        """
        minimized = self.minimize(automaton)
        if minimized.m == 1 and minimized.d == 2 and minimized.is_active(0):
            minimized = MIRROR
        m, d = minimized.m, minimized.d
        if m == NUMBERED_STATES and d == 2:
            best = min(
                _encode_raw(*_apply_raw(*self._maybe_invert(minimized, op), op))
                for op in _ops(m, d)
            )
            return self.decode_number(best), best
        output, transition = min(
            _apply_raw(*self._maybe_invert(minimized, op), op) for op in _ops(m, d)
        )
        return Automaton(d=d, m=m, output=output, transition=transition), None

    @staticmethod
    def _maybe_invert(automaton: Automaton, op: SymmetryOp):
        if op.invert:
            return _invert_raw(automaton.output, automaton.transition)
        return automaton.output, automaton.transition

    def small_group_label(self, automaton: Automaton) -> Optional[SmallGroup]:
        """Group of a binary automaton minimizing to at most 2 states, from the 2-state catalog"""
        if automaton.d != 2:
            return None
        canonical, number = self.symmetry_class(automaton)
        if number is not None or canonical.m > 2:
            return None
        if canonical.m == 1:
            return SmallGroup.TRIVIAL
        return _small_catalog().get(canonical.key)

    def classify_all(self, jobs: Optional[int] = None) -> ClassTable:
        """Minimal-symmetry classes of all numbered (3,2)-automata"""
        jobs = jobs or settings.jobs
        timer = metrics_logger.start_timer("classify_all")
        try:
            numbers = range(1, NUMBER_COUNT + 1)
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    keys = list(pool.map(_class_key, numbers, chunksize=256))
            else:
                keys = [_class_key(n) for n in numbers]
        except Exception as e:
            metrics_logger.end_timer(timer)
            logger.error(f"Classification failed: {e}")
            raise

        first_of_key: Dict[MachineKey, int] = {}
        class_rep: Dict[int, int] = {}
        reduced: Dict[int, int] = {}
        small: Dict[int, str] = {}
        for n, key in zip(numbers, keys):
            rep = first_of_key.setdefault(key, n)
            class_rep[n] = rep
            if rep == n:
                reduced[n] = key[1]
                if key[1] < NUMBERED_STATES:
                    label = _small_catalog().get(key, SmallGroup.TRIVIAL if key[1] == 1 else None)
                    if label is not None:
                        small[n] = label.value

        table = ClassTable(class_rep=class_rep, reduced_state_count=reduced, small_group=small)
        small_count = sum(1 for count in reduced.values() if count < NUMBERED_STATES)
        duration = metrics_logger.end_timer(timer, jobs=jobs) or 0.0
        metrics_logger.log_classification(len(reduced), small_count, duration, jobs)
        logger.info(f"Classified {len(class_rep)} automata into {len(reduced)} classes ({small_count} small)")
        return table

    def structural_flags(self, automaton: Automaton) -> StructuralFlags:
        """Trivial state, open set condition, strong connectivity and invertibility of the duals"""
        graph = moore_graph(automaton)
        trivial = set(automaton.trivial_states())
        open_set = bool(trivial) and all(
            s in trivial or trivial & nx.descendants(graph, s) for s in range(automaton.m)
        )
        return StructuralFlags(
            has_trivial_state=bool(trivial),
            open_set_condition=open_set,
            strongly_connected=nx.is_strongly_connected(graph),
            dual_invertible=self.dual(automaton) != Invertibility.NOT_INVERTIBLE,
            fully_invertible=self.is_fully_invertible(automaton),
        )


def _class_key(n: int) -> MachineKey:
    service = MealyService()
    canonical, _ = service.symmetry_class(service.decode_number(n))
    return canonical.key


@lru_cache(maxsize=1)
def _small_catalog() -> Dict[MachineKey, SmallGroup]:
    service = MealyService()
    catalog: Dict[MachineKey, SmallGroup] = {}
    for group, recursions in TWO_STATE_CATALOG.items():
        for active_row, inactive_row in recursions:
            machine = Automaton(d=2, m=2, output=(SWAP, FIX), transition=(active_row, inactive_row))
            canonical, _ = service.symmetry_class(machine)
            catalog[canonical.key] = group
    return catalog
