"""Top-K abstract plan generation with A* over ground operators."""

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Set, Tuple

from ..symbolic import (
    AbstractState,
    GroundAtom,
    GroundOperator,
    Object,
    Operator,
    Predicate,
    iter_groundings,
    sorted_atoms,
    successor,
)

logger = logging.getLogger(__name__)

Heuristic = Literal['hadd', 'goal_count']


class NoAbstractPlan(RuntimeError):
    """The abstract search found no plan to the goal."""


class PlanningTimeout(RuntimeError):
    """The wall-clock budget ran out."""


@dataclass
class PlannerConfig:
    n_abstract: int = 8
    n_samples: int = 10
    timeout: float = 10.0
    max_nodes: int = 100000
    heuristic: Heuristic = 'hadd'
    seed: int = 0

    def __post_init__(self):
        if self.n_abstract < 1 or self.n_samples < 1 or self.max_nodes < 1:
            raise ValueError("n_abstract, n_samples and max_nodes must be positive")
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")
        if self.heuristic not in ('hadd', 'goal_count'):
            raise ValueError(f"Unknown heuristic: {self.heuristic}")


@dataclass
class SearchMetrics:
    nodes_created: int = 0


def check_deadline(deadline: Optional[float], stage: str) -> None:
    if deadline is not None and time.perf_counter() > deadline:
        raise PlanningTimeout(f"{stage} exceeded the time budget")


@dataclass(frozen=True)
class AbstractPlan:
    """Ground operators with the abstract states they induce, s0 first."""
    operators: Tuple[GroundOperator, ...]
    states: Tuple[AbstractState, ...]

    def __post_init__(self):
        if len(self.states) != len(self.operators) + 1:
            raise ValueError("An abstract plan needs one more state than operators")

    @property
    def cost(self) -> int:
        return len(self.operators)

    def __len__(self):
        return len(self.operators)

    def necessary_atoms(self, goal: FrozenSet[GroundAtom]) -> List[FrozenSet[GroundAtom]]:
        """Atoms the rest of the plan relies on, one set per state."""
        alphas = [frozenset(goal)]
        for ground_op in reversed(self.operators):
            alphas.append(frozenset(ground_op.preconditions | (alphas[-1] - ground_op.add_effects)))
        alphas.reverse()
        return alphas

    def __str__(self):
        return ', '.join(str(op) for op in self.operators) or '<empty>'


def static_predicates(ops: Iterable[Operator]) -> Set[Predicate]:
    """Predicates no operator can change."""
    ops = list(ops)
    dynamic: Set[Predicate] = set()
    for op in ops:
        dynamic.update(a.predicate for a in op.add_effects | op.delete_effects)
        dynamic.update(op.quantified_deletes)
    used = {a.predicate for op in ops for a in op.preconditions}
    return used - dynamic


def ground_operators(ops: Iterable[Operator], objects: Sequence[Object],
                     s0: AbstractState, deadline: Optional[float] = None) -> List[GroundOperator]:
    """All groundings whose static preconditions hold initially."""
    ops = sorted(ops, key=lambda o: o.name)
    static = static_predicates(ops)
    ground: List[GroundOperator] = []
    for op in ops:
        for ground_op in iter_groundings(op, objects):
            check_deadline(deadline, "grounding")
            if all(a in s0 for a in ground_op.preconditions if a.predicate in static):
                ground.append(ground_op)
    return ground


def h_add(state: AbstractState, goal: FrozenSet[GroundAtom],
          ground_ops: Sequence[GroundOperator], deadline: Optional[float] = None) -> float:
    """Additive delete-relaxation estimate; inf when the goal is relaxed-unreachable."""
    cost: Dict[GroundAtom, float] = {a: 0.0 for a in state}
    changed = True
    while changed:
        changed = False
        for ground_op in ground_ops:
            check_deadline(deadline, "heuristic")
            total = 1.0
            for atom in ground_op.preconditions:
                value = cost.get(atom)
                if value is None:
                    break
                total += value
            else:
                for atom in ground_op.add_effects:
                    if total < cost.get(atom, float('inf')):
                        cost[atom] = total
                        changed = True
    h = 0.0
    for atom in goal:
        if atom not in cost:
            return float('inf')
        h += cost[atom]
    return h


def goal_count(state: AbstractState, goal: FrozenSet[GroundAtom],
               ground_ops: Sequence[GroundOperator], deadline: Optional[float] = None) -> float:
    return float(len(goal - state))


HEURISTICS = {'hadd': h_add, 'goal_count': goal_count}


@dataclass
class _Node:
    state: AbstractState
    cost: int
    parent: Optional['_Node'] = None
    ground_op: Optional[GroundOperator] = None

    def on_path(self, state: AbstractState) -> bool:
        node = self
        while node is not None:
            if node.state == state:
                return True
            node = node.parent
        return False

    def to_plan(self) -> AbstractPlan:
        ops: List[GroundOperator] = []
        states: List[AbstractState] = []
        node = self
        while node is not None:
            states.append(node.state)
            if node.ground_op is not None:
                ops.append(node.ground_op)
            node = node.parent
        return AbstractPlan(tuple(reversed(ops)), tuple(reversed(states)))


def _state_key(state: AbstractState) -> Tuple:
    return tuple(a.sort_key for a in sorted_atoms(state))


def gen_abstract_plans(
    s0: AbstractState,
    goal: FrozenSet[GroundAtom],
    ops: Iterable[Operator],
    objects: Sequence[Object],
    n_abstract: int = 8,
    heuristic: Heuristic = 'hadd',
    max_nodes: int = 100000,
    deadline: Optional[float] = None,
    metrics: Optional[SearchMetrics] = None,
) -> List[AbstractPlan]:
    """Up to `n_abstract` distinct goal-reaching plans, cheapest first.

    Each abstract state is expanded at most `n_abstract` times, so later
    plans may revisit states that earlier plans went through.
    """
    metrics = metrics if metrics is not None else SearchMetrics()
    goal = frozenset(goal)
    s0 = frozenset(s0)
    ground_ops = ground_operators(ops, objects, s0, deadline)
    h_fn = HEURISTICS[heuristic]
    h0 = h_fn(s0, goal, ground_ops, deadline)
    if h0 == float('inf'):
        raise NoAbstractPlan("goal is unreachable even under delete relaxation")

    counter = itertools.count()
    frontier = [(h0, next(counter), _Node(s0, 0))]
    metrics.nodes_created += 1
    expansions: Dict[Tuple, int] = {}
    found: List[AbstractPlan] = []
    seen_sequences: Set[Tuple] = set()
    while frontier and len(found) < n_abstract:
        check_deadline(deadline, "abstract search")
        _, _, node = heapq.heappop(frontier)
        if goal <= node.state:
            plan = node.to_plan()
            key = tuple(_state_key(s) for s in plan.states)
            if key not in seen_sequences:
                seen_sequences.add(key)
                found.append(plan)
                logger.debug("Abstract plan %d (cost %d): %s", len(found), plan.cost, plan)
            continue
        state_key = _state_key(node.state)
        if expansions.get(state_key, 0) >= n_abstract:
            continue
        expansions[state_key] = expansions.get(state_key, 0) + 1
        for ground_op in ground_ops:
            if not ground_op.preconditions <= node.state:
                continue
            child_state = successor(node.state, ground_op)
            if node.on_path(child_state):
                continue
            check_deadline(deadline, "abstract search")
            h = h_fn(child_state, goal, ground_ops, deadline)
            if h == float('inf'):
                continue
            child = _Node(child_state, node.cost + 1, node, ground_op)
            metrics.nodes_created += 1
            heapq.heappush(frontier, (child.cost + h, next(counter), child))
        if metrics.nodes_created >= max_nodes:
            logger.debug("Node budget of %d reached", max_nodes)
            break
    if not found:
        raise NoAbstractPlan(f"search ended after creating {metrics.nodes_created} nodes")
    order = sorted(range(len(found)), key=lambda i: (found[i].cost, i))
    return [found[i] for i in order]
