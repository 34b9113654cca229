"""Necessary atoms, transition consistency, backchaining and demonstration coverage."""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple

from ..envs import Demonstration
from ..symbolic import (
    AbstractState,
    Action,
    GroundAtom,
    GroundOperator,
    Object,
    Operator,
    Predicate,
    Variable,
    abstract,
    enumerate_groundings,
    successor,
)

logger = logging.getLogger(__name__)

KeepBonus = Literal['keep', 'changed']


@dataclass(frozen=True)
class Transition:
    """One abstract step (s_prev, action, s_next) of a demonstration."""
    demo_id: int
    index: int
    s_prev: AbstractState
    action: Action
    s_next: AbstractState

    @property
    def key(self) -> Tuple[int, int]:
        return (self.demo_id, self.index)

    @property
    def adds(self) -> FrozenSet[GroundAtom]:
        return self.s_next - self.s_prev

    @property
    def deletes(self) -> FrozenSet[GroundAtom]:
        return self.s_prev - self.s_next


@dataclass
class AbstractDemonstration:
    """A demonstration seen through the predicates: abstract states, actions and goal."""
    demo_id: int
    states: List[AbstractState]
    actions: List[Action]
    goal: FrozenSet[GroundAtom]
    objects: Tuple[Object, ...]
    source: Optional[Demonstration] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1:
            raise ValueError(f"Demo {self.demo_id}: {len(self.states)} states "
                             f"for {len(self.actions)} actions")
        self.states = [frozenset(s) for s in self.states]
        self.goal = frozenset(self.goal)
        self.objects = tuple(sorted(self.objects, key=lambda o: o.name))

    def __len__(self):
        return len(self.actions)

    def transition(self, index: int) -> Transition:
        return Transition(self.demo_id, index, self.states[index], self.actions[index],
                          self.states[index + 1])

    @property
    def transitions(self) -> List[Transition]:
        return [self.transition(i) for i in range(len(self))]


def abstract_demonstration(demo: Demonstration, predicates: Iterable[Predicate],
                           demo_id: int) -> AbstractDemonstration:
    predicates = list(predicates)
    return AbstractDemonstration(
        demo_id=demo_id,
        states=[abstract(x, predicates) for x in demo.states],
        actions=list(demo.actions),
        goal=demo.task.goal,
        objects=demo.task.objects,
        source=demo,
    )


@dataclass
class CoverageReport:
    """Result of backchaining every demonstration with one operator set."""
    covered_count: int
    total_transitions: int
    suffix_lengths: List[int]
    # demo_id -> (alpha_i, ..., alpha_n) for the covered suffix, alpha_n = goal
    necessary_atoms: Dict[int, List[FrozenSet[GroundAtom]]]
    plan_suffixes: Dict[int, List[GroundOperator]]
    normalized: float
    demo_lengths: Dict[int, int] = field(default_factory=dict)
    uncovered: Optional[Transition] = None
    uncovered_alpha: Optional[FrozenSet[GroundAtom]] = None

    @property
    def fully_covered(self) -> bool:
        return self.uncovered is None

    def alpha_after(self, transition: Transition) -> Optional[FrozenSet[GroundAtom]]:
        """Necessary atoms for the state right after `transition`, when backchaining reached it."""
        alphas = self.necessary_atoms.get(transition.demo_id)
        if alphas is None:
            return None
        start = self.demo_lengths[transition.demo_id] - (len(alphas) - 1)
        offset = transition.index + 1 - start
        if 0 <= offset < len(alphas):
            return alphas[offset]
        return None


def necessary_atoms_step(alpha_next: FrozenSet[GroundAtom],
                         ground_op: GroundOperator) -> FrozenSet[GroundAtom]:
    """Necessary atoms before a step given those after it."""
    return frozenset(ground_op.preconditions | (alpha_next - ground_op.add_effects))


def action_consistent(ground_op: GroundOperator, action: Action) -> bool:
    return (ground_op.parent.controller_id == action.controller_id
            and ground_op.controller_objects == action.objects)


def is_consistent(ground_op: GroundOperator, transition: Transition,
                  alpha_next: FrozenSet[GroundAtom], check_deletes: bool) -> bool:
    """Whether `ground_op` explains `transition` while keeping `alpha_next` true."""
    if not action_consistent(ground_op, transition.action):
        return False
    if not ground_op.preconditions <= transition.s_prev:
        return False
    predicted = successor(transition.s_prev, ground_op)
    if not alpha_next <= predicted:
        return False
    if check_deletes and not predicted <= transition.s_next:
        return False
    return True


def score(ground_op: GroundOperator, transition: Transition, keep_bonus: KeepBonus = 'keep') -> int:
    """Mismatch between predicted and observed effects; lower is better."""
    keep = ground_op.add_effects & ground_op.preconditions
    changed = ground_op.add_effects - keep
    adds = transition.adds
    dels = transition.deletes
    atomic = ground_op.delete_effects
    total = (len(changed - adds) + len(adds - changed)
             + len(atomic - dels) + len(dels - atomic))
    bonus = len(keep) if keep_bonus == 'keep' else len(changed)
    return total - bonus


def controller_bindings(op: Operator, action: Action) -> Optional[Dict[Variable, Object]]:
    """Parameters fixed by the action's discrete arguments, or None if they cannot match."""
    if op.controller_id != action.controller_id or len(op.controller_args) != len(action.objects):
        return None
    fixed: Dict[Variable, Object] = {}
    for var, obj in zip(op.controller_args, action.objects):
        if var.type != obj.type or fixed.get(var, obj) != obj:
            return None
        fixed[var] = obj
    return fixed


def find_best_consistent_op(
    ops: Iterable[Operator],
    transition: Transition,
    alpha_next: FrozenSet[GroundAtom],
    objects: Sequence[Object],
    check_deletes: bool,
    keep_bonus: KeepBonus = 'keep',
) -> Optional[GroundOperator]:
    """Lowest-scoring consistent grounding; ties go to operator name, then grounding order."""
    best: Optional[GroundOperator] = None
    best_score = None
    for op in sorted(ops, key=lambda o: o.name):
        fixed = controller_bindings(op, transition.action)
        if fixed is None:
            continue
        for ground_op in enumerate_groundings(op, objects, fixed):
            if not is_consistent(ground_op, transition, alpha_next, check_deletes):
                continue
            value = score(ground_op, transition, keep_bonus)
            if best is None or value < best_score:
                best, best_score = ground_op, value
    return best


def backchain(
    ops: Iterable[Operator],
    demo: AbstractDemonstration,
    keep_bonus: KeepBonus = 'keep',
) -> Tuple[List[GroundOperator], List[FrozenSet[GroundAtom]]]:
    """Walk the demonstration backwards from the goal, explaining as many steps as possible.

    Returns the plan suffix and its necessary atoms (alpha_i, ..., alpha_n).
    """
    ops = list(ops)
    alpha = demo.goal
    suffix: List[GroundOperator] = []
    alphas = [alpha]
    for i in reversed(range(len(demo))):
        best = find_best_consistent_op(ops, demo.transition(i), alpha, demo.objects,
                                       check_deletes=True, keep_bonus=keep_bonus)
        if best is None:
            break
        alpha = necessary_atoms_step(alpha, best)
        suffix.append(best)
        alphas.append(alpha)
    suffix.reverse()
    alphas.reverse()
    return suffix, alphas


def compute_coverage(
    ops: Iterable[Operator],
    demos: Sequence[AbstractDemonstration],
    keep_bonus: KeepBonus = 'keep',
) -> CoverageReport:
    """Backchain every demonstration and report how much of the data is explained."""
    ops = list(ops)
    covered = 0
    total = 0
    fractions = []
    suffix_lengths = []
    alphas_by_demo = {}
    suffixes = {}
    lengths = {}
    uncovered = None
    uncovered_alpha = None
    for demo in demos:
        suffix, alphas = backchain(ops, demo, keep_bonus)
        eta = len(suffix)
        covered += eta
        total += len(demo)
        suffix_lengths.append(eta)
        fractions.append(eta / len(demo) if len(demo) else 1.0)
        alphas_by_demo[demo.demo_id] = alphas
        suffixes[demo.demo_id] = suffix
        lengths[demo.demo_id] = len(demo)
        if uncovered is None and eta < len(demo):
            uncovered = demo.transition(len(demo) - eta - 1)
            uncovered_alpha = alphas[0]
    normalized = sum(fractions) / len(fractions) if fractions else 1.0
    logger.debug("Coverage %d/%d transitions (%.3f normalized)", covered, total, normalized)
    return CoverageReport(
        covered_count=covered,
        total_transitions=total,
        suffix_lengths=suffix_lengths,
        necessary_atoms=alphas_by_demo,
        plan_suffixes=suffixes,
        normalized=normalized,
        uncovered=uncovered,
        uncovered_alpha=uncovered_alpha,
        demo_lengths=lengths,
    )
