"""Hill-climbing operator learning driven by demonstration coverage."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from ..symbolic import GroundAtom, LiftedAtom, Object, Operator, Variable, sorted_atoms
from .consistency import (
    AbstractDemonstration,
    CoverageReport,
    KeepBonus,
    Transition,
    compute_coverage,
    find_best_consistent_op,
)

logger = logging.getLogger(__name__)


class SafetyBoundExceeded(RuntimeError):
    """Improve-coverage ran out of iterations without covering more data."""


@dataclass
class LearnerConfig:
    """Settings for operator learning.

    `lam` of None means one over the number of training transitions.
    """
    lam: Optional[float] = None
    keep_bonus: KeepBonus = 'keep'
    safety_factor: int = 10

    def __post_init__(self):
        if self.lam is not None and self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.keep_bonus not in ('keep', 'changed'):
            raise ValueError(f"Unknown keep bonus mode: {self.keep_bonus}")
        if self.safety_factor <= 0:
            raise ValueError("safety_factor must be positive")

    def resolve_lambda(self, demos: Sequence[AbstractDemonstration]) -> float:
        if self.lam is not None:
            return self.lam
        total = sum(len(d) for d in demos)
        return 1.0 / total if total else 0.0


@dataclass(frozen=True)
class Datapoint:
    """A transition assigned to an operator, with the objects bound to its parameters."""
    transition: Transition
    objects: Tuple[Object, ...]

    def substitution(self, op: Operator) -> Dict[Variable, Object]:
        return dict(zip(op.parameters, self.objects))


# operator name -> datapoints
OperatorDataset = Dict[str, List[Datapoint]]


@dataclass
class LearningResult:
    operators: List[Operator]
    datasets: OperatorDataset
    coverage: CoverageReport
    objective: float
    history: List[float] = field(default_factory=list)


def fresh_name(controller_id: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    for k in itertools.count():
        name = f"{controller_id}{k}"
        if name not in taken:
            return name
    raise AssertionError("unreachable")


def lift_atoms(atoms: Iterable[GroundAtom], params: Sequence[Variable],
               objects: Sequence[Object]) -> Set[LiftedAtom]:
    """Every lifted atom over `params` whose grounding under params -> objects is in `atoms`.

    Atoms that mention objects outside the substitution are discarded.
    """
    by_object: Dict[Object, List[Variable]] = {}
    for var, obj in zip(params, objects):
        by_object.setdefault(obj, []).append(var)
    lifted = set()
    for atom in atoms:
        if not all(o in by_object for o in atom.objects):
            continue
        for combo in itertools.product(*(by_object[o] for o in atom.objects)):
            lifted.add(LiftedAtom(atom.predicate, combo))
    return lifted


def strip(op: Operator) -> Operator:
    """Drop preconditions and delete effects, keeping arguments, adds and controller."""
    return op.with_changes(preconditions=frozenset(), delete_effects=frozenset(),
                           quantified_deletes=frozenset())


def objective_J(ops: Sequence[Operator], demos: Sequence[AbstractDemonstration],
                cfg: LearnerConfig, report: Optional[CoverageReport] = None) -> float:
    """Uncovered fraction of the data plus lambda times the number of operators."""
    if report is None:
        report = compute_coverage(ops, demos, cfg.keep_bonus)
    return (1.0 - report.normalized) + cfg.resolve_lambda(demos) * len(ops)


def induce_op_to_cover(transition: Transition, alpha: FrozenSet[GroundAtom],
                       name: Optional[str] = None) -> Operator:
    """New operator for an uncovered transition: its controller plus the necessary atoms it added."""
    action = transition.action
    ground_adds = (transition.s_next - transition.s_prev) & alpha
    ordered: List[Object] = []
    for obj in action.objects:
        if obj not in ordered:
            ordered.append(obj)
    for atom in sorted_atoms(ground_adds):
        for obj in atom.objects:
            if obj not in ordered:
                ordered.append(obj)
    sub = {obj: Variable(f"?x{i}", obj.type) for i, obj in enumerate(ordered)}
    return Operator(
        name=name or fresh_name(action.controller_id, ()),
        parameters=tuple(sub[o] for o in ordered),
        preconditions=frozenset(),
        add_effects=frozenset(a.lift(sub) for a in ground_adds),
        delete_effects=frozenset(),
        quantified_deletes=frozenset(),
        controller_id=action.controller_id,
        controller_args=tuple(sub[o] for o in action.objects),
    )


def partition_data(ops: Sequence[Operator], demos: Sequence[AbstractDemonstration],
                   report: Optional[CoverageReport] = None,
                   keep_bonus: KeepBonus = 'keep') -> OperatorDataset:
    """Assign every transition to its best consistent operator, ignoring delete mispredictions.

    Necessary atoms come from `report` where backchaining reached the
    transition; elsewhere nothing is required.
    """
    datasets: OperatorDataset = {op.name: [] for op in ops}
    for demo in demos:
        for transition in demo.transitions:
            alpha = report.alpha_after(transition) if report is not None else None
            best = find_best_consistent_op(ops, transition, alpha or frozenset(), demo.objects,
                                           check_deletes=False, keep_bonus=keep_bonus)
            if best is not None:
                datasets[best.name].append(Datapoint(transition, best.objects))
    return datasets


def induce_prec_and_del_effs(ops: Sequence[Operator], datasets: OperatorDataset) -> List[Operator]:
    """Re-derive preconditions and delete effects from each operator's data.

    Operators without data are dropped.
    """
    induced = []
    for op in ops:
        data = datasets.get(op.name, [])
        if not data:
            logger.debug("Dropping %s: no data", op.name)
            continue
        params = op.parameters
        preconditions: Optional[Set[LiftedAtom]] = None
        deletes: Set[LiftedAtom] = set()
        for dp in data:
            t = dp.transition
            before = lift_atoms(t.s_prev, params, dp.objects)
            preconditions = before if preconditions is None else preconditions & before
            deletes |= lift_atoms(t.s_prev - t.s_next, params, dp.objects)
        deletes -= op.add_effects
        partial = op.with_changes(preconditions=frozenset(preconditions),
                                  delete_effects=frozenset(deletes),
                                  quantified_deletes=frozenset())
        quantified = set()
        for dp in data:
            ground = partial.ground(dp.objects)
            t = dp.transition
            predicted = (t.s_prev - ground.delete_effects) | ground.add_effects
            # Delete-then-add cannot remove a predicted add, so those atoms never
            # call for a quantified delete.
            for atom in predicted - t.s_next - ground.add_effects:
                quantified.add(atom.predicate)
        induced.append(partial.with_changes(quantified_deletes=frozenset(quantified)))
    return induced


def ensure_nec_atoms_sat(new_op: Operator, datasets: OperatorDataset, report: CoverageReport,
                         taken_names: Iterable[str] = ()) -> List[Operator]:
    """Copies of `new_op` that keep the necessary atoms its delete effects would destroy."""
    taken = set(taken_names) | {new_op.name}
    copies: List[Operator] = []
    seen = {new_op.signature}
    for dp in datasets.get(new_op.name, []):
        t = dp.transition
        alpha = report.alpha_after(t)
        if not alpha:
            continue
        ground = new_op.ground(dp.objects)
        survivors = {a for a in t.s_next
                     if a not in ground.delete_effects
                     and a.predicate not in new_op.quantified_deletes}
        missing = alpha - (survivors | ground.add_effects)
        if not missing:
            continue
        sub: Dict[Object, Variable] = {}
        for var, obj in zip(new_op.parameters, dp.objects):
            sub.setdefault(obj, var)
        params = list(new_op.parameters)
        for atom in sorted_atoms(missing):
            for obj in atom.objects:
                if obj not in sub:
                    var = Variable(f"?x{len(params)}", obj.type)
                    sub[obj] = var
                    params.append(var)
        keep = frozenset(a.lift(sub) for a in missing)
        copy = new_op.with_changes(
            name=fresh_name(new_op.controller_id, taken),
            parameters=tuple(params),
            preconditions=new_op.preconditions | keep,
            add_effects=new_op.add_effects | keep,
            delete_effects=new_op.delete_effects - keep,
        )
        if copy.signature in seen:
            continue
        seen.add(copy.signature)
        taken.add(copy.name)
        copies.append(copy)
    return copies


def _repartition(ops: Sequence[Operator], demos: Sequence[AbstractDemonstration],
                 report: Optional[CoverageReport],
                 cfg: LearnerConfig) -> Tuple[List[Operator], OperatorDataset]:
    datasets = partition_data(ops, demos, report, cfg.keep_bonus)
    induced = induce_prec_and_del_effs(ops, datasets)
    return induced, datasets


def improve_coverage(ops: Sequence[Operator], demos: Sequence[AbstractDemonstration],
                     cfg: LearnerConfig) -> List[Operator]:
    """Add operators until strictly more transitions are covered."""
    report = compute_coverage(ops, demos, cfg.keep_bonus)
    if report.fully_covered:
        return list(ops)
    initial = report.covered_count
    bound = cfg.safety_factor * max(report.total_transitions, 1)
    current = list(ops)
    previous_signatures = None
    for iteration in range(bound):
        taken = {op.name for op in current}
        new_op = induce_op_to_cover(report.uncovered, report.uncovered_alpha,
                                    fresh_name(report.uncovered.action.controller_id, taken))
        candidates = [strip(op) for op in current] + [new_op]
        candidates, datasets = _repartition(candidates, demos, report, cfg)
        induced_new = next((op for op in candidates if op.name == new_op.name), None)
        if induced_new is not None:
            candidates += ensure_nec_atoms_sat(induced_new, datasets, report,
                                               {op.name for op in candidates})
        candidates, _ = _repartition(candidates, demos, report, cfg)
        report = compute_coverage(candidates, demos, cfg.keep_bonus)
        current = candidates
        logger.debug("improve-coverage iteration %d: %d operators, %d/%d covered",
                     iteration, len(current), report.covered_count, report.total_transitions)
        if report.covered_count > initial:
            return current
        signatures = sorted((op.name, repr(op.signature)) for op in current)
        if signatures == previous_signatures:
            raise SafetyBoundExceeded(
                f"improve-coverage reached a fixed point at {report.covered_count} covered transitions"
            )
        previous_signatures = signatures
    raise SafetyBoundExceeded(f"improve-coverage did not progress within {bound} iterations")


def reduce_complexity(ops: Sequence[Operator], demos: Sequence[AbstractDemonstration],
                      cfg: LearnerConfig) -> Iterator[List[Operator]]:
    """Single-deletion variants, in operator-name order, with re-induced operators."""
    report = compute_coverage(ops, demos, cfg.keep_bonus)
    for victim in sorted(ops, key=lambda o: o.name):
        remaining = [strip(op) for op in ops if op.name != victim.name]
        variant, _ = _repartition(remaining, demos, report, cfg)
        yield variant


def hill_climb(demos: Sequence[AbstractDemonstration],
               cfg: Optional[LearnerConfig] = None) -> LearningResult:
    """Search for an operator set minimizing uncovered fraction plus lambda times its size."""
    cfg = cfg or LearnerConfig()
    if not demos:
        raise ValueError("hill_climb needs at least one demonstration")
    ops: List[Operator] = []
    score = objective_J(ops, demos, cfg)
    history = [score]
    logger.info("Learning operators from %d demos (%d transitions), lambda=%.4f",
                len(demos), sum(len(d) for d in demos), cfg.resolve_lambda(demos))
    while True:
        improved = False
        try:
            candidate = improve_coverage(ops, demos, cfg)
        except SafetyBoundExceeded as e:
            logger.warning("Improve-coverage stopped: %s", e)
            candidate = None
        if candidate is not None:
            candidate_score = objective_J(candidate, demos, cfg)
            if candidate_score < score:
                ops, score = candidate, candidate_score
                history.append(score)
                improved = True
                logger.info("Accepted improve-coverage step: J=%.4f with %d operators", score, len(ops))
        for variant in reduce_complexity(ops, demos, cfg) if ops else ():
            variant_score = objective_J(variant, demos, cfg)
            if variant_score < score:
                ops, score = variant, variant_score
                history.append(score)
                improved = True
                logger.info("Accepted reduce-complexity step: J=%.4f with %d operators", score, len(ops))
                break
        if not improved:
            break
    report = compute_coverage(ops, demos, cfg.keep_bonus)
    datasets = partition_data(ops, demos, report, cfg.keep_bonus)
    logger.info("Learned %d operators, coverage %.3f", len(ops), report.normalized)
    return LearningResult(operators=sorted(ops, key=lambda o: o.name), datasets=datasets,
                          coverage=report, objective=score, history=history)
