"""Baseline learner: one operator per distinct lifted effect set, preconditions by intersection."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..symbolic import Object, Operator, Variable, sorted_atoms
from .consistency import AbstractDemonstration, Transition
from .operator_learner import Datapoint, OperatorDataset, lift_atoms

logger = logging.getLogger(__name__)


@dataclass
class _Cluster:
    controller_id: str
    parameters: Tuple[Variable, ...]
    controller_args: Tuple[Variable, ...]
    add_effects: frozenset
    delete_effects: frozenset
    members: List[Datapoint] = field(default_factory=list)


def _effect_objects(transition: Transition) -> List[Object]:
    ordered: List[Object] = []
    for obj in transition.action.objects:
        if obj not in ordered:
            ordered.append(obj)
    for atom in sorted_atoms(transition.adds | transition.deletes):
        for obj in atom.objects:
            if obj not in ordered:
                ordered.append(obj)
    return ordered


def _match(cluster: _Cluster, transition: Transition) -> Optional[Tuple[Object, ...]]:
    """Objects for the cluster's parameters that reproduce the transition's effects exactly."""
    if cluster.controller_id != transition.action.controller_id:
        return None
    adds, dels = transition.adds, transition.deletes
    if len(cluster.add_effects) != len(adds) or len(cluster.delete_effects) != len(dels):
        return None
    objects = _effect_objects(transition)
    if len(objects) != len(cluster.parameters):
        return None
    fixed: Dict[Variable, Object] = {}
    for var, obj in zip(cluster.controller_args, transition.action.objects):
        if fixed.get(var, obj) != obj or var.type != obj.type:
            return None
        fixed[var] = obj
    free_vars = [v for v in cluster.parameters if v not in fixed]
    free_objs = [o for o in objects if o not in fixed.values()]
    for perm in itertools.permutations(free_objs):
        sub = dict(fixed)
        if any(v.type != o.type for v, o in zip(free_vars, perm)):
            continue
        sub.update(zip(free_vars, perm))
        if (frozenset(a.ground(sub) for a in cluster.add_effects) == adds
                and frozenset(a.ground(sub) for a in cluster.delete_effects) == dels):
            return tuple(sub[v] for v in cluster.parameters)
    return None


def _new_cluster(transition: Transition) -> Tuple[_Cluster, Tuple[Object, ...]]:
    objects = _effect_objects(transition)
    sub = {obj: Variable(f"?x{i}", obj.type) for i, obj in enumerate(objects)}
    cluster = _Cluster(
        controller_id=transition.action.controller_id,
        parameters=tuple(sub[o] for o in objects),
        controller_args=tuple(sub[o] for o in transition.action.objects),
        add_effects=frozenset(a.lift(sub) for a in transition.adds),
        delete_effects=frozenset(a.lift(sub) for a in transition.deletes),
    )
    return cluster, tuple(objects)


def cluster_and_intersect(
    demos: Sequence[AbstractDemonstration],
) -> Tuple[List[Operator], OperatorDataset]:
    """Group transitions by controller and exact lifted effects; intersect their preconditions."""
    clusters: List[_Cluster] = []
    for demo in demos:
        for transition in demo.transitions:
            for cluster in clusters:
                objects = _match(cluster, transition)
                if objects is not None:
                    cluster.members.append(Datapoint(transition, objects))
                    break
            else:
                cluster, objects = _new_cluster(transition)
                cluster.members.append(Datapoint(transition, objects))
                clusters.append(cluster)

    ops: List[Operator] = []
    datasets: OperatorDataset = {}
    counts: Dict[str, int] = {}
    for cluster in clusters:
        preconditions = None
        for dp in cluster.members:
            before = lift_atoms(dp.transition.s_prev, cluster.parameters, dp.objects)
            preconditions = before if preconditions is None else preconditions & before
        k = counts.get(cluster.controller_id, 0)
        counts[cluster.controller_id] = k + 1
        op = Operator(
            name=f"{cluster.controller_id}{k}",
            parameters=cluster.parameters,
            preconditions=frozenset(preconditions),
            add_effects=cluster.add_effects,
            delete_effects=cluster.delete_effects,
            quantified_deletes=frozenset(),
            controller_id=cluster.controller_id,
            controller_args=cluster.controller_args,
        )
        ops.append(op)
        datasets[op.name] = list(cluster.members)
    logger.info("Cluster-and-intersect produced %d operators", len(ops))
    return ops, datasets
