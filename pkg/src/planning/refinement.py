"""Sampling-based refinement of abstract plans and the bilevel planning loop."""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence

import numpy as np

from ..envs import BaseEnvironment, Task
from ..samplers import BaseSampler
from ..symbolic import Action, Operator
from .search import (
    AbstractPlan,
    NoAbstractPlan,
    PlannerConfig,
    PlanningTimeout,
    SearchMetrics,
    check_deadline,
    gen_abstract_plans,
)

logger = logging.getLogger(__name__)


@dataclass
class PlanResult:
    """Outcome of planning for one task."""
    task_id: str
    actions: Optional[List[Action]] = None
    failure_reason: str = ''
    nodes_created: int = 0
    plans_tried: int = 0
    samples: int = 0
    wall_time: float = 0.0
    abstract_plans: List[str] = field(default_factory=list)
    # samples drawn per step of the last plan refinement worked on
    step_samples: List[int] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.actions is not None


@dataclass
class RefinementStats:
    samples: int = 0
    step_samples: List[int] = field(default_factory=list)


def refine(
    plan: AbstractPlan,
    task: Task,
    samplers: Mapping[str, BaseSampler],
    env: BaseEnvironment,
    n_samples: int,
    rng: np.random.Generator,
    deadline: Optional[float] = None,
    stats: Optional[RefinementStats] = None,
) -> Optional[List[Action]]:
    """Depth-first search over sampled controller parameters.

    A step is kept when the atoms the rest of the plan needs hold after
    simulating it. Steps without continuous parameters get a single try.
    Returns None when every budget is exhausted.
    """
    stats = stats if stats is not None else RefinementStats()
    alphas = plan.necessary_atoms(task.goal)
    n = len(plan)
    states = [task.init]
    actions: List[Action] = []
    tries = [0] * n
    stats.step_samples = [0] * n
    i = 0
    while i < n:
        ground_op = plan.operators[i]
        spec = env.controllers[ground_op.parent.controller_id]
        budget = n_samples if spec.theta_dim > 0 else 1
        if tries[i] >= budget:
            tries[i] = 0
            i -= 1
            if i < 0:
                return None
            states.pop()
            actions.pop()
            continue
        check_deadline(deadline, "refinement")
        tries[i] += 1
        theta = samplers[ground_op.name].sample(states[i], ground_op, rng)
        stats.samples += 1
        stats.step_samples[i] += 1
        action = Action(ground_op.parent.controller_id, ground_op.controller_objects, theta)
        next_state = env.simulate(states[i], action)
        if alphas[i + 1] <= env.abstract(next_state):
            states.append(next_state)
            actions.append(action)
            i += 1
    if not env.goal_reached(task.goal, states[-1]):
        return None
    return actions


def bilevel_plan(
    task: Task,
    ops: Sequence[Operator],
    samplers: Mapping[str, BaseSampler],
    env: BaseEnvironment,
    cfg: Optional[PlannerConfig] = None,
    rng: Optional[np.random.Generator] = None,
) -> PlanResult:
    """Try abstract plans in order until one of them refines."""
    cfg = cfg or PlannerConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    start = time.perf_counter()
    deadline = start + cfg.timeout
    result = PlanResult(task_id=task.task_id)
    metrics = SearchMetrics()
    stats = RefinementStats()
    try:
        plans = gen_abstract_plans(env.abstract(task.init), task.goal, ops, task.objects,
                                   n_abstract=cfg.n_abstract, heuristic=cfg.heuristic,
                                   max_nodes=cfg.max_nodes, deadline=deadline, metrics=metrics)
        for plan in plans:
            result.plans_tried += 1
            result.abstract_plans.append(str(plan))
            actions = refine(plan, task, samplers, env, cfg.n_samples, rng, deadline, stats)
            if actions is not None:
                result.actions = actions
                break
        else:
            result.failure_reason = 'refinement-failed'
    except NoAbstractPlan as e:
        result.failure_reason = 'no-abstract-plan'
        logger.debug("Task %s: %s", task.task_id, e)
    except PlanningTimeout:
        result.failure_reason = 'timeout'
    result.nodes_created = metrics.nodes_created
    result.samples = stats.samples
    result.step_samples = list(stats.step_samples)
    result.wall_time = time.perf_counter() - start
    if not result.success:
        logger.info("Task %s failed (%s) after %d nodes, %d plans, %d samples",
                    task.task_id, result.failure_reason, result.nodes_created,
                    result.plans_tried, result.samples)
    return result
