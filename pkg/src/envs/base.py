import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ..symbolic import (
    AbstractState,
    Action,
    GroundAtom,
    GroundOperator,
    Object,
    ObjType,
    Predicate,
    State,
    abstract,
)

logger = logging.getLogger(__name__)

TaskScale = Literal['train', 'eval']


class UnknownController(ValueError):
    """Action names a controller the environment does not have."""


class ArityMismatch(ValueError):
    """Action arguments do not fit the controller's signature."""


class OracleFailure(RuntimeError):
    """The scripted demonstrator could not solve a task."""


@dataclass(frozen=True)
class ControllerSpec:
    """A parameterized controller: discrete argument types plus theta size."""
    name: str
    arg_types: Tuple[ObjType, ...]
    theta_dim: int


@dataclass
class Task:
    """Objects, an initial low-level state and a goal."""
    objects: Tuple[Object, ...]
    init: State
    goal: FrozenSet[GroundAtom]
    task_id: str = ''

    def __post_init__(self):
        self.objects = tuple(sorted(self.objects, key=lambda o: o.name))
        self.goal = frozenset(self.goal)
        names = [o.name for o in self.objects]
        if len(set(names)) != len(names):
            raise ValueError(f"Task {self.task_id} has duplicate object names")
        for atom in self.goal:
            for obj in atom.objects:
                if obj not in self.objects:
                    raise ValueError(f"Goal atom {atom} mentions unknown object {obj.name}")


@dataclass
class Demonstration:
    """A task with its aligned state and action sequences."""
    task: Task
    states: List[State]
    actions: List[Action] = field(default_factory=list)

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1:
            raise ValueError(
                f"Demonstration has {len(self.states)} states for {len(self.actions)} actions"
            )

    def __len__(self):
        return len(self.actions)


class BaseEnvironment(ABC):
    """Base class for all environments.

    Subclasses declare types, predicates and controllers in `__init__` and
    implement the controller semantics, the task distribution and a scripted
    demonstrator.
    """

    name: str = ''
    max_oracle_steps: int = 200

    def __init__(self):
        self.types: Dict[str, ObjType] = {}
        self.predicates: Dict[str, Predicate] = {}
        self.controllers: Dict[str, ControllerSpec] = {}

    def can_handle(self, name: str) -> bool:
        """Check if this environment answers to the given name."""
        return name.lower().replace('-', '_') == self.name

    def abstract(self, state: State) -> AbstractState:
        return abstract(state, self.predicates.values())

    def goal_reached(self, goal: FrozenSet[GroundAtom], state: State) -> bool:
        return all(atom.holds(state) for atom in goal)

    def check_action(self, action: Action) -> ControllerSpec:
        spec = self.controllers.get(action.controller_id)
        if spec is None:
            raise UnknownController(f"{self.name} has no controller {action.controller_id!r}")
        if len(action.objects) != len(spec.arg_types):
            raise ArityMismatch(
                f"{spec.name} takes {len(spec.arg_types)} objects, got {len(action.objects)}"
            )
        for obj, expected in zip(action.objects, spec.arg_types):
            if obj.type != expected:
                raise ArityMismatch(f"{spec.name}: {obj.name} is not a {expected.name}")
        if len(action.theta) != spec.theta_dim:
            raise ArityMismatch(
                f"{spec.name} takes {spec.theta_dim} continuous parameters, got {len(action.theta)}"
            )
        return spec

    def simulate(self, state: State, action: Action) -> State:
        """Deterministic next state; inapplicable controller calls are no-ops."""
        self.check_action(action)
        for obj in action.objects:
            if obj not in state:
                raise ArityMismatch(f"{action.controller_id}: {obj.name} is not in the state")
        return self._step(state.copy(), action)

    def sample_task(self, scale: TaskScale, rng: np.random.Generator, task_id: str = '') -> Task:
        if scale not in ('train', 'eval'):
            raise ValueError(f"Unknown task scale: {scale}")
        return self._sample_task(scale, rng, task_id)

    def sample_tasks(self, scale: TaskScale, count: int, seed: int) -> List[Task]:
        rng = np.random.default_rng(seed)
        return [self.sample_task(scale, rng, task_id=f"{scale}-{i:03d}") for i in range(count)]

    def oracle_solve(self, task: Task) -> Demonstration:
        """Roll out the scripted demonstrator until the goal holds."""
        state = task.init.copy()
        states = [state]
        actions: List[Action] = []
        while not self.goal_reached(task.goal, state):
            if len(actions) >= self.max_oracle_steps:
                raise OracleFailure(f"{self.name}: oracle exceeded {self.max_oracle_steps} steps "
                                    f"on task {task.task_id}")
            action = self._oracle_action(task, state)
            if action is None:
                raise OracleFailure(f"{self.name}: oracle gave up on task {task.task_id}")
            next_state = self.simulate(state, action)
            if next_state == state:
                raise OracleFailure(f"{self.name}: oracle action {action} had no effect "
                                    f"on task {task.task_id}")
            actions.append(action)
            states.append(next_state)
            state = next_state
        logger.debug("Oracle solved %s in %d steps", task.task_id, len(actions))
        return Demonstration(task=task, states=states, actions=actions)

    def replay(self, task: Task, actions: Sequence[Action]) -> List[State]:
        states = [task.init.copy()]
        for action in actions:
            states.append(self.simulate(states[-1], action))
        return states

    @abstractmethod
    def _step(self, state: State, action: Action) -> State:
        """Apply a validated action to a private copy of the state."""
        pass

    @abstractmethod
    def _sample_task(self, scale: TaskScale, rng: np.random.Generator, task_id: str) -> Task:
        pass

    @abstractmethod
    def _oracle_action(self, task: Task, state: State) -> Optional[Action]:
        """Next scripted action, or None if the script has nothing to do."""
        pass

    @abstractmethod
    def oracle_theta(self, ground_op: GroundOperator, state: State) -> Tuple[float, ...]:
        """Hand-coded continuous parameters for refining `ground_op` from `state`."""
        pass

    def _add_type(self, name: str, features: Sequence[str]) -> ObjType:
        obj_type = ObjType(name, tuple(features))
        self.types[name] = obj_type
        return obj_type

    def _add_predicate(self, name: str, types: Sequence[ObjType], classifier) -> Predicate:
        pred = Predicate(name, tuple(types), classifier)
        self.predicates[name] = pred
        return pred

    def _add_controller(self, name: str, arg_types: Sequence[ObjType], theta_dim: int):
        self.controllers[name] = ControllerSpec(name, tuple(arg_types), theta_dim)
