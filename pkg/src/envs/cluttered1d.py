"""Cluttered 1D: a robot on a line grasping dots, with clutter next to targets."""

from typing import List, Optional, Tuple

import numpy as np

from ..symbolic import Action, GroundAtom, GroundOperator, Object, State
from .base import BaseEnvironment, Task, TaskScale

WORLD_MIN = 0.0
WORLD_MAX = 20.0
NEXT_TO_DIST = 0.5
GOAL_SPACING = 1.0
MOVE = 0.25
GRASP = 0.75

TASK_RANGES = {
    # scale: (dots, goal atoms)
    'train': ((3, 5), (1, 2)),
    'eval': ((6, 10), (2, 4)),
}


class Cluttered1DEnvironment(BaseEnvironment):
    """One robot, several dots, a single MoveGrasp controller."""

    name = 'cluttered_1d'

    def __init__(self):
        super().__init__()
        self.robot_type = self._add_type('robot', ['x'])
        self.dot_type = self._add_type('dot', ['x', 'grasped'])

        self.NextTo = self._add_predicate('NextTo', [self.robot_type, self.dot_type],
                                          self._next_to)
        self.NextToNothing = self._add_predicate('NextToNothing', [self.robot_type],
                                                 self._next_to_nothing)
        self.Grasped = self._add_predicate('Grasped', [self.robot_type, self.dot_type],
                                           self._grasped)

        self._add_controller('MoveGrasp', [self.robot_type, self.dot_type], 2)

    @staticmethod
    def _next_to(state: State, objects) -> bool:
        robot, dot = objects
        return abs(state.get(robot, 'x') - state.get(dot, 'x')) <= NEXT_TO_DIST

    def _next_to_nothing(self, state: State, objects) -> bool:
        robot, = objects
        return not any(self._next_to(state, (robot, d))
                       for d in state.objects_of_type(self.dot_type))

    @staticmethod
    def _grasped(state: State, objects) -> bool:
        _, dot = objects
        return state.get(dot, 'grasped') >= 0.5

    def _step(self, state: State, action: Action) -> State:
        robot, target = action.objects
        move_or_grasp, x = action.theta
        if move_or_grasp < 0.5:
            if WORLD_MIN <= x <= WORLD_MAX:
                state.set(robot, 'x', x)
            return state
        if not self._next_to(state, (robot, target)):
            return state
        # Grasping closes on everything within reach, not just the target.
        for dot in state.objects_of_type(self.dot_type):
            if self._next_to(state, (robot, dot)):
                state.set(dot, 'grasped', 1.0)
        return state

    def _sample_task(self, scale: TaskScale, rng: np.random.Generator, task_id: str) -> Task:
        (lo_dots, hi_dots), (lo_goal, hi_goal) = TASK_RANGES[scale]
        num_dots = int(rng.integers(lo_dots, hi_dots + 1))
        num_goal = min(int(rng.integers(lo_goal, hi_goal + 1)), num_dots)

        goal_xs: List[float] = []
        while len(goal_xs) < num_goal:
            x = float(rng.uniform(WORLD_MIN + 1.0, WORLD_MAX - 1.0))
            if all(abs(x - other) > GOAL_SPACING for other in goal_xs):
                goal_xs.append(x)
        clutter_xs = [float(rng.uniform(WORLD_MIN, WORLD_MAX)) for _ in range(num_dots - num_goal)]

        while True:
            robot_x = float(rng.uniform(WORLD_MIN, WORLD_MAX))
            if all(abs(robot_x - x) > NEXT_TO_DIST for x in goal_xs):
                break

        robot = Object('robot', self.robot_type)
        dots = [Object(f"dot{i}", self.dot_type) for i in range(num_dots)]
        order = rng.permutation(num_dots)
        xs = goal_xs + clutter_xs
        data = {robot: np.array([robot_x])}
        goal_dots = []
        for slot, x in zip(order, xs):
            data[dots[slot]] = np.array([x, 0.0])
        for slot in order[:num_goal]:
            goal_dots.append(dots[slot])
        goal = {GroundAtom(self.Grasped, [robot, d]) for d in goal_dots}
        return Task(objects=(robot, *dots), init=State(data), goal=frozenset(goal), task_id=task_id)

    def _oracle_action(self, task: Task, state: State) -> Optional[Action]:
        for atom in sorted(task.goal, key=lambda a: a.sort_key):
            if atom.holds(state):
                continue
            robot, dot = atom.objects
            dot_x = state.get(dot, 'x')
            if not self._next_to(state, (robot, dot)):
                return Action('MoveGrasp', (robot, dot), (MOVE, dot_x))
            return Action('MoveGrasp', (robot, dot), (GRASP, dot_x))
        return None

    def oracle_theta(self, ground_op: GroundOperator, state: State) -> Tuple[float, ...]:
        _, dot = ground_op.controller_objects
        grasps = any(a.predicate == self.Grasped for a in ground_op.add_effects)
        return (GRASP if grasps else MOVE, state.get(dot, 'x'))
