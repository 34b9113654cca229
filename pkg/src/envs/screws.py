"""Screws: a magnetic gripper moves one screw into a receptacle amid clutter."""

import math
from typing import List, Optional, Tuple

import numpy as np

from ..symbolic import Action, GroundAtom, GroundOperator, Object, State
from .base import BaseEnvironment, Task, TaskScale

WORLD_SIZE = 10.0
PICK_RADIUS = 0.8
RECEPTACLE_RADIUS = 0.5
CLUTTER_RADIUS = 0.6
FAR_DIST = 2.0

TASK_RANGES = {
    # scale: (clutter screws around the goal, distant screws)
    'train': ((0, 3), (0, 1)),
    'eval': ((1, 3), (3, 5)),
}


def _dist(state: State, a: Object, b: Object) -> float:
    return math.hypot(state.get(a, 'x') - state.get(b, 'x'), state.get(a, 'y') - state.get(b, 'y'))


class ScrewsEnvironment(BaseEnvironment):
    """Gripper, screws and one receptacle; magnetizing holds every nearby screw."""

    name = 'screws'

    def __init__(self):
        super().__init__()
        self.gripper_type = self._add_type('gripper', ['x', 'y', 'magnetized'])
        self.screw_type = self._add_type('screw', ['x', 'y', 'held'])
        self.receptacle_type = self._add_type('receptacle', ['x', 'y'])

        self.Pickable = self._add_predicate(
            'Pickable', [self.gripper_type, self.screw_type], self._pickable)
        self.AboveReceptacle = self._add_predicate(
            'AboveReceptacle', [self.gripper_type, self.receptacle_type], self._above_receptacle)
        self.HoldingScrew = self._add_predicate(
            'HoldingScrew', [self.gripper_type, self.screw_type], self._holding)
        self.ScrewInReceptacle = self._add_predicate(
            'ScrewInReceptacle', [self.screw_type, self.receptacle_type], self._in_receptacle)

        self._add_controller('MoveToScrew', [self.gripper_type, self.screw_type], 0)
        self._add_controller('MoveToReceptacle', [self.gripper_type, self.receptacle_type], 0)
        self._add_controller('MagnetizeGripper', [self.gripper_type], 0)
        self._add_controller('DemagnetizeGripper', [self.gripper_type], 0)

    @staticmethod
    def _pickable(state: State, objects) -> bool:
        gripper, screw = objects
        return state.get(screw, 'held') < 0.5 and _dist(state, gripper, screw) <= PICK_RADIUS

    @staticmethod
    def _above_receptacle(state: State, objects) -> bool:
        gripper, receptacle = objects
        return _dist(state, gripper, receptacle) <= RECEPTACLE_RADIUS

    @staticmethod
    def _holding(state: State, objects) -> bool:
        _, screw = objects
        return state.get(screw, 'held') >= 0.5

    @staticmethod
    def _in_receptacle(state: State, objects) -> bool:
        screw, receptacle = objects
        return state.get(screw, 'held') < 0.5 and _dist(state, screw, receptacle) <= RECEPTACLE_RADIUS

    def _held_screws(self, state: State) -> List[Object]:
        return [s for s in state.objects_of_type(self.screw_type) if self._holding(state, (None, s))]

    def _move_gripper(self, state: State, gripper: Object, x: float, y: float) -> None:
        for screw in self._held_screws(state):
            state.set(screw, 'x', x)
            state.set(screw, 'y', y)
        state.set(gripper, 'x', x)
        state.set(gripper, 'y', y)

    def _step(self, state: State, action: Action) -> State:
        gripper = action.objects[0]
        if action.controller_id in ('MoveToScrew', 'MoveToReceptacle'):
            target = action.objects[1]
            self._move_gripper(state, gripper, state.get(target, 'x'), state.get(target, 'y'))
        elif action.controller_id == 'MagnetizeGripper':
            state.set(gripper, 'magnetized', 1.0)
            gx, gy = state.get(gripper, 'x'), state.get(gripper, 'y')
            for screw in state.objects_of_type(self.screw_type):
                if self._pickable(state, (gripper, screw)):
                    state.set(screw, 'held', 1.0)
                    state.set(screw, 'x', gx)
                    state.set(screw, 'y', gy)
        elif action.controller_id == 'DemagnetizeGripper':
            state.set(gripper, 'magnetized', 0.0)
            for screw in self._held_screws(state):
                state.set(screw, 'held', 0.0)
        return state

    def _sample_point(self, rng: np.random.Generator, avoid: List[Tuple[float, float]],
                      min_dist: float) -> Tuple[float, float]:
        while True:
            x, y = (float(v) for v in rng.uniform(0.5, WORLD_SIZE - 0.5, size=2))
            if all(math.hypot(x - ax, y - ay) > min_dist for ax, ay in avoid):
                return x, y

    def _sample_task(self, scale: TaskScale, rng: np.random.Generator, task_id: str) -> Task:
        (lo_clutter, hi_clutter), (lo_far, hi_far) = TASK_RANGES[scale]
        num_clutter = int(rng.integers(lo_clutter, hi_clutter + 1))
        num_far = int(rng.integers(lo_far, hi_far + 1))

        receptacle_xy = self._sample_point(rng, [], 0.0)
        goal_xy = self._sample_point(rng, [receptacle_xy], FAR_DIST + CLUTTER_RADIUS)
        clutter_xys = []
        for _ in range(num_clutter):
            angle = float(rng.uniform(0, 2 * math.pi))
            radius = float(rng.uniform(0.1, CLUTTER_RADIUS))
            clutter_xys.append((goal_xy[0] + radius * math.cos(angle),
                                goal_xy[1] + radius * math.sin(angle)))
        occupied = [receptacle_xy, goal_xy] + clutter_xys
        far_xys = []
        for _ in range(num_far):
            xy = self._sample_point(rng, occupied + far_xys, FAR_DIST)
            far_xys.append(xy)
        gripper_xy = self._sample_point(rng, occupied + far_xys, FAR_DIST)

        gripper = Object('gripper', self.gripper_type)
        receptacle = Object('receptacle', self.receptacle_type)
        screw_xys = [goal_xy] + clutter_xys + far_xys
        screws = [Object(f"screw{i}", self.screw_type) for i in range(len(screw_xys))]
        order = rng.permutation(len(screws))
        data = {
            gripper: np.array([*gripper_xy, 0.0]),
            receptacle: np.array(receptacle_xy),
        }
        for slot, (x, y) in zip(order, screw_xys):
            data[screws[slot]] = np.array([x, y, 0.0])
        goal_screw = screws[order[0]]
        goal = {GroundAtom(self.ScrewInReceptacle, [goal_screw, receptacle])}
        return Task(objects=(gripper, receptacle, *screws), init=State(data),
                    goal=frozenset(goal), task_id=task_id)

    def _oracle_action(self, task: Task, state: State) -> Optional[Action]:
        gripper = state.objects_of_type(self.gripper_type)[0]
        for atom in sorted(task.goal, key=lambda a: a.sort_key):
            if atom.holds(state):
                continue
            screw, receptacle = atom.objects
            if self._holding(state, (gripper, screw)):
                if not self._above_receptacle(state, (gripper, receptacle)):
                    return Action('MoveToReceptacle', (gripper, receptacle))
                return Action('DemagnetizeGripper', (gripper,))
            if not self._pickable(state, (gripper, screw)):
                return Action('MoveToScrew', (gripper, screw))
            return Action('MagnetizeGripper', (gripper,))
        return None

    def oracle_theta(self, ground_op: GroundOperator, state: State) -> Tuple[float, ...]:
        return ()
