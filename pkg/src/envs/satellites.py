"""Satellites: calibrate, shoot chemicals and take instrument readings of objects."""

import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..symbolic import Action, GroundAtom, GroundOperator, Object, State
from .base import BaseEnvironment, Task, TaskScale

WORLD_SIZE = 10.0
SEE_DIST = 2.0
BLOCK_DIST = 0.3
COLLISION_DIST = 0.3
VIEW_RADIUS = 1.0
# A view point sees only its own object.
OBJECT_SPACING = VIEW_RADIUS + SEE_DIST + 0.2
# Satellites start out of sight of every object.
START_CLEARANCE = SEE_DIST + 0.25
PLACEMENT_TRIES = 1000
LAYOUT_TRIES = 100
NO_READING = 0.0

CAMERA, INFRARED, GEIGER = 0.1, 0.5, 0.9
# Preferred viewing angles around an object, first one straight along +x.
VIEW_ANGLES = tuple(math.radians(a) for a in (0, 90, 180, 270, 45, 135, 225, 315))

TASK_RANGES = {
    # scale: (satellites, objects, goal readings)
    'train': ((2, 3), (2, 3), (1, 2)),
    'eval': ((3, 4), (4, 5), (2, 3)),
}


def instrument_kind(value: float) -> str:
    if value < 0.33:
        return 'camera'
    if value < 0.66:
        return 'infrared'
    return 'geiger'


def _segment_dist(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length_sq))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _scatter(rng: np.random.Generator, count: int, lo: float, hi: float,
             accept: Callable[[float, float, List[Tuple[float, float]]], bool],
             ) -> Optional[List[Tuple[float, float]]]:
    placed: List[Tuple[float, float]] = []
    for _ in range(PLACEMENT_TRIES):
        if len(placed) == count:
            break
        x, y = (float(v) for v in rng.uniform(lo, hi, size=2))
        if accept(x, y, placed):
            placed.append((x, y))
    return placed if len(placed) == count else None


class SatellitesEnvironment(BaseEnvironment):
    """Satellites with one instrument each, observing objects under line-of-sight limits."""

    name = 'satellites'

    def __init__(self):
        super().__init__()
        self.sat_type = self._add_type('satellite', [
            'x', 'y', 'theta', 'instrument', 'calibration_obj_id', 'is_calibrated',
            'read_obj_id', 'shoots_chem_x', 'shoots_chem_y',
        ])
        self.obj_type = self._add_type('object', ['id', 'x', 'y', 'has_chem_x', 'has_chem_y'])
        sat, obj = self.sat_type, self.obj_type

        self.Sees = self._add_predicate('Sees', [sat, obj], self._sees)
        self.CalibrationTarget = self._add_predicate(
            'CalibrationTarget', [sat, obj],
            lambda s, o: s.get(o[0], 'calibration_obj_id') == s.get(o[1], 'id'))
        self.IsCalibrated = self._add_predicate(
            'IsCalibrated', [sat], lambda s, o: s.get(o[0], 'is_calibrated') >= 0.5)
        self.HasCamera = self._add_predicate(
            'HasCamera', [sat], lambda s, o: self._kind(s, o[0]) == 'camera')
        self.HasInfrared = self._add_predicate(
            'HasInfrared', [sat], lambda s, o: self._kind(s, o[0]) == 'infrared')
        self.HasGeiger = self._add_predicate(
            'HasGeiger', [sat], lambda s, o: self._kind(s, o[0]) == 'geiger')
        self.ShootsChemX = self._add_predicate(
            'ShootsChemX', [sat], lambda s, o: s.get(o[0], 'shoots_chem_x') >= 0.5)
        self.ShootsChemY = self._add_predicate(
            'ShootsChemY', [sat], lambda s, o: s.get(o[0], 'shoots_chem_y') >= 0.5)
        self.HasChemX = self._add_predicate(
            'HasChemX', [obj], lambda s, o: s.get(o[0], 'has_chem_x') >= 0.5)
        self.HasChemY = self._add_predicate(
            'HasChemY', [obj], lambda s, o: s.get(o[0], 'has_chem_y') >= 0.5)
        self.CameraReadingTaken = self._add_predicate(
            'CameraReadingTaken', [sat, obj], lambda s, o: self._read(s, o, 'camera'))
        self.InfraredReadingTaken = self._add_predicate(
            'InfraredReadingTaken', [sat, obj], lambda s, o: self._read(s, o, 'infrared'))
        self.GeigerReadingTaken = self._add_predicate(
            'GeigerReadingTaken', [sat, obj], lambda s, o: self._read(s, o, 'geiger'))
        self.reading_predicates = {
            'camera': self.CameraReadingTaken,
            'infrared': self.InfraredReadingTaken,
            'geiger': self.GeigerReadingTaken,
        }

        self._add_controller('MoveTo', [sat, obj], 2)
        self._add_controller('Calibrate', [sat, obj], 0)
        self._add_controller('ShootChemX', [sat, obj], 0)
        self._add_controller('ShootChemY', [sat, obj], 0)
        self._add_controller('UseInstrument', [sat, obj], 0)

    @staticmethod
    def _kind(state: State, sat: Object) -> str:
        return instrument_kind(state.get(sat, 'instrument'))

    def _read(self, state: State, objects, kind: str) -> bool:
        sat, obj = objects
        return (self._kind(state, sat) == kind
                and state.get(sat, 'read_obj_id') == state.get(obj, 'id'))

    def _sees_from(self, state: State, sat: Object, x: float, y: float, obj: Object) -> bool:
        ox, oy = state.get(obj, 'x'), state.get(obj, 'y')
        if math.hypot(ox - x, oy - y) > SEE_DIST:
            return False
        for other in state.objects_of_type(self.sat_type):
            if other == sat:
                continue
            px, py = state.get(other, 'x'), state.get(other, 'y')
            if _segment_dist(px, py, x, y, ox, oy) <= BLOCK_DIST:
                return False
        return True

    def _sees(self, state: State, objects) -> bool:
        sat, obj = objects
        return self._sees_from(state, sat, state.get(sat, 'x'), state.get(sat, 'y'), obj)

    def _collides(self, state: State, sat: Object, x: float, y: float) -> bool:
        if not (0.0 <= x <= WORLD_SIZE and 0.0 <= y <= WORLD_SIZE):
            return True
        for other in state.objects:
            if other == sat:
                continue
            if math.hypot(state.get(other, 'x') - x, state.get(other, 'y') - y) <= COLLISION_DIST:
                return True
        return False

    def _step(self, state: State, action: Action) -> State:
        sat, obj = action.objects
        ctrl = action.controller_id
        if ctrl == 'MoveTo':
            x, y = action.theta
            if not self._collides(state, sat, x, y):
                state.set(sat, 'x', x)
                state.set(sat, 'y', y)
                state.set(sat, 'theta', math.atan2(state.get(obj, 'y') - y, state.get(obj, 'x') - x))
            return state
        if not self._sees(state, (sat, obj)):
            return state
        if ctrl == 'Calibrate':
            if state.get(sat, 'calibration_obj_id') == state.get(obj, 'id'):
                state.set(sat, 'is_calibrated', 1.0)
        elif ctrl == 'ShootChemX':
            if state.get(sat, 'shoots_chem_x') >= 0.5:
                state.set(obj, 'has_chem_x', 1.0)
        elif ctrl == 'ShootChemY':
            if state.get(sat, 'shoots_chem_y') >= 0.5:
                state.set(obj, 'has_chem_y', 1.0)
        elif ctrl == 'UseInstrument':
            if state.get(sat, 'is_calibrated') < 0.5:
                return state
            kind = self._kind(state, sat)
            if kind == 'camera' and state.get(obj, 'has_chem_x') < 0.5:
                return state
            if kind == 'infrared' and state.get(obj, 'has_chem_y') < 0.5:
                return state
            state.set(sat, 'read_obj_id', state.get(obj, 'id'))
        return state

    def view_point(self, state: State, sat: Object, obj: Object) -> Optional[Tuple[float, float]]:
        """First free spot on the ring around `obj` from which `sat` would see it."""
        ox, oy = state.get(obj, 'x'), state.get(obj, 'y')
        for angle in VIEW_ANGLES:
            x = ox + VIEW_RADIUS * math.cos(angle)
            y = oy + VIEW_RADIUS * math.sin(angle)
            if self._collides(state, sat, x, y):
                continue
            if self._sees_from(state, sat, x, y, obj):
                return x, y
        return None

    def _sample_task(self, scale: TaskScale, rng: np.random.Generator, task_id: str) -> Task:
        (lo_sat, hi_sat), (lo_obj, hi_obj), (lo_goal, hi_goal) = TASK_RANGES[scale]
        num_sats = int(rng.integers(lo_sat, hi_sat + 1))
        num_objs = int(rng.integers(lo_obj, hi_obj + 1))
        num_goal = min(int(rng.integers(lo_goal, hi_goal + 1)), num_sats)

        for _ in range(LAYOUT_TRIES):
            obj_xys = _scatter(
                rng, num_objs, 1.5, WORLD_SIZE - 1.5,
                lambda x, y, placed: all(math.hypot(x - ax, y - ay) >= OBJECT_SPACING
                                         for ax, ay in placed))
            if obj_xys is None:
                continue
            sat_xys = _scatter(
                rng, num_sats, 0.5, WORLD_SIZE - 0.5,
                lambda x, y, placed: (
                    all(math.hypot(x - ax, y - ay) > START_CLEARANCE for ax, ay in obj_xys)
                    and all(math.hypot(x - ax, y - ay) > 4 * COLLISION_DIST for ax, ay in placed)))
            if sat_xys is not None:
                break
        else:
            raise RuntimeError(f"{self.name}: could not lay out task {task_id}")

        instruments = [float(rng.choice([CAMERA, INFRARED, GEIGER])) for _ in range(num_sats)]
        shoots_x = [float(rng.random() < 0.5) for _ in range(num_sats)]
        shoots_y = [float(rng.random() < 0.5) for _ in range(num_sats)]
        # Every chemical a camera or infrared reading needs must have a shooter.
        if CAMERA in instruments and not any(shoots_x):
            shoots_x[int(rng.integers(num_sats))] = 1.0
        if INFRARED in instruments and not any(shoots_y):
            shoots_y[int(rng.integers(num_sats))] = 1.0

        sats = [Object(f"sat{i}", self.sat_type) for i in range(num_sats)]
        objs = [Object(f"obj{i}", self.obj_type) for i in range(num_objs)]
        data: Dict[Object, np.ndarray] = {}
        for i, obj in enumerate(objs):
            x, y = obj_xys[i]
            data[obj] = np.array([float(i + 1), x, y, 0.0, 0.0])
        for i, sat in enumerate(sats):
            x, y = sat_xys[i]
            calibration_id = float(rng.integers(num_objs) + 1)
            data[sat] = np.array([
                x, y, 0.0, instruments[i], calibration_id, 0.0, NO_READING,
                shoots_x[i], shoots_y[i],
            ])

        goal = set()
        goal_sats = rng.choice(num_sats, size=num_goal, replace=False)
        for sat_index in goal_sats:
            obj = objs[int(rng.integers(num_objs))]
            pred = self.reading_predicates[instrument_kind(instruments[sat_index])]
            goal.add(GroundAtom(pred, [sats[sat_index], obj]))
        return Task(objects=(*sats, *objs), init=State(data), goal=frozenset(goal), task_id=task_id)

    def _move_to_see(self, state: State, sat: Object, obj: Object) -> Optional[Action]:
        xy = self.view_point(state, sat, obj)
        if xy is None:
            return None
        return Action('MoveTo', (sat, obj), xy)

    def _first_shooter(self, state: State, feature: str) -> Optional[Object]:
        for sat in state.objects_of_type(self.sat_type):
            if state.get(sat, feature) >= 0.5:
                return sat
        return None

    def _calibration_object(self, state: State, sat: Object) -> Optional[Object]:
        for obj in state.objects_of_type(self.obj_type):
            if state.get(obj, 'id') == state.get(sat, 'calibration_obj_id'):
                return obj
        return None

    def _oracle_action(self, task: Task, state: State) -> Optional[Action]:
        for atom in sorted(task.goal, key=lambda a: a.sort_key):
            if atom.holds(state):
                continue
            sat, obj = atom.objects
            if state.get(sat, 'is_calibrated') < 0.5:
                target = self._calibration_object(state, sat)
                if target is None:
                    return None
                if not self._sees(state, (sat, target)):
                    return self._move_to_see(state, sat, target)
                return Action('Calibrate', (sat, target))
            kind = self._kind(state, sat)
            chem = {'camera': ('has_chem_x', 'shoots_chem_x', 'ShootChemX'),
                    'infrared': ('has_chem_y', 'shoots_chem_y', 'ShootChemY')}.get(kind)
            if chem is not None and state.get(obj, chem[0]) < 0.5:
                shooter = self._first_shooter(state, chem[1])
                if shooter is None:
                    return None
                if not self._sees(state, (shooter, obj)):
                    return self._move_to_see(state, shooter, obj)
                return Action(chem[2], (shooter, obj))
            if not self._sees(state, (sat, obj)):
                return self._move_to_see(state, sat, obj)
            return Action('UseInstrument', (sat, obj))
        return None

    def oracle_theta(self, ground_op: GroundOperator, state: State) -> Tuple[float, ...]:
        if ground_op.parent.controller_id != 'MoveTo':
            return ()
        sat, obj = ground_op.controller_objects
        xy = self.view_point(state, sat, obj)
        if xy is None:
            return (state.get(sat, 'x'), state.get(sat, 'y'))
        return xy
