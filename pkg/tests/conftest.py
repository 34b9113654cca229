"""Shared fixtures: a symbolic book-shelf domain and a two-route environment."""

from types import SimpleNamespace
from typing import List, Optional, Tuple

import numpy as np
import pytest

from src.envs import BaseEnvironment, Task
from src.learning import AbstractDemonstration
from src.symbolic import (
    Action,
    GroundAtom,
    GroundOperator,
    LiftedAtom,
    Object,
    ObjType,
    Operator,
    Predicate,
    State,
    Variable,
)


def make_books():
    robot_t = ObjType('robot', ('x',))
    book_t = ObjType('book', ('x',))
    Reachable = Predicate('Reachable', (robot_t, book_t))
    Holding = Predicate('Holding', (robot_t, book_t))
    HandEmpty = Predicate('HandEmpty', (robot_t,))
    r = Object('robby', robot_t)
    b1 = Object('book1', book_t)
    b2 = Object('book2', book_t)
    vr = Variable('?r', robot_t)
    vb = Variable('?b', book_t)
    nav = Operator(
        name='NavTo0',
        parameters=(vr, vb),
        preconditions=frozenset(),
        add_effects={LiftedAtom(Reachable, [vr, vb])},
        delete_effects=frozenset(),
        quantified_deletes={Reachable},
        controller_id='NavTo',
        controller_args=(vr, vb),
    )
    pick = Operator(
        name='Pick0',
        parameters=(vr, vb),
        preconditions={LiftedAtom(Reachable, [vr, vb]), LiftedAtom(HandEmpty, [vr])},
        add_effects={LiftedAtom(Holding, [vr, vb])},
        delete_effects={LiftedAtom(HandEmpty, [vr])},
        quantified_deletes=frozenset(),
        controller_id='Pick',
        controller_args=(vr, vb),
    )

    def atom(pred, *objs):
        return GroundAtom(pred, objs)

    s0 = frozenset({atom(HandEmpty, r), atom(Reachable, r, b2)})
    s1 = frozenset({atom(HandEmpty, r), atom(Reachable, r, b1)})
    s2 = frozenset({atom(Reachable, r, b1), atom(Holding, r, b1)})
    demo = AbstractDemonstration(
        demo_id=0,
        states=[s0, s1, s2],
        actions=[Action('NavTo', (r, b1)), Action('Pick', (r, b1))],
        goal={atom(Holding, r, b1)},
        objects=(r, b1, b2),
    )
    return SimpleNamespace(
        robot_t=robot_t, book_t=book_t, Reachable=Reachable, Holding=Holding,
        HandEmpty=HandEmpty, r=r, b1=b1, b2=b2, vr=vr, vb=vb, nav=nav, pick=pick,
        s0=s0, s1=s1, s2=s2, demo=demo, atom=atom,
    )


@pytest.fixture
def books():
    return make_books()


class TwoRouteEnvironment(BaseEnvironment):
    """A robot on a line. Jumping straight to the goal looks possible but does nothing."""

    name = 'two_route'

    def __init__(self):
        super().__init__()
        self.robot_type = self._add_type('robot', ['x'])
        self.AtStart = self._add_predicate('AtStart', [self.robot_type],
                                           lambda s, o: s.get(o[0], 'x') < 0.5)
        self.AtMid = self._add_predicate('AtMid', [self.robot_type],
                                         lambda s, o: 0.5 <= s.get(o[0], 'x') < 1.5)
        self.AtGoal = self._add_predicate('AtGoal', [self.robot_type],
                                          lambda s, o: s.get(o[0], 'x') >= 1.5)
        self._add_controller('Jump', [self.robot_type], 0)
        self._add_controller('Walk', [self.robot_type], 0)

    def _step(self, state: State, action: Action) -> State:
        robot, = action.objects
        if action.controller_id == 'Walk' and state.get(robot, 'x') < 2.0:
            state.set(robot, 'x', state.get(robot, 'x') + 1.0)
        return state

    def task(self, x: float = 0.0) -> Task:
        robot = Object('robot', self.robot_type)
        return Task(objects=(robot,), init=State({robot: np.array([x])}),
                    goal={GroundAtom(self.AtGoal, [robot])}, task_id='two-route')

    def _sample_task(self, scale, rng, task_id) -> Task:
        return self.task()

    def _oracle_action(self, task: Task, state: State) -> Optional[Action]:
        return Action('Walk', (task.objects[0],))

    def oracle_theta(self, ground_op: GroundOperator, state: State) -> Tuple[float, ...]:
        return ()

    def operators(self) -> List[Operator]:
        r = Variable('?r', self.robot_type)

        def op(name, ctrl, pre, add, delete):
            return Operator(name=name, parameters=(r,),
                            preconditions={LiftedAtom(p, [r]) for p in pre},
                            add_effects={LiftedAtom(p, [r]) for p in add},
                            delete_effects={LiftedAtom(p, [r]) for p in delete},
                            quantified_deletes=frozenset(), controller_id=ctrl,
                            controller_args=(r,))

        return [
            op('Jump0', 'Jump', [self.AtStart], [self.AtGoal], [self.AtStart]),
            op('Walk0', 'Walk', [self.AtStart], [self.AtMid], [self.AtStart]),
            op('Walk1', 'Walk', [self.AtMid], [self.AtGoal], [self.AtMid]),
        ]


@pytest.fixture
def two_route():
    return TwoRouteEnvironment()


def cluttered_operators(env) -> List[Operator]:
    """Hand-written Cluttered 1D operators."""
    r = Variable('?x0', env.robot_type)
    d = Variable('?x1', env.dot_type)
    move = Operator(
        name='MoveGrasp0',
        parameters=(r, d),
        preconditions=frozenset(),
        add_effects={LiftedAtom(env.NextTo, [r, d])},
        delete_effects={LiftedAtom(env.NextToNothing, [r])},
        quantified_deletes={env.NextTo},
        controller_id='MoveGrasp',
        controller_args=(r, d),
    )
    grasp = Operator(
        name='MoveGrasp1',
        parameters=(r, d),
        preconditions={LiftedAtom(env.NextTo, [r, d])},
        add_effects={LiftedAtom(env.Grasped, [r, d])},
        delete_effects=frozenset(),
        quantified_deletes=frozenset(),
        controller_id='MoveGrasp',
        controller_args=(r, d),
    )
    return [move, grasp]


def cluttered_task(env, robot_x: float = 5.0, dot_xs=(10.0,), goal_dots=(0,)) -> Task:
    robot = Object('robot', env.robot_type)
    dots = [Object(f"dot{i}", env.dot_type) for i in range(len(dot_xs))]
    data = {robot: np.array([robot_x])}
    for dot, x in zip(dots, dot_xs):
        data[dot] = np.array([x, 0.0])
    goal = {GroundAtom(env.Grasped, [robot, dots[i]]) for i in goal_dots}
    return Task(objects=(robot, *dots), init=State(data), goal=goal, task_id='hand-made')


def named(task: Task, name: str) -> Object:
    return next(o for o in task.objects if o.name == name)
