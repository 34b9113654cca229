import numpy as np
import pytest

from src.envs import Cluttered1DEnvironment
from src.planning import (
    NoAbstractPlan,
    PlannerConfig,
    PlanningTimeout,
    RefinementStats,
    SearchMetrics,
    bilevel_plan,
    gen_abstract_plans,
    goal_count,
    ground_operators,
    h_add,
    refine,
    static_predicates,
)
from src.samplers import GaussianSampler, oracle_samplers
from src.symbolic import LiftedAtom, Operator, Variable, successor

from conftest import cluttered_operators, cluttered_task


def test_config_validation():
    with pytest.raises(ValueError):
        PlannerConfig(n_abstract=0)
    with pytest.raises(ValueError):
        PlannerConfig(timeout=0)
    with pytest.raises(ValueError):
        PlannerConfig(heuristic='blind')


def test_static_predicates_prune_groundings(books):
    assert static_predicates([books.nav, books.pick]) == set()
    assert static_predicates([books.pick]) == {books.Reachable}
    ground = ground_operators([books.pick], books.demo.objects, books.s0)
    assert [g.objects for g in ground] == [(books.r, books.b2)]


def test_heuristics(books):
    ground = ground_operators([books.nav, books.pick], books.demo.objects, books.s0)
    assert h_add(books.s0, books.demo.goal, ground) == 2.0
    assert goal_count(books.s0, books.demo.goal, ground) == 1.0
    assert h_add(books.s0, books.demo.goal, ground_operators([books.nav], books.demo.objects,
                                                             books.s0)) == float('inf')


def test_first_plan_is_navigate_then_pick(books):
    plans = gen_abstract_plans(books.s0, books.demo.goal, [books.nav, books.pick],
                               books.demo.objects, n_abstract=1)
    assert len(plans) == 1
    assert str(plans[0]) == "NavTo0(robby, book1), Pick0(robby, book1)"
    assert plans[0].states[-1] == books.s2


def test_goal_count_finds_the_same_first_plan(books):
    plans = gen_abstract_plans(books.s0, books.demo.goal, [books.nav, books.pick],
                               books.demo.objects, n_abstract=1, heuristic='goal_count')
    assert str(plans[0]) == "NavTo0(robby, book1), Pick0(robby, book1)"


@pytest.mark.parametrize('heuristic', ['hadd', 'goal_count'])
def test_plans_are_valid_distinct_and_ordered(books, heuristic):
    plans = gen_abstract_plans(books.s0, books.demo.goal, [books.nav, books.pick],
                               books.demo.objects, n_abstract=5, heuristic=heuristic)
    assert 1 <= len(plans) <= 5
    costs = [p.cost for p in plans]
    assert costs == sorted(costs)
    assert len({p.states for p in plans}) == len(plans)
    for plan in plans:
        assert plan.states[0] == books.s0
        assert books.demo.goal <= plan.states[-1]
        for state, ground, after in zip(plan.states, plan.operators, plan.states[1:]):
            assert ground.preconditions <= state
            assert successor(state, ground) == after


def test_satisfied_goal_gives_empty_plan(books):
    plans = gen_abstract_plans(books.s2, books.demo.goal, [books.nav, books.pick],
                               books.demo.objects)
    assert len(plans[0]) == 0
    assert str(plans[0]) == '<empty>'


def test_unreachable_goal_raises(books):
    with pytest.raises(NoAbstractPlan):
        gen_abstract_plans(books.s0, books.demo.goal, [books.nav], books.demo.objects)


def test_necessary_atoms_along_plan(books):
    plan = gen_abstract_plans(books.s0, books.demo.goal, [books.nav, books.pick],
                              books.demo.objects, n_abstract=1)[0]
    alphas = plan.necessary_atoms(books.demo.goal)
    assert alphas == [
        {books.atom(books.HandEmpty, books.r)},
        {books.atom(books.HandEmpty, books.r), books.atom(books.Reachable, books.r, books.b1)},
        books.demo.goal,
    ]


def test_two_route_search_counts_nodes(two_route):
    task = two_route.task()
    s0 = two_route.abstract(task.init)
    metrics = SearchMetrics()
    plans = gen_abstract_plans(s0, task.goal, two_route.operators(), task.objects,
                               n_abstract=2, metrics=metrics)
    assert [str(p) for p in plans] == ['Jump0(robot)', 'Walk0(robot), Walk1(robot)']
    assert metrics.nodes_created == 4


def test_misleading_plan_fails_refinement(two_route):
    task = two_route.task()
    ops = two_route.operators()
    result = bilevel_plan(task, ops, oracle_samplers(ops, two_route), two_route,
                          PlannerConfig(n_abstract=1))
    assert not result.success
    assert result.failure_reason == 'refinement-failed'
    assert result.plans_tried == 1
    assert result.samples == 1


def test_second_plan_refines(two_route):
    task = two_route.task()
    ops = two_route.operators()
    result = bilevel_plan(task, ops, oracle_samplers(ops, two_route), two_route,
                          PlannerConfig(n_abstract=2))
    assert result.success
    assert result.failure_reason == ''
    assert result.plans_tried == 2
    assert result.samples == 3
    assert [a.controller_id for a in result.actions] == ['Walk', 'Walk']
    assert result.abstract_plans == ['Jump0(robot)', 'Walk0(robot), Walk1(robot)']
    assert two_route.goal_reached(task.goal, two_route.replay(task, result.actions)[-1])


def test_timeout_is_reported(two_route):
    task = two_route.task()
    ops = two_route.operators()
    result = bilevel_plan(task, ops, oracle_samplers(ops, two_route), two_route,
                          PlannerConfig(timeout=1e-9))
    assert result.failure_reason == 'timeout'
    assert result.actions is None
    assert result.step_samples == []


def test_missing_operators_report_no_plan(two_route):
    task = two_route.task()
    ops = [op for op in two_route.operators() if op.name == 'Walk0']
    result = bilevel_plan(task, ops, oracle_samplers(ops, two_route), two_route)
    assert result.failure_reason == 'no-abstract-plan'
    assert result.plans_tried == 0


def test_cluttered_with_oracle_samplers():
    env = Cluttered1DEnvironment()
    task = cluttered_task(env)
    ops = cluttered_operators(env)
    result = bilevel_plan(task, ops, oracle_samplers(ops, env), env, PlannerConfig(n_abstract=1))
    assert result.success
    assert result.samples == 2
    assert [a.theta for a in result.actions] == [(0.25, 10.0), (0.75, 10.0)]
    assert env.goal_reached(task.goal, env.replay(task, result.actions)[-1])


def test_refine_gives_up_after_sample_budget():
    env = Cluttered1DEnvironment()
    task = cluttered_task(env)
    ops = cluttered_operators(env)
    plan = gen_abstract_plans(env.abstract(task.init), task.goal, ops, task.objects,
                              n_abstract=1)[0]
    samplers = oracle_samplers(ops, env)
    samplers['MoveGrasp0'] = GaussianSampler('MoveGrasp0', (0.1, 25.0), (0.0, 0.0))
    stats = RefinementStats()
    actions = refine(plan, task, samplers, env, n_samples=3, rng=np.random.default_rng(0),
                     stats=stats)
    assert actions is None
    assert stats.samples == 3


def wide_operator(env):
    """Four-parameter operator whose groundings grow with the cube of the dot count."""
    r = Variable('?x0', env.robot_type)
    d1, d2, d3 = (Variable(f"?x{i}", env.dot_type) for i in range(1, 4))
    return Operator(
        name='MoveGrasp9',
        parameters=(r, d1, d2, d3),
        preconditions={LiftedAtom(env.NextTo, [r, d2]), LiftedAtom(env.NextTo, [r, d3])},
        add_effects={LiftedAtom(env.Grasped, [r, d1])},
        delete_effects=frozenset(),
        quantified_deletes=frozenset(),
        controller_id='MoveGrasp',
        controller_args=(r, d1),
    )


def test_timeout_holds_during_grounding():
    env = Cluttered1DEnvironment()
    task = cluttered_task(env, robot_x=0.0, dot_xs=tuple(0.2 * i + 1.0 for i in range(80)))
    ops = cluttered_operators(env) + [wide_operator(env)]
    result = bilevel_plan(task, ops, oracle_samplers(ops, env), env, PlannerConfig(timeout=0.05))
    assert result.failure_reason == 'timeout'
    assert result.wall_time < 1.0


def test_search_past_deadline_raises(two_route):
    task = two_route.task()
    with pytest.raises(PlanningTimeout):
        gen_abstract_plans(two_route.abstract(task.init), task.goal, two_route.operators(),
                           task.objects, deadline=0.0)
