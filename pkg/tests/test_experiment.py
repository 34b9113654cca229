import pytest
from pydantic import ValidationError

from src.envs import Cluttered1DEnvironment, ScrewsEnvironment
from src.experiment import (
    ExperimentConfig,
    check_report,
    environment_names,
    evaluate,
    generate_demos,
    get_environment,
    learn,
    learn_operators,
    run_experiment,
)
from src.planning import PlannerConfig
from src.reporting import ExperimentReport, SeedSummary, TaskOutcome, render_csv
from src.samplers import TrivialSampler, oracle_samplers
from src.storage import ArtifactStore


def report_with(env, method, success_rates, num_operators):
    seeds = []
    for seed, (rate, ops) in enumerate(zip(success_rates, num_operators)):
        outcomes = [TaskOutcome(task_id=f"eval-{i:03d}", success=i < rate) for i in range(100)]
        seeds.append(SeedSummary(seed=seed, num_operators=ops, train_coverage=1.0,
                                 outcomes=outcomes))
    return ExperimentReport(env=env, method=method, num_train_demos=50, num_eval_tasks=100,
                            seeds=seeds)


def test_get_environment():
    assert isinstance(get_environment('Cluttered-1D'), Cluttered1DEnvironment)
    assert isinstance(get_environment('screws'), ScrewsEnvironment)
    assert get_environment('kitchen') is None
    assert environment_names() == ['cluttered_1d', 'screws', 'satellites']


def test_config_normalizes_and_validates():
    assert ExperimentConfig(env='cluttered-1d').env == 'cluttered_1d'
    with pytest.raises(ValidationError):
        ExperimentConfig(env='kitchen')
    with pytest.raises(ValidationError):
        ExperimentConfig(env='screws', num_train_demos=0)
    with pytest.raises(ValidationError):
        ExperimentConfig(env='screws', seeds=[])


def test_learn_operators_rejects_unknown_method():
    env = ScrewsEnvironment()
    with pytest.raises(ValueError):
        learn_operators(env, generate_demos(env, 1, 0), 'magic')


def test_screws_without_continuous_parameters_gets_trivial_samplers():
    env = ScrewsEnvironment()
    model = learn(env, generate_demos(env, 3, 0))
    assert model.operators
    assert all(isinstance(s, TrivialSampler) for s in model.samplers.values())


def test_evaluate_sorts_outcomes(two_route):
    ops = two_route.operators()
    tasks = [two_route.task(), two_route.task(x=1.0)]
    tasks[1].task_id = 'a-mid'
    outcomes = evaluate(two_route, tasks, ops, oracle_samplers(ops, two_route),
                        PlannerConfig(n_abstract=2))
    assert [o.task_id for o in outcomes] == ['a-mid', 'two-route']
    assert all(o.success for o in outcomes)


def test_zero_eval_tasks():
    report = run_experiment(ExperimentConfig(env='screws', num_train_demos=2, num_eval_tasks=0,
                                             use_oracle_samplers=True))
    assert report.seeds[0].outcomes == []
    assert report.success_rate.mean == 0.0


def test_oracle_sampler_experiment_is_deterministic(tmp_path):
    def run(out):
        cfg = ExperimentConfig(env='cluttered_1d', num_train_demos=4, num_eval_tasks=3,
                               seeds=[0, 1], use_oracle_samplers=True, out_dir=str(out))
        return run_experiment(cfg)

    first, second = run(tmp_path / 'a'), run(tmp_path / 'b')
    assert render_csv(first) == render_csv(second)
    assert len(first.seeds) == 2
    assert (tmp_path / 'a' / 'cluttered_1d-ours-seed1' / 'operators.json').exists()
    assert (tmp_path / 'a' / 'cluttered_1d-ours' / 'report.csv').read_text() == render_csv(first)


def test_baseline_method_runs():
    report = run_experiment(ExperimentConfig(env='screws', method='cluster_intersect',
                                             num_train_demos=2, num_eval_tasks=1,
                                             use_oracle_samplers=True))
    assert report.method == 'cluster_intersect'
    assert report.seeds[0].num_operators >= 1


def test_check_report_passes_and_fails():
    assert check_report(report_with('cluttered_1d', 'ours', [100, 98], [2, 2])) == []
    failures = check_report(report_with('cluttered_1d', 'ours', [90, 90], [2, 3]))
    assert failures[0] == "success 90.00% below 95%"
    assert failures[1] == "seed 1: 3 operators, expected at most 2"
    assert check_report(report_with('screws', 'cluster_intersect', [50], [12])) == [
        "success 50.00% above 10%"
    ]
    assert check_report(report_with('satellites', 'cluster_intersect', [0], [1])) == []


def test_check_report_records_the_deciding_branch():
    primary = report_with('satellites', 'ours', [90, 85], [8, 7])
    assert check_report(primary) == []
    assert primary.acceptance_branch == 'primary'

    unchecked = report_with('satellites', 'cluster_intersect', [5], [20])
    assert check_report(unchecked) == []
    assert unchecked.acceptance_branch == ''


def test_check_report_falls_back_to_the_baseline():
    baseline = report_with('satellites', 'cluster_intersect', [10, 20], [20, 22])
    report = report_with('satellites', 'ours', [60, 70], [8, 8])
    assert check_report(report, baseline) == []
    assert report.acceptance_branch == 'fallback'

    without_baseline = report_with('satellites', 'ours', [60, 70], [8, 8])
    assert check_report(without_baseline) == ["success 65.00% below 80%"]
    assert without_baseline.acceptance_branch == 'failed'


def test_fallback_needs_full_training_coverage():
    baseline = report_with('satellites', 'cluster_intersect', [10], [20])
    report = report_with('satellites', 'ours', [60], [8])
    report.seeds[0].train_coverage = 0.9
    assert check_report(report, baseline) == [
        "success 60.00% below 80%",
        "fallback: seed 0 training coverage 0.900 below 1.000",
    ]
    assert report.acceptance_branch == 'failed'


def test_fallback_needs_success_no_lower_than_the_baseline():
    baseline = report_with('satellites', 'cluster_intersect', [70], [20])
    report = report_with('satellites', 'ours', [60], [8])
    assert check_report(report, baseline) == [
        "success 60.00% below 80%",
        "fallback: success 60.00% below cluster_intersect 70.00%",
    ]


def test_check_report_rejects_a_baseline_for_another_env():
    with pytest.raises(ValueError):
        check_report(report_with('satellites', 'ours', [60], [8]),
                     report_with('screws', 'cluster_intersect', [10], [12]))


def test_outcomes_keep_plan_traces(two_route, tmp_path):
    ops = two_route.operators()
    outcomes = evaluate(two_route, [two_route.task()], ops, oracle_samplers(ops, two_route),
                        PlannerConfig(n_abstract=2))
    report = ExperimentReport(env='two_route', method='ours', num_train_demos=0,
                              num_eval_tasks=1,
                              seeds=[SeedSummary(seed=0, num_operators=len(ops),
                                                 train_coverage=1.0, outcomes=outcomes)])
    store = ArtifactStore(tmp_path)
    store.save_report(report)
    outcome = store.load_report().seeds[0].outcomes[0]
    assert outcome.abstract_plans == ['Jump0(robot)', 'Walk0(robot), Walk1(robot)']
    assert outcome.step_samples == [1, 1]
    assert len(outcome.actions) == 2
    assert all(a.startswith('Walk') for a in outcome.actions)
