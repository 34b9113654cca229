#!/usr/bin/env python3
"""opcraft CLI - learn symbolic operators from demonstrations and plan with them."""

import logging
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from .config import Config
from .envs import OracleFailure
from .experiment import (
    EVAL_SEED_OFFSET,
    METHODS,
    ExperimentConfig,
    check_report,
    environment_names,
    evaluate,
    generate_demos,
    get_environment,
    learn,
    run_experiment,
)
from .learning import SafetyBoundExceeded
from .reporting import ExperimentReport, SeedSummary, comparison_table, seed_table
from .storage import ArtifactStore, SchemaVersionError
from .symbolic import render_operators

console = Console()

LIBRARY_ERRORS = (OracleFailure, SafetyBoundExceeded, SchemaVersionError, FileNotFoundError,
                  RuntimeError, ValueError)


def parse_seeds(ctx, param, value) -> List[int]:
    """Comma-separated seeds."""
    if value is None:
        return [ctx.obj['config'].seed] if ctx.obj else [0]
    try:
        return [int(s) for s in str(value).split(',') if s.strip()]
    except ValueError:
        raise click.BadParameter(f"expected integers separated by commas, got {value!r}")


def env_option(f):
    return click.option('--env', 'env_name', required=True,
                        type=click.Choice(environment_names()), help='Environment')(f)


def method_option(f):
    return click.option('--method', type=click.Choice(METHODS), default='ours',
                        show_default=True, help='Operator learning method')(f)


def seed_option(f):
    return click.option('--seed', 'seeds', envvar='OPCRAFT_SEED', callback=parse_seeds,
                        help='Seed, or comma-separated seeds')(f)


def _set_out_dir(ctx, param, value):
    if value is not None:
        ctx.obj['config'].out_dir = value
    return value


def out_option(f):
    return click.option('--out', callback=_set_out_dir, expose_value=False,
                        help='Artifact directory')(f)


def planner_options(f):
    f = click.option('--timeout', type=float, help='Planning timeout per task (seconds)')(f)
    f = click.option('--n-abstract', type=int, help='Abstract plans tried per task')(f)
    return f


def _demo_dir(config: Config, env: str, seed: int) -> Path:
    return Path(config.out_dir) / f"{env}-seed{seed}"


def _run_dir(config: Config, env: str, method: str, seed: int) -> Path:
    return Path(config.out_dir) / f"{env}-{method}-seed{seed}"


def _load_baseline(config: Config, report: ExperimentReport) -> Optional[ExperimentReport]:
    """Saved cluster-and-intersect report for the same environment, if there is one."""
    if report.method == 'cluster_intersect':
        return None
    store = ArtifactStore(Path(config.out_dir) / f"{report.env}-cluster_intersect", create=False)
    if not store.exists(ArtifactStore.REPORT):
        return None
    try:
        return store.load_report()
    except (SchemaVersionError, ValueError) as e:
        logging.getLogger(__name__).warning("Ignoring baseline report: %s", e)
        return None


def _apply_planner_overrides(config: Config, timeout, n_abstract):
    if timeout is not None:
        config.planner = replace(config.planner, timeout=timeout)
    if n_abstract is not None:
        config.planner = replace(config.planner, n_abstract=n_abstract)


def _setup_logging(level: str):
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


@click.group()
@click.option('--out', 'out_dir', envvar='OPCRAFT_OUT_DIR', help='Artifact directory')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.pass_context
def cli(ctx, out_dir: str, verbose: bool):
    """opcraft - Learn operators from demonstrations and plan with them."""
    ctx.ensure_object(dict)
    config = Config.load()
    if out_dir:
        config.out_dir = out_dir
    _setup_logging('DEBUG' if verbose else config.log_level)
    ctx.obj['config'] = config


@cli.command('gen-demos')
@env_option
@out_option
@click.option('--demos', 'num_demos', type=int, default=50, show_default=True,
              help='Number of demonstrations')
@seed_option
@click.pass_context
def gen_demos(ctx, env_name: str, num_demos: int, seeds: List[int]):
    """Generate oracle demonstrations."""
    config = ctx.obj['config']
    env = get_environment(env_name)
    for seed in seeds:
        try:
            demos = generate_demos(env, num_demos, seed)
        except LIBRARY_ERRORS as e:
            console.print(f"[red]Demo generation failed: {e}[/red]")
            ctx.exit(1)
        path = ArtifactStore(_demo_dir(config, env.name, seed)).save_demos(env, demos)
        console.print(f"[green]✓ {len(demos)} demos ({sum(len(d) for d in demos)} steps) "
                      f"saved to {path}[/green]")


@cli.command('learn')
@env_option
@out_option
@method_option
@seed_option
@click.option('--lambda', 'lam', type=float, help='Complexity weight (default 1/transitions)')
@click.option('--oracle-samplers', is_flag=True, help='Use hand-written samplers')
@click.pass_context
def learn_cmd(ctx, env_name: str, method: str, seeds: List[int], lam: float, oracle_samplers: bool):
    """Learn operators and samplers from saved demonstrations."""
    config = ctx.obj['config']
    env = get_environment(env_name)
    if lam is not None:
        config.learner.lam = lam
    for seed in seeds:
        try:
            demos = ArtifactStore(_demo_dir(config, env.name, seed)).load_demos(env)
            config.sampler.seed = seed
            model = learn(env, demos, method, config.learner, config.sampler, oracle_samplers)
        except LIBRARY_ERRORS as e:
            console.print(f"[red]Learning failed: {e}[/red]")
            ctx.exit(1)
        store = ArtifactStore(_run_dir(config, env.name, method, seed))
        store.save_operators(env, model.operators)
        store.save_samplers(env, model.samplers)
        console.print(Panel(
            f"Operators: [bold]{len(model.operators)}[/bold]\n"
            f"Training coverage: {model.train_coverage:.3f}\n"
            f"Learning time: {model.learning_time:.1f}s\n"
            f"Saved to: {store.root}",
            title=f"[green]✓ Learned {env.name} / {method} (seed {seed})[/green]",
            border_style="green",
        ))


@cli.command('eval')
@env_option
@out_option
@method_option
@seed_option
@click.option('--eval-tasks', 'num_tasks', type=int, default=50, show_default=True,
              help='Number of evaluation tasks')
@planner_options
@click.pass_context
def eval_cmd(ctx, env_name: str, method: str, seeds: List[int], num_tasks: int,
             timeout: float, n_abstract: int):
    """Plan on fresh evaluation tasks with saved operators and samplers."""
    config = ctx.obj['config']
    env = get_environment(env_name)
    _apply_planner_overrides(config, timeout, n_abstract)
    report = ExperimentReport(env=env.name, method=method, num_train_demos=0,
                              num_eval_tasks=num_tasks)
    for seed in seeds:
        store = ArtifactStore(_run_dir(config, env.name, method, seed))
        try:
            ops = store.load_operators(env)
            samplers = store.load_samplers(env)
            tasks = env.sample_tasks('eval', num_tasks, seed + EVAL_SEED_OFFSET)
            outcomes = evaluate(env, tasks, ops, samplers, config.planner, seed)
        except LIBRARY_ERRORS as e:
            console.print(f"[red]Evaluation failed: {e}[/red]")
            ctx.exit(1)
        report.seeds.append(SeedSummary(seed=seed, num_operators=len(ops), train_coverage=0.0,
                                        outcomes=outcomes))
    ArtifactStore(Path(config.out_dir) / f"{env.name}-{method}-eval").save_report(report)
    console.print(seed_table(report))


@cli.command('experiment')
@env_option
@out_option
@method_option
@click.option('--demos', 'num_demos', type=int, default=50, show_default=True)
@click.option('--eval-tasks', 'num_tasks', type=int, default=50, show_default=True)
@seed_option
@planner_options
@click.option('--lambda', 'lam', type=float, help='Complexity weight (default 1/transitions)')
@click.option('--oracle-samplers', is_flag=True, help='Use hand-written samplers')
@click.option('--check', is_flag=True, help='Exit 1 if acceptance thresholds are not met')
@click.pass_context
def experiment_cmd(ctx, env_name: str, method: str, num_demos: int, num_tasks: int,
                   seeds: List[int], timeout: float, n_abstract: int, lam: float,
                   oracle_samplers: bool, check: bool):
    """Run the full pipeline for one or more seeds."""
    config = ctx.obj['config']
    _apply_planner_overrides(config, timeout, n_abstract)
    if lam is not None:
        config.learner.lam = lam
    try:
        exp = ExperimentConfig(
            env=env_name, method=method, num_train_demos=num_demos, num_eval_tasks=num_tasks,
            seeds=seeds, planner=config.planner, learner=config.learner, sampler=config.sampler,
            use_oracle_samplers=oracle_samplers, out_dir=config.out_dir,
        )
    except ValueError as e:
        raise click.UsageError(str(e))

    console.print(f"[yellow]Running {exp.env} / {exp.method} on seeds "
                  f"{', '.join(map(str, exp.seeds))}...[/yellow]\n")
    try:
        report = run_experiment(exp)
    except LIBRARY_ERRORS as e:
        console.print(f"[red]Experiment failed: {e}[/red]")
        ctx.exit(1)
    console.print(seed_table(report))

    if check:
        baseline = _load_baseline(config, report)
        if baseline is not None:
            console.print(comparison_table([baseline, report]))
        try:
            failures = check_report(report, baseline)
        except ValueError as e:
            console.print(f"[red]Acceptance check failed: {e}[/red]")
            ctx.exit(1)
        if config.out_dir:
            ArtifactStore(Path(config.out_dir) / f"{report.env}-{report.method}").save_report(report)
        if failures:
            for failure in failures:
                console.print(f"[red]✗ {failure}[/red]")
            ctx.exit(1)
        console.print("[green]✓ Acceptance thresholds met[/green]")


@cli.command('export-ops')
@env_option
@out_option
@method_option
@seed_option
@click.pass_context
def export_ops(ctx, env_name: str, method: str, seeds: List[int]):
    """Print saved operators in PDDL-like syntax."""
    config = ctx.obj['config']
    env = get_environment(env_name)
    for seed in seeds:
        try:
            ops = ArtifactStore(_run_dir(config, env.name, method, seed)).load_operators(env)
        except LIBRARY_ERRORS as e:
            console.print(f"[red]Could not load operators: {e}[/red]")
            ctx.exit(1)
        click.echo(render_operators(ops), nl=False)


def main():
    cli(obj={})


if __name__ == '__main__':
    main()
