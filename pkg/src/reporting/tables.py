"""Rendering experiment reports as rich tables, plain text and CSV."""

import csv
import io
from typing import List, Sequence

from rich.console import Console
from rich.table import Table

from .report import ExperimentReport

CSV_COLUMNS = [
    'env', 'method', 'seed', 'num_operators', 'train_coverage', 'task_id', 'success',
    'failure_reason', 'nodes_created', 'plans_tried', 'samples',
]


def seed_table(report: ExperimentReport) -> Table:
    table = Table(title=f"{report.env} / {report.method}", show_lines=False)
    table.add_column("Seed", style="cyan", justify="right")
    table.add_column("Success %", justify="right", style="green")
    table.add_column("Operators", justify="right")
    table.add_column("Coverage", justify="right")
    table.add_column("Nodes", justify="right", style="blue")
    table.add_column("Learn (s)", justify="right", style="dim")
    for s in report.seeds:
        table.add_row(
            str(s.seed),
            f"{s.success_rate:.2f}",
            str(s.num_operators),
            f"{s.train_coverage:.3f}",
            f"{s.mean_nodes_created:.1f}",
            f"{s.learning_time:.1f}",
        )
    if len(report.seeds) > 1:
        table.add_row(
            "all",
            str(report.success_rate),
            str(report.num_operators),
            str(report.train_coverage),
            str(report.mean_nodes_created),
            str(report.learning_time),
            style="bold",
        )
    if report.acceptance_branch:
        table.caption = f"Acceptance: {report.acceptance_branch}"
    return table


def comparison_table(reports: Sequence[ExperimentReport]) -> Table:
    """One row per (env, method), aggregated over seeds."""
    table = Table(title="Percentage success rate and operators learned")
    table.add_column("Env")
    table.add_column("Method")
    table.add_column("Success %", justify="right", style="green")
    table.add_column("Operators", justify="right")
    for r in reports:
        table.add_row(r.env, r.method, str(r.success_rate), str(r.num_operators))
    return table


def render_text(report: ExperimentReport, width: int = 100) -> str:
    """The seed table as plain aligned text."""
    buffer = io.StringIO()
    console = Console(file=buffer, width=width, color_system=None, force_terminal=False)
    console.print(seed_table(report))
    return buffer.getvalue()


def csv_rows(report: ExperimentReport) -> List[List[str]]:
    """Per-task rows without wall-clock fields, sorted by seed and task id."""
    rows = []
    for s in sorted(report.seeds, key=lambda s: s.seed):
        for o in sorted(s.outcomes, key=lambda o: o.task_id):
            rows.append([
                report.env, report.method, str(s.seed), str(s.num_operators),
                f"{s.train_coverage:.6f}", o.task_id, str(int(o.success)),
                o.failure_reason, str(o.nodes_created), str(o.plans_tried), str(o.samples),
            ])
    return rows


def render_csv(report: ExperimentReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    writer.writerows(csv_rows(report))
    return buffer.getvalue()
