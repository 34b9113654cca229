from .report import Aggregate, ExperimentReport, SeedSummary, TaskOutcome
from .tables import comparison_table, csv_rows, render_csv, render_text, seed_table

__all__ = [
    "Aggregate", "ExperimentReport", "SeedSummary", "TaskOutcome",
    "comparison_table", "csv_rows", "render_csv", "render_text", "seed_table",
]
