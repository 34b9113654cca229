"""Experiment results: per-task outcomes, per-seed summaries and aggregates."""

import math
from typing import List, Optional

from pydantic import BaseModel, Field


class Aggregate(BaseModel):
    """Mean with standard error over seeds."""
    mean: float
    stderr: float

    @classmethod
    def of(cls, values: List[float]) -> 'Aggregate':
        if not values:
            return cls(mean=0.0, stderr=0.0)
        n = len(values)
        mean = sum(values) / n
        if n == 1:
            return cls(mean=mean, stderr=0.0)
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        return cls(mean=mean, stderr=math.sqrt(var / n))

    def __str__(self):
        return f"{self.mean:.2f} ({self.stderr:.2f})"


class TaskOutcome(BaseModel):
    """Planning result for one task, with its trace."""
    task_id: str
    success: bool
    failure_reason: str = ''
    nodes_created: int = 0
    plans_tried: int = 0
    samples: int = 0
    wall_time: float = 0.0
    abstract_plans: List[str] = Field(default_factory=list)
    step_samples: List[int] = Field(default_factory=list)
    actions: Optional[List[str]] = None


class SeedSummary(BaseModel):
    seed: int
    num_operators: int
    train_coverage: float
    learning_time: float = 0.0
    outcomes: List[TaskOutcome] = Field(default_factory=list)

    @property
    def success_rate(self) -> float:
        if not self.outcomes:
            return 0.0
        return 100.0 * sum(o.success for o in self.outcomes) / len(self.outcomes)

    @property
    def mean_nodes_created(self) -> float:
        if not self.outcomes:
            return 0.0
        return sum(o.nodes_created for o in self.outcomes) / len(self.outcomes)


class ExperimentReport(BaseModel):
    env: str
    method: str
    num_train_demos: int
    num_eval_tasks: int
    seeds: List[SeedSummary] = Field(default_factory=list)
    # set by the acceptance check: primary, fallback or failed
    acceptance_branch: str = ''

    @property
    def success_rate(self) -> Aggregate:
        return Aggregate.of([s.success_rate for s in self.seeds])

    @property
    def num_operators(self) -> Aggregate:
        return Aggregate.of([float(s.num_operators) for s in self.seeds])

    @property
    def mean_nodes_created(self) -> Aggregate:
        return Aggregate.of([s.mean_nodes_created for s in self.seeds])

    @property
    def learning_time(self) -> Aggregate:
        return Aggregate.of([s.learning_time for s in self.seeds])

    @property
    def train_coverage(self) -> Aggregate:
        return Aggregate.of([s.train_coverage for s in self.seeds])
