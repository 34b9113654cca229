from .cluster_intersect import cluster_and_intersect
from .consistency import (
    AbstractDemonstration,
    CoverageReport,
    KeepBonus,
    Transition,
    abstract_demonstration,
    backchain,
    compute_coverage,
    find_best_consistent_op,
    is_consistent,
    necessary_atoms_step,
    score,
)
from .operator_learner import (
    Datapoint,
    LearnerConfig,
    LearningResult,
    OperatorDataset,
    SafetyBoundExceeded,
    ensure_nec_atoms_sat,
    hill_climb,
    improve_coverage,
    induce_op_to_cover,
    induce_prec_and_del_effs,
    objective_J,
    partition_data,
    reduce_complexity,
)

__all__ = [
    "cluster_and_intersect", "AbstractDemonstration", "CoverageReport", "KeepBonus",
    "Transition", "abstract_demonstration", "backchain", "compute_coverage",
    "find_best_consistent_op", "is_consistent", "necessary_atoms_step", "score",
    "Datapoint", "LearnerConfig", "LearningResult", "OperatorDataset",
    "SafetyBoundExceeded", "ensure_nec_atoms_sat", "hill_climb", "improve_coverage",
    "induce_op_to_cover", "induce_prec_and_del_effs", "objective_J", "partition_data",
    "reduce_complexity",
]
