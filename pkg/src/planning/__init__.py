from .refinement import PlanResult, RefinementStats, bilevel_plan, refine
from .search import (
    AbstractPlan,
    NoAbstractPlan,
    PlannerConfig,
    PlanningTimeout,
    SearchMetrics,
    gen_abstract_plans,
    goal_count,
    ground_operators,
    h_add,
    static_predicates,
)

__all__ = [
    "PlanResult", "RefinementStats", "bilevel_plan", "refine", "AbstractPlan",
    "NoAbstractPlan", "PlannerConfig", "PlanningTimeout", "SearchMetrics",
    "gen_abstract_plans", "goal_count", "ground_operators", "h_add", "static_predicates",
]
