"""Return-count statistics of mixing symbolic shifts along array schedules."""

from mixret.errors import CapabilityError, InputError, MixretError, PreconditionError
from mixret.models import (
    Alphabet,
    MixingProfile,
    ProcessModel,
    alpha_coefficient,
    max_cylinder_prob,
    phi_coefficient,
    sample_stream,
    target_prob,
)
from mixret.cylinders import (
    FULL_SPACE,
    ReturnFloors,
    TargetSet,
    aperiodicity_gap,
    are_disjoint,
    return_floors,
    self_overlap_pi,
    shift_target,
    thue_morse,
)
from mixret.schedules import Schedule, ScheduleAudit, audit_schedule, delta, eval_schedule
from mixret.counting import (
    CountSummary,
    EmpiricalDistribution,
    HitVector,
    evaluate_hits,
    monte_carlo,
    summarize_counts,
)
from mixret.laws import DiscreteLaw, LimitParams, law_pmf, limit_params, tv_distance
from mixret.bounds import (
    BoundReport,
    MNRecord,
    choose_R,
    corollary_conditions,
    geometric_bound,
    poisson_bound,
)
from mixret.oracle import EnumerationBudget, exact_distribution, exact_tv

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "BoundReport",
    "CapabilityError",
    "CountSummary",
    "DiscreteLaw",
    "EmpiricalDistribution",
    "EnumerationBudget",
    "FULL_SPACE",
    "HitVector",
    "InputError",
    "LimitParams",
    "MNRecord",
    "MixingProfile",
    "MixretError",
    "PreconditionError",
    "ProcessModel",
    "ReturnFloors",
    "Schedule",
    "ScheduleAudit",
    "TargetSet",
    "alpha_coefficient",
    "aperiodicity_gap",
    "are_disjoint",
    "audit_schedule",
    "choose_R",
    "corollary_conditions",
    "delta",
    "eval_schedule",
    "evaluate_hits",
    "exact_distribution",
    "exact_tv",
    "geometric_bound",
    "law_pmf",
    "limit_params",
    "max_cylinder_prob",
    "monte_carlo",
    "phi_coefficient",
    "poisson_bound",
    "return_floors",
    "sample_stream",
    "self_overlap_pi",
    "shift_target",
    "summarize_counts",
    "target_prob",
    "thue_morse",
    "tv_distance",
]
