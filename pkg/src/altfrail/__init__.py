"""altfrail: link accelerated-life-test data to heterogeneous field failures.

A gamma frailty on the lab Weibull hazard turns the field marginal into a
Burr-XII-type family.  The package provides the lifetime distributions,
censored maximum-likelihood fitting, a simulated-reference test for equal
lab/field shapes, hazard-shape diagnosis, and optimal two-stress test
planning that accounts for field heterogeneity.
"""

from .distributions import (
    BurrXII,
    FrailtyField,
    GammaFrailty,
    ParameterError,
    Weibull,
    sample_field_time,
)
from .hazard import HazardShape, ShapeLabel, classify_shape, hazard_profile
from .inference import (
    CensoredSample,
    FitResult,
    InsufficientDataError,
    JointFitResult,
    KaplanMeier,
    LRTestResult,
    Scheme,
    aic,
    fit_burr12,
    fit_field_extended,
    fit_frailty_joint,
    fit_weibull,
    kaplan_meier,
    lr_test,
)
from .dataio import appliance_b_lab, parse_csv, read_dataset, save_dataset, write_csv
from .pivotal import (
    CensoringScheme,
    PivotalTestResult,
    SimulationStudyResult,
    pivotal_test,
    simulate_ratio_distribution,
    simulate_ratio_refit,
    simulation_study,
)
from .planning import (
    ContourGrid,
    FailureProb,
    HomogeneousLogQuantile,
    LogQuantile,
    NoFeasiblePlanError,
    PlanConstraint,
    PlanningValues,
    PlanResult,
    Quantile,
    TestPlan,
    asymptotic_sd,
    contour_grid,
    field_failure_prob,
    field_quantile,
    optimize_plan,
    plan_fisher_info,
    sev_unit_info,
    standardize_stress,
)
from .rng import DEFAULT_SEED, rng_for

__version__ = "0.1.0"

__all__ = [
    "BurrXII",
    "FrailtyField",
    "GammaFrailty",
    "ParameterError",
    "Weibull",
    "sample_field_time",
    "HazardShape",
    "ShapeLabel",
    "classify_shape",
    "hazard_profile",
    "CensoredSample",
    "FitResult",
    "InsufficientDataError",
    "JointFitResult",
    "KaplanMeier",
    "LRTestResult",
    "Scheme",
    "aic",
    "fit_burr12",
    "fit_field_extended",
    "fit_frailty_joint",
    "fit_weibull",
    "kaplan_meier",
    "lr_test",
    "appliance_b_lab",
    "parse_csv",
    "read_dataset",
    "save_dataset",
    "write_csv",
    "CensoringScheme",
    "PivotalTestResult",
    "SimulationStudyResult",
    "pivotal_test",
    "simulate_ratio_distribution",
    "simulate_ratio_refit",
    "simulation_study",
    "ContourGrid",
    "FailureProb",
    "HomogeneousLogQuantile",
    "LogQuantile",
    "NoFeasiblePlanError",
    "PlanConstraint",
    "PlanningValues",
    "PlanResult",
    "Quantile",
    "TestPlan",
    "asymptotic_sd",
    "contour_grid",
    "field_failure_prob",
    "field_quantile",
    "optimize_plan",
    "plan_fisher_info",
    "sev_unit_info",
    "standardize_stress",
    "DEFAULT_SEED",
    "rng_for",
    "__version__",
]
