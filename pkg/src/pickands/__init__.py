"""Estimation of Pickands dependence functions and a test for extreme-value dependence."""

__version__ = "0.1.0"

from .copulas import Copula, Pickands, from_name, param_from_tail, param_from_tau
from .empirical import PseudoSample, empirical_copula, pseudo_observations
from .estimators import (
    DependenceCurve,
    WeightSpec,
    estimate_cfg,
    estimate_curve,
    estimate_md,
    estimate_pickands,
)
from .shape import clamp_bounds, full_correction, greatest_convex_minorant
from .approximation import (
    asymptotic_variance_hk,
    best_approx,
    min_distance,
    optimal_weight,
)
from .evdtest import TestConfig, TestReport, power_approximation, run_test, test_statistic

__all__ = [
    "Copula",
    "Pickands",
    "from_name",
    "param_from_tail",
    "param_from_tau",
    "PseudoSample",
    "empirical_copula",
    "pseudo_observations",
    "DependenceCurve",
    "WeightSpec",
    "estimate_cfg",
    "estimate_curve",
    "estimate_md",
    "estimate_pickands",
    "clamp_bounds",
    "full_correction",
    "greatest_convex_minorant",
    "asymptotic_variance_hk",
    "best_approx",
    "min_distance",
    "optimal_weight",
    "TestConfig",
    "TestReport",
    "power_approximation",
    "run_test",
    "test_statistic",
]
