"""Causal feature selection for regional time series with latent confounders."""

from .citest import CITestResult, SampleMatrix, ci_test, fisher_z_pvalue, partial_correlation
from .geo import Airport, RegionGeo, attribute_airport_pair, categorize_cause, haversine_km
from .granger import LagDesign, LassoFit, build_lag_design, granger_causes, lasso_fit
from .ingest import IngestionError, PolicySchedule, fixture_path, ingest_cases
from .panel import TimeSeriesPanel
from .pipeline import (
    DistrictConfig,
    FederalConfig,
    filter_candidates,
    run_district_analysis,
    run_federal_analysis,
)
from .scm import (
    Edge,
    GroundTruth,
    Label,
    SCMSpec,
    UnstableModelError,
    label_ground_truth,
    simulate,
)
from .scenarios import scenario_suite
from .validate import evaluate_scenario, run_validation
from .sypi import (
    CausalVerdict,
    ConditioningSet,
    Decision,
    DEFAULT_THRESHOLDS,
    LOOSE_THRESHOLDS,
    LagEstimate,
    THRESHOLD_GRID,
    ThresholdPair,
    build_conditioning_set,
    estimate_lag,
    sypi_analyze_target,
    sypi_decide,
)

__version__ = "0.1.0"

__all__ = [
    "Airport",
    "CITestResult",
    "CausalVerdict",
    "ConditioningSet",
    "DEFAULT_THRESHOLDS",
    "Decision",
    "DistrictConfig",
    "Edge",
    "FederalConfig",
    "GroundTruth",
    "IngestionError",
    "Label",
    "LOOSE_THRESHOLDS",
    "LagDesign",
    "LagEstimate",
    "LassoFit",
    "PolicySchedule",
    "RegionGeo",
    "SCMSpec",
    "SampleMatrix",
    "THRESHOLD_GRID",
    "ThresholdPair",
    "TimeSeriesPanel",
    "UnstableModelError",
    "attribute_airport_pair",
    "build_conditioning_set",
    "build_lag_design",
    "categorize_cause",
    "ci_test",
    "estimate_lag",
    "evaluate_scenario",
    "filter_candidates",
    "fisher_z_pvalue",
    "fixture_path",
    "granger_causes",
    "haversine_km",
    "ingest_cases",
    "label_ground_truth",
    "lasso_fit",
    "partial_correlation",
    "run_district_analysis",
    "run_federal_analysis",
    "run_validation",
    "scenario_suite",
    "simulate",
    "sypi_analyze_target",
    "sypi_decide",
]
