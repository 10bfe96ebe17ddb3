"""threshtune: decision-threshold calibration for prediction-service benchmarks.

Evaluate benchmark predictions against ground truth, search per-label decision
thresholds under user-defined costs with NSGA-II, export a threshold profile
for client integration, and monitor deployed thresholds for regression.
"""

from .costs import CostSchedule, LabelCost, parse_schedule, total_cost
from .dataset import (
    BenchmarkRecord,
    Dataset,
    DatasetError,
    DatasetSummary,
    TaskKind,
    parse_dataset,
    summarize,
    to_canonical_csv,
)
from .evaluation import EvaluationOutcome, evaluate_dataset
from .metrics import ConfusionSummary, MetricReport, confusion, metrics_from_confusion
from .monitor import RegressionReport, monitor_compare
from .optimizer import (
    OptimizationCancelled,
    OptimizationResult,
    OptimizerSettings,
    ParetoSolution,
    crowding_distance,
    fast_nondominated_sort,
    hypervolume,
    optimize,
    polynomial_mutation,
    recommend,
    sbx_crossover,
)
from .profiles import (
    BaselineSnapshot,
    ProfileDocument,
    ProfileError,
    ProfileProvenance,
    export_profile,
    make_baseline,
    parse_profile,
    serialize_profile,
)
from .thresholding import DecisionSet, ThresholdProfile, decide, global_profile, profile_for
from .version import ENGINE_VERSION

__version__ = ENGINE_VERSION

__all__ = [
    "BenchmarkRecord",
    "BaselineSnapshot",
    "ConfusionSummary",
    "CostSchedule",
    "Dataset",
    "DatasetError",
    "DatasetSummary",
    "DecisionSet",
    "EvaluationOutcome",
    "ENGINE_VERSION",
    "LabelCost",
    "MetricReport",
    "OptimizationCancelled",
    "OptimizationResult",
    "OptimizerSettings",
    "ParetoSolution",
    "ProfileDocument",
    "ProfileError",
    "ProfileProvenance",
    "RegressionReport",
    "TaskKind",
    "ThresholdProfile",
    "confusion",
    "crowding_distance",
    "decide",
    "evaluate_dataset",
    "export_profile",
    "fast_nondominated_sort",
    "global_profile",
    "hypervolume",
    "make_baseline",
    "metrics_from_confusion",
    "monitor_compare",
    "optimize",
    "parse_dataset",
    "parse_profile",
    "parse_schedule",
    "polynomial_mutation",
    "profile_for",
    "recommend",
    "sbx_crossover",
    "serialize_profile",
    "summarize",
    "to_canonical_csv",
    "total_cost",
]
