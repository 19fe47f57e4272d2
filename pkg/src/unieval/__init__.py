"""Unified model-evaluation engine for computer-vision tasks.

Matches predictions to ground truth with an award-maximizing greedy assignment,
models every evaluation variable as one empirical joint distribution, and derives
confusion/size/direction matrices, problematic-subset tables, and
neighborhood-preserving sample grids from it.
"""

from .dataset import (
    ClassHierarchy,
    ClassNode,
    Dataset,
    FeatureTable,
    GroundTruthObject,
    ImageRecord,
    IngestOptions,
    ObjectAttributes,
    PredictedObject,
    compute_attributes,
    ingest_dataset,
)
from .distribution import Condition, DistributionEngine, DistributionQuery, KeepVariable
from .errors import (
    EmptySelectionError,
    ParseError,
    QueryError,
    UndefinedConditionalError,
    UnknownReferenceError,
    ValidationError,
)
from .matching import (
    AwardBreakdown,
    MatchedPair,
    MatchingConfig,
    MatchResult,
    box_iou,
    iou,
    match_dataset,
    match_image,
)
from .records import EvaluationRecord, read_records, write_records

__all__ = [
    "AwardBreakdown",
    "ClassHierarchy",
    "ClassNode",
    "Condition",
    "Dataset",
    "DistributionEngine",
    "DistributionQuery",
    "EmptySelectionError",
    "EvaluationRecord",
    "FeatureTable",
    "GroundTruthObject",
    "ImageRecord",
    "IngestOptions",
    "KeepVariable",
    "MatchResult",
    "MatchedPair",
    "MatchingConfig",
    "ObjectAttributes",
    "ParseError",
    "PredictedObject",
    "QueryError",
    "UndefinedConditionalError",
    "UnknownReferenceError",
    "ValidationError",
    "box_iou",
    "compute_attributes",
    "ingest_dataset",
    "iou",
    "match_dataset",
    "match_image",
    "read_records",
    "write_records",
]

__version__ = "0.1.0"
