"""Benchmark formats, annotation, fixture suite, and runner."""

from .annotate import AnnotationError, annotate_from_plan, extract_answer
from .fixtures import generate_fixture_suite
from .runner import (
    BenchResult,
    load_suite,
    replay_factory,
    run_benchmark,
    run_task,
    score_record,
)
from .schema import (
    GroundTruth,
    GtStep,
    SchemaError,
    TaskSpec,
    TrajectoryRecord,
    canonical_json,
    load_record,
    load_task,
    mask_workspace,
    save_record,
    save_task,
)

__all__ = [
    "AnnotationError",
    "BenchResult",
    "GroundTruth",
    "GtStep",
    "SchemaError",
    "TaskSpec",
    "TrajectoryRecord",
    "annotate_from_plan",
    "canonical_json",
    "extract_answer",
    "generate_fixture_suite",
    "load_record",
    "load_suite",
    "load_task",
    "mask_workspace",
    "replay_factory",
    "run_benchmark",
    "run_task",
    "save_record",
    "save_task",
    "score_record",
]
