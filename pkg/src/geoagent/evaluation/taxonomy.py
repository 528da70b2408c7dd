"""Failure-class bookkeeping over executed trajectories.

Five classes: the four runtime classes read off tool results, plus
"unaware of termination" read off a max-steps stop reason. Each step
contributes at most one class.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from ..agent.types import STOP_MAX_STEPS, Action, Trajectory
from ..tools.registry import ERROR_CLASSES

UNAWARE_OF_TERMINATION = "UnawareOfTermination"

TAXONOMY = (UNAWARE_OF_TERMINATION, *ERROR_CLASSES)


def classify_errors(trajectory: Trajectory) -> dict[str, int]:
    counts = classify_steps(trajectory.actions)
    if trajectory.stop_reason == STOP_MAX_STEPS:
        counts[UNAWARE_OF_TERMINATION] += 1
    return {k: v for k, v in counts.items() if v}


def classify_steps(actions: Iterable[Action]) -> Counter:
    counts: Counter = Counter()
    for action in actions:
        if action.output.is_error and action.output.error_class:
            counts[action.output.error_class] += 1
    return counts


def merge_counts(many: Iterable[dict[str, int]]) -> dict[str, int]:
    total: Counter = Counter()
    for counts in many:
        total.update(counts)
    return {k: total[k] for k in TAXONOMY if total[k]}
