"""Benchmark runner: execute tasks under a policy, persist trajectories,
score them, and emit grouped report tables.

Per-task failures are recorded as zero-scoring results; they never abort the
run. Tasks may execute in parallel — task ids prefix all output paths, so
parallel episodes touch disjoint files, and aggregation sorts by id.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..agent import EpisodeConfig, Goal, Trajectory, replay_policy, run_episode
from ..evaluation import (
    TaskScore,
    aggregate,
    classify_errors,
    overall,
    render_table,
    score_trajectory,
)
from ..tools.registry import ToolRegistry
from ..workspace import Workspace
from .schema import (
    WORKSPACE_TOKEN,
    TaskSpec,
    TrajectoryRecord,
    canonical_json,
    save_record,
)

PolicyFactory = Callable[[TaskSpec, str], object]


@dataclass
class BenchResult:
    scores: list[TaskScore]
    records: dict[str, TrajectoryRecord]
    failures: dict[str, str]

    def report_json(self, group_by=("regime", "modality")) -> dict:
        return {
            "tasks": [s.as_json() for s in self.scores],
            "groups": [g.as_json() for g in aggregate(self.scores, group_by)],
            "overall": overall(self.scores).as_json(),
            "failures": dict(self.failures),
        }

    def table(self, group_by=("regime", "modality")) -> str:
        return render_table(aggregate(self.scores, group_by))


def replay_factory(task: TaskSpec, regime: str):
    gt = task.ground_truth
    return replay_policy(gt.step_pairs(), answer_text=gt.answer_text,
                         answer_value=gt.answer_value)


def score_record(task: TaskSpec, record: TrajectoryRecord,
                 workspace_root: str | Path | None = None,
                 model_tag: str | None = None) -> TaskScore:
    """Score a persisted trajectory against a task's ground truth."""
    from ..tools.registry import ToolResult

    roots = [WORKSPACE_TOKEN]
    if workspace_root is not None:
        roots.append(str(Path(workspace_root).resolve()))
    error_counts: dict[str, int] = {}
    for step in record.steps:
        result = ToolResult.from_json(step["output"])
        if result.is_error and result.error_class:
            error_counts[result.error_class] = \
                error_counts.get(result.error_class, 0) + 1
    if record.stop_reason == "max_steps":
        error_counts["UnawareOfTermination"] = \
            error_counts.get("UnawareOfTermination", 0) + 1
    return score_trajectory(
        task_id=task.id,
        regime=record.regime,
        modality=task.modality,
        model_tag=model_tag or record.model_tag,
        pred_steps=record.step_pairs(),
        gt_steps=task.ground_truth.step_pairs(),
        answer_text=record.answer_text,
        answer_value=record.answer_value,
        expected_answer=task.ground_truth.answer_value,
        answer_rule=task.answer_rule,
        error_counts=error_counts,
        stop_reason=record.stop_reason,
        roots=roots,
    )


def run_task(task: TaskSpec, registry: ToolRegistry, workspace: Workspace,
             policy_factory: PolicyFactory, regime: str,
             config: EpisodeConfig | None = None,
             model_tag: str = "replay") -> tuple[TrajectoryRecord, TaskScore]:
    goal = Goal(query=task.query(regime), regime=regime, data_dir=task.data_dir)
    policy = policy_factory(task, regime)
    trajectory: Trajectory = run_episode(goal, policy, registry, config,
                                         model_tag=model_tag)
    record = TrajectoryRecord.from_trajectory(task.id, trajectory,
                                              workspace_root=workspace.root)
    score = score_record(task, record, workspace_root=workspace.root,
                         model_tag=model_tag)
    return record, score


def run_benchmark(tasks: list[TaskSpec], registry: ToolRegistry,
                  workspace: Workspace, regime: str = "AutoPlanning",
                  policy_factory: PolicyFactory = replay_factory,
                  parallelism: int = 1, config: EpisodeConfig | None = None,
                  model_tag: str = "replay",
                  out_dir: str | Path | None = None) -> BenchResult:
    records: dict[str, TrajectoryRecord] = {}
    scores: dict[str, TaskScore] = {}
    failures: dict[str, str] = {}

    def one(task: TaskSpec):
        try:
            record, score = run_task(task, registry, workspace, policy_factory,
                                     regime, config, model_tag)
            return task.id, record, score, None
        except Exception as exc:  # never abort the suite
            return task.id, None, None, f"{type(exc).__name__}: {exc}"

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(one, tasks))
    else:
        outcomes = [one(t) for t in tasks]

    for task_id, record, score, failure in outcomes:
        if failure is not None:
            failures[task_id] = failure
            continue
        records[task_id] = record
        scores[task_id] = score

    ordered = [scores[t.id] for t in sorted(tasks, key=lambda t: t.id)
               if t.id in scores]
    result = BenchResult(scores=ordered, records=records, failures=failures)

    if out_dir is not None:
        out = Path(out_dir)
        (out / "trajectories").mkdir(parents=True, exist_ok=True)
        for task_id, record in sorted(records.items()):
            save_record(record, out / "trajectories" / f"{task_id}.json")
        (out / "report.json").write_text(canonical_json(result.report_json()))
        (out / "report.txt").write_text(result.table() + "\n")
    return result


def load_suite(tasks_dir: str | Path, workspace_root: str | Path | None = None,
               registry: ToolRegistry | None = None) -> list[TaskSpec]:
    from .schema import load_task

    paths = sorted(Path(tasks_dir).glob("*.json"))
    if not paths:
        raise FileNotFoundError(f"no task files in {tasks_dir}")
    return [load_task(p, workspace_root, registry) for p in paths]
