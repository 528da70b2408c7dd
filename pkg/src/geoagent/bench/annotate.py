"""Ground-truth annotation: execute a plan, record every (tool, input,
output) triple, take the last step's designated value as the answer.

Annotation must be clean: any failing step aborts with its index. Recorded
outputs mask the absolute workspace root so re-running the pipeline yields
byte-identical documents.
"""

from __future__ import annotations

from typing import Any

from ..errors import GeoAgentError
from ..tools.registry import ToolRegistry
from ..workspace import Workspace
from .schema import GroundTruth, GtStep, mask_workspace


class AnnotationError(GeoAgentError):
    def __init__(self, step_index: int, message: str):
        super().__init__(f"annotation failed at step {step_index}: {message}")
        self.step_index = step_index


def extract_answer(value: Any, path: list | None) -> Any:
    """Follow a key/index path into a step's structured value."""
    out = value
    for key in path or []:
        try:
            out = out[key]
        except (KeyError, IndexError, TypeError) as exc:
            raise GeoAgentError(f"answer path {path} failed at {key!r}: {exc}")
    return out


def annotate_from_plan(plan: list[tuple[str, dict]], registry: ToolRegistry,
                       workspace: Workspace, answer_path: list | None = None,
                       answer_text: str | None = None) -> GroundTruth:
    """Run the plan through the registry and freeze it as ground truth."""
    if not plan:
        raise AnnotationError(0, "empty plan")
    steps: list[GtStep] = []
    last_value: Any = None
    for i, (tool, args) in enumerate(plan):
        result = registry.call_tool(tool, args)
        if result.is_error:
            raise AnnotationError(i, f"{tool}: [{result.error_class}] {result.text}")
        steps.append(GtStep(
            tool=tool,
            input=mask_workspace(dict(args), workspace.root),
            output=mask_workspace(result.to_json(), workspace.root),
        ))
        last_value = result.value
    answer_value = extract_answer(last_value, answer_path)
    answer_value = mask_workspace(answer_value, workspace.root)
    if answer_text is None:
        answer_text = _render_answer(answer_value)
    return GroundTruth(steps=tuple(steps), answer_text=answer_text,
                       answer_value=answer_value)


def _render_answer(value: Any) -> str:
    if isinstance(value, float) and value == int(value):
        return str(value)
    if isinstance(value, (dict, list)):
        import json

        return json.dumps(value, sort_keys=True)
    return str(value)
