"""The episode loop: decide, call, observe, append, repeat.

Tool errors are observations, never terminators; the three stop reasons are
a final answer, the step ceiling, and an unrecoverable policy failure.
"""

from __future__ import annotations

import time

from ..tools.registry import ToolRegistry
from .policies import Policy, PolicyError, render_goal
from .types import (
    STOP_FINAL_ANSWER,
    STOP_MAX_STEPS,
    STOP_POLICY_FAILURE,
    Action,
    EpisodeConfig,
    FinalAnswerDecision,
    Goal,
    Memory,
    ToolCallDecision,
    Trajectory,
)


def run_episode(goal: Goal, policy: Policy, registry: ToolRegistry,
                config: EpisodeConfig | None = None,
                model_tag: str = "scripted") -> Trajectory:
    config = config or EpisodeConfig()
    memory = Memory(goal_context=render_goal(goal))
    trajectory = Trajectory(goal=goal, model_tag=model_tag)

    for _ in range(config.max_steps):
        try:
            decision = policy.next(goal, memory)
        except PolicyError as exc:
            trajectory.stop_reason = STOP_POLICY_FAILURE
            trajectory.answer_text = f"policy failure: {exc}"
            break
        if isinstance(decision, FinalAnswerDecision):
            trajectory.stop_reason = STOP_FINAL_ANSWER
            trajectory.answer_text = decision.text
            trajectory.answer_value = decision.value
            break
        assert isinstance(decision, ToolCallDecision)
        result = registry.call_tool(decision.name, decision.args)
        action = Action(tool=decision.name, input=decision.args, output=result)
        memory.append(action)
        trajectory.actions.append(action)
    else:
        trajectory.stop_reason = STOP_MAX_STEPS

    trajectory.finished_at = time.time()
    return trajectory
