"""Decision policies: scripted replay and an HTTP chat-with-tools backend.

A policy maps (goal, memory) to either a tool call or a final answer. The
scripted backend is a pure function of its plan; the LLM backend renders the
memory as a chat transcript, sends the registered tool schemas, and maps the
model's reply back to a decision.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from typing import Any, Callable, Protocol

from ..errors import GeoAgentError
from ..tools.registry import ToolRegistry
from .types import Decision, FinalAnswerDecision, Goal, Memory, ToolCallDecision

SYSTEM_PREAMBLE = (
    "You are a geoscience analysis agent. Solve the task by calling the "
    "available tools step by step; file outputs must use paths relative to "
    "the workspace. Observe each tool result before deciding the next step. "
    "When the task is solved, reply with plain text containing only the "
    "final answer."
)

TRUNCATION_MARKER = "...[truncated {omitted} bytes]"


class PolicyError(GeoAgentError):
    """Unrecoverable policy failure; the episode stops with policy_failure."""


class PolicyUnreachable(PolicyError):
    """The decision backend could not be reached after retries."""


class MalformedModelOutput(PolicyError):
    """The model reply could not be mapped to a decision."""


class Policy(Protocol):
    def next(self, goal: Goal, memory: Memory) -> Decision: ...


def render_goal(goal: Goal) -> str:
    parts = [goal.query]
    if goal.data_dir:
        parts.append(f"Data folder: {goal.data_dir}")
    return "\n".join(parts)


def _truncate(text: str, budget: int) -> str:
    raw = text.encode("utf-8")
    if len(raw) <= budget:
        return text
    keep = raw[:budget].decode("utf-8", "ignore")
    return keep + TRUNCATION_MARKER.format(omitted=len(raw) - budget)


def render_memory(goal: Goal, memory: Memory, observation_budget: int = 8192
                  ) -> list[dict]:
    """Deterministic chat transcript: system, goal, then one assistant
    tool-call + tool-result message pair per executed action."""
    messages: list[dict] = [
        {"role": "system", "content": SYSTEM_PREAMBLE},
        {"role": "user", "content": memory.goal_context or render_goal(goal)},
    ]
    for i, action in enumerate(memory.actions):
        call_id = f"call_{i}"
        messages.append({
            "role": "assistant",
            "content": None,
            "tool_calls": [{
                "id": call_id,
                "type": "function",
                "function": {
                    "name": action.tool,
                    "arguments": json.dumps(action.input, sort_keys=True),
                },
            }],
        })
        messages.append({
            "role": "tool",
            "tool_call_id": call_id,
            "content": _truncate(action.output.text, observation_budget),
        })
    return messages


class ScriptedPolicy:
    """Replays a fixed plan of decisions regardless of observations.

    When the plan runs out without a final answer the last step repeats,
    which models an agent unaware of its termination condition.
    """

    def __init__(self, plan: list[Decision]):
        if not plan:
            raise ValueError("scripted plan must contain at least one decision")
        self.plan = list(plan)
        self._cursor = 0

    def next(self, goal: Goal, memory: Memory) -> Decision:
        if self._cursor < len(self.plan):
            decision = self.plan[self._cursor]
            self._cursor += 1
            return decision
        return self.plan[-1]

    def reset(self) -> None:
        self._cursor = 0


def replay_policy(steps: list[tuple[str, dict]], answer_text: str | None = None,
                  answer_value: Any = None) -> ScriptedPolicy:
    """Plan of tool calls followed by a final answer (when given)."""
    plan: list[Decision] = [ToolCallDecision(name, dict(args)) for name, args in steps]
    if answer_text is not None or answer_value is not None:
        plan.append(FinalAnswerDecision(text=answer_text or "", value=answer_value))
    return ScriptedPolicy(plan)


Transport = Callable[[str, bytes, dict, float], dict]


def _urllib_transport(url: str, body: bytes, headers: dict, timeout: float) -> dict:
    req = urllib.request.Request(url, data=body, headers=headers)
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        return json.loads(resp.read().decode("utf-8"))


class LLMPolicy:
    """Chat-completions backend with function calling.

    Tool schemas come from the registry; in no-tool mode the schemas are
    omitted and any tool call in the reply is treated as malformed. A
    malformed reply earns one reprompt carrying the parse error, then the
    policy fails.
    """

    def __init__(self, endpoint: str, model: str, api_key: str = "",
                 registry: ToolRegistry | None = None, no_tool_mode: bool = False,
                 timeout: float = 120.0, retries: int = 2,
                 observation_budget: int = 8192,
                 transport: Transport = _urllib_transport):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.registry = registry
        self.no_tool_mode = no_tool_mode
        self.timeout = timeout
        self.retries = retries
        self.observation_budget = observation_budget
        self.transport = transport

    def tool_schemas(self) -> list[dict]:
        if self.registry is None or self.no_tool_mode:
            return []
        return [
            {
                "type": "function",
                "function": {
                    "name": spec.name,
                    "description": spec.description,
                    "parameters": spec.input_schema(),
                },
            }
            for spec in self.registry.list_specs()
        ]

    def next(self, goal: Goal, memory: Memory) -> Decision:
        messages = render_memory(goal, memory, self.observation_budget)
        try:
            return self._decide(messages)
        except MalformedModelOutput as exc:
            feedback = messages + [{
                "role": "user",
                "content": f"Your previous reply could not be used: {exc}. "
                           "Reply with a single tool call or a plain-text final answer.",
            }]
            return self._decide(feedback)

    def _decide(self, messages: list[dict]) -> Decision:
        reply = self._post(messages)
        return self._parse(reply)

    def _post(self, messages: list[dict]) -> dict:
        body: dict[str, Any] = {"model": self.model, "messages": messages}
        schemas = self.tool_schemas()
        if schemas:
            body["tools"] = schemas
            body["tool_choice"] = "auto"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = json.dumps(body).encode("utf-8")
        last: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                return self.transport(self.endpoint + "/chat/completions",
                                      payload, headers, self.timeout)
            except (urllib.error.URLError, TimeoutError, ConnectionError,
                    json.JSONDecodeError, OSError) as exc:
                last = exc
        raise PolicyUnreachable(f"chat endpoint unreachable: {last}")

    def _parse(self, reply: dict) -> Decision:
        try:
            message = reply["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedModelOutput(f"reply missing choices[0].message: {exc}")
        tool_calls = message.get("tool_calls") or []
        if tool_calls:
            if self.no_tool_mode:
                raise MalformedModelOutput("tool call received in no-tool mode")
            call = tool_calls[0]
            try:
                name = call["function"]["name"]
                args = json.loads(call["function"]["arguments"] or "{}")
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise MalformedModelOutput(f"unparseable tool call: {exc}")
            if not isinstance(args, dict):
                raise MalformedModelOutput("tool arguments must be an object")
            return ToolCallDecision(name=name, args=args)
        content = message.get("content")
        if not isinstance(content, str) or not content.strip():
            raise MalformedModelOutput("reply has neither tool call nor text")
        text = content.strip()
        value: Any = None
        try:
            value = float(text)
        except ValueError:
            pass
        return FinalAnswerDecision(text=text, value=value)
