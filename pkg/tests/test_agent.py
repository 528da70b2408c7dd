from __future__ import annotations

import json

import pytest

from geoagent.agent import (
    EpisodeConfig,
    FinalAnswerDecision,
    Goal,
    LLMPolicy,
    Memory,
    PolicyUnreachable,
    ScriptedPolicy,
    ToolCallDecision,
    render_goal,
    render_memory,
    replay_policy,
    run_episode,
)
from geoagent.agent.policies import TRUNCATION_MARKER
from geoagent.agent.types import Action
from geoagent.kits.perception import MockExpertBackend
from geoagent.tools import ToolContext, build_registry, ok_result
from geoagent.workspace import Workspace

from conftest import write_raster


@pytest.fixture
def registry(tmp_path):
    ws = Workspace(tmp_path)
    (tmp_path / "manifest.json").write_text("[]")
    write_raster(tmp_path / "b31.tif", [[300.0]])
    write_raster(tmp_path / "b32.tif", [[298.0]])
    return build_registry(ToolContext(
        workspace=ws, perception=MockExpertBackend(tmp_path / "manifest.json", ws)))


GOAL = Goal(query="mean LST please", regime="AutoPlanning", data_dir="data")


class TestScriptedEpisodes:
    def test_replay_fidelity(self, registry):
        policy = replay_policy(
            [("lst_multi_channel", {"band31_path": "b31.tif",
                                    "band32_path": "b32.tif",
                                    "output_path": "q/lst.tif"}),
             ("get_filelist", {"directory": "q"}),
             ("kelvin_to_celsius", {"kelvin": 307.97})],
            answer_text="34.82", answer_value=34.82)
        traj = run_episode(GOAL, policy, registry)
        assert traj.stop_reason == "final_answer"
        assert traj.tool_names == ["lst_multi_channel", "get_filelist",
                                   "kelvin_to_celsius"]
        assert traj.answer_value == 34.82
        assert all(not a.output.is_error for a in traj.actions)

    def test_never_answers_hits_max_steps(self, registry):
        policy = ScriptedPolicy([ToolCallDecision("kelvin_to_celsius",
                                                  {"kelvin": 300.0})])
        traj = run_episode(GOAL, policy, registry, EpisodeConfig(max_steps=5))
        assert traj.stop_reason == "max_steps"
        assert len(traj.actions) == 5

    def test_unknown_tool_then_recovery(self, registry):
        policy = replay_policy(
            [("hallucinated_tool", {"x": 1}),
             ("kelvin_to_celsius", {"kelvin": 273.15})],
            answer_value=0.0)
        traj = run_episode(GOAL, policy, registry)
        assert traj.stop_reason == "final_answer"
        assert traj.actions[0].output.is_error
        assert traj.actions[0].output.error_class == "ToolHallucination"
        assert not traj.actions[1].output.is_error

    def test_errors_never_terminate(self, registry):
        policy = replay_policy(
            [("division", {"a": 1, "b": 0})] * 3, answer_text="done")
        traj = run_episode(GOAL, policy, registry)
        assert traj.stop_reason == "final_answer"
        assert len(traj.actions) == 3

    def test_memory_append_only_prefix(self, registry):
        seen: list[tuple[str, ...]] = []

        class SpyPolicy:
            def __init__(self):
                self.inner = replay_policy(
                    [("kelvin_to_celsius", {"kelvin": 280.0})] * 3,
                    answer_text="done")

            def next(self, goal, memory):
                seen.append(tuple(a.tool for a in memory.actions))
                return self.inner.next(goal, memory)

        run_episode(GOAL, SpyPolicy(), registry)
        for earlier, later in zip(seen, seen[1:]):
            assert later[: len(earlier)] == earlier

    def test_replay_determinism(self, registry):
        steps = [("kelvin_to_celsius", {"kelvin": 280.0}),
                 ("celsius_to_kelvin", {"celsius": 6.85})]
        t1 = run_episode(GOAL, replay_policy(steps, answer_text="x"), registry)
        t2 = run_episode(GOAL, replay_policy(steps, answer_text="x"), registry)
        assert t1.tool_names == t2.tool_names
        assert [a.input for a in t1.actions] == [a.input for a in t2.actions]
        assert [a.output.to_json() for a in t1.actions] == \
            [a.output.to_json() for a in t2.actions]
        assert t1.answer_text == t2.answer_text


class TestRenderMemory:
    def test_empty_memory(self):
        msgs = render_memory(GOAL, Memory(render_goal(GOAL)))
        assert [m["role"] for m in msgs] == ["system", "user"]
        assert "mean LST please" in msgs[1]["content"]

    def test_two_steps_message_count(self):
        memory = Memory(render_goal(GOAL))
        for i in range(2):
            memory.append(Action(tool="t", input={"i": i},
                                 output=ok_result(value=i)))
        msgs = render_memory(GOAL, memory)
        assert len(msgs) == 2 + 2 * 2
        assert [m["role"] for m in msgs] == ["system", "user", "assistant",
                                             "tool", "assistant", "tool"]

    def test_truncation_marker(self):
        memory = Memory(render_goal(GOAL))
        huge = "x" * (1 << 20)
        memory.append(Action(tool="t", input={}, output=ok_result(text=huge)))
        msgs = render_memory(GOAL, memory, observation_budget=1024)
        tool_msg = msgs[-1]["content"]
        assert TRUNCATION_MARKER.split("{")[0].rstrip(".") in tool_msg or \
            "truncated" in tool_msg
        assert len(tool_msg.encode()) < 1200


class FakeTransport:
    """Capture requests; return queued replies."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.requests: list[dict] = []

    def __call__(self, url, body, headers, timeout):
        self.requests.append({"url": url, "body": json.loads(body.decode()),
                              "headers": headers})
        if not self.replies:
            raise ConnectionError("no reply queued")
        reply = self.replies.pop(0)
        if isinstance(reply, Exception):
            raise reply
        return reply


def tool_call_reply(name, args):
    return {"choices": [{"message": {
        "content": None,
        "tool_calls": [{"id": "1", "type": "function",
                        "function": {"name": name,
                                     "arguments": json.dumps(args)}}]}}]}


def text_reply(text):
    return {"choices": [{"message": {"content": text}}]}


class TestLLMPolicy:
    def test_request_contains_every_tool_once(self, registry):
        transport = FakeTransport([text_reply("42")])
        policy = LLMPolicy("http://llm.test/v1", "test-model", registry=registry,
                           transport=transport)
        decision = policy.next(GOAL, Memory(render_goal(GOAL)))
        assert isinstance(decision, FinalAnswerDecision)
        body = transport.requests[0]["body"]
        names = [t["function"]["name"] for t in body["tools"]]
        assert len(names) == len(set(names)) == len(registry)
        assert body["model"] == "test-model"

    def test_tool_call_mapped(self, registry):
        transport = FakeTransport([
            tool_call_reply("kelvin_to_celsius", {"kelvin": 300})])
        policy = LLMPolicy("http://llm.test/v1", "m", registry=registry,
                           transport=transport)
        decision = policy.next(GOAL, Memory(render_goal(GOAL)))
        assert isinstance(decision, ToolCallDecision)
        assert decision.name == "kelvin_to_celsius"
        assert decision.args == {"kelvin": 300}

    def test_no_tool_mode_omits_schemas_and_rejects_calls(self, registry):
        transport = FakeTransport([
            tool_call_reply("mean", {"data": [1]}),   # rejected in no-tool mode
            text_reply("37"),                          # reprompt answer
        ])
        policy = LLMPolicy("http://llm.test/v1", "m", registry=registry,
                           no_tool_mode=True, transport=transport)
        decision = policy.next(GOAL, Memory(render_goal(GOAL)))
        assert isinstance(decision, FinalAnswerDecision)
        assert decision.value == 37.0
        first = transport.requests[0]["body"]
        assert "tools" not in first
        # the reprompt carried the parse failure back to the model
        assert "could not be used" in transport.requests[1]["body"]["messages"][-1]["content"]

    def test_malformed_twice_fails_policy(self, registry):
        transport = FakeTransport([text_reply(""), text_reply("")])
        policy = LLMPolicy("http://llm.test/v1", "m", registry=registry,
                           transport=transport)
        traj = run_episode(GOAL, policy, registry)
        assert traj.stop_reason == "policy_failure"

    def test_unreachable_endpoint_fails_policy(self, registry):
        transport = FakeTransport([ConnectionError("down"), ConnectionError("down"),
                                   ConnectionError("down")])
        policy = LLMPolicy("http://llm.test/v1", "m", registry=registry,
                           retries=2, transport=transport)
        with pytest.raises(PolicyUnreachable):
            policy.next(GOAL, Memory(render_goal(GOAL)))

    def test_episode_with_llm_loop(self, registry):
        transport = FakeTransport([
            tool_call_reply("kelvin_to_celsius", {"kelvin": 307.97}),
            text_reply("34.82"),
        ])
        policy = LLMPolicy("http://llm.test/v1", "m", registry=registry,
                           transport=transport)
        traj = run_episode(GOAL, policy, registry, model_tag="fake-llm")
        assert traj.stop_reason == "final_answer"
        assert traj.tool_names == ["kelvin_to_celsius"]
        assert traj.answer_value == 34.82
        # second request replayed the observation back to the model
        msgs = transport.requests[1]["body"]["messages"]
        assert msgs[-1]["role"] == "tool"
        assert "34.82" in msgs[-1]["content"]
