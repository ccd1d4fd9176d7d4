// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <json.hpp>

#include "codewiki/agent/agent_loop.hpp"
#include "codewiki/agent/http_backend.hpp"
#include "codewiki/agent/mock_backend.hpp"
#include "codewiki/core/error.hpp"

using namespace codewiki;
using namespace codewiki::agent;
using nlohmann::json;

namespace {

ModelConfig mock_model() {
  ModelConfig m;
  m.name = "gen";
  m.provider = "mock";
  return m;
}

AgentTool echo_tool(int* calls = nullptr) {
  return {{"echo", "Echo text.", {{"type", "object"}}},
          [calls](const json& args) -> ToolResult {
            if (calls) ++*calls;
            if (!args.contains("text") || !args["text"].is_string()) throw ValidationError("text is required");
            return {"echo: " + args["text"].get<std::string>()};
          }};
}

AgentOptions options(const std::string& module = "m", std::size_t max_turns = 10) {
  AgentOptions o;
  o.role = "leaf";
  o.module_id = module;
  o.max_turns = max_turns;
  return o;
}

class FakeTransport : public HttpTransport {
 public:
  std::vector<HttpResponse> replies;
  std::size_t calls = 0;
  bool fail_connect = false;
  std::string last_body;
  std::map<std::string, std::string> last_headers;
  HttpResponse post(const std::string&, const std::map<std::string, std::string>& headers,
                    const std::string& body) override {
    ++calls;
    last_body = body;
    last_headers = headers;
    if (fail_connect) throw TransportError("connection refused");
    if (replies.empty()) return {500, "{}"};
    auto r = replies.front();
    if (replies.size() > 1) replies.erase(replies.begin());
    return r;
  }
};

}  // namespace

TEST(MockBackend, ScriptedReplyAndTemplate) {
  MockBackend mock;
  mock.add_script("leaf", "m", {{"hello {{who}}", {}}});
  auto o = options();
  o.vars = {{"who", "world"}};
  auto r = run_agent_loop(mock, mock_model(), "sys", {}, o);
  EXPECT_EQ(r.text, "hello world");
  EXPECT_EQ(r.turns, 1u);
  EXPECT_FALSE(r.incomplete);
  ASSERT_EQ(r.transcript.size(), 2u);
  EXPECT_EQ(r.transcript.messages()[0].role, Role::System);
  EXPECT_EQ(r.transcript.messages()[1].role, Role::Assistant);
}

TEST(MockBackend, MissingScriptIsRemoteError) {
  MockBackend mock;
  EXPECT_THROW(run_agent_loop(mock, mock_model(), "sys", {}, options()), RemoteModelError);
}

TEST(MockBackend, WildcardModuleAndLoadFormats) {
  MockBackend mock;
  mock.load(json::parse(R"({"scripts": [{"role": "leaf", "module": "*", "turns": [{"content": "any"}]},
                                         {"role": "leaf", "module": "x", "turns": [{"content": "exact"}]}]})"));
  EXPECT_EQ(mock.script_count(), 2u);
  EXPECT_EQ(run_agent_loop(mock, mock_model(), "s", {}, options("x")).text, "exact");
  EXPECT_EQ(run_agent_loop(mock, mock_model(), "s", {}, options("y")).text, "any");
  EXPECT_THROW(mock.add_script("leaf", "x", {{"dup", {}}}), ValidationError);
  EXPECT_THROW(mock.load(json::parse(R"({"role": "leaf"})")), ValidationError);
}

TEST(MockBackend, FillTemplateLeavesUnknownPlaceholders) {
  EXPECT_EQ(fill_template("{{a}}-{{b}}", {{"a", "1"}}), "1-{{b}}");
}

TEST(AgentLoop, ToolCallThenFinalTextIsTwoTurnsFourMessages) {
  MockBackend mock;
  mock.add_script("leaf", "m", {{"", {{"echo", {{"text", "hi"}}}}}, {"done", {}}});
  int calls = 0;
  auto r = run_agent_loop(mock, mock_model(), "sys", {echo_tool(&calls)}, options());
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(r.turns, 2u);
  EXPECT_EQ(r.text, "done");
  const auto& msgs = r.transcript.messages();
  ASSERT_EQ(msgs.size(), 4u);
  EXPECT_EQ(msgs[1].tool_calls.size(), 1u);
  EXPECT_EQ(msgs[1].tool_calls[0].id, "call_0_0");
  EXPECT_EQ(msgs[2].role, Role::Tool);
  EXPECT_EQ(msgs[2].tool_call_id, "call_0_0");
  EXPECT_EQ(msgs[2].content, "echo: hi");
  EXPECT_FALSE(msgs[2].is_error);
  EXPECT_TRUE(r.transcript.complete());
}

TEST(AgentLoop, InvalidArgumentsAreRecoverable) {
  MockBackend mock;
  ScriptedCall bad{"echo", json::object(), std::string("{not json")};
  mock.add_script("leaf", "m", {{"", {bad}}, {"", {{"echo", {{"wrong", 1}}}}}, {"", {{"echo", {{"text", "ok"}}}}},
                                {"fine", {}}});
  int calls = 0;
  auto r = run_agent_loop(mock, mock_model(), "sys", {echo_tool(&calls)}, options());
  EXPECT_EQ(r.text, "fine");
  const auto& msgs = r.transcript.messages();
  ASSERT_EQ(msgs.size(), 8u);
  EXPECT_TRUE(msgs[2].is_error);
  EXPECT_TRUE(msgs[4].is_error);
  EXPECT_FALSE(msgs[6].is_error);
  EXPECT_EQ(calls, 2);  // the parse failure never reaches the tool
}

TEST(AgentLoop, UnknownToolIsAnErrorResult) {
  MockBackend mock;
  mock.add_script("leaf", "m", {{"", {{"nope", json::object()}}}, {"ok", {}}});
  auto r = run_agent_loop(mock, mock_model(), "sys", {echo_tool()}, options());
  EXPECT_EQ(r.text, "ok");
  EXPECT_TRUE(r.transcript.messages()[2].is_error);
  EXPECT_NE(r.transcript.messages()[2].content.find("nope"), std::string::npos);
}

TEST(AgentLoop, MaxTurnsGivesIncompleteResult) {
  MockBackend mock;
  std::vector<ScriptedTurn> turns;
  for (int i = 0; i < 5; ++i) turns.push_back({"step " + std::to_string(i), {{"echo", {{"text", "x"}}}}});
  mock.add_script("leaf", "m", turns);
  auto r = run_agent_loop(mock, mock_model(), "sys", {echo_tool()}, options("m", 3));
  EXPECT_TRUE(r.incomplete);
  EXPECT_EQ(r.turns, 3u);
  EXPECT_EQ(r.text, "step 2");
  EXPECT_TRUE(r.transcript.complete());
}

TEST(AgentLoop, StopToolEndsLoop) {
  MockBackend mock;
  mock.add_script("leaf", "m", {{"", {{"finish", json::object()}, {"echo", {{"text", "after"}}}}}, {"never", {}}});
  AgentTool finish{{"finish", "Stop.", {{"type", "object"}}}, [](const json&) { return ToolResult{"bye", false, true}; }};
  auto r = run_agent_loop(mock, mock_model(), "sys", {finish, echo_tool()}, options());
  EXPECT_TRUE(r.stopped_by_tool);
  EXPECT_EQ(r.turns, 1u);
  EXPECT_EQ(r.transcript.size(), 4u);  // both calls answered
}

TEST(AgentLoop, DuplicateToolNamesRejected) {
  MockBackend mock;
  EXPECT_THROW(AgentSession(mock, mock_model(), "s", {echo_tool(), echo_tool()}, options()), ValidationError);
  EXPECT_THROW(AgentSession(mock, mock_model(), "s", {}, options("m", 0)), ValidationError);
}

TEST(AgentLoop, SessionContinuesAfterUserMessage) {
  MockBackend mock;
  mock.add_script("leaf", "m", {{"first", {}}, {"second", {}}});
  AgentSession s(mock, mock_model(), "sys", {}, options());
  EXPECT_EQ(s.run().text, "first");
  s.add_user_message("again");
  auto r = s.run();
  EXPECT_EQ(r.text, "second");
  EXPECT_EQ(s.turns_taken(), 2u);
  EXPECT_EQ(r.transcript.size(), 4u);
}

TEST(AgentLoop, DeterministicTranscripts) {
  auto run = [] {
    MockBackend mock;
    mock.add_script("leaf", "m", {{"", {{"echo", {{"text", "a"}}}}}, {"z", {}}});
    return run_agent_loop(mock, mock_model(), "sys", {echo_tool()}, options()).transcript.to_jsonl("leaf:m");
  };
  EXPECT_EQ(run(), run());
}

TEST(Transcript, PairingRuleEnforced) {
  AgentTranscript t;
  t.append({Role::System, "s"});
  Message a{Role::Assistant, ""};
  a.tool_calls.push_back(make_tool_call("c1", "echo", "{}"));
  t.append(a);
  EXPECT_FALSE(t.complete());
  EXPECT_THROW(t.append({Role::Assistant, "too early"}), InvariantError);
  Message wrong{Role::Tool, "r"};
  wrong.tool_call_id = "c9";
  EXPECT_THROW(t.append(wrong), InvariantError);
  Message right{Role::Tool, "r"};
  right.tool_call_id = "c1";
  t.append(right);
  EXPECT_TRUE(t.complete());
  auto lines = t.to_jsonl("x");
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 4);
}

TEST(ToolCall, ParseErrors) {
  EXPECT_FALSE(make_tool_call("i", "n", "").parse_error);
  EXPECT_FALSE(make_tool_call("i", "n", R"({"a":1})").parse_error);
  EXPECT_TRUE(make_tool_call("i", "n", "[1,2]").parse_error);
  EXPECT_TRUE(make_tool_call("i", "n", "{").parse_error);
}

namespace {

// Rejects requests whose content is larger than a byte limit.
class SmallWindowBackend : public ChatBackend {
 public:
  std::size_t limit;
  std::vector<std::size_t> seen;
  std::size_t turn = 0;
  explicit SmallWindowBackend(std::size_t l) : limit(l) {}
  AssistantTurn complete(const ModelConfig&, const std::vector<Message>& messages, const std::vector<ToolSpec>&,
                         const RequestContext& ctx) override {
    std::size_t bytes = 0;
    for (const auto& m : messages) bytes += m.content.size();
    if (bytes > limit) throw ContextOverflowError("too long");
    seen.push_back(bytes);
    if (ctx.turn < 2) return {"", {make_tool_call("c" + std::to_string(ctx.turn), "big", "{}")}, {}};
    return {"end", {}, {}};
  }
};

}  // namespace

TEST(AgentLoop, OverflowTruncatesOldestToolResultsFirst) {
  SmallWindowBackend backend(7000);
  AgentTool big{{"big", "Big output.", {{"type", "object"}}},
                [](const json&) { return ToolResult{std::string(4000, 'x')}; }};
  const std::string system(100, 's');
  auto r = run_agent_loop(backend, mock_model(), system, {big}, options());
  EXPECT_EQ(r.text, "end");
  ASSERT_EQ(backend.seen.size(), 3u);
  EXPECT_LE(backend.seen[2], 7000u);
  // The transcript keeps full results and the system prompt.
  EXPECT_EQ(r.transcript.messages()[0].content, system);
  EXPECT_EQ(r.transcript.messages()[2].content.size(), 4000u);
}

TEST(AgentLoop, OverflowWithNothingToTruncateSurfaces) {
  SmallWindowBackend backend(10);
  EXPECT_THROW(run_agent_loop(backend, mock_model(), std::string(100, 's'), {}, options()), ContextOverflowError);
}

TEST(Http, RetryExhaustionAfterThreeAttempts) {
  auto transport = std::make_shared<FakeTransport>();
  transport->fail_connect = true;
  std::vector<std::chrono::milliseconds> sleeps;
  RetryPolicy policy;
  policy.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  OpenAiBackend backend(transport, policy);
  ModelConfig m;
  m.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  m.model = "x";
  try {
    backend.complete(m, {{Role::System, "s"}}, {}, {});
    FAIL() << "expected RetryExhaustedError";
  } catch (const RetryExhaustedError& e) {
    EXPECT_EQ(e.attempts(), 3u);
  }
  EXPECT_EQ(transport->calls, 3u);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500), std::chrono::milliseconds(1000)}));
}

TEST(Http, ServerErrorsRetriedThenSucceed) {
  auto transport = std::make_shared<FakeTransport>();
  transport->replies = {{503, "busy"}, {200, R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})"}};
  RetryPolicy policy;
  policy.sleep = [](std::chrono::milliseconds) {};
  OpenAiBackend backend(transport, policy);
  ModelConfig m;
  m.endpoint = "http://x/v1/chat/completions";
  m.model = "x";
  auto t = backend.complete(m, {{Role::System, "s"}}, {}, {});
  EXPECT_EQ(t.content, "hi");
  EXPECT_EQ(t.usage.prompt_tokens, 3u);
  EXPECT_EQ(transport->calls, 2u);
}

TEST(Http, StatusClassification) {
  EXPECT_THROW(raise_http_error({400, R"({"error":{"message":"maximum context length exceeded"}})"}), ContextOverflowError);
  EXPECT_THROW(raise_http_error({429, "slow down"}), TransportError);
  EXPECT_THROW(raise_http_error({502, ""}), TransportError);
  try {
    raise_http_error({404, "missing"});
  } catch (const TransportError&) {
    FAIL() << "404 must not be retried";
  } catch (const RemoteModelError&) {
  }
}

TEST(Http, OpenAiWireFormat) {
  ModelConfig m;
  m.model = "gpt";
  m.max_output_tokens = 100;
  Message a{Role::Assistant, ""};
  a.tool_calls.push_back(make_tool_call("c1", "echo", R"({"text":"x"})"));
  Message t{Role::Tool, "echo: x"};
  t.tool_call_id = "c1";
  t.tool_name = "echo";
  auto body = OpenAiBackend::request_body(m, {{Role::System, "s"}, a, t}, {{"echo", "Echo.", {{"type", "object"}}}});
  EXPECT_EQ(body["model"], "gpt");
  EXPECT_EQ(body["temperature"], 0.0);
  ASSERT_EQ(body["messages"].size(), 3u);
  EXPECT_EQ(body["messages"][1]["tool_calls"][0]["function"]["arguments"], R"({"text":"x"})");
  EXPECT_EQ(body["messages"][2]["role"], "tool");
  EXPECT_EQ(body["messages"][2]["tool_call_id"], "c1");
  EXPECT_EQ(body["tools"][0]["function"]["name"], "echo");

  auto turn = OpenAiBackend::parse_response(json::parse(R"({"choices":[{"message":{"content":null,
      "tool_calls":[{"id":"z","type":"function","function":{"name":"echo","arguments":"{\"text\":\"y\"}"}}]}}]})"));
  ASSERT_EQ(turn.tool_calls.size(), 1u);
  EXPECT_EQ(turn.tool_calls[0].arguments["text"], "y");
  EXPECT_THROW(OpenAiBackend::parse_response(json::parse(R"({"nothing":1})")), RemoteModelError);
}

TEST(Http, AnthropicWireFormat) {
  ModelConfig m;
  m.provider = "anthropic";
  m.model = "claude";
  Message a{Role::Assistant, "thinking"};
  a.tool_calls.push_back(make_tool_call("c1", "echo", R"({"text":"x"})"));
  Message t1{Role::Tool, "one"};
  t1.tool_call_id = "c1";
  auto body = AnthropicBackend::request_body(m, {{Role::System, "sys"}, a, t1, {Role::User, "more"}}, {});
  EXPECT_EQ(body["system"], "sys");
  ASSERT_EQ(body["messages"].size(), 3u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"][1]["type"], "tool_use");
  // tool_result and the following user text merge into one user message
  EXPECT_EQ(body["messages"][2]["content"].size(), 2u);
  EXPECT_EQ(body["messages"][2]["content"][0]["type"], "tool_result");

  auto turn = AnthropicBackend::parse_response(json::parse(R"({"content":[{"type":"text","text":"a"},
      {"type":"tool_use","id":"t","name":"echo","input":{"text":"b"}}],"usage":{"input_tokens":5,"output_tokens":2}})"));
  EXPECT_EQ(turn.content, "a");
  ASSERT_EQ(turn.tool_calls.size(), 1u);
  EXPECT_EQ(turn.tool_calls[0].arguments["text"], "b");
  EXPECT_EQ(turn.usage.completion_tokens, 2u);
}

TEST(ModelConfig, Validation) {
  ModelConfig m = mock_model();
  EXPECT_NO_THROW(m.validate());
  m.provider = "carrier-pigeon";
  EXPECT_THROW(m.validate(), ValidationError);
  m.provider = "openai";
  m.endpoint = "";
  EXPECT_THROW(m.validate(), ValidationError);
}
