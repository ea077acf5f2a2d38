// SPDX-License-Identifier: Apache-2.0
//
// Response-format contract between agent and environment.
//
// A well-formed response is:
//
//   <think> ... free text ... </think>
//   <tool_call>[{"name": "...", "arguments": {...}}, ...]</tool_call>
//
// or, to end the current turn,
//
//   <think> ... </think>
//   <answer> ... free text ... </answer>
//
// Whitespace around the tags is tolerated; any other stray text, duplicated
// or interleaved tags, or an unparsable/empty call array makes the response
// Malformed.  Tag strings are assumed not to appear inside block content
// (environment payloads never contain them), so detection works by counting
// tag occurrences over the raw text.

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "toolgym/registry.hpp"

namespace toolgym {

struct ToolCall {
    std::string name;
    json arguments;  // always an object

    bool operator==(const ToolCall& o) const {
        return name == o.name && arguments == o.arguments;
    }
};

struct ToolCallBatch {
    std::vector<ToolCall> calls;  // non-empty
};

struct Answer {
    std::string text;
};

struct AgentAction {
    std::string think;
    std::variant<ToolCallBatch, Answer> body;

    bool is_answer() const { return std::holds_alternative<Answer>(body); }
    const ToolCallBatch* batch() const { return std::get_if<ToolCallBatch>(&body); }
};

enum class MalformedReason { MissingBlock, DuplicateBlock, BadCallArray, TrailingContent };

const char* malformed_reason_name(MalformedReason r);

struct Malformed {
    MalformedReason reason;
    std::string detail;
};

using ParseResult = std::variant<AgentAction, Malformed>;

inline bool is_malformed(const ParseResult& r) { return std::holds_alternative<Malformed>(r); }

// Parse raw model output against the format contract.  Never throws on bad
// input; Malformed is an ordinary value.
ParseResult parse_response(std::string_view raw);

// Canonical surface form.  parse_response(render_response(a)) reproduces `a`
// exactly for actions whose think/answer text is whitespace-trimmed and free
// of tag strings (the parser trims block content).
std::string render_response(const AgentAction& a);

enum class CallClass { Correct, BadArgs, UnknownTool };

const char* call_class_name(CallClass c);

// Schema-only classification: unknown name -> UnknownTool; missing required
// argument, unknown argument name, or type mismatch -> BadArgs.
CallClass classify_call(const ToolCall& call, const ToolRegistry& reg);

struct SyntaxCounters {
    int n_responses = 0;  // total agent responses considered
    int c_format = 0;     // malformed responses
    int c_correct = 0;    // calls classified Correct
    int c_error = 0;      // calls classified BadArgs
    int c_unknown = 0;    // calls classified UnknownTool
    bool i_tool = false;  // at least one well-formed tool_call block seen

    bool operator==(const SyntaxCounters&) const = default;
};

// Classify every response in a trajectory's raw texts against one registry
// and accumulate the counters used by the syntax-stage reward.
SyntaxCounters tally(const std::vector<std::string>& raw_responses, const ToolRegistry& reg);

// Incremental variant: fold one response into existing counters, classifying
// its calls against the registry active at that step.
void tally_one(SyntaxCounters& acc, const std::string& raw, const ToolRegistry& reg);

}  // namespace toolgym
