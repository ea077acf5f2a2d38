// SPDX-License-Identifier: Apache-2.0

#include "toolgym/protocol.hpp"

#include <cctype>

namespace toolgym {

const char* malformed_reason_name(MalformedReason r) {
    switch (r) {
        case MalformedReason::MissingBlock: return "missing-block";
        case MalformedReason::DuplicateBlock: return "duplicate-block";
        case MalformedReason::BadCallArray: return "bad-call-array";
        case MalformedReason::TrailingContent: return "trailing-content";
    }
    return "?";
}

const char* call_class_name(CallClass c) {
    switch (c) {
        case CallClass::Correct: return "correct";
        case CallClass::BadArgs: return "bad-args";
        case CallClass::UnknownTool: return "unknown-tool";
    }
    return "?";
}

namespace {

struct Block {
    bool present = false;
    size_t begin = 0;        // index of '<' of the open tag
    size_t end = 0;          // one past '>' of the close tag
    std::string content;     // trimmed text between the tags
    int extra_tags = 0;      // occurrences beyond the first open/close pair
    bool unterminated = false;
};

size_t count_occurrences(std::string_view hay, std::string_view needle) {
    size_t n = 0;
    for (size_t pos = hay.find(needle); pos != std::string_view::npos;
         pos = hay.find(needle, pos + 1))
        ++n;
    return n;
}

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool whitespace_only(std::string_view s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

Block scan_block(std::string_view raw, std::string_view open, std::string_view close) {
    Block b;
    const size_t n_open = count_occurrences(raw, open);
    const size_t n_close = count_occurrences(raw, close);
    if (n_open == 0 && n_close == 0) return b;
    b.present = true;
    if (n_open > 1 || n_close > 1) b.extra_tags = int(n_open + n_close) - 2;
    const size_t o = raw.find(open);
    const size_t c = raw.find(close);
    if (n_open != 1 || n_close != 1 || o == std::string_view::npos ||
        c == std::string_view::npos || c < o) {
        if (b.extra_tags == 0) b.unterminated = true;
        if (o != std::string_view::npos) b.begin = o;
        b.end = raw.size();
        return b;
    }
    b.begin = o;
    b.end = c + close.size();
    b.content = trim(raw.substr(o + open.size(), c - (o + open.size())));
    return b;
}

Malformed bad_array(std::string detail) {
    return Malformed{MalformedReason::BadCallArray, std::move(detail)};
}

}  // namespace

ParseResult parse_response(std::string_view raw) {
    const Block think = scan_block(raw, "<think>", "</think>");
    const Block tool = scan_block(raw, "<tool_call>", "</tool_call>");
    const Block ans = scan_block(raw, "<answer>", "</answer>");

    if (!think.present)
        return Malformed{MalformedReason::MissingBlock, "no <think> block"};
    if (think.extra_tags > 0)
        return Malformed{MalformedReason::DuplicateBlock, "more than one <think> block"};
    if (think.unterminated)
        return Malformed{MalformedReason::MissingBlock, "unterminated <think> block"};

    if (tool.present && ans.present)
        return Malformed{MalformedReason::DuplicateBlock,
                         "both <tool_call> and <answer> present"};
    if (!tool.present && !ans.present)
        return Malformed{MalformedReason::MissingBlock, "no <tool_call> or <answer> block"};

    const Block& body = tool.present ? tool : ans;
    const char* body_tag = tool.present ? "tool_call" : "answer";
    if (body.extra_tags > 0)
        return Malformed{MalformedReason::DuplicateBlock,
                         std::string("more than one <") + body_tag + "> block"};
    if (body.unterminated)
        return Malformed{MalformedReason::MissingBlock,
                         std::string("unterminated <") + body_tag + "> block"};

    // blocks must be disjoint with <think> first
    if (std::max(think.begin, body.begin) < std::min(think.end, body.end))
        return Malformed{MalformedReason::DuplicateBlock, "interleaved tag blocks"};
    if (body.end <= think.begin)
        return Malformed{MalformedReason::TrailingContent, "blocks out of order"};
    if (!whitespace_only(raw.substr(0, think.begin)))
        return Malformed{MalformedReason::TrailingContent, "content before <think>"};
    if (!whitespace_only(raw.substr(think.end, body.begin - think.end)))
        return Malformed{MalformedReason::TrailingContent, "content between blocks"};
    if (!whitespace_only(raw.substr(body.end)))
        return Malformed{MalformedReason::TrailingContent, "content after final block"};

    AgentAction action;
    action.think = think.content;
    if (ans.present) {
        action.body = Answer{ans.content};
        return action;
    }

    json arr = json::parse(body.content, nullptr, /*allow_exceptions=*/false);
    if (arr.is_discarded()) return bad_array("call array is not valid JSON");
    if (!arr.is_array()) return bad_array("call payload is not a JSON array");
    if (arr.empty()) return bad_array("call array is empty");
    ToolCallBatch batch;
    for (const auto& el : arr) {
        if (!el.is_object()) return bad_array("call entry is not an object");
        if (!el.contains("name") || !el.contains("arguments") || el.size() != 2)
            return bad_array("call entry must have exactly 'name' and 'arguments'");
        if (!el.at("name").is_string() || el.at("name").get<std::string>().empty())
            return bad_array("call name must be a non-empty string");
        if (!el.at("arguments").is_object())
            return bad_array("call arguments must be an object");
        batch.calls.push_back(ToolCall{el.at("name").get<std::string>(), el.at("arguments")});
    }
    action.body = std::move(batch);
    return action;
}

std::string render_response(const AgentAction& a) {
    std::string out = "<think>\n" + a.think + "\n</think>\n";
    if (const auto* ansp = std::get_if<Answer>(&a.body)) {
        out += "<answer>\n" + ansp->text + "\n</answer>";
        return out;
    }
    const auto& batch = std::get<ToolCallBatch>(a.body);
    json arr = json::array();
    for (const auto& c : batch.calls)
        arr.push_back({{"name", c.name}, {"arguments", c.arguments}});
    out += "<tool_call>\n" + arr.dump() + "\n</tool_call>";
    return out;
}

CallClass classify_call(const ToolCall& call, const ToolRegistry& reg) {
    const ToolSpec* spec = reg.find(call.name);
    if (!spec) return CallClass::UnknownTool;
    if (!call.arguments.is_object()) return CallClass::BadArgs;
    for (const auto& p : spec->params)
        if (p.required && !call.arguments.contains(p.name)) return CallClass::BadArgs;
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        const ParamSpec* p = spec->find_param(it.key());
        if (!p) return CallClass::BadArgs;
        if (!type_matches(p->type, it.value())) return CallClass::BadArgs;
    }
    return CallClass::Correct;
}

void tally_one(SyntaxCounters& acc, const std::string& raw, const ToolRegistry& reg) {
    ++acc.n_responses;
    const ParseResult r = parse_response(raw);
    if (is_malformed(r)) {
        ++acc.c_format;
        return;
    }
    const auto& a = std::get<AgentAction>(r);
    const auto* batch = a.batch();
    if (!batch) return;
    acc.i_tool = true;
    for (const auto& call : batch->calls) {
        switch (classify_call(call, reg)) {
            case CallClass::Correct: ++acc.c_correct; break;
            case CallClass::BadArgs: ++acc.c_error; break;
            case CallClass::UnknownTool: ++acc.c_unknown; break;
        }
    }
}

SyntaxCounters tally(const std::vector<std::string>& raw_responses, const ToolRegistry& reg) {
    SyntaxCounters acc;
    for (const auto& raw : raw_responses) tally_one(acc, raw, reg);
    return acc;
}

}  // namespace toolgym
