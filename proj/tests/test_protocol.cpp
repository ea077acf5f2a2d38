// SPDX-License-Identifier: Apache-2.0
#include "toolgym/protocol.hpp"

#include <random>

#include "doctest.h"

using namespace toolgym;

namespace {

ToolRegistry small_registry() {
    ToolRegistry reg;
    reg.add({"grep",
             "filesystem",
             "search",
             {{"path", ParamType::String, true, ""}, {"pattern", ParamType::String, true, ""}}});
    reg.add({"mean", "vehicle", "average", {{"numbers", ParamType::List, true, ""}}});
    reg.add({"book_flight",
             "travel",
             "book",
             {{"travel_cost", ParamType::Number, true, ""},
              {"card_id", ParamType::String, true, ""},
              {"insured", ParamType::Boolean, false, ""}}});
    return reg;
}

AgentAction expect_action(const ParseResult& r) {
    REQUIRE(std::holds_alternative<AgentAction>(r));
    return std::get<AgentAction>(r);
}

MalformedReason expect_malformed(const ParseResult& r) {
    REQUIRE(is_malformed(r));
    return std::get<Malformed>(r).reason;
}

}  // namespace

TEST_CASE("parse well-formed tool_call batch") {
    const std::string raw =
        "<think>\nI need to locate the file first.\n</think>\n"
        "<tool_call>\n"
        "[{\"name\": \"grep\", \"arguments\": {\"path\": \"notes.txt\", \"pattern\": \"draft\"}},"
        " {\"name\": \"mean\", \"arguments\": {\"numbers\": [1, 2.5]}}]\n"
        "</tool_call>";
    const auto a = expect_action(parse_response(raw));
    CHECK(a.think == "I need to locate the file first.");
    REQUIRE(a.batch() != nullptr);
    REQUIRE(a.batch()->calls.size() == 2);
    CHECK(a.batch()->calls[0].name == "grep");
    CHECK(a.batch()->calls[0].arguments.at("pattern") == "draft");
    CHECK(a.batch()->calls[1].arguments.at("numbers") == json::parse("[1, 2.5]"));
}

TEST_CASE("parse well-formed answer") {
    const auto a = expect_action(parse_response(
        "  <think>done</think>\n<answer>The file has been removed.</answer>  \n"));
    CHECK(a.think == "done");
    REQUIRE(a.is_answer());
    CHECK(std::get<Answer>(a.body).text == "The file has been removed.");
}

TEST_CASE("malformed: missing blocks") {
    CHECK(expect_malformed(parse_response("no tags at all")) == MalformedReason::MissingBlock);
    CHECK(expect_malformed(parse_response("<think>x</think>")) == MalformedReason::MissingBlock);
    CHECK(expect_malformed(parse_response("<answer>x</answer>")) == MalformedReason::MissingBlock);
    CHECK(expect_malformed(parse_response("<think>x<answer>y</answer>")) ==
          MalformedReason::MissingBlock);  // unterminated think
    CHECK(expect_malformed(parse_response("")) == MalformedReason::MissingBlock);
}

TEST_CASE("malformed: duplicate or mixed blocks") {
    CHECK(expect_malformed(parse_response(
              "<think>a</think><think>b</think><answer>x</answer>")) ==
          MalformedReason::DuplicateBlock);
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>[]</tool_call><answer>x</answer>")) ==
          MalformedReason::DuplicateBlock);
    CHECK(expect_malformed(parse_response(
              "<think>a</think><answer>x</answer><answer>y</answer>")) ==
          MalformedReason::DuplicateBlock);
}

TEST_CASE("malformed: bad call array") {
    // empty array is not a valid batch
    CHECK(expect_malformed(parse_response("<think>a</think><tool_call>[]</tool_call>")) ==
          MalformedReason::BadCallArray);
    // not JSON
    CHECK(expect_malformed(parse_response("<think>a</think><tool_call>grep(x)</tool_call>")) ==
          MalformedReason::BadCallArray);
    // not an array
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>{\"name\": \"grep\", \"arguments\": {}}</tool_call>")) ==
          MalformedReason::BadCallArray);
    // element missing "arguments"
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>[{\"name\": \"grep\"}]</tool_call>")) ==
          MalformedReason::BadCallArray);
    // arguments not an object
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>[{\"name\": \"grep\", \"arguments\": [1]}]</tool_call>")) ==
          MalformedReason::BadCallArray);
    // stray key in element
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>[{\"name\": \"grep\", \"arguments\": {}, \"id\": 1}]"
              "</tool_call>")) == MalformedReason::BadCallArray);
    // name not a string
    CHECK(expect_malformed(parse_response(
              "<think>a</think><tool_call>[{\"name\": 3, \"arguments\": {}}]</tool_call>")) ==
          MalformedReason::BadCallArray);
}

TEST_CASE("malformed: stray content outside blocks") {
    CHECK(expect_malformed(parse_response(
              "ok <think>a</think><answer>x</answer>")) == MalformedReason::TrailingContent);
    CHECK(expect_malformed(parse_response(
              "<think>a</think> and then <answer>x</answer>")) ==
          MalformedReason::TrailingContent);
    CHECK(expect_malformed(parse_response(
              "<think>a</think><answer>x</answer> bye")) == MalformedReason::TrailingContent);
}

TEST_CASE("classify_call against schema") {
    const auto reg = small_registry();
    auto mk = [](const char* name, const char* args) {
        return ToolCall{name, json::parse(args)};
    };
    CHECK(classify_call(mk("grep", R"({"path": "a", "pattern": "b"})"), reg) ==
          CallClass::Correct);
    CHECK(classify_call(mk("nope", R"({})"), reg) == CallClass::UnknownTool);
    // missing required argument
    CHECK(classify_call(mk("grep", R"({"path": "a"})"), reg) == CallClass::BadArgs);
    // unexpected argument name
    CHECK(classify_call(mk("grep", R"({"path": "a", "pattern": "b", "z": 1})"), reg) ==
          CallClass::BadArgs);
    // type mismatches
    CHECK(classify_call(mk("mean", R"({"numbers": "1,2"})"), reg) == CallClass::BadArgs);
    CHECK(classify_call(mk("book_flight", R"({"travel_cost": "x", "card_id": "c1"})"), reg) ==
          CallClass::BadArgs);
    CHECK(classify_call(mk("book_flight", R"({"travel_cost": true, "card_id": "c1"})"), reg) ==
          CallClass::BadArgs);  // bool is not a number
    // int accepted where number expected; optional param may be omitted or given
    CHECK(classify_call(mk("book_flight", R"({"travel_cost": 1320, "card_id": "c1"})"), reg) ==
          CallClass::Correct);
    CHECK(classify_call(
              mk("book_flight", R"({"travel_cost": 1320.5, "card_id": "c1", "insured": true})"),
              reg) == CallClass::Correct);
}

TEST_CASE("tally matches the frozen four-response example") {
    // Four responses: three well-formed carrying 3 Correct + 1 BadArgs calls
    // in total, one well-formed answer.  Expected counters:
    //   n=4, c_format=0, c_correct=3, c_error=1, c_unknown=0, i_tool=true
    const auto reg = small_registry();
    std::vector<std::string> raws = {
        "<think>t</think><tool_call>[{\"name\": \"grep\", \"arguments\": "
        "{\"path\": \"a\", \"pattern\": \"b\"}}]</tool_call>",
        "<think>t</think><tool_call>["
        "{\"name\": \"mean\", \"arguments\": {\"numbers\": [1]}},"
        "{\"name\": \"grep\", \"arguments\": {\"path\": \"a\"}}]</tool_call>",
        "<think>t</think><tool_call>[{\"name\": \"book_flight\", \"arguments\": "
        "{\"travel_cost\": 10, \"card_id\": \"c\"}}]</tool_call>",
        "<think>done</think><answer>finished</answer>",
    };
    const auto c = tally(raws, reg);
    CHECK(c.n_responses == 4);
    CHECK(c.c_format == 0);
    CHECK(c.c_correct == 3);
    CHECK(c.c_error == 1);
    CHECK(c.c_unknown == 0);
    CHECK(c.i_tool);
}

TEST_CASE("tally counts malformed responses but not their calls") {
    const auto reg = small_registry();
    std::vector<std::string> raws = {
        "garbage",
        "<think>t</think><tool_call>[{\"name\": \"zzz\", \"arguments\": {}}]</tool_call>",
    };
    const auto c = tally(raws, reg);
    CHECK(c.n_responses == 2);
    CHECK(c.c_format == 1);
    CHECK(c.c_correct == 0);
    CHECK(c.c_error == 0);
    CHECK(c.c_unknown == 1);
    CHECK(c.i_tool);

    const auto none = tally({"<think>t</think><answer>x</answer>"}, reg);
    CHECK_FALSE(none.i_tool);
    CHECK(none.n_responses == 1);
}

TEST_CASE("render/parse round trip") {
    std::mt19937 rng(7);
    const char* names[] = {"grep", "mean", "book_flight", "unknown_tool"};
    for (int iter = 0; iter < 200; ++iter) {
        AgentAction a;
        a.think = "step " + std::to_string(iter) + " reasoning \"quoted\" text";
        if (iter % 3 == 0) {
            a.body = Answer{"final answer #" + std::to_string(rng() % 100)};
        } else {
            ToolCallBatch b;
            const int n = 1 + int(rng() % 3);
            for (int k = 0; k < n; ++k) {
                ToolCall c;
                c.name = names[rng() % 4];
                c.arguments = json::object();
                c.arguments["path"] = "dir/file_" + std::to_string(rng() % 10);
                if (rng() % 2) c.arguments["count"] = int(rng() % 1000);
                if (rng() % 2) c.arguments["ratio"] = double(rng() % 1000) / 8.0;
                if (rng() % 2) c.arguments["flag"] = bool(rng() % 2);
                if (rng() % 2) c.arguments["items"] = json::parse("[1, \"two\", null]");
                b.calls.push_back(std::move(c));
            }
            a.body = std::move(b);
        }
        const std::string raw = render_response(a);
        const auto back = expect_action(parse_response(raw));
        CHECK(back.think == a.think);
        REQUIRE(back.is_answer() == a.is_answer());
        if (a.is_answer()) {
            CHECK(std::get<Answer>(back.body).text == std::get<Answer>(a.body).text);
        } else {
            REQUIRE(back.batch()->calls.size() == a.batch()->calls.size());
            for (size_t i = 0; i < a.batch()->calls.size(); ++i)
                CHECK(back.batch()->calls[i] == a.batch()->calls[i]);
        }
    }
}
