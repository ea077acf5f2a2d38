// SPDX-License-Identifier: Apache-2.0
#include "toolgym/scenarios.hpp"

#include "doctest.h"

using namespace toolgym;

namespace {

const std::vector<Scenario>& corpus() {
    static const std::vector<Scenario> c = load_corpus(TOOLGYM_SOURCE_DIR "/data/corpus");
    return c;
}

json minimal_scenario(const char* id, const char* split) {
    return json::parse(std::string(R"({
      "id": ")") + id + R"(", "split": ")" + split + R"(",
      "domains": ["filesystem"],
      "initial_state": {"filesystem": {"root": {"f": "x"}, "cwd": "/"}},
      "turns": [{"user_text": "do nothing", "ground_truth_calls": []}]
    })");
}

}  // namespace

TEST_CASE("corpus loads with unique ids and all four splits populated") {
    const auto& c = corpus();
    CHECK(c.size() >= 20);
    std::map<Split, int> per_split;
    for (const auto& sc : c) ++per_split[sc.split];
    for (Split s : kAllSplits) {
        INFO("split ", split_name(s));
        CHECK(per_split[s] >= 1);
    }
    CHECK(find_scenario(c, "fs-cleanup") != nullptr);
    CHECK(find_scenario(c, "no-such-id") == nullptr);
}

TEST_CASE("turn registries inherit and honor injected tools") {
    const Scenario* sc = find_scenario(corpus(), "travel-nearest-airport");
    REQUIRE(sc != nullptr);
    CHECK_FALSE(sc->registry_for_turn(0).has("get_nearest_airport_by_city"));
    CHECK_FALSE(sc->registry_for_turn(1).has("get_nearest_airport_by_city"));  // inherited
    CHECK(sc->registry_for_turn(2).has("get_nearest_airport_by_city"));
    CHECK(sc->registry_for_turn(3).has("get_nearest_airport_by_city"));  // inherited again
    CHECK(sc->turns[2].injected_tools ==
          std::vector<std::string>{"get_nearest_airport_by_city"});
}

TEST_CASE("schema violations are rejected") {
    auto reject = [](json j, const char* why) {
        INFO(why);
        CHECK_THROWS_AS(scenario_from_json(j, "test"), CorpusError);
    };
    json base = minimal_scenario("x", "base");
    reject([&] { json j = base; j.erase("id"); return j; }(), "missing id");
    reject([&] { json j = base; j["split"] = "weird"; return j; }(), "bad split");
    reject([&] { json j = base; j["turns"] = json::array(); return j; }(), "no turns");
    reject([&] { json j = base; j["turns"][0].erase("user_text"); return j; }(),
           "missing user_text");
    reject([&] {
        json j = base;
        j["turns"][0]["available_tools"] = json::array({"no_such_tool"});
        return j;
    }(), "unknown tool");
    reject([&] {
        json j = base;
        j["turns"][0]["available_tools"] = json::array({"ls"});
        j["turns"][0]["ground_truth_calls"] =
            json::array({{{"name", "rm"}, {"arguments", {{"file_name", "f"}}}}});
        return j;
    }(), "ground-truth call not available");
    reject([&] {
        json j = base;
        j["turns"][0]["expected_returns"] = {{"0", {{"ok", true}}}};
        return j;
    }(), "expected_returns index out of range");
    reject([&] {
        json j = base;
        j["initial_state"]["vehicle"] = {{"fuel_level", 1.0}};
        return j;
    }(), "state domain not declared");
    reject([&] {
        json j = base;
        j["turns"][0]["injected_tools"] = json::array({"rm"});
        j["turns"][0]["available_tools"] = json::array({"ls"});
        return j;
    }(), "injected tool not available");
}

TEST_CASE("ground-truth oracle detects broken corpora") {
    json j = minimal_scenario("broken", "base");
    j["turns"][0]["ground_truth_calls"] =
        json::array({{{"name", "rm"}, {"arguments", {{"file_name", "missing"}}}}});
    Scenario sc = scenario_from_json(j, "test");
    CHECK_THROWS_AS(run_ground_truth(sc, MessageCatalog::builtin()), GroundTruthBroken);

    json j2 = minimal_scenario("mismatch", "base");
    j2["turns"][0]["ground_truth_calls"] =
        json::array({{{"name", "ls"}, {"arguments", json::object()}}});
    j2["turns"][0]["expected_returns"] = {{"0", {{"current_directory_content", {"wrong"}}}}};
    Scenario sc2 = scenario_from_json(j2, "test");
    CHECK_THROWS_AS(run_ground_truth(sc2, MessageCatalog::builtin()), GroundTruthBroken);
}

TEST_CASE("ground-truth fingerprints are per-turn and stable") {
    const Scenario* sc = find_scenario(corpus(), "fs-cleanup");
    REQUIRE(sc != nullptr);
    const auto run = run_ground_truth(*sc, MessageCatalog::builtin());
    REQUIRE(int(run.turn_fingerprints.size()) == sc->num_turns());
    for (int t = 0; t < sc->num_turns(); ++t)
        CHECK(ground_truth_state(*sc, t, MessageCatalog::builtin()) ==
              run.turn_fingerprints[size_t(t)]);
    // after the final turn the directory tree is empty again
    CHECK(run.turn_fingerprints.back().text.find("SuperResearch") == std::string::npos);
}

TEST_CASE("every scenario in the corpus replays its ground truth cleanly") {
    const auto& cat = MessageCatalog::builtin();
    for (const auto& sc : corpus()) {
        INFO("scenario ", sc.id);
        CHECK_NOTHROW(run_ground_truth(sc, cat));
    }
}

TEST_CASE("split plans are deterministic, disjoint and exhaustive") {
    std::vector<Scenario> fake;
    const char* splits[] = {"base", "missing_functions", "missing_parameters", "long_context"};
    for (int i = 0; i < 16; ++i)
        fake.push_back(scenario_from_json(
            minimal_scenario(("s" + std::to_string(i)).c_str(), splits[i % 4]), "test"));
    const SplitPlan a = make_split_plan(fake, 2, 99);
    const SplitPlan b = make_split_plan(fake, 2, 99);
    const SplitPlan c = make_split_plan(fake, 2, 100);
    CHECK(a.train == b.train);
    CHECK(a.eval == b.eval);
    CHECK(a.train != c.train);  // a different seed shuffles differently
    for (Split s : kAllSplits) {
        REQUIRE(a.train.count(s) == 1);
        CHECK(a.train.at(s).size() == 2);
        CHECK(a.eval.at(s).size() == 2);
        for (const auto& id : a.train.at(s))
            CHECK(std::find(a.eval.at(s).begin(), a.eval.at(s).end(), id) ==
                  a.eval.at(s).end());
    }
    // a split with a single scenario cannot be divided
    std::vector<Scenario> tiny;
    tiny.push_back(scenario_from_json(minimal_scenario("only", "base"), "test"));
    CHECK_THROWS_AS(make_split_plan(tiny, 1, 1), InsufficientData);
}
