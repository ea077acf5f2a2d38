// SPDX-License-Identifier: Apache-2.0

#include "toolgym/scenarios.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

namespace toolgym {

const char* split_name(Split s) {
    switch (s) {
        case Split::Base: return "base";
        case Split::MissingFunctions: return "missing_functions";
        case Split::MissingParameters: return "missing_parameters";
        case Split::LongContext: return "long_context";
    }
    return "?";
}

std::optional<Split> split_from_name(const std::string& s) {
    for (Split sp : kAllSplits)
        if (s == split_name(sp)) return sp;
    return std::nullopt;
}

EnvState Scenario::make_initial_state() const {
    try {
        return env_state_from_json(initial_state);
    } catch (const std::exception& e) {
        throw CorpusError("scenario '" + id + "': bad initial_state: " + e.what());
    }
}

ToolRegistry Scenario::registry_for_turn(int t) const {
    if (t < 0 || t >= int(turns.size())) return ToolRegistry{};
    return builtin_tools().subset(turns[size_t(t)].available_tools);
}

namespace {

std::vector<std::string> string_array(const json& v, const std::string& what,
                                      const std::string& origin) {
    if (!v.is_array()) throw CorpusError(origin + ": " + what + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw CorpusError(origin + ": " + what + " must hold strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::string& origin) {
    if (!j.is_object()) throw CorpusError(origin + ": scenario must be a JSON object");
    Scenario sc;
    if (!j.contains("id") || !j.at("id").is_string())
        throw CorpusError(origin + ": missing string 'id'");
    sc.id = j.at("id").get<std::string>();
    const std::string split_str = j.value("split", "");
    const auto split = split_from_name(split_str);
    if (!split) throw CorpusError(origin + ": bad split '" + split_str + "'");
    sc.split = *split;
    sc.domains = string_array(j.value("domains", json::array()), "domains", origin);
    for (const auto& d : sc.domains)
        if (d != "filesystem" && d != "travel" && d != "social" && d != "vehicle")
            throw CorpusError(origin + ": unknown domain '" + d + "'");
    sc.initial_state = j.value("initial_state", json::object());
    for (auto it = sc.initial_state.begin(); it != sc.initial_state.end(); ++it)
        if (std::find(sc.domains.begin(), sc.domains.end(), it.key()) == sc.domains.end())
            throw CorpusError(origin + ": initial_state has domain '" + it.key() +
                              "' not listed in domains");
    for (const auto& [k, v] : object_field(j, "credentials").items()) {
        if (!v.is_string()) throw CorpusError(origin + ": credentials must map to strings");
        sc.credentials[k] = v.get<std::string>();
    }
    if (!j.contains("turns") || !j.at("turns").is_array() || j.at("turns").empty())
        throw CorpusError(origin + ": scenario needs a non-empty 'turns' array");

    std::vector<std::string> inherited;
    for (const auto& n : builtin_tools().names()) inherited.push_back(n);

    int t = 0;
    for (const auto& tj : j.at("turns")) {
        const std::string where = origin + " turn " + std::to_string(t);
        if (!tj.is_object()) throw CorpusError(where + ": turn must be an object");
        TurnSpec turn;
        turn.user_text = tj.value("user_text", "");
        if (turn.user_text.empty()) throw CorpusError(where + ": missing user_text");
        if (tj.contains("available_tools"))
            inherited = string_array(tj.at("available_tools"), "available_tools", where);
        turn.available_tools = inherited;
        for (const auto& n : turn.available_tools)
            if (!builtin_tools().has(n))
                throw CorpusError(where + ": unknown tool '" + n + "' in available_tools");
        if (tj.contains("injected_tools")) {
            turn.injected_tools = string_array(tj.at("injected_tools"), "injected_tools", where);
            for (const auto& n : turn.injected_tools)
                if (std::find(turn.available_tools.begin(), turn.available_tools.end(), n) ==
                    turn.available_tools.end())
                    throw CorpusError(where + ": injected tool '" + n +
                                      "' is not in available_tools");
        }
        for (const auto& cj : tj.value("ground_truth_calls", json::array())) {
            if (!cj.is_object() || !cj.contains("name") || !cj.contains("arguments") ||
                !cj.at("arguments").is_object())
                throw CorpusError(where + ": bad ground_truth_calls entry");
            ToolCall call{cj.at("name").get<std::string>(), cj.at("arguments")};
            if (std::find(turn.available_tools.begin(), turn.available_tools.end(), call.name) ==
                turn.available_tools.end())
                throw CorpusError(where + ": ground-truth call '" + call.name +
                                  "' is not available this turn");
            turn.ground_truth_calls.push_back(std::move(call));
        }
        for (const auto& [k, v] : object_field(tj, "expected_returns").items()) {
            int idx = -1;
            try {
                idx = std::stoi(k);
            } catch (const std::exception&) {
                throw CorpusError(where + ": expected_returns key '" + k + "' is not an index");
            }
            if (idx < 0 || idx >= int(turn.ground_truth_calls.size()))
                throw CorpusError(where + ": expected_returns index " + k + " out of range");
            turn.expected_returns[idx] = v;
        }
        if (tj.contains("distractor_blobs"))
            turn.distractor_blobs =
                string_array(tj.at("distractor_blobs"), "distractor_blobs", where);
        sc.turns.push_back(std::move(turn));
        ++t;
    }
    // parse the state once so schema errors surface at load time
    (void)sc.make_initial_state();
    return sc;
}

std::vector<Scenario> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw CorpusError("corpus directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw CorpusError("corpus directory has no .json files: " + dir.string());
    std::vector<Scenario> out;
    std::set<std::string> ids;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw CorpusError("cannot open " + f.string());
        json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded()) throw CorpusError(f.string() + ": invalid JSON");
        Scenario sc = scenario_from_json(j, f.filename().string());
        if (!ids.insert(sc.id).second) throw CorpusError("duplicate scenario id: " + sc.id);
        out.push_back(std::move(sc));
    }
    return out;
}

GroundTruthRun run_ground_truth(const Scenario& sc, const MessageCatalog& catalog) {
    GroundTruthRun run;
    EnvState state = sc.make_initial_state();
    for (int t = 0; t < sc.num_turns(); ++t) {
        const TurnSpec& turn = sc.turns[size_t(t)];
        const ToolRegistry reg = sc.registry_for_turn(t);
        std::vector<ToolResult> results;
        int idx = 0;
        for (const auto& call : turn.ground_truth_calls) {
            ToolResult r = execute_call(state, call, reg, FeedbackMode::Standard, catalog);
            if (!r.ok)
                throw GroundTruthBroken("scenario '" + sc.id + "' turn " + std::to_string(t) +
                                        " call " + std::to_string(idx) + " (" + call.name +
                                        ") failed: " + r.message);
            auto exp = turn.expected_returns.find(idx);
            if (exp != turn.expected_returns.end() && !approx_equal(r.payload, exp->second))
                throw GroundTruthBroken("scenario '" + sc.id + "' turn " + std::to_string(t) +
                                        " call " + std::to_string(idx) +
                                        ": expected_returns mismatch; ground truth produced " +
                                        r.payload.dump());
            results.push_back(std::move(r));
            ++idx;
        }
        run.turn_results.push_back(std::move(results));
        run.turn_fingerprints.push_back(fingerprint(state));
    }
    return run;
}

StateFingerprint ground_truth_state(const Scenario& sc, int t, const MessageCatalog& catalog) {
    if (t < 0 || t >= sc.num_turns())
        throw CorpusError("scenario '" + sc.id + "': no turn " + std::to_string(t));
    return run_ground_truth(sc, catalog).turn_fingerprints[size_t(t)];
}

SplitPlan make_split_plan(const std::vector<Scenario>& corpus, int train_per_split,
                          uint64_t seed) {
    if (train_per_split < 1) throw InsufficientData("train_per_split must be at least 1");
    SplitPlan plan;
    plan.seed = seed;
    std::map<Split, std::vector<std::string>> by_split;
    for (const auto& sc : corpus) by_split[sc.split].push_back(sc.id);
    for (auto& [split, ids] : by_split) {
        std::sort(ids.begin(), ids.end());
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (uint64_t(split) + 1)));
        std::shuffle(ids.begin(), ids.end(), rng);
        const int n = int(ids.size());
        const int n_train = std::min(train_per_split, n - 1);
        if (n_train < 1)
            throw InsufficientData(std::string("split '") + split_name(split) +
                                   "' needs at least 2 scenarios (has " + std::to_string(n) +
                                   ")");
        plan.train[split].assign(ids.begin(), ids.begin() + n_train);
        plan.eval[split].assign(ids.begin() + n_train, ids.end());
        std::sort(plan.train[split].begin(), plan.train[split].end());
        std::sort(plan.eval[split].begin(), plan.eval[split].end());
    }
    return plan;
}

const Scenario* find_scenario(const std::vector<Scenario>& corpus, const std::string& id) {
    for (const auto& sc : corpus)
        if (sc.id == id) return &sc;
    return nullptr;
}

}  // namespace toolgym
