// SPDX-License-Identifier: Apache-2.0
//
// Scenario corpus: multi-turn tasks with per-turn tool availability, frozen
// ground-truth call sequences, and expected payloads for progress scoring.
//
// File format (one JSON object per *.json file in the corpus directory):
//   {
//     "id": "...", "split": "base|missing_functions|missing_parameters|long_context",
//     "domains": ["filesystem"|"travel"|"social"|"vehicle", ...],
//     "credentials": {string: string},
//     "initial_state": {<domain>: {...}},
//     "turns": [ { "user_text": "...",
//                  "available_tools": [names]   (optional; inherits previous turn,
//                                                first turn defaults to all tools),
//                  "injected_tools": [names]    (optional; must be available this turn),
//                  "ground_truth_calls": [{"name": .., "arguments": {..}}],
//                  "expected_returns": {"<call index>": payload},
//                  "distractor_blobs": ["..."]  (optional) } ]
//   }

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "toolgym/envsuite.hpp"

namespace toolgym {

enum class Split { Base, MissingFunctions, MissingParameters, LongContext };

const char* split_name(Split s);
std::optional<Split> split_from_name(const std::string& s);
inline constexpr Split kAllSplits[] = {Split::Base, Split::MissingFunctions,
                                       Split::MissingParameters, Split::LongContext};

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A ground-truth call failed or an expected payload does not match what the
// ground truth actually produces.
struct GroundTruthBroken : CorpusError {
    using CorpusError::CorpusError;
};

struct InsufficientData : CorpusError {
    using CorpusError::CorpusError;
};

struct TurnSpec {
    std::string user_text;
    std::vector<std::string> available_tools;  // resolved during load, never empty
    std::vector<std::string> injected_tools;
    std::vector<ToolCall> ground_truth_calls;
    std::map<int, json> expected_returns;      // ground-truth call index -> payload
    std::vector<std::string> distractor_blobs;
};

struct Scenario {
    std::string id;
    Split split = Split::Base;
    std::vector<std::string> domains;
    json initial_state;
    std::map<std::string, std::string> credentials;
    std::vector<TurnSpec> turns;

    EnvState make_initial_state() const;        // throws CorpusError on bad state
    ToolRegistry registry_for_turn(int t) const;
    int num_turns() const { return int(turns.size()); }
};

Scenario scenario_from_json(const json& j, const std::string& origin);

// Load every *.json file in `dir` (sorted by filename), validating schema and
// cross-references.  Throws CorpusError; duplicate ids are an error.
std::vector<Scenario> load_corpus(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Ground-truth oracle

struct GroundTruthRun {
    std::vector<std::vector<ToolResult>> turn_results;   // per turn, per call
    std::vector<StateFingerprint> turn_fingerprints;     // state after each turn
};

// Execute the ground-truth calls turn by turn from the initial state.  Throws
// GroundTruthBroken if any call fails or an expected payload mismatches.
// Feedback mode does not affect the outcome; Standard is used internally.
GroundTruthRun run_ground_truth(const Scenario& sc, const MessageCatalog& catalog);

// State fingerprint after turn `t` of the ground-truth sequence.
StateFingerprint ground_truth_state(const Scenario& sc, int t, const MessageCatalog& catalog);

// ---------------------------------------------------------------------------
// Train/eval split plan

struct SplitPlan {
    std::map<Split, std::vector<std::string>> train;  // scenario ids
    std::map<Split, std::vector<std::string>> eval;
    uint64_t seed = 0;
};

// Deterministically shuffle each split and reserve `train_per_split` scenarios
// for training (the rest evaluate).  Throws InsufficientData when a split that
// exists cannot supply at least one training and one evaluation scenario.
SplitPlan make_split_plan(const std::vector<Scenario>& corpus, int train_per_split,
                          uint64_t seed);

const Scenario* find_scenario(const std::vector<Scenario>& corpus, const std::string& id);

}  // namespace toolgym
