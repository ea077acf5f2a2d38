// SPDX-License-Identifier: Apache-2.0
//
// Four-stage training schedule.  Each stage fixes a reward regime, a feedback
// mode, and a data filter; stages advance when validation accuracy plateaus
// while gradient norms stay stable, or when a per-stage step cap is reached.

#pragma once

#include "toolgym/optim.hpp"

namespace toolgym {

struct StageConfig {
    int stage = 1;  // 1..4
    RewardKind reward = RewardKind::Stage1Syntactic;
    double w_p = 0.9, w_format = 0.1;      // only used when reward == Combined
    FeedbackMode feedback = FeedbackMode::Augmented;
    std::vector<Split> data;               // split filter, non-empty
    std::optional<OptimConfig> optim;      // per-stage optimizer override
    std::optional<int> step_cap;           // per-stage cap override
};

// Canonical schedule:
//   1: syntactic reward, Augmented, Base
//   2: progress reward,  Augmented, Base
//   3: progress reward,  Augmented, all splits
//   4: progress reward,  Standard,  all splits
// Throws std::invalid_argument outside 1..4.
StageConfig default_stage_config(int stage);

// Apply JSON overrides ("reward", "feedback", "data", "w_p", "w_format",
// "step_cap", "optim" with OptimConfig fields) on top of the stage's default
// config.  "stage" is required.  Throws std::invalid_argument on unknown
// names or malformed values.
StageConfig stage_config_from_json(const json& j);

// Full schedule from {"stages": [...]} (or defaults for stages not listed).
std::vector<StageConfig> stage_configs_from_json(const json& j);

struct TransitionHistory {
    struct Record {
        double accuracy = 0;
        double grad_norm = 0;
    };
    std::vector<Record> records;
    int window = 5;           // W >= 2
    double delta_acc = 0.01;  // plateau tolerance, > 0
    double rho = 2.0;         // stability ratio, > 1

    void add(double accuracy, double grad_norm) { records.push_back({accuracy, grad_norm}); }
};

// True iff, over the last `window` records, max(acc) - min(acc) <= delta_acc
// and max(grad_norm) <= rho * median(grad_norm).  False when fewer than
// `window` records exist.  Throws std::invalid_argument on invalid knobs
// (window < 2, delta_acc <= 0, rho <= 1).
bool should_transition(const TransitionHistory& h);

struct StageLog {
    int stage = 1;
    int steps = 0;                  // train steps executed in this stage
    int boundary_step = 0;          // cumulative train steps when the stage ended
    bool transitioned = false;      // plateau fired (false: step cap hit)
    std::vector<StepDiagnostics> diagnostics;   // one per train step
    std::vector<double> val_accuracy;           // one per validation point
    std::vector<std::string> scenarios_used;    // unique batch scenario ids
};

struct CurriculumOptions {
    int step_cap = 500;        // per-stage train-step cap (0 = skip training)
    int window = 5;            // transition window W
    double delta_acc = 0.01;
    double rho = 2.0;
    int batch_scenarios = 4;   // scenarios per train step (round-robin)
    uint64_t seed = 0;
};

struct CurriculumResult {
    PolicyParams params;
    std::vector<StageLog> stages;
};

// Run the stages in order.  Per stage: restrict the split plan to the stage's
// data filter, snapshot the reference parameters, then alternate train_step
// over round-robin scenario batches with greedy validation until
// should_transition fires or the step cap is hit.  Stage 4 validates in
// Standard mode; other stages validate in their own feedback mode.
// Throws std::invalid_argument on malformed stage lists (order must be
// strictly ascending, stage 1 syntactic, stage 4 Standard), CorpusError when
// a stage's data filter has no train or eval scenarios, and NonFinite (with
// stage/step context) when the optimizer produces NaN/inf.
CurriculumResult run_curriculum(const PolicyParams& init,
                                const std::vector<Scenario>& corpus,
                                const SplitPlan& plan,
                                const std::vector<StageConfig>& stages,
                                const OptimConfig& optim,
                                const CurriculumOptions& opts = {},
                                const MessageCatalog& catalog = MessageCatalog::builtin());

}  // namespace toolgym
