// SPDX-License-Identifier: Apache-2.0

#include "toolgym/rewards.hpp"

namespace toolgym {

SyntaxCounters trajectory_counters(const Trajectory& t, const Scenario& sc) {
    SyntaxCounters acc;
    int current_turn = -1;
    ToolRegistry reg;
    for (const auto& step : t.steps) {
        if (step.turn_index != current_turn) {
            current_turn = step.turn_index;
            reg = sc.registry_for_turn(current_turn);
        }
        tally_one(acc, step.raw, reg);
    }
    return acc;
}

Stage1Parts stage1_reward(const SyntaxCounters& c) {
    if (c.n_responses < 1)
        throw std::invalid_argument("stage1_reward: need at least one response");
    Stage1Parts out;
    out.r_format = double(c.n_responses - c.c_format) / double(c.n_responses);
    const int denom = c.c_correct + c.c_error + c.c_unknown;
    out.r_tool = denom == 0 ? 0.0 : double(c.c_correct) / double(denom);
    out.r_stage1 = c.i_tool ? out.r_format + out.r_tool : 0.0;
    return out;
}

RewardBreakdown progress_reward(const Trajectory& t, const Scenario& sc,
                                const MessageCatalog& catalog) {
    RewardBreakdown b;
    const SyntaxCounters counters = trajectory_counters(t, sc);
    const Stage1Parts s1 = stage1_reward(counters);
    b.r_format = s1.r_format;
    b.r_tool = s1.r_tool;
    b.r_stage1 = s1.r_stage1;
    b.i_tool = counters.i_tool ? 1.0 : 0.0;

    const GroundTruthRun gt = run_ground_truth(sc, catalog);

    // ok payloads produced per turn
    std::vector<std::vector<const json*>> ok_payloads(size_t(sc.num_turns()));
    for (const auto& step : t.steps) {
        if (step.turn_index >= sc.num_turns()) continue;
        for (const auto& r : step.results)
            if (r.ok) ok_payloads[size_t(step.turn_index)].push_back(&r.payload);
    }

    b.turns.resize(size_t(sc.num_turns()));
    double total = 0;
    bool all_full = true;
    for (int i = 0; i < sc.num_turns(); ++i) {
        TurnScore& score = b.turns[size_t(i)];
        score.reached = size_t(i) < t.turn_fingerprints.size();
        if (score.reached)
            score.r_state =
                t.turn_fingerprints[size_t(i)] == gt.turn_fingerprints[size_t(i)] ? 1.0 : 0.0;
        bool exec_ok = true;
        for (const auto& [idx, expected] : sc.turns[size_t(i)].expected_returns) {
            (void)idx;
            bool found = false;
            for (const json* payload : ok_payloads[size_t(i)])
                if (approx_equal(*payload, expected)) found = true;
            if (!found) exec_ok = false;
        }
        score.r_exec = exec_ok ? 1.0 : 0.0;
        score.r_t = score.r_state * score.r_exec;
        total += score.r_t;
        if (score.r_t != 1.0) all_full = false;
    }
    b.r_p = total / double(sc.num_turns());
    b.r_binary = (all_full && t.termination == Termination::Completed) ? 1.0 : 0.0;
    b.combined = combined_reward(b, 0.9, 0.1);
    return b;
}

double combined_reward(const RewardBreakdown& b, double w_p, double w_format) {
    return w_p * b.r_p + w_format * b.r_format;
}

double trajectory_reward(const Trajectory& t, const Scenario& sc,
                         const MessageCatalog& catalog, RewardKind kind, double w_p,
                         double w_format) {
    const RewardBreakdown b = progress_reward(t, sc, catalog);
    switch (kind) {
        case RewardKind::Stage1Syntactic: return b.r_stage1;
        case RewardKind::Progress: return b.r_p;
        case RewardKind::Binary: return b.r_binary;
        case RewardKind::Combined: return combined_reward(b, w_p, w_format);
    }
    return 0;
}

json reward_breakdown_to_json(const RewardBreakdown& b) {
    json turns = json::array();
    for (const auto& t : b.turns)
        turns.push_back({{"r_state", t.r_state},
                         {"r_exec", t.r_exec},
                         {"r_t", t.r_t},
                         {"reached", t.reached}});
    return {{"r_format", b.r_format}, {"r_tool", b.r_tool},     {"i_tool", b.i_tool},
            {"r_stage1", b.r_stage1}, {"turns", turns},         {"r_p", b.r_p},
            {"r_binary", b.r_binary}, {"combined", b.combined}};
}

}  // namespace toolgym
