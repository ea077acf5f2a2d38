// SPDX-License-Identifier: Apache-2.0
//
// Reward computations over trajectories: the syntactic (format + call
// validity) reward, the per-turn progress reward, the strict binary episode
// reward, and their weighted combination.

#pragma once

#include "toolgym/episode.hpp"

namespace toolgym {

struct TurnScore {
    double r_state = 0;  // 1 iff state at this turn's boundary matches ground truth
    double r_exec = 0;   // 1 iff every expected return was produced this turn
    double r_t = 0;      // r_state * r_exec
    bool reached = false;  // the agent answered this turn
};

struct RewardBreakdown {
    double r_format = 0;   // (N - c_format) / N
    double r_tool = 0;     // c_correct / (c_correct + c_error + c_unknown), 0 on 0/0
    double i_tool = 0;     // 1 iff any well-formed tool_call block was emitted
    double r_stage1 = 0;   // i_tool * (r_format + r_tool), in [0, 2]
    std::vector<TurnScore> turns;  // one per scenario turn
    double r_p = 0;        // mean r_t over all scenario turns
    double r_binary = 0;   // 1 iff every r_t = 1 and the episode Completed
    double combined = 0;   // 0.9 * r_p + 0.1 * r_format (default weights)
};

// Fold every response of the trajectory into syntax counters, classifying each
// step's calls against the tool registry of the turn that step belonged to.
SyntaxCounters trajectory_counters(const Trajectory& t, const Scenario& sc);

struct Stage1Parts {
    double r_format = 0, r_tool = 0, r_stage1 = 0;
};

// Requires counters.n_responses >= 1.
Stage1Parts stage1_reward(const SyntaxCounters& c);

// Full scoring of a trajectory against its scenario's ground truth.  Shadow
// executes the ground truth (GroundTruthBroken propagates on corpus defects).
RewardBreakdown progress_reward(const Trajectory& t, const Scenario& sc,
                                const MessageCatalog& catalog);

// w_p * r_p + w_format * r_format.
double combined_reward(const RewardBreakdown& b, double w_p, double w_format);

// Scalar used to train/eval under a given reward regime.
enum class RewardKind {
    Stage1Syntactic,  // r_stage1
    Progress,         // r_p
    Binary,           // r_binary
    Combined,         // w_p * r_p + w_format * r_format
};

double trajectory_reward(const Trajectory& t, const Scenario& sc,
                         const MessageCatalog& catalog, RewardKind kind,
                         double w_p = 0.9, double w_format = 0.1);

json reward_breakdown_to_json(const RewardBreakdown& b);

}  // namespace toolgym
