// SPDX-License-Identifier: Apache-2.0
//
// Group-based policy optimization over a toy differentiable policy.
//
// The policy is a softmax over a finite candidate set per step.  Candidates
// are templated tool calls (argument fillers drawn from the scenario
// credentials, prior tool payloads, and literal values in the user text)
// plus one Answer.  Each candidate carries a fixed-length feature vector;
// the policy scores candidates with a learned weight vector.
//
// The objective is the clipped-ratio surrogate with decoupled lower/upper
// clip bounds and an exact categorical KL penalty against a reference
// parameter snapshot, optimized by plain gradient descent.

#pragma once

#include "toolgym/rewards.hpp"

namespace toolgym {

// Candidate features.  Keep feature_name() in sync.
enum FeatureIndex {
    kFeatRegistered = 0,    // tool exists in this turn's registry
    kFeatSchemaValid,       // arguments satisfy the tool schema
    kFeatIntentMatch,       // user text matches the tool's trigger patterns
    kFeatArgsInContext,     // fraction of argument values seen in context
    kFeatDepOk,             // known prerequisite satisfied (auth, quote, brake)
    kFeatHintMatch,         // previous error message points at this tool
    kFeatRepeatsFailed,     // identical call failed, nothing succeeded since
    kFeatRepeatsSucceeded,  // identical call already succeeded this episode
    kFeatIsAnswer,          // the Answer candidate
    kNumFeatures
};

const char* feature_name(int index);

struct PolicyParams {
    std::vector<double> w = std::vector<double>(kNumFeatures, 0.0);
};

struct Candidate {
    AgentAction action;
    std::vector<double> features;  // length kNumFeatures
    std::string label;             // for logs/tests, e.g. "cd(folder=Projects)"
};

struct CandidateSet {
    std::vector<Candidate> items;  // items[0] is always the Answer candidate
};

// Enumerate candidates for one observation.  Uses only policy-visible
// information (observation text/history/credentials); never reads ground
// truth.  Always returns >= 2 candidates when the registry is non-empty.
CandidateSet propose_candidates(const Observation& obs, const ToolRegistry& reg,
                                const Scenario& sc);

// Scores, probabilities, and the chosen candidate's log-probability.  When
// `grad` is non-null it receives d log p(chosen) / d w.
std::vector<double> candidate_scores(const PolicyParams& p, const CandidateSet& c);
std::vector<double> softmax_probs(const PolicyParams& p, const CandidateSet& c);
double action_logprob(const PolicyParams& p, const CandidateSet& c, int chosen,
                      std::vector<double>* grad = nullptr);
double categorical_entropy(const std::vector<double>& probs);

// (R_i - mean) / (population std + eps_a).
std::vector<double> group_advantages(const std::vector<double>& rewards, double eps_a);

struct OptimConfig {
    double eps_low = 0.2;   // lower clip bound: ratios below 1 - eps_low
    double eps_high = 0.28; // upper clip bound: ratios above 1 + eps_high
    double beta = 0.1;      // KL penalty coefficient
    double eps_a = 1e-8;    // advantage normalization stabilizer
    int group_size = 8;     // trajectories per rollout group
    double lr = 0.1;        // gradient-descent step size
    int step_budget = kDefaultStepBudget;
    double w_p = 0.9;       // combined-reward weights (RewardKind::Combined)
    double w_format = 0.1;
};

// One policy step as sampled during a rollout.
struct StepSample {
    CandidateSet cands;
    int chosen = 0;
    double logp_old = 0;  // log-probability under the sampling parameters
};

struct GroupRollout {
    std::string scenario_id;
    std::vector<std::vector<StepSample>> samples;  // per trajectory
    std::vector<double> rewards;                   // per trajectory
};

struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loss = -(1/M) sum min(r*A, clip(r, 1-eps_low, 1+eps_high)*A)
//        + beta * (1/M) sum KL(pi_params || pi_ref)
// over the M steps of the group; ratio r = exp(logp_now - logp_old).
// When `grad`/`mean_kl` are non-null they receive the analytic gradient and
// the average KL term.  Throws NonFinite on NaN/inf.
double surrogate_loss(const GroupRollout& group, const PolicyParams& params,
                      const PolicyParams& ref, const OptimConfig& cfg,
                      std::vector<double>* grad = nullptr, double* mean_kl = nullptr);

struct StepDiagnostics {
    double loss = 0;
    double grad_norm = 0;
    double mean_kl = 0;
    double entropy = 0;      // mean policy entropy over visited candidate sets
    double mean_reward = 0;  // mean trajectory reward across the batch
};

// One gradient-descent update over a batch of groups.  Throws NonFinite and
// leaves params unchanged if any intermediate is NaN/inf.
StepDiagnostics train_step(PolicyParams& params, const std::vector<GroupRollout>& batch,
                           const PolicyParams& ref, const OptimConfig& cfg);

// Policy wrapper: greedy argmax (ties -> lowest index) or softmax sampling.
// When `record` is non-null each step's sample is appended to it.
class SoftmaxPolicy : public Policy {
  public:
    SoftmaxPolicy(const PolicyParams& params, const Scenario& sc, bool greedy,
                  std::vector<StepSample>* record = nullptr)
        : params_(&params), sc_(&sc), greedy_(greedy), record_(record) {}
    std::string act(const Observation& obs, std::mt19937_64& rng) override;

  private:
    const PolicyParams* params_;
    const Scenario* sc_;
    bool greedy_;
    std::vector<StepSample>* record_;
};

// One sampled episode; returns the trajectory and the recorded step samples.
std::pair<Trajectory, std::vector<StepSample>> rollout_episode(
    const Scenario& sc, const PolicyParams& params, FeedbackMode mode,
    const MessageCatalog& catalog, int step_budget, uint64_t seed);

// G sampled episodes on one scenario, scored under `kind`.  When `trajs` is
// non-null it receives the G trajectories in order.
GroupRollout rollout_group(const Scenario& sc, const PolicyParams& params,
                           FeedbackMode mode, const MessageCatalog& catalog,
                           RewardKind kind, const OptimConfig& cfg, uint64_t seed,
                           std::vector<Trajectory>* trajs = nullptr);

}  // namespace toolgym
