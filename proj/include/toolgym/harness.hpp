// SPDX-License-Identifier: Apache-2.0
//
// Evaluation reports, the newline-delimited-JSON environment server, and
// configuration plumbing shared with the command-line tool.

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>

#include "toolgym/curriculum.hpp"

namespace toolgym {

// ---------------------------------------------------------------------------
// Evaluation

struct ScenarioEval {
    std::string id;
    Split split = Split::Base;
    double r_p = 0;
    double r_binary = 0;
    bool failed = false;   // the policy raised; scored as zero
    std::string error;     // failure detail when failed
};

struct EvalReport {
    FeedbackMode mode = FeedbackMode::Standard;
    std::map<Split, double> accuracy;  // strict all-turn success rate per split
    std::map<Split, double> mean_r_p;  // mean progress reward per split
    double overall = 0;                // unweighted mean of the split accuracies
    std::vector<ScenarioEval> rows;    // sorted by scenario id
};

// Builds a fresh policy bound to one scenario (episode policies are
// scenario-scoped).
using PolicyFactory = std::function<std::unique_ptr<Policy>(const Scenario&)>;

// One episode per scenario; failures are recorded per row, never aborting the
// report.  Deterministic for a deterministic policy and fixed seed (each
// scenario gets an rng stream derived from `seed` and its id).
EvalReport evaluate(const PolicyFactory& make_policy,
                    const std::vector<const Scenario*>& scenarios, FeedbackMode mode,
                    const MessageCatalog& catalog = MessageCatalog::builtin(),
                    int step_budget = kDefaultStepBudget, uint64_t seed = 0);

// Convenience: greedy or sampled softmax policy with the given parameters.
EvalReport evaluate_params(const PolicyParams& params,
                           const std::vector<const Scenario*>& scenarios,
                           FeedbackMode mode, bool greedy = true,
                           const MessageCatalog& catalog = MessageCatalog::builtin(),
                           int step_budget = kDefaultStepBudget, uint64_t seed = 0);

json eval_report_to_json(const EvalReport& r);

// All corpus scenarios as pointers (optionally restricted to the plan's eval
// ids); helper for callers of evaluate().
std::vector<const Scenario*> all_scenarios(const std::vector<Scenario>& corpus);
std::vector<const Scenario*> eval_scenarios(const std::vector<Scenario>& corpus,
                                            const SplitPlan& plan);

// ---------------------------------------------------------------------------
// Wire protocol

json observation_to_json(const Observation& obs);

// One protocol session: at most one live episode at a time.
//   {"op":"reset","scenario_id":…,"mode":"standard"|"augmented"[,"step_budget":n]}
//     -> {"observation":…}
//   {"op":"step","raw":…}
//     -> {"observation":…|null,"turn_done":b,"episode_done":b,"reward":…|null}
//   {"op":"shutdown"} -> {"ok":true}
// Protocol misuse yields {"error":kind,"detail":…} ("no-episode","not-found",
// "bad-request") and leaves the session alive.
class ServerSession {
  public:
    ServerSession(const std::vector<Scenario>& corpus, const MessageCatalog& catalog);
    json handle(const json& request);
    bool shutdown_requested() const { return shutdown_; }

  private:
    const std::vector<Scenario>* corpus_;
    const MessageCatalog* catalog_;
    std::unique_ptr<EpisodeSession> episode_;
    bool shutdown_ = false;
};

// Serve newline-delimited JSON over a stream pair until shutdown or EOF.
// Unparseable lines get a "bad-request" error response.
void serve_stream(std::istream& in, std::ostream& out,
                  const std::vector<Scenario>& corpus, const MessageCatalog& catalog);

// Serve over a UNIX-domain socket; one thread per connection, each with its
// own session.  Blocks until `stop` (checked between accepts) or a session
// requests shutdown.  Returns 0 on clean exit, nonzero on socket errors.
int serve_unix_socket(const std::string& path, const std::vector<Scenario>& corpus,
                      const MessageCatalog& catalog);

// ---------------------------------------------------------------------------
// Configuration file (--config)

struct HarnessConfig {
    OptimConfig optim;
    CurriculumOptions curriculum;
    std::vector<StageConfig> stages;  // always four entries
    int train_per_split = 4;
};

// Top-level keys: "optim", "curriculum", "stages", "train_per_split".
// Unknown keys or malformed values -> std::invalid_argument.
HarnessConfig harness_config_from_json(const json& j);

}  // namespace toolgym
