// SPDX-License-Identifier: Apache-2.0
//
// The multi-turn episode loop: observation assembly, action execution, turn
// advancement on Answer, trajectory recording.
//
// Glossary: a *step* is one agent response (tool-call batch, answer, or
// malformed text); a *turn* is one user request and every step until the
// agent answers it; an *episode* covers all of a scenario's turns.

#pragma once

#include <random>

#include "toolgym/scenarios.hpp"

namespace toolgym {

struct ChatMessage {
    std::string role;  // "user" | "assistant" | "tool"
    std::string text;
    bool operator==(const ChatMessage&) const = default;
};

// What a policy sees before each step.  `registry` stays valid for the
// duration of the act() call that received the observation.
struct Observation {
    std::string system_prompt;        // format contract + tool docs + credentials
    std::vector<ChatMessage> history; // full dialogue so far, incl. current user text
    std::string current_user_text;    // active turn's request (distractors included)
    int turn_index = 0;
    int steps_in_turn = 0;            // agent responses already spent on this turn
    int steps_total = 0;
    int step_budget = 0;
    json credentials;                 // scenario credential strings
    const ToolRegistry* registry = nullptr;

    // Most recent message with the given role, or nullptr.
    const ChatMessage* last_message(const std::string& role) const;
};

class Policy {
  public:
    virtual ~Policy() = default;
    // Produce the raw response text for this observation.
    virtual std::string act(const Observation& obs, std::mt19937_64& rng) = 0;
};

enum class Termination { Completed, StepBudgetExhausted };

struct StepRecord {
    int turn_index = 0;
    std::string raw;                 // agent response verbatim
    ParseResult parsed;
    bool malformed = false;
    bool is_answer = false;
    std::string answer_text;         // when is_answer
    std::vector<ToolCall> calls;     // when a tool-call batch
    std::vector<ToolResult> results; // one per call
    std::string env_message;         // feedback appended to history ("" for answers)
};

struct Trajectory {
    std::string scenario_id;
    FeedbackMode mode = FeedbackMode::Standard;
    std::vector<StepRecord> steps;
    std::vector<int> turn_boundaries;               // step index of each turn's Answer
    std::vector<StateFingerprint> turn_fingerprints; // state at each boundary
    Termination termination = Termination::StepBudgetExhausted;

    int completed_turns() const { return int(turn_boundaries.size()); }
};

// Thrown when a policy raises during act(); carries what was recorded so far.
struct PolicyFailure : std::runtime_error {
    Trajectory partial;
    PolicyFailure(const std::string& what, Trajectory t)
        : std::runtime_error(what), partial(std::move(t)) {}
};

inline constexpr int kDefaultStepBudget = 20;

// In-context feedback injected after a malformed response.
extern const char* const kFormatErrorFeedback;

// One live episode.  Drives a scenario turn by turn; shared by run_episode,
// replay_transcript, and the wire-protocol server.
class EpisodeSession {
  public:
    EpisodeSession(const Scenario& sc, FeedbackMode mode, const MessageCatalog& catalog,
                   int step_budget = kDefaultStepBudget);

    const Observation& observation() const { return obs_; }
    bool done() const { return done_; }
    // Feed one raw agent response; returns the record for that step.
    // Throws std::logic_error when the episode is already done.
    const StepRecord& step(const std::string& raw);
    const Trajectory& trajectory() const { return traj_; }
    const EnvState& state() const { return state_; }
    const Scenario& scenario() const { return *sc_; }
    FeedbackMode mode() const { return mode_; }

  private:
    void begin_turn(int t);
    void refresh_observation();

    const Scenario* sc_;
    FeedbackMode mode_;
    const MessageCatalog* catalog_;
    int budget_;
    EnvState state_;
    ToolRegistry turn_registry_;
    Observation obs_;
    Trajectory traj_;
    int turn_ = 0;
    int steps_in_turn_ = 0;
    bool done_ = false;
};

// Run a full episode under `policy`.  Policy exceptions surface as
// PolicyFailure with the partial trajectory attached.
Trajectory run_episode(Policy& policy, const Scenario& sc, FeedbackMode mode,
                       const MessageCatalog& catalog, int step_budget,
                       std::mt19937_64& rng);

// Run a scripted episode that emits `raw_texts` in order.  Rejects an empty
// list (std::invalid_argument).  The step budget equals raw_texts.size();
// texts beyond episode completion are ignored.
Trajectory replay_transcript(const Scenario& sc, const std::vector<std::string>& raw_texts,
                             FeedbackMode mode, const MessageCatalog& catalog);

// Scripted oracle: emits each turn's ground-truth calls as one batch, then
// answers (turns with no ground truth are answered immediately).
class GroundTruthPolicy : public Policy {
  public:
    explicit GroundTruthPolicy(const Scenario& sc) : sc_(&sc) {}
    std::string act(const Observation& obs, std::mt19937_64& rng) override;

  private:
    const Scenario* sc_;
};

// Lossless JSON-lines export: first line is a header, then one line per step.
std::string trajectory_to_jsonl(const Trajectory& t);
Trajectory trajectory_from_jsonl(const std::string& text);

}  // namespace toolgym
