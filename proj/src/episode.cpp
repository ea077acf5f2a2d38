// SPDX-License-Identifier: Apache-2.0

#include "toolgym/episode.hpp"

#include <sstream>

namespace toolgym {

const char* const kFormatErrorFeedback =
    "Format error: response must contain <think> plus exactly one <tool_call> "
    "or <answer> block.";

const ChatMessage* Observation::last_message(const std::string& role) const {
    for (auto it = history.rbegin(); it != history.rend(); ++it)
        if (it->role == role) return &*it;
    return nullptr;
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string compose_user_text(const TurnSpec& turn) {
    std::string text;
    if (!turn.distractor_blobs.empty()) text = join(turn.distractor_blobs, "\n\n") + "\n\n";
    text += turn.user_text;
    if (!turn.injected_tools.empty())
        text += "\n[New tools enabled this turn: " + join(turn.injected_tools, ", ") + "]";
    return text;
}

std::string build_system_prompt(const ToolRegistry& reg, const json& credentials) {
    std::string p =
        "You are a tool-using assistant operating simulated environments.\n"
        "Every response must open with a <think>...</think> block followed by "
        "exactly one of:\n"
        "  <tool_call>[{\"name\": ..., \"arguments\": {...}}, ...]</tool_call>\n"
        "  <answer>...</answer>\n"
        "Use <answer> to close out the current request once it is handled.\n"
        "Available tools:\n";
    p += reg.describe().dump();
    if (credentials.is_object() && !credentials.empty())
        p += "\nCredentials: " + credentials.dump();
    return p;
}

}  // namespace

EpisodeSession::EpisodeSession(const Scenario& sc, FeedbackMode mode,
                               const MessageCatalog& catalog, int step_budget)
    : sc_(&sc), mode_(mode), catalog_(&catalog), budget_(step_budget) {
    if (step_budget < 1) throw std::invalid_argument("step budget must be >= 1");
    state_ = sc.make_initial_state();
    traj_.scenario_id = sc.id;
    traj_.mode = mode;
    obs_.credentials = json::object();
    for (const auto& [k, v] : sc.credentials) obs_.credentials[k] = v;
    obs_.step_budget = budget_;
    begin_turn(0);
}

void EpisodeSession::begin_turn(int t) {
    turn_ = t;
    steps_in_turn_ = 0;
    turn_registry_ = sc_->registry_for_turn(t);
    const std::string text = compose_user_text(sc_->turns[size_t(t)]);
    obs_.history.push_back({"user", text});
    obs_.current_user_text = text;
    obs_.system_prompt = build_system_prompt(turn_registry_, obs_.credentials);
    refresh_observation();
}

void EpisodeSession::refresh_observation() {
    obs_.turn_index = turn_;
    obs_.steps_in_turn = steps_in_turn_;
    obs_.steps_total = int(traj_.steps.size());
    obs_.registry = &turn_registry_;
}

const StepRecord& EpisodeSession::step(const std::string& raw) {
    if (done_) throw std::logic_error("episode is already done");

    StepRecord rec;
    rec.turn_index = turn_;
    rec.raw = raw;
    rec.parsed = parse_response(raw);
    obs_.history.push_back({"assistant", raw});

    bool closed_last_turn = false;
    if (is_malformed(rec.parsed)) {
        rec.malformed = true;
        rec.env_message = kFormatErrorFeedback;
        obs_.history.push_back({"tool", rec.env_message});
    } else {
        const auto& action = std::get<AgentAction>(rec.parsed);
        if (action.is_answer()) {
            rec.is_answer = true;
            rec.answer_text = std::get<Answer>(action.body).text;
            traj_.turn_boundaries.push_back(int(traj_.steps.size()));
            traj_.turn_fingerprints.push_back(fingerprint(state_));
            closed_last_turn = (turn_ + 1 >= sc_->num_turns());
        } else {
            rec.calls = action.batch()->calls;
            rec.results = execute_batch(state_, rec.calls, turn_registry_, mode_, *catalog_);
            rec.env_message = render_batch_response(rec.results);
            obs_.history.push_back({"tool", rec.env_message});
        }
    }

    traj_.steps.push_back(std::move(rec));
    ++steps_in_turn_;

    const StepRecord& pushed = traj_.steps.back();
    if (closed_last_turn) {
        done_ = true;
        traj_.termination = Termination::Completed;
    } else {
        if (pushed.is_answer) begin_turn(turn_ + 1);
        if (int(traj_.steps.size()) >= budget_) {
            done_ = true;
            traj_.termination = Termination::StepBudgetExhausted;
        }
    }
    refresh_observation();
    return pushed;
}

Trajectory run_episode(Policy& policy, const Scenario& sc, FeedbackMode mode,
                       const MessageCatalog& catalog, int step_budget,
                       std::mt19937_64& rng) {
    EpisodeSession session(sc, mode, catalog, step_budget);
    while (!session.done()) {
        std::string raw;
        try {
            raw = policy.act(session.observation(), rng);
        } catch (const std::exception& e) {
            throw PolicyFailure(e.what(), session.trajectory());
        }
        session.step(raw);
    }
    return session.trajectory();
}

Trajectory replay_transcript(const Scenario& sc, const std::vector<std::string>& raw_texts,
                             FeedbackMode mode, const MessageCatalog& catalog) {
    if (raw_texts.empty())
        throw std::invalid_argument("replay_transcript: raw_texts must be non-empty");
    EpisodeSession session(sc, mode, catalog, int(raw_texts.size()));
    for (const auto& raw : raw_texts) {
        if (session.done()) break;
        session.step(raw);
    }
    return session.trajectory();
}

std::string GroundTruthPolicy::act(const Observation& obs, std::mt19937_64&) {
    const auto& gt = sc_->turns[size_t(obs.turn_index)].ground_truth_calls;
    if (!gt.empty() && obs.steps_in_turn == 0)
        return render_response(
            AgentAction{"replaying the reference call sequence", ToolCallBatch{gt}});
    return render_response(AgentAction{"the request is handled", Answer{"Request satisfied."}});
}

// ---------------------------------------------------------------------------
// JSONL export

namespace {

const char* termination_name(Termination t) {
    return t == Termination::Completed ? "completed" : "step-budget";
}

Termination termination_from_name(const std::string& s) {
    if (s == "completed") return Termination::Completed;
    if (s == "step-budget") return Termination::StepBudgetExhausted;
    throw std::runtime_error("bad termination name: " + s);
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& t) {
    std::string out;
    json header = {{"scenario_id", t.scenario_id},
                   {"mode", feedback_mode_name(t.mode)},
                   {"termination", termination_name(t.termination)},
                   {"turn_boundaries", t.turn_boundaries}};
    json fps = json::array();
    for (const auto& fp : t.turn_fingerprints) fps.push_back(fp.text);
    header["turn_fingerprints"] = fps;
    out += header.dump();
    out += "\n";
    for (const auto& s : t.steps) {
        json results = json::array();
        for (const auto& r : s.results)
            results.push_back({{"ok", r.ok},
                               {"payload", r.payload},
                               {"error_kind", r.error_kind},
                               {"message", r.message},
                               {"bare_error", r.bare_error}});
        json line = {{"turn", s.turn_index},
                     {"raw", s.raw},
                     {"results", results},
                     {"env_message", s.env_message}};
        out += line.dump();
        out += "\n";
    }
    return out;
}

Trajectory trajectory_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory export");
    json header = json::parse(line);
    Trajectory t;
    t.scenario_id = header.at("scenario_id").get<std::string>();
    t.mode = feedback_mode_from_name(header.at("mode").get<std::string>());
    t.termination = termination_from_name(header.at("termination").get<std::string>());
    t.turn_boundaries = header.at("turn_boundaries").get<std::vector<int>>();
    for (const auto& fp : header.at("turn_fingerprints"))
        t.turn_fingerprints.push_back({fp.get<std::string>()});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        StepRecord s;
        s.turn_index = j.at("turn").get<int>();
        s.raw = j.at("raw").get<std::string>();
        s.env_message = j.at("env_message").get<std::string>();
        s.parsed = parse_response(s.raw);
        if (is_malformed(s.parsed)) {
            s.malformed = true;
        } else {
            const auto& action = std::get<AgentAction>(s.parsed);
            if (action.is_answer()) {
                s.is_answer = true;
                s.answer_text = std::get<Answer>(action.body).text;
            } else {
                s.calls = action.batch()->calls;
            }
        }
        for (const auto& rj : j.at("results")) {
            ToolResult r;
            r.ok = rj.at("ok").get<bool>();
            r.payload = rj.at("payload");
            r.error_kind = rj.at("error_kind").get<std::string>();
            r.message = rj.at("message").get<std::string>();
            r.bare_error = rj.at("bare_error").get<bool>();
            s.results.push_back(std::move(r));
        }
        t.steps.push_back(std::move(s));
    }
    return t;
}

}  // namespace toolgym
