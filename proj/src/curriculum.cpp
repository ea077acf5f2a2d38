// SPDX-License-Identifier: Apache-2.0
#include "toolgym/curriculum.hpp"

#include <algorithm>
#include <cmath>

namespace toolgym {

namespace {

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void validate_knobs(int window, double delta_acc, double rho) {
    if (window < 2) throw std::invalid_argument("transition window must be >= 2");
    if (!(delta_acc > 0)) throw std::invalid_argument("plateau tolerance must be > 0");
    if (!(rho > 1)) throw std::invalid_argument("stability ratio must be > 1");
}

RewardKind reward_kind_from_name(const std::string& s) {
    if (s == "stage1") return RewardKind::Stage1Syntactic;
    if (s == "progress") return RewardKind::Progress;
    if (s == "binary") return RewardKind::Binary;
    if (s == "combined") return RewardKind::Combined;
    throw std::invalid_argument("unknown reward kind: " + s);
}

OptimConfig optim_config_from_json(const json& j, OptimConfig base) {
    if (!j.is_object()) throw std::invalid_argument("optim override must be an object");
    for (const auto& kv : j.items()) {
        const std::string& k = kv.key();
        const json& v = kv.value();
        if (k == "eps_low") base.eps_low = v.get<double>();
        else if (k == "eps_high") base.eps_high = v.get<double>();
        else if (k == "beta") base.beta = v.get<double>();
        else if (k == "eps_a") base.eps_a = v.get<double>();
        else if (k == "group_size") base.group_size = v.get<int>();
        else if (k == "lr") base.lr = v.get<double>();
        else if (k == "step_budget") base.step_budget = v.get<int>();
        else throw std::invalid_argument("unknown optim config field: " + k);
    }
    return base;
}

double validation_accuracy(const PolicyParams& p,
                           const std::vector<const Scenario*>& pool, FeedbackMode mode,
                           const MessageCatalog& catalog, int step_budget) {
    if (pool.empty()) return 0.0;
    double sum = 0;
    for (const Scenario* sc : pool) {
        SoftmaxPolicy policy(p, *sc, /*greedy=*/true);
        std::mt19937_64 rng(0);  // greedy choice ignores the stream
        Trajectory t = run_episode(policy, *sc, mode, catalog, step_budget, rng);
        sum += trajectory_reward(t, *sc, catalog, RewardKind::Binary);
    }
    return sum / double(pool.size());
}

}  // namespace

StageConfig default_stage_config(int stage) {
    if (stage < 1 || stage > 4)
        throw std::invalid_argument("curriculum stage must be in 1..4");
    StageConfig c;
    c.stage = stage;
    std::vector<Split> all(std::begin(kAllSplits), std::end(kAllSplits));
    switch (stage) {
        case 1:
            c.reward = RewardKind::Stage1Syntactic;
            c.feedback = FeedbackMode::Augmented;
            c.data = {Split::Base};
            break;
        case 2:
            c.reward = RewardKind::Progress;
            c.feedback = FeedbackMode::Augmented;
            c.data = {Split::Base};
            break;
        case 3:
            c.reward = RewardKind::Progress;
            c.feedback = FeedbackMode::Augmented;
            c.data = std::move(all);
            break;
        case 4:
            c.reward = RewardKind::Progress;
            c.feedback = FeedbackMode::Standard;
            c.data = std::move(all);
            break;
    }
    return c;
}

StageConfig stage_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("stage config must be a JSON object");
    if (!j.contains("stage") || !j["stage"].is_number_integer())
        throw std::invalid_argument("stage config requires an integer \"stage\"");
    try {
        StageConfig c = default_stage_config(j["stage"].get<int>());
        for (const auto& kv : j.items()) {
            const std::string& k = kv.key();
            const json& v = kv.value();
            if (k == "stage") continue;
            else if (k == "reward") c.reward = reward_kind_from_name(v.get<std::string>());
            else if (k == "w_p") c.w_p = v.get<double>();
            else if (k == "w_format") c.w_format = v.get<double>();
            else if (k == "feedback")
                c.feedback = feedback_mode_from_name(v.get<std::string>());
            else if (k == "data") {
                if (!v.is_array() || v.empty())
                    throw std::invalid_argument("stage data filter must be a non-empty array");
                c.data.clear();
                for (const json& e : v) {
                    auto sp = split_from_name(e.get<std::string>());
                    if (!sp)
                        throw std::invalid_argument("unknown split name: " +
                                                    e.get<std::string>());
                    c.data.push_back(*sp);
                }
            } else if (k == "step_cap") {
                c.step_cap = v.get<int>();
            } else if (k == "optim") {
                c.optim = optim_config_from_json(v, OptimConfig{});
            } else {
                throw std::invalid_argument("unknown stage config field: " + k);
            }
        }
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed stage config: ") + e.what());
    }
}

std::vector<StageConfig> stage_configs_from_json(const json& j) {
    std::vector<StageConfig> out;
    for (int s = 1; s <= 4; ++s) out.push_back(default_stage_config(s));
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    if (!j.contains("stages")) return out;
    const json& stages = j["stages"];
    if (!stages.is_array()) throw std::invalid_argument("\"stages\" must be an array");
    for (const json& e : stages) {
        StageConfig c = stage_config_from_json(e);
        out[c.stage - 1] = std::move(c);
    }
    return out;
}

bool should_transition(const TransitionHistory& h) {
    validate_knobs(h.window, h.delta_acc, h.rho);
    if (int(h.records.size()) < h.window) return false;
    auto first = h.records.end() - h.window;
    double amin = first->accuracy, amax = first->accuracy, gmax = first->grad_norm;
    std::vector<double> norms;
    for (auto it = first; it != h.records.end(); ++it) {
        amin = std::min(amin, it->accuracy);
        amax = std::max(amax, it->accuracy);
        gmax = std::max(gmax, it->grad_norm);
        norms.push_back(it->grad_norm);
    }
    std::sort(norms.begin(), norms.end());
    size_t n = norms.size();
    double median = (n % 2 == 1) ? norms[n / 2] : 0.5 * (norms[n / 2 - 1] + norms[n / 2]);
    return (amax - amin) <= h.delta_acc && gmax <= h.rho * median;
}

CurriculumResult run_curriculum(const PolicyParams& init,
                                const std::vector<Scenario>& corpus,
                                const SplitPlan& plan,
                                const std::vector<StageConfig>& stages,
                                const OptimConfig& optim, const CurriculumOptions& opts,
                                const MessageCatalog& catalog) {
    if (stages.empty()) throw std::invalid_argument("stage list is empty");
    for (size_t i = 0; i < stages.size(); ++i) {
        const StageConfig& s = stages[i];
        if (s.stage < 1 || s.stage > 4)
            throw std::invalid_argument("curriculum stage must be in 1..4");
        if (i > 0 && s.stage <= stages[i - 1].stage)
            throw std::invalid_argument("stage order must be strictly ascending");
        if (s.stage == 1 && s.reward != RewardKind::Stage1Syntactic)
            throw std::invalid_argument("stage 1 must use the syntactic reward");
        if (s.stage == 4 && s.feedback != FeedbackMode::Standard)
            throw std::invalid_argument("stage 4 must use Standard feedback");
        if (s.data.empty())
            throw std::invalid_argument("stage data filter must be non-empty");
    }
    validate_knobs(opts.window, opts.delta_acc, opts.rho);
    if (opts.batch_scenarios < 1)
        throw std::invalid_argument("batch_scenarios must be >= 1");
    if (opts.step_cap < 0) throw std::invalid_argument("step_cap must be >= 0");

    CurriculumResult res;
    res.params = init;
    int global_step = 0;

    for (const StageConfig& scfg : stages) {
        StageLog log;
        log.stage = scfg.stage;

        OptimConfig oc = scfg.optim.value_or(optim);
        oc.w_p = scfg.w_p;
        oc.w_format = scfg.w_format;
        int cap = scfg.step_cap.value_or(opts.step_cap);
        if (cap < 0) throw std::invalid_argument("stage step cap must be >= 0");

        std::vector<const Scenario*> train_pool, val_pool;
        for (Split sp : scfg.data) {
            auto collect = [&](const std::map<Split, std::vector<std::string>>& side,
                               std::vector<const Scenario*>& into) {
                auto it = side.find(sp);
                if (it == side.end()) return;
                for (const std::string& id : it->second) {
                    const Scenario* sc = find_scenario(corpus, id);
                    if (!sc)
                        throw CorpusError("split plan references unknown scenario: " + id);
                    into.push_back(sc);
                }
            };
            collect(plan.train, train_pool);
            collect(plan.eval, val_pool);
        }
        if (cap > 0 && (train_pool.empty() || val_pool.empty()))
            throw CorpusError("stage " + std::to_string(scfg.stage) +
                              " has no scenarios for its data filter");

        FeedbackMode val_mode =
            scfg.stage == 4 ? FeedbackMode::Standard : scfg.feedback;
        PolicyParams ref = res.params;
        TransitionHistory hist;
        hist.window = opts.window;
        hist.delta_acc = opts.delta_acc;
        hist.rho = opts.rho;
        size_t cursor = 0;

        for (int step = 0; step < cap; ++step) {
            try {
                size_t nbatch =
                    std::min<size_t>(size_t(opts.batch_scenarios), train_pool.size());
                std::vector<GroupRollout> batch;
                for (size_t b = 0; b < nbatch; ++b) {
                    const Scenario& sc = *train_pool[cursor % train_pool.size()];
                    ++cursor;
                    uint64_t seed = mix64(opts.seed ^ mix64((uint64_t(scfg.stage) << 40) ^
                                                            (uint64_t(step) << 16) ^
                                                            uint64_t(b)));
                    batch.push_back(rollout_group(sc, res.params, scfg.feedback, catalog,
                                                  scfg.reward, oc, seed));
                    if (std::find(log.scenarios_used.begin(), log.scenarios_used.end(),
                                  sc.id) == log.scenarios_used.end())
                        log.scenarios_used.push_back(sc.id);
                }
                log.diagnostics.push_back(train_step(res.params, batch, ref, oc));
            } catch (const NonFinite& e) {
                throw NonFinite(std::string(e.what()) + " (stage " +
                                std::to_string(scfg.stage) + ", step " +
                                std::to_string(step + 1) + ")");
            }
            ++global_step;
            ++log.steps;

            double acc =
                validation_accuracy(res.params, val_pool, val_mode, catalog, oc.step_budget);
            log.val_accuracy.push_back(acc);
            hist.add(acc, log.diagnostics.back().grad_norm);
            if (should_transition(hist)) {
                log.transitioned = true;
                break;
            }
        }
        log.boundary_step = global_step;
        res.stages.push_back(std::move(log));
    }
    return res;
}

}  // namespace toolgym
