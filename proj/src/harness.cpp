// SPDX-License-Identifier: Apache-2.0
#include "toolgym/harness.hpp"

#include <algorithm>

namespace toolgym {

namespace {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

EvalReport evaluate(const PolicyFactory& make_policy,
                    const std::vector<const Scenario*>& scenarios, FeedbackMode mode,
                    const MessageCatalog& catalog, int step_budget, uint64_t seed) {
    if (scenarios.empty()) throw std::invalid_argument("evaluate: no scenarios");
    EvalReport report;
    report.mode = mode;

    std::map<Split, std::pair<double, int>> acc_sum, rp_sum;
    for (const Scenario* sc : scenarios) {
        ScenarioEval row;
        row.id = sc->id;
        row.split = sc->split;
        try {
            std::unique_ptr<Policy> policy = make_policy(*sc);
            std::mt19937_64 rng(seed ^ fnv1a64(sc->id));
            Trajectory t = run_episode(*policy, *sc, mode, catalog, step_budget, rng);
            RewardBreakdown b = progress_reward(t, *sc, catalog);
            row.r_p = b.r_p;
            row.r_binary = b.r_binary;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
        acc_sum[sc->split].first += row.r_binary;
        acc_sum[sc->split].second += 1;
        rp_sum[sc->split].first += row.r_p;
        rp_sum[sc->split].second += 1;
        report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ScenarioEval& a, const ScenarioEval& b) { return a.id < b.id; });

    double overall = 0;
    for (const auto& [split, sum] : acc_sum) {
        report.accuracy[split] = sum.first / sum.second;
        report.mean_r_p[split] = rp_sum[split].first / rp_sum[split].second;
        overall += report.accuracy[split];
    }
    report.overall = overall / double(acc_sum.size());
    return report;
}

EvalReport evaluate_params(const PolicyParams& params,
                           const std::vector<const Scenario*>& scenarios,
                           FeedbackMode mode, bool greedy, const MessageCatalog& catalog,
                           int step_budget, uint64_t seed) {
    PolicyFactory f = [&params, greedy](const Scenario& sc) -> std::unique_ptr<Policy> {
        return std::make_unique<SoftmaxPolicy>(params, sc, greedy);
    };
    return evaluate(f, scenarios, mode, catalog, step_budget, seed);
}

json eval_report_to_json(const EvalReport& r) {
    json accuracy = json::object(), mean_r_p = json::object();
    for (const auto& [split, v] : r.accuracy) accuracy[split_name(split)] = v;
    for (const auto& [split, v] : r.mean_r_p) mean_r_p[split_name(split)] = v;
    json rows = json::array();
    for (const ScenarioEval& row : r.rows) {
        json jr = {{"id", row.id},
                   {"split", split_name(row.split)},
                   {"r_p", row.r_p},
                   {"r_binary", row.r_binary},
                   {"failed", row.failed}};
        if (row.failed) jr["error"] = row.error;
        rows.push_back(std::move(jr));
    }
    return json{{"mode", feedback_mode_name(r.mode)},
                {"accuracy", accuracy},
                {"mean_r_p", mean_r_p},
                {"overall", r.overall},
                {"rows", rows}};
}

std::vector<const Scenario*> all_scenarios(const std::vector<Scenario>& corpus) {
    std::vector<const Scenario*> out;
    out.reserve(corpus.size());
    for (const Scenario& sc : corpus) out.push_back(&sc);
    return out;
}

std::vector<const Scenario*> eval_scenarios(const std::vector<Scenario>& corpus,
                                            const SplitPlan& plan) {
    std::vector<const Scenario*> out;
    for (const auto& [split, ids] : plan.eval)
        for (const std::string& id : ids) {
            const Scenario* sc = find_scenario(corpus, id);
            if (!sc) throw CorpusError("split plan references unknown scenario: " + id);
            out.push_back(sc);
        }
    return out;
}

HarnessConfig harness_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    HarnessConfig c;
    c.stages = stage_configs_from_json(j);  // reads "stages" when present
    try {
        for (const auto& kv : j.items()) {
            const std::string& k = kv.key();
            const json& v = kv.value();
            if (k == "stages") continue;
            else if (k == "train_per_split") c.train_per_split = v.get<int>();
            else if (k == "optim") {
                if (!v.is_object())
                    throw std::invalid_argument("\"optim\" must be an object");
                for (const auto& okv : v.items()) {
                    const std::string& ok = okv.key();
                    const json& ov = okv.value();
                    if (ok == "eps_low") c.optim.eps_low = ov.get<double>();
                    else if (ok == "eps_high") c.optim.eps_high = ov.get<double>();
                    else if (ok == "beta") c.optim.beta = ov.get<double>();
                    else if (ok == "eps_a") c.optim.eps_a = ov.get<double>();
                    else if (ok == "group_size") c.optim.group_size = ov.get<int>();
                    else if (ok == "lr") c.optim.lr = ov.get<double>();
                    else if (ok == "step_budget") c.optim.step_budget = ov.get<int>();
                    else if (ok == "w_p") c.optim.w_p = ov.get<double>();
                    else if (ok == "w_format") c.optim.w_format = ov.get<double>();
                    else throw std::invalid_argument("unknown optim field: " + ok);
                }
            } else if (k == "curriculum") {
                if (!v.is_object())
                    throw std::invalid_argument("\"curriculum\" must be an object");
                for (const auto& ckv : v.items()) {
                    const std::string& ck = ckv.key();
                    const json& cv = ckv.value();
                    if (ck == "step_cap") c.curriculum.step_cap = cv.get<int>();
                    else if (ck == "window") c.curriculum.window = cv.get<int>();
                    else if (ck == "delta_acc") c.curriculum.delta_acc = cv.get<double>();
                    else if (ck == "rho") c.curriculum.rho = cv.get<double>();
                    else if (ck == "batch_scenarios")
                        c.curriculum.batch_scenarios = cv.get<int>();
                    else throw std::invalid_argument("unknown curriculum field: " + ck);
                }
            } else {
                throw std::invalid_argument("unknown config field: " + k);
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
    return c;
}

}  // namespace toolgym
