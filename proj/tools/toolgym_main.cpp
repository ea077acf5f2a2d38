// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run episodes, train the toy policy, evaluate,
// serve the wire protocol, and validate the scenario corpus.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "toolgym/harness.hpp"

using namespace toolgym;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("invalid JSON in file: " + path);
    return j;
}

json params_to_json(const PolicyParams& p) {
    json w = json::object();
    for (int k = 0; k < kNumFeatures; ++k) w[feature_name(k)] = p.w[k];
    return json{{"w", w}};
}

PolicyParams params_from_json(const json& j) {
    PolicyParams p;
    if (!j.is_object() || !j.contains("w"))
        throw std::runtime_error("params file must be an object with a \"w\" field");
    const json& w = j["w"];
    if (w.is_array()) {
        if (w.size() != size_t(kNumFeatures))
            throw std::runtime_error("params \"w\" array must have " +
                                     std::to_string(kNumFeatures) + " entries");
        for (int k = 0; k < kNumFeatures; ++k) p.w[k] = w[k].get<double>();
        return p;
    }
    if (w.is_object()) {
        for (const auto& kv : w.items()) {
            bool known = false;
            for (int k = 0; k < kNumFeatures; ++k)
                if (kv.key() == feature_name(k)) {
                    p.w[k] = kv.value().get<double>();
                    known = true;
                }
            if (!known) throw std::runtime_error("unknown feature weight: " + kv.key());
        }
        return p;
    }
    throw std::runtime_error("params \"w\" must be an array or object");
}

void print_transcript(const Scenario& sc, const Trajectory& t, std::ostream& out) {
    int printed_turn = -1;
    for (const StepRecord& step : t.steps) {
        if (step.turn_index != printed_turn) {
            printed_turn = step.turn_index;
            out << "=== turn " << printed_turn << " ===\n";
            out << "[user]\n" << sc.turns[printed_turn].user_text << "\n";
        }
        out << "[assistant]\n" << step.raw << "\n";
        if (!step.env_message.empty()) out << "[tool]\n" << step.env_message << "\n";
    }
    out << "=== "
        << (t.termination == Termination::Completed ? "completed" : "step budget exhausted")
        << " after " << t.steps.size() << " steps, " << t.completed_turns() << "/"
        << sc.num_turns() << " turns ===\n";
}

struct CommonArgs {
    std::string corpus_dir = "data/corpus";
    uint64_t seed = 0;
    std::string mode = "augmented";
    std::string config_path;

    FeedbackMode feedback() const { return feedback_mode_from_name(mode); }
    HarnessConfig config() const {
        if (config_path.empty()) return HarnessConfig{};
        return harness_config_from_json(load_json_file(config_path));
    }
};

int cmd_run(const CommonArgs& common, const std::string& scenario_id,
            const std::string& params_path, bool sample) {
    std::vector<Scenario> corpus = load_corpus(common.corpus_dir);
    const Scenario* sc = find_scenario(corpus, scenario_id);
    if (!sc) {
        std::cerr << "unknown scenario: " << scenario_id << "\n";
        return 2;
    }
    std::unique_ptr<Policy> policy;
    PolicyParams params;
    if (params_path.empty()) {
        policy = std::make_unique<GroundTruthPolicy>(*sc);
    } else {
        params = params_from_json(load_json_file(params_path));
        policy = std::make_unique<SoftmaxPolicy>(params, *sc, /*greedy=*/!sample);
    }
    std::mt19937_64 rng(common.seed);
    Trajectory t = run_episode(*policy, *sc, common.feedback(), MessageCatalog::builtin(),
                               kDefaultStepBudget, rng);
    print_transcript(*sc, t, std::cout);
    RewardBreakdown b = progress_reward(t, *sc, MessageCatalog::builtin());
    std::cout << reward_breakdown_to_json(b).dump(2) << "\n";
    return 0;
}

int cmd_train(const CommonArgs& common, const std::string& out_path) {
    std::vector<Scenario> corpus = load_corpus(common.corpus_dir);
    HarnessConfig cfg = common.config();
    cfg.curriculum.seed = common.seed;
    SplitPlan plan = make_split_plan(corpus, cfg.train_per_split, common.seed);

    CurriculumResult res = run_curriculum(PolicyParams{}, corpus, plan, cfg.stages,
                                          cfg.optim, cfg.curriculum);

    json stages = json::array();
    for (const StageLog& log : res.stages) {
        json diag = json::array();
        for (const StepDiagnostics& d : log.diagnostics)
            diag.push_back({{"loss", d.loss},
                            {"grad_norm", d.grad_norm},
                            {"mean_kl", d.mean_kl},
                            {"entropy", d.entropy},
                            {"mean_reward", d.mean_reward}});
        stages.push_back({{"stage", log.stage},
                          {"steps", log.steps},
                          {"boundary_step", log.boundary_step},
                          {"transitioned", log.transitioned},
                          {"val_accuracy", log.val_accuracy},
                          {"scenarios_used", log.scenarios_used},
                          {"diagnostics", std::move(diag)}});
    }

    EvalReport heldout = evaluate_params(res.params, eval_scenarios(corpus, plan),
                                         FeedbackMode::Standard, /*greedy=*/true,
                                         MessageCatalog::builtin(), kDefaultStepBudget,
                                         common.seed);
    json out = {{"params", params_to_json(res.params)},
                {"stages", std::move(stages)},
                {"heldout", eval_report_to_json(heldout)}};
    std::cout << out.dump(2) << "\n";

    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "cannot write params file: " << out_path << "\n";
            return 2;
        }
        f << params_to_json(res.params).dump(2) << "\n";
    }
    return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& params_path, bool oracle,
             bool heldout, bool sample) {
    std::vector<Scenario> corpus = load_corpus(common.corpus_dir);
    std::vector<const Scenario*> pool;
    if (heldout) {
        HarnessConfig cfg = common.config();
        SplitPlan plan = make_split_plan(corpus, cfg.train_per_split, common.seed);
        pool = eval_scenarios(corpus, plan);
    } else {
        pool = all_scenarios(corpus);
    }

    EvalReport report;
    if (oracle) {
        PolicyFactory f = [](const Scenario& sc) -> std::unique_ptr<Policy> {
            return std::make_unique<GroundTruthPolicy>(sc);
        };
        report = evaluate(f, pool, common.feedback(), MessageCatalog::builtin(),
                          kDefaultStepBudget, common.seed);
    } else {
        PolicyParams params;
        if (!params_path.empty()) params = params_from_json(load_json_file(params_path));
        report = evaluate_params(params, pool, common.feedback(), /*greedy=*/!sample,
                                 MessageCatalog::builtin(), kDefaultStepBudget, common.seed);
    }
    std::cout << eval_report_to_json(report).dump(2) << "\n";
    return 0;
}

int cmd_serve(const CommonArgs& common, const std::string& socket_path) {
    std::vector<Scenario> corpus = load_corpus(common.corpus_dir);
    if (socket_path.empty()) {
        serve_stream(std::cin, std::cout, corpus, MessageCatalog::builtin());
        return 0;
    }
    return serve_unix_socket(socket_path, corpus, MessageCatalog::builtin());
}

int cmd_validate_corpus(const CommonArgs& common) {
    std::vector<Scenario> corpus;
    try {
        corpus = load_corpus(common.corpus_dir);
    } catch (const CorpusError& e) {
        std::cerr << "corpus load failed: " << e.what() << "\n";
        return 1;
    }
    const MessageCatalog& catalog = MessageCatalog::builtin();
    int failures = 0;
    for (const Scenario& sc : corpus) {
        try {
            run_ground_truth(sc, catalog);
            GroundTruthPolicy policy(sc);
            std::mt19937_64 rng(common.seed);
            Trajectory t = run_episode(policy, sc, FeedbackMode::Standard, catalog,
                                       kDefaultStepBudget, rng);
            RewardBreakdown b = progress_reward(t, sc, catalog);
            if (b.r_binary != 1.0 || b.r_p != 1.0)
                throw CorpusError("oracle replay scored r_p=" + std::to_string(b.r_p));
            std::cout << "ok " << sc.id << " (" << split_name(sc.split) << ", "
                      << sc.num_turns() << " turns)\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL " << sc.id << ": " << e.what() << "\n";
        }
    }
    std::cout << (failures == 0 ? "corpus ok: " : "corpus BROKEN: ")
              << (corpus.size() - size_t(failures)) << "/" << corpus.size()
              << " scenarios pass\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolgym: simulated multi-turn tool-use environments with a trainable toy policy"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs common;
    app.add_option("--corpus", common.corpus_dir, "scenario corpus directory")
        ->capture_default_str();
    app.add_option("--seed", common.seed, "random seed")->capture_default_str();
    app.add_option("--mode", common.mode, "feedback mode")
        ->check(CLI::IsMember({"standard", "augmented"}))
        ->capture_default_str();
    app.add_option("--config", common.config_path, "JSON configuration file");

    auto* run = app.add_subcommand("run", "run one episode and print the transcript");
    std::string scenario_id, params_path, out_path = "toolgym_params.json";
    bool sample = false, oracle = false, heldout = false;
    run->add_option("--scenario", scenario_id, "scenario id")->required();
    run->add_option("--params", params_path,
                    "policy weights file (omitted: ground-truth oracle)");
    run->add_flag("--sample", sample, "sample instead of greedy argmax");

    auto* train = app.add_subcommand("train", "run the four-stage curriculum");
    train->add_option("--out", out_path, "where to write the trained weights")
        ->capture_default_str();

    auto* eval = app.add_subcommand("eval", "evaluate a policy and print the report");
    eval->add_option("--params", params_path, "policy weights file (omitted: zero weights)");
    eval->add_flag("--oracle", oracle, "evaluate the ground-truth oracle policy");
    eval->add_flag("--heldout", heldout, "restrict to the split plan's eval scenarios");
    eval->add_flag("--sample", sample, "sample instead of greedy argmax");

    auto* serve = app.add_subcommand("serve", "serve the newline-delimited JSON protocol");
    std::string socket_path;
    serve->add_option("--socket", socket_path, "UNIX socket path (omitted: stdio)");

    app.add_subcommand("validate-corpus", "replay ground truth over every scenario");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run"))
            return cmd_run(common, scenario_id, params_path, sample);
        if (app.got_subcommand("train")) return cmd_train(common, out_path);
        if (app.got_subcommand("eval"))
            return cmd_eval(common, params_path, oracle, heldout, sample);
        if (app.got_subcommand("serve")) return cmd_serve(common, socket_path);
        if (app.got_subcommand("validate-corpus")) return cmd_validate_corpus(common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
