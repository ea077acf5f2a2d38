// SPDX-License-Identifier: Apache-2.0
#include "toolgym/optim.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace toolgym;

namespace {

const std::vector<Scenario>& corpus() {
    static const std::vector<Scenario> c = load_corpus(TOOLGYM_SOURCE_DIR "/data/corpus");
    return c;
}

const Scenario& sc(const std::string& id) {
    const Scenario* s = find_scenario(corpus(), id);
    REQUIRE(s != nullptr);
    return *s;
}

const MessageCatalog& cat() { return MessageCatalog::builtin(); }

std::string answer_text() {
    return render_response(AgentAction{"wrapping up", Answer{"Done."}});
}

std::string batch_text(std::vector<ToolCall> calls) {
    return render_response(AgentAction{"executing", ToolCallBatch{std::move(calls)}});
}

CandidateSet cands_at(const EpisodeSession& s) {
    const Observation& obs = s.observation();
    return propose_candidates(obs, *obs.registry, s.scenario());
}

// Index of the candidate matching name+arguments exactly, or -1.
int find_call(const CandidateSet& set, const std::string& name, const json& args) {
    for (size_t i = 0; i < set.items.size(); ++i) {
        const auto* b = set.items[i].action.batch();
        if (!b || b->calls.size() != 1) continue;
        if (b->calls[0].name == name && b->calls[0].arguments == args) return int(i);
    }
    return -1;
}

// First candidate for the named tool, or -1.
int find_tool(const CandidateSet& set, const std::string& name) {
    for (size_t i = 0; i < set.items.size(); ++i) {
        const auto* b = set.items[i].action.batch();
        if (b && b->calls.size() == 1 && b->calls[0].name == name) return int(i);
    }
    return -1;
}

// Drive the first `turns` turns of a scenario with its ground-truth calls.
void drive_ground_truth(EpisodeSession& s, int turns) {
    for (int t = 0; t < turns; ++t) {
        const auto& gt = s.scenario().turns[t].ground_truth_calls;
        if (!gt.empty()) s.step(batch_text(gt));
        s.step(answer_text());
    }
}

// ---- synthetic candidate sets for the math tests ----

CandidateSet synth_set(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CandidateSet set;
    for (int i = 0; i < n; ++i) {
        Candidate c;
        c.action = AgentAction{"t", Answer{"x"}};
        c.features.resize(kNumFeatures);
        for (auto& f : c.features) f = u(rng);
        c.label = "synthetic-" + std::to_string(i);
        set.items.push_back(std::move(c));
    }
    return set;
}

PolicyParams rand_params(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    PolicyParams p;
    for (auto& w : p.w) w = n(rng);
    return p;
}

PolicyParams add_noise(const PolicyParams& base, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    PolicyParams p = base;
    for (auto& w : p.w) w += n(rng);
    return p;
}

std::vector<double> fd_gradient(const GroupRollout& g, const PolicyParams& params,
                                const PolicyParams& ref, const OptimConfig& cfg,
                                double h = 1e-6) {
    std::vector<double> fd(kNumFeatures);
    for (int k = 0; k < kNumFeatures; ++k) {
        PolicyParams hi = params, lo = params;
        hi.w[k] += h;
        lo.w[k] -= h;
        fd[k] = (surrogate_loss(g, hi, ref, cfg) - surrogate_loss(g, lo, ref, cfg)) / (2 * h);
    }
    return fd;
}

double rel_grad_err(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0, norm = 0;
    for (int k = 0; k < kNumFeatures; ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        norm += a[k] * a[k];
    }
    return std::sqrt(diff) / std::max(1e-12, std::sqrt(norm));
}

}  // namespace

TEST_CASE("candidate sets: structure, answer slot, feature ranges") {
    for (const Scenario& s : corpus()) {
        EpisodeSession session(s, FeedbackMode::Augmented, cat());
        CandidateSet set = cands_at(session);
        REQUIRE(set.items.size() >= 2);
        REQUIRE(set.items.size() <= 64);
        const Candidate& ans = set.items[0];
        CHECK(ans.action.is_answer());
        CHECK(ans.features.size() == size_t(kNumFeatures));
        CHECK(ans.features[kFeatIsAnswer] == 1.0);
        CHECK(ans.features[kFeatHintMatch] == 0.0);  // no error yet
        for (size_t i = 1; i < set.items.size(); ++i) {
            const Candidate& c = set.items[i];
            REQUIRE(c.features.size() == size_t(kNumFeatures));
            CHECK_FALSE(c.action.is_answer());
            const auto* b = c.action.batch();
            REQUIRE(b != nullptr);
            REQUIRE(b->calls.size() == 1);
            // Registered candidates satisfy this turn's registry; unregistered
            // ones come from the wider catalog (an in-domain tool the agent
            // might plausibly try even though this turn does not offer it).
            CallClass cls = classify_call(b->calls[0], *session.observation().registry);
            if (c.features[kFeatRegistered] == 1.0) {
                // The schema feature mirrors the classifier: filled templates
                // validate, bare probe calls surface as argument errors.
                CHECK(cls == (c.features[kFeatSchemaValid] == 1.0 ? CallClass::Correct
                                                                  : CallClass::BadArgs));
            } else {
                CHECK(cls == CallClass::UnknownTool);
                CHECK(classify_call(b->calls[0], builtin_tools()) == CallClass::Correct);
                CHECK(c.features[kFeatSchemaValid] == 1.0);
            }
            CHECK(c.features[kFeatIsAnswer] == 0.0);
            for (double f : c.features) {
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
            }
            CHECK_FALSE(c.label.empty());
        }
    }
}

TEST_CASE("candidate extraction covers ground-truth calls (filesystem)") {
    EpisodeSession s(sc("fs-cleanup"), FeedbackMode::Augmented, cat());
    CandidateSet set = cands_at(s);
    CHECK(find_call(set, "cd", {{"folder", "SuperResearch"}}) >= 0);
    CHECK(find_call(set, "cd", {{"folder", ".."}}) >= 0);
    CHECK(find_call(set, "rm", {{"file_name", "findings_report"}}) >= 0);
    CHECK(find_call(set, "rmdir", {{"dir_name", "SuperResearch"}}) >= 0);
}

TEST_CASE("candidate extraction covers ground-truth calls (travel chain)") {
    const Scenario& scn = sc("travel-book-tweet");
    EpisodeSession s(scn, FeedbackMode::Augmented, cat());

    CandidateSet set = cands_at(s);
    json quote_args = {{"travel_from", "RMS"},
                       {"travel_to", "LAX"},
                       {"travel_date", "2024-11-15"},
                       {"travel_class", "business"}};
    CHECK(find_call(set, "get_flight_cost", quote_args) >= 0);
    CHECK(find_tool(set, "book_flight") == -1);  // no quote yet, nothing to book

    // After a successful quote the book candidate reproduces the ground-truth
    // arguments exactly (credentials + quoted cost + quote parameters).
    s.step(batch_text({ToolCall{"get_flight_cost", quote_args}}));
    set = cands_at(s);
    const auto& gt0 = scn.turns[0].ground_truth_calls;
    json book_args = gt0.back().arguments;
    REQUIRE(gt0.back().name == "book_flight");
    CHECK(find_call(set, "book_flight", book_args) >= 0);

    // Book, answer, then the cancel candidate picks up the booking id payload.
    s.step(batch_text({ToolCall{"book_flight", book_args}}));
    s.step(answer_text());
    set = cands_at(s);
    json cancel_args = scn.turns[1].ground_truth_calls.at(0).arguments;
    CHECK(find_call(set, "cancel_booking", cancel_args) >= 0);
}

TEST_CASE("candidate extraction covers ground-truth calls (social)") {
    const Scenario& scn = sc("travel-book-tweet");
    EpisodeSession s(scn, FeedbackMode::Augmented, cat());
    drive_ground_truth(s, 2);  // book+cancel turns

    // Turn 2: authenticate + post; content comes from the quoted span.
    CandidateSet set = cands_at(s);
    CHECK(find_call(set, "authenticate_twitter",
                    {{"username", "michael_t"}, {"password", "michaelSecurePass123"}}) >= 0);
    CHECK(find_call(set, "post_tweet",
                    {{"content", "Just booked a flight to Los Angeles! Excited for the trip."}}) >=
          0);

    const auto& gt2 = scn.turns[2].ground_truth_calls;
    s.step(batch_text(gt2));
    s.step(answer_text());

    // Turn 3: "retweet that post" carries no id; it must come from the post payload.
    set = cands_at(s);
    CHECK(find_call(set, "retweet", {{"tweet_id", 1}}) >= 0);
}

TEST_CASE("candidate extraction: tags, mentions, doors, numbers") {
    {
        EpisodeSession s(sc("social-brand-day"), FeedbackMode::Augmented, cat());
        drive_ground_truth(s, 1);  // log in
        CandidateSet set = cands_at(s);
        CHECK(find_call(set, "post_tweet",
                        {{"content", "Launching our community garden project this weekend!"},
                         {"tags", json::array({"#garden", "#community"})}}) >= 0);
    }
    {
        EpisodeSession s(sc("lc-social-launch"), FeedbackMode::Augmented, cat());
        drive_ground_truth(s, 1);
        CandidateSet set = cands_at(s);
        json args = sc("lc-social-launch").turns[1].ground_truth_calls.at(0).arguments;
        CHECK(find_call(set, "post_tweet", args) >= 0);  // tags + mentions variant
    }
    {
        EpisodeSession s(sc("mp-vehicle-lock"), FeedbackMode::Augmented, cat());
        drive_ground_truth(s, 1);
        CandidateSet set = cands_at(s);
        CHECK(find_call(set, "lockDoors",
                        {{"unlock", true}, {"door", json::array({"passenger", "rear_left"})}}) >=
              0);
    }
    {
        EpisodeSession s(sc("lc-vehicle-budget"), FeedbackMode::Augmented, cat());
        CandidateSet set = cands_at(s);
        // mean() must collect exactly the request's numbers, not digits from the
        // long distractor bulletins earlier in the message.
        CHECK(find_call(set, "mean",
                        {{"numbers", json::array({12.5, 8.0, 14.25, 9.75})}}) >= 0);
    }
    {
        EpisodeSession s(sc("vehicle-trip-prep"), FeedbackMode::Augmented, cat());
        CandidateSet set = cands_at(s);
        CHECK(find_call(set, "get_zipcode_based_on_city", {{"city", "Rivermist"}}) >= 0);
        CHECK(find_call(set, "get_zipcode_based_on_city", {{"city", "San Francisco"}}) >= 0);
        // Zipcodes only exist in payloads; after the lookups the distance
        // candidate pairs them up.
        s.step(batch_text({ToolCall{"get_zipcode_based_on_city", {{"city", "Rivermist"}}},
                           ToolCall{"get_zipcode_based_on_city", {{"city", "San Francisco"}}}}));
        set = cands_at(s);
        bool either_order =
            find_call(set, "estimate_distance", {{"cityA", "83214"}, {"cityB", "94016"}}) >= 0 ||
            find_call(set, "estimate_distance", {{"cityA", "94016"}, {"cityB", "83214"}}) >= 0;
        CHECK(either_order);
    }
    {
        // Number drawn from the user text for the feasibility estimate.
        EpisodeSession s(sc("vehicle-trip-prep"), FeedbackMode::Augmented, cat());
        drive_ground_truth(s, 1);
        CandidateSet set = cands_at(s);
        CHECK(find_call(set, "estimate_drive_feasibility_by_mileage", {{"distance", 980}}) >= 0);
    }
}

TEST_CASE("intent and argument-context features") {
    EpisodeSession s(sc("fs-cleanup"), FeedbackMode::Augmented, cat());
    CandidateSet set = cands_at(s);

    int rm = find_call(set, "rm", {{"file_name", "findings_report"}});
    REQUIRE(rm >= 0);
    CHECK(set.items[rm].features[kFeatIntentMatch] == 1.0);   // "get rid" / "clear"
    CHECK(set.items[rm].features[kFeatArgsInContext] == 1.0); // name appears verbatim

    int up = find_call(set, "cd", {{"folder", ".."}});
    REQUIRE(up >= 0);
    CHECK(set.items[up].features[kFeatArgsInContext] < 1.0);  // ".." not in the text

    // Tool name verbatim counts as intent: the injected-tool note names `find`.
    EpisodeSession mf(sc("mf-fs-find"), FeedbackMode::Augmented, cat());
    drive_ground_truth(mf, 1);
    CandidateSet set2 = cands_at(mf);
    int fd = find_tool(set2, "find");
    REQUIRE(fd >= 0);
    CHECK(set2.items[fd].features[kFeatIntentMatch] == 1.0);
}

TEST_CASE("dependency feature gates engine start and posting") {
    {
        EpisodeSession s(sc("vehicle-trip-prep"), FeedbackMode::Augmented, cat());
        drive_ground_truth(s, 3);
        CandidateSet set = cands_at(s);  // turn 3: lock + start
        int start = find_call(set, "startEngine", {{"ignitionMode", "START"}});
        int brake = find_call(set, "pressBrakePedal", {{"pedalPosition", 1.0}});
        REQUIRE(start >= 0);
        REQUIRE(brake >= 0);
        CHECK(set.items[start].features[kFeatDepOk] == 0.0);
        CHECK(set.items[brake].features[kFeatDepOk] == 1.0);

        s.step(batch_text({ToolCall{"pressBrakePedal", {{"pedalPosition", 1.0}}}}));
        set = cands_at(s);
        start = find_call(set, "startEngine", {{"ignitionMode", "START"}});
        REQUIRE(start >= 0);
        CHECK(set.items[start].features[kFeatDepOk] == 1.0);
    }
    {
        // Auth state is invisible in the dialogue, so the feature is
        // optimistic: posting looks fine until the feed refuses a call, and
        // recovers once a login succeeds.
        EpisodeSession s(sc("social-brand-day"), FeedbackMode::Augmented, cat());
        s.step(answer_text());  // skip the login turn without authenticating
        CandidateSet set = cands_at(s);
        int post = find_tool(set, "post_tweet");
        REQUIRE(post >= 0);
        CHECK(set.items[post].features[kFeatDepOk] == 1.0);  // nothing refuted yet

        s.step(batch_text({ToolCall{"post_tweet", {{"content", "hi"}}}}));  // rejected
        set = cands_at(s);
        post = find_tool(set, "post_tweet");
        int auth = find_tool(set, "authenticate_twitter");
        REQUIRE(post >= 0);
        REQUIRE(auth >= 0);
        CHECK(set.items[post].features[kFeatDepOk] == 0.0);
        CHECK(set.items[auth].features[kFeatDepOk] == 1.0);

        s.step(batch_text({ToolCall{
            "authenticate_twitter",
            {{"username", "maya_r"}, {"password", "mayaPass!9"}}}}));
        set = cands_at(s);
        post = find_tool(set, "post_tweet");
        REQUIRE(post >= 0);
        CHECK(set.items[post].features[kFeatDepOk] == 1.0);
    }
}

TEST_CASE("hint feature fires on augmented feedback only") {
    auto hint_of = [](FeedbackMode mode, const std::string& scenario_id,
                      const std::vector<ToolCall>& probe, int drive_turns,
                      const std::string& tool) {
        EpisodeSession s(sc(scenario_id), mode, cat());
        drive_ground_truth(s, drive_turns);
        s.step(batch_text(probe));
        CandidateSet set = cands_at(s);
        int i = tool == "<answer>" ? 0 : find_tool(set, tool);
        REQUIRE(i >= 0);
        return set.items[i].features[kFeatHintMatch];
    };

    // Unknown tool this turn -> augmented feedback suggests answering/waiting.
    std::vector<ToolCall> unavailable = {ToolCall{
        "get_flight_cost",
        {{"travel_from", "AUS"}, {"travel_to", "MIA"}, {"travel_date", "2025-01-20"},
         {"travel_class", "economy"}}}};
    CHECK(hint_of(FeedbackMode::Augmented, "mf-travel-cost", unavailable, 0, "<answer>") == 1.0);
    CHECK(hint_of(FeedbackMode::Standard, "mf-travel-cost", unavailable, 0, "<answer>") == 0.0);

    // Invalid airport code -> augmented names the airport-lookup tool.
    std::vector<ToolCall> bad_codes = {ToolCall{
        "get_flight_cost",
        {{"travel_from", "CRH"}, {"travel_to", "PNH"}, {"travel_date", "2024-03-03"},
         {"travel_class", "business"}}}};
    CHECK(hint_of(FeedbackMode::Augmented, "travel-nearest-airport", bad_codes, 2,
                  "get_nearest_airport_by_city") == 1.0);
    CHECK(hint_of(FeedbackMode::Standard, "travel-nearest-airport", bad_codes, 2,
                  "get_nearest_airport_by_city") == 0.0);

    // Engine start without brake -> augmented names pressBrakePedal.
    std::vector<ToolCall> start = {ToolCall{"startEngine", {{"ignitionMode", "START"}}}};
    CHECK(hint_of(FeedbackMode::Augmented, "vehicle-trip-prep", start, 3, "pressBrakePedal") ==
          1.0);
    CHECK(hint_of(FeedbackMode::Standard, "vehicle-trip-prep", start, 3, "pressBrakePedal") ==
          0.0);

    // Posting without auth -> augmented names authenticate_twitter.  (Answer
    // through the login turn so the account is still unauthenticated.)
    for (FeedbackMode mode : {FeedbackMode::Augmented, FeedbackMode::Standard}) {
        EpisodeSession s(sc("social-brand-day"), mode, cat());
        s.step(answer_text());
        s.step(batch_text({ToolCall{"post_tweet", {{"content", "hi"}}}}));
        CandidateSet set = cands_at(s);
        int i = find_tool(set, "authenticate_twitter");
        REQUIRE(i >= 0);
        CHECK(set.items[i].features[kFeatHintMatch] ==
              (mode == FeedbackMode::Augmented ? 1.0 : 0.0));
    }

    // Unknown zipcode pair -> augmented points at the zipcode lookup.
    std::vector<ToolCall> bad_zip = {
        ToolCall{"estimate_distance", {{"cityA", "11111"}, {"cityB", "22222"}}}};
    CHECK(hint_of(FeedbackMode::Augmented, "vehicle-trip-prep", bad_zip, 0,
                  "get_zipcode_based_on_city") == 1.0);
    CHECK(hint_of(FeedbackMode::Standard, "vehicle-trip-prep", bad_zip, 0,
                  "get_zipcode_based_on_city") == 0.0);
}

TEST_CASE("repeat features track failures and successes within a turn") {
    EpisodeSession s(sc("fs-cleanup"), FeedbackMode::Augmented, cat());
    json rm_args = {{"file_name", "findings_report"}};

    s.step(batch_text({ToolCall{"rm", rm_args}}));  // fails: file is inside SuperResearch
    CandidateSet set = cands_at(s);
    int rm = find_call(set, "rm", rm_args);
    REQUIRE(rm >= 0);
    CHECK(set.items[rm].features[kFeatRepeatsFailed] == 1.0);
    CHECK(set.items[rm].features[kFeatRepeatsSucceeded] == 0.0);

    // A read-only success does not clear the flag...
    s.step(batch_text({ToolCall{"ls", json::object()}}));
    set = cands_at(s);
    rm = find_call(set, "rm", rm_args);
    REQUIRE(rm >= 0);
    CHECK(set.items[rm].features[kFeatRepeatsFailed] == 1.0);

    // ...but a state-changing success does: the world moved on.
    s.step(batch_text({ToolCall{"cd", {{"folder", "SuperResearch"}}}}));
    set = cands_at(s);
    rm = find_call(set, "rm", rm_args);
    REQUIRE(rm >= 0);
    CHECK(set.items[rm].features[kFeatRepeatsFailed] == 0.0);

    s.step(batch_text({ToolCall{"rm", rm_args}}));  // succeeds now
    set = cands_at(s);
    rm = find_call(set, "rm", rm_args);
    REQUIRE(rm >= 0);
    CHECK(set.items[rm].features[kFeatRepeatsSucceeded] == 1.0);
    CHECK(set.items[rm].features[kFeatRepeatsFailed] == 0.0);
}

TEST_CASE("softmax at zero weights is uniform; entropy matches") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 7}) {
        CandidateSet set = synth_set(rng, n);
        PolicyParams p;  // zeros
        auto probs = softmax_probs(p, set);
        REQUIRE(probs.size() == size_t(n));
        for (double q : probs) CHECK(q == doctest::Approx(1.0 / n).epsilon(1e-12));
        for (int i = 0; i < n; ++i)
            CHECK(action_logprob(p, set, i) == doctest::Approx(-std::log(double(n))).epsilon(1e-12));
        CHECK(categorical_entropy(probs) == doctest::Approx(std::log(double(n))).epsilon(1e-12));
    }
}

TEST_CASE("log-probability gradient matches finite differences") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> nd(2, 6);
    for (int it = 0; it < 40; ++it) {
        CandidateSet set = synth_set(rng, nd(rng));
        PolicyParams p = rand_params(rng, 1.0);
        int chosen = int(it % set.items.size());
        std::vector<double> grad;
        double lp = action_logprob(p, set, chosen, &grad);
        CHECK(std::isfinite(lp));
        REQUIRE(grad.size() == size_t(kNumFeatures));
        const double h = 1e-6;
        for (int k = 0; k < kNumFeatures; ++k) {
            PolicyParams hi = p, lo = p;
            hi.w[k] += h;
            lo.w[k] -= h;
            double fd = (action_logprob(hi, set, chosen) - action_logprob(lo, set, chosen)) / (2 * h);
            CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5));
        }
        // Expected gradient over the policy's own distribution is zero.
        auto probs = softmax_probs(p, set);
        std::vector<double> esum(kNumFeatures, 0.0);
        for (size_t i = 0; i < set.items.size(); ++i) {
            std::vector<double> gi;
            action_logprob(p, set, int(i), &gi);
            for (int k = 0; k < kNumFeatures; ++k) esum[k] += probs[i] * gi[k];
        }
        for (int k = 0; k < kNumFeatures; ++k) CHECK(std::abs(esum[k]) < 1e-12);
    }
}

TEST_CASE("softmax is invariant to weights on a shared constant feature") {
    std::mt19937_64 rng(13);
    CandidateSet set = synth_set(rng, 4);
    for (auto& c : set.items) c.features[0] = 1.0;  // constant across candidates
    PolicyParams p = rand_params(rng, 0.7);
    auto before = softmax_probs(p, set);
    p.w[0] += 3.25;
    auto after = softmax_probs(p, set);
    for (int i = 0; i < 4; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("group advantages: frozen examples, zero mean, scale exactness") {
    {
        auto a = group_advantages({1.0, 0.0}, 1e-8);
        double x = 0.5 / (0.5 + 1e-8);
        CHECK(a[0] == doctest::Approx(x).epsilon(1e-15));
        CHECK(a[1] == doctest::Approx(-x).epsilon(1e-15));
        CHECK(std::abs(a[0] - 1.0) < 1e-7);  // 0.99999998...
    }
    {
        auto a = group_advantages({1.0, 1.0, 0.0, 0.0}, 1e-8);
        CHECK(std::abs(a[0] - 1.0) < 1e-7);
        CHECK(std::abs(a[1] - 1.0) < 1e-7);
        CHECK(std::abs(a[2] + 1.0) < 1e-7);
        CHECK(std::abs(a[3] + 1.0) < 1e-7);
    }
    {
        auto a = group_advantages({0.25, 0.25, 0.25}, 1e-8);
        for (double v : a) CHECK(v == 0.0);
    }
    {
        std::mt19937_64 rng(14);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> r(8);
        for (auto& v : r) v = u(rng);
        auto a = group_advantages(r, 1e-8);
        double mean = 0;
        for (double v : a) mean += v;
        CHECK(std::abs(mean / double(a.size())) <= 1e-12);
    }
    {
        // Doubling rewards and the stabilizer leaves advantages bit-identical.
        std::vector<double> r = {1.0, 0.0, 0.0, 1.0, 0.5, 0.25, 0.75, 0.125};
        std::vector<double> r2 = r;
        for (auto& v : r2) v *= 2.0;
        auto a = group_advantages(r, 1e-8);
        auto b = group_advantages(r2, 2e-8);
        for (size_t i = 0; i < r.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("surrogate loss at the sampling parameters: unit ratios, zero KL") {
    std::mt19937_64 rng(15);
    OptimConfig cfg;
    CandidateSet s1 = synth_set(rng, 3), s2 = synth_set(rng, 4);
    PolicyParams p = rand_params(rng, 0.8);

    GroupRollout g;
    g.scenario_id = "synthetic";
    g.rewards = {1.0, 0.0};
    g.samples.resize(2);
    g.samples[0].push_back({s1, 1, action_logprob(p, s1, 1)});
    g.samples[1].push_back({s2, 2, action_logprob(p, s2, 2)});

    double kl = -1;
    double loss = surrogate_loss(g, p, p, cfg, nullptr, &kl);
    CHECK(kl == 0.0);
    auto adv = group_advantages(g.rewards, cfg.eps_a);
    CHECK(loss == doctest::Approx(-(adv[0] + adv[1]) / 2.0).epsilon(1e-12));
}

TEST_CASE("clipping zeroes the policy-gradient term in the clipped regions") {
    std::mt19937_64 rng(16);
    OptimConfig cfg;
    cfg.beta = 0.0;
    CandidateSet s1 = synth_set(rng, 3), s2 = synth_set(rng, 4);
    PolicyParams p = rand_params(rng, 0.8);

    GroupRollout g;
    g.scenario_id = "synthetic";
    g.rewards = {1.0, 0.0};  // advantages + / -
    g.samples.resize(2);
    // ratio = exp(logp_now - logp_old): force 1.5 (> 1.28) and 0.7 (< 0.8).
    g.samples[0].push_back({s1, 1, action_logprob(p, s1, 1) - std::log(1.5)});
    g.samples[1].push_back({s2, 2, action_logprob(p, s2, 2) - std::log(0.7)});

    std::vector<double> grad;
    double loss = surrogate_loss(g, p, p, cfg, &grad);
    CHECK(std::isfinite(loss));
    for (int k = 0; k < kNumFeatures; ++k) CHECK(grad[k] == 0.0);

    // Pessimistic side: positive advantage with a small ratio (and negative
    // advantage with a large ratio) stays unclipped, so gradient flows.
    GroupRollout g2 = g;
    g2.samples[0][0].logp_old = action_logprob(p, s1, 1) - std::log(0.7);
    g2.samples[1][0].logp_old = action_logprob(p, s2, 2) - std::log(1.5);
    surrogate_loss(g2, p, p, cfg, &grad);
    double norm = 0;
    for (double v : grad) norm += v * v;
    CHECK(norm > 1e-8);
    auto fd = fd_gradient(g2, p, p, cfg);
    CHECK(rel_grad_err(grad, fd) <= 1e-5);
}

TEST_CASE("surrogate gradient matches central finite differences (h=1e-6)") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> cand_n(2, 5), traj_n(2, 4), step_n(1, 3);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    OptimConfig cfg;

    int upper_clip_seen = 0, lower_clip_seen = 0, instances = 0, guard = 0;
    while (instances < 120 && guard < 4000) {
        ++guard;
        PolicyParams old_p = rand_params(rng, 0.8);
        double spread = (instances % 2 == 0) ? 0.05 : 0.6;
        PolicyParams p = add_noise(old_p, rng, spread);
        PolicyParams ref = add_noise(old_p, rng, 0.3);

        GroupRollout g;
        g.scenario_id = "synthetic";
        int T = traj_n(rng);
        g.samples.resize(T);
        g.rewards.resize(T);
        for (int t = 0; t < T; ++t) g.rewards[t] = std::round(ur(rng) * 4.0) / 4.0;
        bool all_equal = true;
        for (int t = 1; t < T; ++t) all_equal = all_equal && g.rewards[t] == g.rewards[0];
        if (all_equal) continue;
        for (int t = 0; t < T; ++t) {
            int S = step_n(rng);
            for (int s = 0; s < S; ++s) {
                CandidateSet set = synth_set(rng, cand_n(rng));
                int chosen = int(rng() % set.items.size());
                g.samples[t].push_back({set, chosen, action_logprob(old_p, set, chosen)});
            }
        }

        // Reject instances with ratios near the clip kinks where the loss is
        // not differentiable; count clip activity on the rest.
        bool near_kink = false, upper = false, lower = false;
        auto adv = group_advantages(g.rewards, cfg.eps_a);
        for (int t = 0; t < T; ++t) {
            for (const StepSample& ss : g.samples[t]) {
                double r = std::exp(action_logprob(p, ss.cands, ss.chosen) - ss.logp_old);
                if (std::abs(r - (1 - cfg.eps_low)) < 1e-3 ||
                    std::abs(r - (1 + cfg.eps_high)) < 1e-3)
                    near_kink = true;
                if (adv[t] > 0 && r > 1 + cfg.eps_high) upper = true;
                if (adv[t] < 0 && r < 1 - cfg.eps_low) lower = true;
            }
        }
        if (near_kink) continue;

        std::vector<double> grad;
        double loss = surrogate_loss(g, p, ref, cfg, &grad);
        REQUIRE(std::isfinite(loss));
        auto fd = fd_gradient(g, p, ref, cfg);
        CHECK(rel_grad_err(grad, fd) <= 1e-5);

        upper_clip_seen += upper ? 1 : 0;
        lower_clip_seen += lower ? 1 : 0;
        ++instances;
    }
    REQUIRE(instances >= 120);
    CHECK(upper_clip_seen >= 10);
    CHECK(lower_clip_seen >= 10);
}

TEST_CASE("KL penalty is nonnegative and zero only at the reference") {
    std::mt19937_64 rng(18);
    OptimConfig cfg;
    cfg.beta = 1.0;
    for (int it = 0; it < 30; ++it) {
        CandidateSet set = synth_set(rng, 4);
        PolicyParams p = rand_params(rng, 1.0);
        PolicyParams ref = (it % 5 == 0) ? p : rand_params(rng, 1.0);

        GroupRollout g;
        g.scenario_id = "synthetic";
        g.rewards = {1.0, 0.0};
        g.samples.resize(2);
        g.samples[0].push_back({set, 0, action_logprob(p, set, 0)});
        g.samples[1].push_back({set, 1, action_logprob(p, set, 1)});

        double kl = -1;
        surrogate_loss(g, p, ref, cfg, nullptr, &kl);
        if (it % 5 == 0) {
            CHECK(kl == 0.0);
        } else {
            CHECK(kl >= 0.0);
        }
    }
}

TEST_CASE("train_step: no-op on uniform rewards, improves winner otherwise") {
    std::mt19937_64 rng(19);
    OptimConfig cfg;

    {
        cfg.beta = 0.0;
        CandidateSet set = synth_set(rng, 3);
        PolicyParams p = rand_params(rng, 0.5);
        PolicyParams before = p;
        GroupRollout g;
        g.scenario_id = "synthetic";
        g.rewards = {0.5, 0.5};
        g.samples.resize(2);
        g.samples[0].push_back({set, 0, action_logprob(p, set, 0)});
        g.samples[1].push_back({set, 1, action_logprob(p, set, 1)});
        StepDiagnostics d = train_step(p, {g}, before, cfg);
        CHECK(p.w == before.w);
        CHECK(d.grad_norm == 0.0);
        CHECK(d.mean_reward == 0.5);
    }

    {
        cfg = OptimConfig{};
        // Two one-hot candidates; the winning trajectory chose candidate 0.
        CandidateSet set;
        for (int i = 0; i < 2; ++i) {
            Candidate c;
            c.action = AgentAction{"t", Answer{"x"}};
            c.features.assign(kNumFeatures, 0.0);
            c.features[i] = 1.0;
            c.label = "onehot";
            set.items.push_back(c);
        }
        PolicyParams p;  // uniform start
        GroupRollout g;
        g.scenario_id = "synthetic";
        g.rewards = {1.0, 0.0};
        g.samples.resize(2);
        g.samples[0].push_back({set, 0, action_logprob(p, set, 0)});
        g.samples[1].push_back({set, 1, action_logprob(p, set, 1)});

        double p0_before = softmax_probs(p, set)[0];
        StepDiagnostics d = train_step(p, {g}, PolicyParams{}, cfg);
        double p0_after = softmax_probs(p, set)[0];
        CHECK(p0_after > p0_before);
        CHECK(std::isfinite(d.loss));
        CHECK(d.grad_norm > 0.0);
        CHECK(d.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-9));
        CHECK(d.mean_kl == 0.0);
        CHECK(d.mean_reward == 0.5);
    }

    {
        // Batch loss is the mean over groups.
        cfg = OptimConfig{};
        std::mt19937_64 r2(20);
        PolicyParams p = rand_params(r2, 0.4);
        PolicyParams ref = rand_params(r2, 0.4);
        auto mk = [&](int seed) {
            std::mt19937_64 r3(seed);
            CandidateSet set = synth_set(r3, 3);
            GroupRollout g;
            g.scenario_id = "synthetic";
            g.rewards = {1.0, 0.25};
            g.samples.resize(2);
            g.samples[0].push_back({set, 0, action_logprob(p, set, 0) - 0.05});
            g.samples[1].push_back({set, 1, action_logprob(p, set, 1) + 0.05});
            return g;
        };
        GroupRollout a = mk(1), b = mk(2);
        double la = surrogate_loss(a, p, ref, cfg);
        double lb = surrogate_loss(b, p, ref, cfg);
        PolicyParams px = p;
        StepDiagnostics d = train_step(px, {a, b}, ref, cfg);
        CHECK(d.loss == doctest::Approx((la + lb) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("train_step raises NonFinite and leaves parameters untouched") {
    OptimConfig cfg;
    std::mt19937_64 rng(21);
    CandidateSet set = synth_set(rng, 3);
    PolicyParams p = rand_params(rng, 0.5);
    PolicyParams before = p;

    GroupRollout g;
    g.scenario_id = "synthetic";
    g.rewards = {1.0, 0.0};
    g.samples.resize(2);
    g.samples[0].push_back({set, 0, action_logprob(p, set, 0)});
    g.samples[1].push_back({set, 1, action_logprob(p, set, 1)});

    GroupRollout bad_feature = g;
    bad_feature.samples[0][0].cands.items[1].features[2] =
        std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train_step(p, {bad_feature}, before, cfg), NonFinite);
    CHECK(p.w == before.w);

    GroupRollout bad_reward = g;
    bad_reward.rewards[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train_step(p, {bad_reward}, before, cfg), NonFinite);
    CHECK(p.w == before.w);
}

TEST_CASE("rollout groups are deterministic and scored consistently") {
    const Scenario& scn = sc("mf-travel-cost");
    PolicyParams p;  // zero weights
    OptimConfig cfg;
    cfg.group_size = 4;

    std::vector<Trajectory> trajs1, trajs2;
    GroupRollout a = rollout_group(scn, p, FeedbackMode::Augmented, cat(),
                                   RewardKind::Progress, cfg, 7, &trajs1);
    GroupRollout b = rollout_group(scn, p, FeedbackMode::Augmented, cat(),
                                   RewardKind::Progress, cfg, 7, &trajs2);
    CHECK(a.scenario_id == scn.id);
    REQUIRE(a.samples.size() == 4);
    REQUIRE(a.rewards.size() == 4);
    CHECK(a.rewards == b.rewards);
    for (int t = 0; t < 4; ++t) {
        REQUIRE(a.samples[t].size() == b.samples[t].size());
        for (size_t s = 0; s < a.samples[t].size(); ++s) {
            CHECK(a.samples[t][s].chosen == b.samples[t][s].chosen);
            // Stored behavior log-prob matches the sampling parameters.
            CHECK(a.samples[t][s].logp_old ==
                  doctest::Approx(action_logprob(p, a.samples[t][s].cands,
                                                 a.samples[t][s].chosen))
                      .epsilon(1e-12));
        }
    }
    REQUIRE(trajs1.size() == 4);
    for (int t = 0; t < 4; ++t) {
        CHECK(a.rewards[t] ==
              doctest::Approx(trajectory_reward(trajs1[t], scn, cat(), RewardKind::Progress))
                  .epsilon(1e-12));
        CHECK(a.samples[t].size() == trajs1[t].steps.size());
    }

    GroupRollout c = rollout_group(scn, p, FeedbackMode::Augmented, cat(),
                                   RewardKind::Progress, cfg, 8, &trajs1);
    bool differs = c.rewards != a.rewards;
    for (int t = 0; !differs && t < 4; ++t) {
        if (c.samples[t].size() != a.samples[t].size()) differs = true;
        for (size_t s = 0; !differs && s < c.samples[t].size(); ++s)
            if (c.samples[t][s].chosen != a.samples[t][s].chosen) differs = true;
    }
    CHECK(differs);  // a different seed explores differently
}

TEST_CASE("softmax policy: greedy determinism and parameter-driven behavior") {
    const Scenario& scn = sc("fs-cleanup");

    // Greedy with zero weights ties at the Answer candidate (lowest index):
    // every turn is answered immediately, independent of the RNG.
    PolicyParams zero;
    SoftmaxPolicy greedy(zero, scn, /*greedy=*/true);
    std::mt19937_64 r1(100), r2(2222);
    Trajectory t1 = run_episode(greedy, scn, FeedbackMode::Augmented, cat(), 20, r1);
    SoftmaxPolicy greedy2(zero, scn, true);
    Trajectory t2 = run_episode(greedy2, scn, FeedbackMode::Augmented, cat(), 20, r2);
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (size_t i = 0; i < t1.steps.size(); ++i) CHECK(t1.steps[i].raw == t2.steps[i].raw);
    CHECK(t1.termination == Termination::Completed);
    CHECK(t1.steps.size() == size_t(scn.num_turns()));
    for (const auto& st : t1.steps) CHECK(st.is_answer);

    // A strong positive answer weight makes sampled rollouts answer-only too.
    PolicyParams answerish;
    answerish.w[kFeatIsAnswer] = 50.0;
    std::mt19937_64 r3(5);
    SoftmaxPolicy sampler(answerish, scn, false);
    Trajectory t3 = run_episode(sampler, scn, FeedbackMode::Augmented, cat(), 20, r3);
    CHECK(t3.termination == Termination::Completed);
    for (const auto& st : t3.steps) CHECK(st.is_answer);

    // A strong negative answer weight never answers: the budget runs out.
    PolicyParams callish;
    callish.w[kFeatIsAnswer] = -50.0;
    std::mt19937_64 r4(6);
    SoftmaxPolicy sampler2(callish, scn, false);
    Trajectory t4 = run_episode(sampler2, scn, FeedbackMode::Augmented, cat(), 10, r4);
    CHECK(t4.termination == Termination::StepBudgetExhausted);
    CHECK(t4.steps.size() == 10);
}
