// SPDX-License-Identifier: Apache-2.0
#include "toolgym/optim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>

namespace toolgym {

namespace {

// ---------------------------------------------------------------------------
// Shared small helpers

constexpr size_t kNoPos = std::numeric_limits<size_t>::max();

std::string lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// Word-boundary search: `word` must not be flanked by [a-z0-9_].  Returns the
// first boundary-respecting position, or kNoPos.
size_t find_word_pos(const std::string& hay, const std::string& word) {
    auto wordish = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    for (size_t pos = hay.find(word); pos != std::string::npos; pos = hay.find(word, pos + 1)) {
        bool left_ok = pos == 0 || !wordish(hay[pos - 1]);
        size_t end = pos + word.size();
        bool right_ok = end >= hay.size() || !wordish(hay[end]);
        if (left_ok && right_ok) return pos;
    }
    return kNoPos;
}

bool contains_word(const std::string& hay, const std::string& word) {
    return find_word_pos(hay, word) != kNoPos;
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Text scanning.  Only the tail of a message (after the last blank line) is
// scanned: the actual request follows any forwarded bulletins, so long
// padded messages do not pollute the extraction pools.

bool is_date_token(const std::string& t) {
    if (t.size() != 10 || t[4] != '-' || t[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
}

const std::set<std::string>& capital_stopwords() {
    static const std::set<std::string> k = {
        "A",      "An",     "The",     "I",       "It",      "Is",     "Are",
        "This",   "That",   "These",   "Those",   "Now",     "Then",   "Next",
        "Last",   "First",  "Second",  "Before",  "After",   "Please", "Also",
        "And",    "But",    "Or",      "So",      "If",      "When",   "While",
        "With",   "Without","My",      "Our",     "Your",    "His",    "Her",
        "Their",  "Its",    "We",      "You",     "He",      "She",    "They",
        "Not",    "No",     "Yes",     "Ok",      "Okay",    "Good",   "Great",
        "Thanks", "Thank",  "Change",  "Thought", "Track",   "Go",     "Show",
        "Add",    "Lock",   "Unlock",  "Start",   "Stop",    "Book",   "Cancel",
        "Get",    "Put",    "Post",    "Tweet",   "Retweet", "Log",    "Sign",
        "Use",    "Check",  "Look",    "Find",    "Search",  "List",   "Remove",
        "Delete", "Copy",   "Move",    "Rename",  "How",     "What",   "Which",
        "Where",  "Who",    "Why",     "Neither", "Both",    "Either", "Each",
        "Every",  "All",    "Any",     "Some",    "Double",  "Once",   "Twice",
        "Again",  "Just",   "Only",    "Even",    "Still",   "Set",    "Work",
        "Run",    "Make",   "Can",     "Could",   "Would",   "Should", "Will",
        "Shall",  "May",    "Might",   "Must",    "Do",      "Does",   "Did",
        "Have",   "Has",    "Had",     "Let",     "New",     "Provided",
        "Quote",  "Zipcodes","Average","Top",     "Tag",     "Tidy",   "Sorry",
        "Right",  "Done",   "Ignore",  "Somewhere","Plans",  "Step",   "Press",
        "Fill",   "Say",    "Grab",    "Head",    "Give",    "Send",   "Keep",
        "Leave",  "Drop",   "Pull",    "Open",    "Close",   "Clear",  "Out",
        "From",   "To",     "For",     "In",      "On",      "At",     "By"};
    return k;
}

struct TextPools {
    std::string text;        // effective request text, original case
    std::string lower_text;  // lowercased copy for trigger matching
    std::vector<std::string> fileish;      // tokens with '.' or '_'
    std::vector<std::string> dirish;       // directory-shaped tokens
    std::vector<std::string> quoted_names; // quoted spans without spaces
    std::vector<std::string> patterns;     // short quoted spans (grep patterns)
    std::vector<std::string> dquoted;      // double-quoted spans (tweet content)
    std::vector<std::string> cities;       // capitalized unigrams/bigrams
    std::vector<std::pair<std::string, size_t>> codes_pos;  // airport codes + position
    std::vector<std::string> zips;         // 5-digit tokens
    std::vector<std::string> dates;        // YYYY-MM-DD tokens
    std::vector<double> numbers;           // numeric tokens in order
    std::vector<double> mile_numbers;      // numbers directly before "mile(s)"
    std::vector<double> gallon_numbers;    // numbers directly before "gallon(s)"
    std::vector<long long> tweet_ids;      // integers directly after "tweet"/"id"
    size_t tweet_id_pos = kNoPos;          // where the first such pair appears
    std::vector<std::string> tags;         // #tokens, '#' kept
    std::vector<std::string> mentions;     // @tokens, '@' kept
    std::vector<std::string> usersnakes;   // lowercase '_' tokens (user names)
    std::vector<std::pair<std::string, size_t>> doors_pos;  // door names + position
};

std::string strip_to_tail(const std::string& raw) {
    size_t cut = raw.rfind("\n\n");
    return cut == std::string::npos ? raw : raw.substr(cut + 2);
}

TextPools scan_text(const std::string& raw) {
    TextPools p;
    p.text = strip_to_tail(raw);
    p.lower_text = lower(p.text);
    const std::string& s = p.text;

    auto tokchar = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
               c == '-' || c == '#' || c == '@';
    };
    std::vector<std::pair<std::string, size_t>> toks;
    for (size_t i = 0; i < s.size();) {
        if (!tokchar(s[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < s.size() && tokchar(s[j])) ++j;
        std::string t = s.substr(i, j - i);
        size_t pos = i;
        i = j;
        while (!t.empty() && (t.back() == '.' || t.back() == ',' || t.back() == ';' ||
                              t.back() == ':' || t.back() == '!' || t.back() == '?' ||
                              t.back() == '-'))
            t.pop_back();
        while (!t.empty() && (t.front() == '.' || t.front() == '-')) {
            t.erase(t.begin());
            ++pos;
        }
        bool any_alnum = std::any_of(t.begin(), t.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c));
        });
        if (!any_alnum) continue;
        if (t[0] == '#') {
            if (t.size() > 1) push_unique(p.tags, t);
            continue;
        }
        if (t[0] == '@') {
            if (t.size() > 1) push_unique(p.mentions, t);
            continue;
        }
        toks.emplace_back(t, pos);
    }

    auto letters_only = [](const std::string& t) {
        return std::all_of(t.begin(), t.end(), [](char c) {
            return std::isalpha(static_cast<unsigned char>(c));
        });
    };
    auto all_digits = [](const std::string& t) {
        return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
                   return std::isdigit(static_cast<unsigned char>(c));
               });
    };
    auto all_caps = [&](const std::string& t) {
        return letters_only(t) && std::all_of(t.begin(), t.end(), [](char c) {
                   return std::isupper(static_cast<unsigned char>(c));
               });
    };
    auto interior_upper = [](const std::string& t) {
        for (size_t k = 1; k < t.size(); ++k)
            if (std::isupper(static_cast<unsigned char>(t[k]))) return true;
        return false;
    };
    auto city_shaped = [&](const std::string& t) {
        return t.size() >= 2 && letters_only(t) &&
               std::isupper(static_cast<unsigned char>(t[0])) && !all_caps(t) &&
               !interior_upper(t) && capital_stopwords().count(t) == 0;
    };
    auto push_code = [&](const std::string& c, size_t pos) {
        for (const auto& [e, _] : p.codes_pos)
            if (e == c) return;
        p.codes_pos.emplace_back(c, pos);
    };

    static const std::set<std::string> kDoors = {"driver", "passenger", "rear_left",
                                                "rear_right"};

    for (const auto& [t, pos] : toks) {
        bool has_dot = contains(t, "."), has_us = contains(t, "_");
        bool numeric = !t.empty() && !has_us &&
                       t.find_first_not_of("0123456789.") == std::string::npos &&
                       std::count(t.begin(), t.end(), '.') <= 1 && t != ".";
        if (numeric) p.numbers.push_back(std::strtod(t.c_str(), nullptr));
        if (t.size() == 5 && all_digits(t)) push_unique(p.zips, t);
        if (t.size() == 3 && all_caps(t)) push_code(t, pos);
        if (is_date_token(t)) push_unique(p.dates, t);
        if (kDoors.count(t)) {
            bool seen = false;
            for (const auto& [d, _] : p.doors_pos) seen = seen || d == t;
            if (!seen) p.doors_pos.emplace_back(t, pos);
        }
        if (has_dot || has_us) {
            if (!kDoors.count(t)) push_unique(p.fileish, t);
            if (has_us && !has_dot && !kDoors.count(t) &&
                !std::isupper(static_cast<unsigned char>(t[0])) && !all_digits(t))
                push_unique(p.usersnakes, t);
        }
        bool dir_like = !has_dot && !has_us && letters_only(t) && t.size() >= 2 &&
                        std::isupper(static_cast<unsigned char>(t[0])) && !all_caps(t) &&
                        capital_stopwords().count(t) == 0;
        if (dir_like) push_unique(p.dirish, t);
    }

    // Token adjacencies: the word before "folder"/"directory" names a
    // directory, and so does the word after "into"; a number before
    // "mile(s)"/"gallon(s)" is a quantity; an integer after "tweet"/"id" is a
    // tweet id.
    static const std::set<std::string> kSkipArticles = {"the", "a", "that"};
    static const std::set<std::string> kNotDirs = {"there", "it",   "them",  "this",
                                                   "my",    "our",  "your",  "his",
                                                   "her",   "their","and",   "or"};
    for (size_t k = 0; k < toks.size(); ++k) {
        const std::string& t = toks[k].first;
        if (k + 1 < toks.size()) {
            const std::string& next = toks[k + 1].first;
            if ((next == "folder" || next == "directory" || next == "dir") &&
                letters_only(t) && !kSkipArticles.count(t))
                push_unique(p.dirish, t);
            bool numeric = t.find_first_not_of("0123456789.") == std::string::npos &&
                           std::count(t.begin(), t.end(), '.') <= 1 && !t.empty() && t != ".";
            if (numeric && (next == "mile" || next == "miles"))
                p.mile_numbers.push_back(std::strtod(t.c_str(), nullptr));
            if (numeric && (next == "gallon" || next == "gallons"))
                p.gallon_numbers.push_back(std::strtod(t.c_str(), nullptr));
            if ((lower(t) == "tweet" || lower(t) == "id") && all_digits(next) &&
                next.size() <= 9) {
                p.tweet_ids.push_back(std::strtoll(next.c_str(), nullptr, 10));
                if (p.tweet_id_pos == kNoPos) p.tweet_id_pos = toks[k].second;
            }
        }
        if (t == "into" && k + 1 < toks.size()) {
            size_t j = k + 1;
            if (kSkipArticles.count(toks[j].first) && j + 1 < toks.size()) ++j;
            const std::string& cand = toks[j].first;
            if (letters_only(cand) && cand.size() >= 2 && !kNotDirs.count(lower(cand)) &&
                lower(cand) != "folder" && lower(cand) != "directory")
                push_unique(p.dirish, cand);
        }
    }

    // City bigrams (adjacent capitalized words), then leftover unigrams.
    std::vector<bool> consumed(toks.size(), false);
    for (size_t k = 0; k + 1 < toks.size(); ++k) {
        const auto& [a, pa] = toks[k];
        const auto& [b, pb] = toks[k + 1];
        if (city_shaped(a) && city_shaped(b) && pb == pa + a.size() + 1 &&
            pa + a.size() < s.size() && s[pa + a.size()] == ' ') {
            push_unique(p.cities, a + " " + b);
            consumed[k] = consumed[k + 1] = true;
        }
    }
    for (size_t k = 0; k < toks.size(); ++k)
        if (!consumed[k] && city_shaped(toks[k].first)) push_unique(p.cities, toks[k].first);

    // Quoted spans.
    auto spans = [&](char q, auto&& sink) {
        size_t start = std::string::npos;
        for (size_t k = 0; k < s.size(); ++k) {
            if (s[k] != q) continue;
            if (start == std::string::npos) {
                start = k;
            } else {
                sink(s.substr(start + 1, k - start - 1));
                start = std::string::npos;
            }
        }
    };
    spans('"', [&](const std::string& span) {
        if (span.empty() || span.size() > 150 || contains(span, "\n")) return;
        push_unique(p.dquoted, span);
        if (span.size() <= 40 && span.front() != ' ' && span.back() != ' ')
            push_unique(p.patterns, span);
    });
    spans('\'', [&](const std::string& span) {
        if (span.empty() || span.size() > 60 || contains(span, "\n")) return;
        if (!contains(span, " ")) {
            push_unique(p.quoted_names, span);
            push_unique(p.patterns, span);
        } else if (span.size() <= 40 && span.front() != ' ' && span.back() != ' ') {
            push_unique(p.patterns, span);
        }
    });

    // Well-known city names imply their airport codes even when the code is
    // not spelled out in the request.
    static const std::vector<std::pair<const char*, const char*>> kGazetteer = {
        {"los angeles", "LAX"}, {"san francisco", "SFO"}, {"phoenix", "PHX"},
        {"miami", "MIA"},       {"austin", "AUS"},        {"denver", "DEN"},
        {"seattle", "SEA"},     {"oakland", "OAK"},       {"las vegas", "LAS"},
        {"portland", "PDX"}};
    for (const auto& [city, code] : kGazetteer) {
        size_t pos = p.lower_text.find(city);
        if (pos != std::string::npos) push_code(code, pos);
    }
    return p;
}

// ---------------------------------------------------------------------------
// History reconstruction: pair each past assistant batch with its tool
// response so the policy can reason about what already happened.  Uses only
// the visible dialogue, never environment internals.

const std::set<std::string>& mutating_tools() {
    static const std::set<std::string> k = {
        "cd",        "rm",          "rmdir",      "cp",
        "mv",        "book_flight", "cancel_booking", "authenticate_twitter",
        "post_tweet","retweet",     "fillFuelTank",   "lockDoors",
        "startEngine","pressBrakePedal"};
    return k;
}

struct StepInfo {
    ToolCall call;
    bool ok = false;
    bool mutating = false;
    json payload;
    std::string error_text;
};

struct QuoteInfo {
    ToolCall call;
    json payload;
};

struct HistoryFacts {
    std::vector<StepInfo> steps;
    size_t cur_turn_begin = 0;          // step index where the current turn starts
    const std::string* last_tool_msg = nullptr;
    bool last_msg_paired = false;       // steps were extracted from that message
    std::string prior_user_tail;        // stripped earlier user requests, joined
    std::vector<std::string> str_leaves;
    std::vector<double> num_leaves;
    std::vector<std::string> zip_payloads, code_payloads, booking_ids, file_payloads;
    std::vector<double> id_payloads, distance_payloads;
    bool quote_ok = false, book_ok = false, brake_ok = false;
    bool auth_refuted = false;          // a call failed for lack of auth, not yet repaired
    std::vector<QuoteInfo> quotes;      // distinct successful quotes, episode order
    std::string last_ok_tool;
};

void harvest_payload(HistoryFacts& h, const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        h.str_leaves.push_back(s);
        if ((contains(s, ".") || contains(s, "_")) && !contains(s, " ") && s.size() <= 40) {
            size_t slash = s.rfind('/');
            std::string base = slash == std::string::npos ? s : s.substr(slash + 1);
            if (!base.empty()) push_unique(h.file_payloads, base);
        }
        return;
    }
    if (j.is_number()) {
        h.num_leaves.push_back(j.get<double>());
        return;
    }
    if (j.is_array()) {
        for (const json& e : j) harvest_payload(h, e);
        return;
    }
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            const json& v = it.value();
            if (key == "zipcode" && v.is_string()) push_unique(h.zip_payloads, v.get<std::string>());
            if (key == "nearest_airport" && v.is_string())
                push_unique(h.code_payloads, v.get<std::string>());
            if (key == "booking_id" && v.is_string())
                push_unique(h.booking_ids, v.get<std::string>());
            if (key == "id" && v.is_number()) h.id_payloads.push_back(v.get<double>());
            if (key == "distance" && v.is_number())
                h.distance_payloads.push_back(v.get<double>());
            harvest_payload(h, v);
        }
    }
}

HistoryFacts collect_history(const Observation& obs) {
    HistoryFacts h;
    size_t last_user = 0;
    for (size_t m = 0; m < obs.history.size(); ++m)
        if (obs.history[m].role == "user") last_user = m;

    std::optional<AgentAction> last_action;
    for (size_t m = 0; m < obs.history.size(); ++m) {
        const ChatMessage& msg = obs.history[m];
        if (msg.role == "user") {
            h.cur_turn_begin = h.steps.size();
            if (m != last_user) {
                if (!h.prior_user_tail.empty()) h.prior_user_tail += "\n";
                h.prior_user_tail += strip_to_tail(msg.text);
            }
            continue;
        }
        if (msg.role == "assistant") {
            last_action.reset();
            ParseResult pr = parse_response(msg.text);
            if (const AgentAction* a = std::get_if<AgentAction>(&pr))
                if (!a->is_answer()) last_action = *a;
            continue;
        }
        if (msg.role != "tool") continue;
        h.last_tool_msg = &msg.text;
        h.last_msg_paired = false;
        if (msg.text == kFormatErrorFeedback || !last_action) continue;
        const ToolCallBatch* batch = last_action->batch();
        if (!batch) continue;
        json arr = json::parse(msg.text, nullptr, false);
        if (arr.is_discarded() || !arr.is_array()) continue;
        size_t n = std::min(batch->calls.size(), arr.size());
        for (size_t i = 0; i < n; ++i) {
            const json& elem = arr[i];
            StepInfo info;
            info.call = batch->calls[i];
            info.ok = !elem.is_string() && !(elem.is_object() && elem.contains("error"));
            info.mutating = mutating_tools().count(info.call.name) > 0;
            if (info.ok) {
                info.payload = elem;
                harvest_payload(h, elem);
                h.last_ok_tool = info.call.name;
                if (info.call.name == "authenticate_twitter") h.auth_refuted = false;
                if (info.call.name == "get_flight_cost") {
                    h.quote_ok = true;
                    bool known = false;
                    for (QuoteInfo& q : h.quotes)
                        if (q.call.arguments == info.call.arguments) {
                            q.payload = elem;
                            known = true;
                        }
                    if (!known) h.quotes.push_back({info.call, elem});
                }
                if (info.call.name == "book_flight") h.book_ok = true;
                if (info.call.name == "pressBrakePedal") {
                    const json& a = info.call.arguments;
                    if (a.contains("pedalPosition") && a["pedalPosition"].is_number() &&
                        a["pedalPosition"].get<double>() > 0)
                        h.brake_ok = true;
                }
            } else {
                if (elem.is_string())
                    info.error_text = elem.get<std::string>();
                else if (elem.is_object() && elem["error"].is_string())
                    info.error_text = elem["error"].get<std::string>();
                else
                    info.error_text = elem.dump();
                if (contains(info.error_text, "not authenticated")) h.auth_refuted = true;
            }
            h.steps.push_back(std::move(info));
            h.last_msg_paired = true;
        }
        last_action.reset();
    }
    return h;
}

// ---------------------------------------------------------------------------
// Intent triggers: lexical patterns over the request tail, plus the tool
// name itself as a standalone word.  intent_pos returns where in the request
// the earliest trigger fires, so candidate order follows request order.

struct Trig {
    std::vector<const char*> words;
    std::vector<const char*> phrases;
};

const std::map<std::string, Trig>& tool_triggers() {
    static const std::map<std::string, Trig> k = {
        {"ls", {{"list", "hidden", "confirm"}, {"what's left", "what is left"}}},
        {"cd",
         {{}, {"go into", "go in", "step into", "change into", "go to", "go back", "back up"}}},
        {"find", {{"find", "search", "locate"}, {"track down", "look for"}}},
        {"grep",
         {{"grep", "lines", "mention", "mentions", "containing", "contains", "check"},
          {"every line", "which lines"}}},
        {"rm",
         {{"delete", "remove", "tidy"},
          {"get rid", "don't need", "do not need", "clean out"}}},
        {"rmdir",
         {{"delete", "remove", "tidy"},
          {"get rid", "don't need", "do not need", "clean out"}}},
        {"cp", {{"copy", "backup", "duplicate"}, {}}},
        {"mv", {{"rename", "move"}, {}}},
        {"list_all_airports", {{"airports"}, {"which airport"}}},
        {"get_nearest_airport_by_city",
         {{},
          {"airport code for", "nearest airport", "airport that serves",
           "work out their airport"}}},
        {"get_flight_cost", {{"quote", "cost", "price", "fare"}, {"how much"}}},
        {"book_flight", {{"book"}, {}}},
        {"cancel_booking", {{"cancel"}, {}}},
        {"get_zipcode_based_on_city", {{"zipcode", "zipcodes"}, {}}},
        {"estimate_distance",
         {{"distance"}, {"how far", "miles is it", "how many miles"}}},
        {"travel_get_login_status",
         {{}, {"login status", "logged in to the travel", "travel account"}}},
        {"authenticate_twitter",
         {{}, {"log in", "log me in", "sign in", "authenticate"}}},
        {"post_tweet",
         {{"post", "tweet", "announce", "announcement", "tag", "tags"}, {"put up"}}},
        {"retweet", {{"retweet"}, {}}},
        {"get_user_tweets", {{"tweets", "posted"}, {"pull up"}}},
        {"fillFuelTank",
         {{"gallon", "gallons", "gas", "fill", "tank", "refuel"},
          {"top the tank", "top up"}}},
        {"lockDoors", {{"lock", "locked", "unlock", "open", "door", "doors"}, {}}},
        {"startEngine", {{"ignition"}, {"start the engine", "start it", "start engine"}}},
        {"pressBrakePedal", {{"brake", "pedal"}, {}}},
        {"mean", {{"average", "mean"}, {}}},
        {"estimate_drive_feasibility_by_mileage",
         {{"feasible", "mile", "miles", "cover"}, {"make that drive", "make the drive"}}},
    };
    return k;
}

size_t intent_pos(const std::string& tool, const TextPools& t1, const HistoryFacts& h) {
    size_t best = kNoPos;
    auto consider = [&](size_t p) {
        if (p < best) best = p;
    };
    auto it = tool_triggers().find(tool);
    if (it != tool_triggers().end()) {
        for (const char* w : it->second.words) consider(find_word_pos(t1.lower_text, w));
        for (const char* ph : it->second.phrases) {
            size_t p = t1.lower_text.find(ph);
            if (p != std::string::npos) consider(p);
        }
    }
    consider(find_word_pos(t1.lower_text, lower(tool)));
    if (tool == "retweet") consider(t1.tweet_id_pos);
    size_t same = t1.lower_text.find("do the same");
    if (same != std::string::npos && h.last_ok_tool == tool) consider(same);
    return best;
}

// ---------------------------------------------------------------------------
// Hint patterns: substrings of tool feedback that point at a specific repair
// action.  An empty target means "answer and say so".

const std::vector<std::pair<const char*, const char*>>& hint_patterns() {
    static const std::vector<std::pair<const char*, const char*>> k = {
        {"say so in your answer", ""},
        {"wait for it to be provided", ""},
        {"in current directory", "cd"},
        {"Use rmdir", "rmdir"},
        {"airport code for a city", "get_nearest_airport_by_city"},
        {"zipcodes are correct and numeric", "get_zipcode_based_on_city"},
        {"authenticate_twitter", "authenticate_twitter"},
        {"pressBrakePedal", "pressBrakePedal"},
    };
    return k;
}

// ---------------------------------------------------------------------------
// Argument templates per tool.  Fillers come from the request tail first,
// then payload history, then earlier requests.  Caps keep sets small, and
// tools whose calls mutate state get at most one candidate so a stray pick
// cannot corrupt the session.

std::optional<std::string> cred(const Observation& obs, const char* key) {
    if (obs.credentials.is_object() && obs.credentials.contains(key) &&
        obs.credentials[key].is_string())
        return obs.credentials[key].get<std::string>();
    return std::nullopt;
}

template <class T>
std::vector<T> capped(const std::vector<T>& v, size_t cap) {
    return std::vector<T>(v.begin(), v.begin() + std::min(cap, v.size()));
}

std::string find_travel_class(const std::string& lower_text) {
    if (contains(lower_text, "business")) return "business";
    if (contains(lower_text, "first class") || contains(lower_text, "first-class"))
        return "first";
    if (contains(lower_text, "economy")) return "economy";
    return "";
}

std::vector<json> args_options(const std::string& tool, const TextPools& t1,
                               const TextPools& t2, const HistoryFacts& h,
                               const Observation& obs) {
    std::vector<json> out;

    if (tool == "ls") {
        if (contains_word(t1.lower_text, "hidden"))
            out.push_back({{"a", true}});
        else
            out.push_back(json::object());
    } else if (tool == "cd") {
        for (const auto& d : capped(t1.dirish, 2)) out.push_back({{"folder", d}});
        out.push_back({{"folder", ".."}});
    } else if (tool == "find") {
        std::vector<std::string> names = t1.quoted_names;
        for (const auto& n : t2.quoted_names) push_unique(names, n);
        if (!names.empty() && !t1.dirish.empty())
            out.push_back({{"path", t1.dirish[0]}, {"name", names[0]}});
        for (const auto& n : capped(names, 2)) out.push_back({{"name", n}});
    } else if (tool == "grep") {
        std::vector<std::string> files;
        auto take_files = [&](const std::vector<std::string>& v) {
            for (const auto& f : v)
                if (contains(f, ".")) push_unique(files, f);
        };
        take_files(t1.fileish);
        take_files(t2.fileish);
        files = capped(files, 2);
        std::vector<std::string> pats = t1.patterns;
        for (const auto& q : t2.patterns) push_unique(pats, q);
        pats = capped(pats, 2);
        for (const auto& f : files)
            for (const auto& q : pats) {
                if (out.size() >= 3) break;
                out.push_back({{"file_name", f}, {"pattern", q}});
            }
    } else if (tool == "rm") {
        for (const auto& f : capped(t1.fileish, 3)) out.push_back({{"file_name", f}});
    } else if (tool == "rmdir") {
        // Only when the request talks about a directory in so many words;
        // "folder" alone more often refers to plain rm targets.
        if (contains_word(t1.lower_text, "directory") || contains_word(t1.lower_text, "dir")) {
            std::vector<std::string> dirs = t1.dirish;
            for (const auto& n : t1.quoted_names) push_unique(dirs, n);
            for (const auto& d : capped(dirs, 2)) out.push_back({{"dir_name", d}});
        }
    } else if (tool == "cp" || tool == "mv") {
        if (t1.fileish.size() >= 2)
            out.push_back({{"source", t1.fileish[0]}, {"destination", t1.fileish[1]}});
        else if (!t1.fileish.empty() && !t1.dirish.empty())
            out.push_back({{"source", t1.fileish[0]}, {"destination", t1.dirish[0]}});
    } else if (tool == "list_all_airports" || tool == "travel_get_login_status") {
        out.push_back(json::object());
    } else if (tool == "get_nearest_airport_by_city") {
        for (const auto& c : capped(t1.cities, 2)) out.push_back({{"location", c}});
    } else if (tool == "get_zipcode_based_on_city") {
        std::vector<std::string> cities = t1.cities;
        for (const auto& c : t2.cities) push_unique(cities, c);
        for (const auto& c : capped(cities, 3)) out.push_back({{"city", c}});
    } else if (tool == "get_flight_cost") {
        std::vector<std::pair<std::string, size_t>> codes;
        auto add_code = [&](const std::string& c, size_t pos) {
            for (const auto& [e, _] : codes)
                if (e == c) return;
            codes.emplace_back(c, pos);
        };
        for (const auto& [c, pos] : t1.codes_pos) add_code(c, pos);
        for (const auto& c : h.code_payloads) add_code(c, kNoPos);
        for (const auto& [c, pos] : t2.codes_pos) add_code(c, kNoPos);
        const std::vector<std::string>& dates = t1.dates.empty() ? t2.dates : t1.dates;
        if (codes.size() >= 2 && !dates.empty()) {
            static const std::vector<std::pair<const char*, const char*>> kClassPats = {
                {"economy", "economy"},
                {"business", "business"},
                {"first class", "first"},
                {"first-class", "first"}};
            std::vector<std::pair<size_t, std::string>> cls_hits;
            for (const auto& [pat, cls] : kClassPats)
                for (size_t p = t1.lower_text.find(pat); p != std::string::npos;
                     p = t1.lower_text.find(pat, p + 1))
                    cls_hits.emplace_back(p, cls);
            std::string fallback = find_travel_class(t1.lower_text);
            if (fallback.empty()) fallback = find_travel_class(lower(h.prior_user_tail));
            if (fallback.empty()) fallback = "economy";
            auto class_for = [&](size_t pos) {
                if (pos == kNoPos || cls_hits.empty()) return fallback;
                size_t best = 0, best_d = kNoPos;
                for (size_t i = 0; i < cls_hits.size(); ++i) {
                    size_t d = cls_hits[i].first > pos ? cls_hits[i].first - pos
                                                       : pos - cls_hits[i].first;
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                return cls_hits[best].second;
            };
            // From the first code to each of the next ones, in request order.
            for (size_t j = 1; j < codes.size() && out.size() < 2; ++j)
                out.push_back({{"travel_from", codes[0].first},
                               {"travel_to", codes[j].first},
                               {"travel_date", dates[0]},
                               {"travel_class", class_for(codes[j].second)}});
        }
    } else if (tool == "book_flight") {
        auto tok = cred(obs, "access_token");
        auto card = cred(obs, "card_id");
        if (tok && card && !h.quotes.empty()) {
            auto mentioned = [&](const std::string& code) {
                for (const auto& [c, _] : t1.codes_pos)
                    if (c == code) return true;
                return false;
            };
            size_t best = 0;
            int best_score = -1;
            for (size_t i = 0; i < h.quotes.size(); ++i) {
                const json& qa = h.quotes[i].call.arguments;
                int score = (mentioned(qa.value("travel_from", "")) ? 1 : 0) +
                            (mentioned(qa.value("travel_to", "")) ? 1 : 0);
                if (score >= best_score) {  // ties resolve to the latest quote
                    best_score = score;
                    best = i;
                }
            }
            const json& qa = h.quotes[best].call.arguments;
            const json& qp = h.quotes[best].payload;
            if (qp.is_object() && qp.contains("travel_cost_list") &&
                qp["travel_cost_list"].is_array() && !qp["travel_cost_list"].empty())
                out.push_back({{"access_token", *tok},
                               {"card_id", *card},
                               {"travel_date", qa.value("travel_date", "")},
                               {"travel_from", qa.value("travel_from", "")},
                               {"travel_to", qa.value("travel_to", "")},
                               {"travel_class", qa.value("travel_class", "")},
                               {"travel_cost", qp["travel_cost_list"][0]}});
        }
    } else if (tool == "cancel_booking") {
        auto tok = cred(obs, "access_token");
        if (tok && !h.booking_ids.empty())
            out.push_back({{"access_token", *tok}, {"booking_id", h.booking_ids.back()}});
    } else if (tool == "estimate_distance") {
        std::vector<std::string> zips = t1.zips;
        for (const auto& z : h.zip_payloads) push_unique(zips, z);
        for (const auto& z : t2.zips) push_unique(zips, z);
        if (zips.size() >= 2) out.push_back({{"cityA", zips[0]}, {"cityB", zips[1]}});
    } else if (tool == "authenticate_twitter") {
        auto user = cred(obs, "username");
        auto pass = cred(obs, "password");
        if (user && pass) out.push_back({{"username", *user}, {"password", *pass}});
    } else if (tool == "post_tweet") {
        const std::string* best = nullptr;
        for (const auto& q : t1.dquoted)
            if (!best || q.size() > best->size()) best = &q;
        if (best) {
            json args = {{"content", *best}};
            if (!t1.tags.empty()) args["tags"] = t1.tags;
            if (!t1.mentions.empty()) args["mentions"] = t1.mentions;
            out.push_back(std::move(args));
        }
    } else if (tool == "retweet") {
        std::optional<long long> id;
        if (!t1.tweet_ids.empty())
            id = t1.tweet_ids.front();
        else if (!t2.tweet_ids.empty())
            id = t2.tweet_ids.back();
        else
            for (auto it = h.id_payloads.rbegin(); it != h.id_payloads.rend(); ++it)
                if (*it >= 0 && std::floor(*it) == *it) {
                    id = static_cast<long long>(*it);
                    break;
                }
        if (id) out.push_back({{"tweet_id", *id}});
    } else if (tool == "get_user_tweets") {
        std::vector<std::string> users = capped(t1.usersnakes, 2);
        if (users.empty())
            if (auto user = cred(obs, "username")) users.push_back(*user);
        for (const auto& u : users) out.push_back({{"username", u}});
    } else if (tool == "fillFuelTank") {
        if (!t1.gallon_numbers.empty())
            out.push_back({{"fuelAmount", t1.gallon_numbers.front()}});
    } else if (tool == "lockDoors") {
        bool unlock = contains_word(t1.lower_text, "unlock") ||
                      contains_word(t1.lower_text, "open");
        size_t kw;
        if (unlock)
            kw = std::min(find_word_pos(t1.lower_text, "unlock"),
                          find_word_pos(t1.lower_text, "open"));
        else
            kw = std::min(find_word_pos(t1.lower_text, "lock"),
                          find_word_pos(t1.lower_text, "locked"));
        json doors = json::array();
        for (const auto& [d, pos] : t1.doors_pos)
            if (kw == kNoPos || pos > kw) doors.push_back(d);
        if (doors.empty()) {
            if (unlock) return out;  // never unlock unnamed doors
            doors = {"driver", "passenger", "rear_left", "rear_right"};
        }
        out.push_back({{"unlock", unlock}, {"door", doors}});
    } else if (tool == "startEngine") {
        bool stop = contains_word(t1.lower_text, "stop") ||
                    contains(t1.lower_text, "shut off") ||
                    contains(t1.lower_text, "turn off");
        out.push_back({{"ignitionMode", stop ? "STOP" : "START"}});
    } else if (tool == "pressBrakePedal") {
        std::optional<double> explicit_pos;
        for (double n : t1.numbers)
            if (n >= 0.0 && n <= 1.0) {
                explicit_pos = n;
                break;
            }
        double v = explicit_pos ? *explicit_pos
                                : (contains(t1.lower_text, "half") ? 0.5 : 1.0);
        out.push_back({{"pedalPosition", v}});
    } else if (tool == "mean") {
        if (t1.numbers.size() >= 2) out.push_back({{"numbers", t1.numbers}});
    } else if (tool == "estimate_drive_feasibility_by_mileage") {
        if (!t1.mile_numbers.empty())
            out.push_back({{"distance", t1.mile_numbers.front()}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Feature: fraction of argument leaves that are grounded in the dialogue
// (request text, earlier requests, payloads, credentials).  Tool-specific
// constants (door names, ignition modes, pedal positions) count as grounded.

double args_in_context(const std::string& tool, const json& args, const TextPools& t1,
                       const TextPools& t2, const HistoryFacts& h, const Observation& obs) {
    int leaves = 0, matched = 0;
    std::string lower_prior = lower(h.prior_user_tail);
    bool back_phrase = contains_word(t1.lower_text, "back") ||
                       contains(t1.lower_text, "go up") ||
                       contains(t1.lower_text, "up a level") ||
                       contains(t1.lower_text, "parent");
    auto number_near = [](const std::vector<double>& pool, double x) {
        for (double v : pool)
            if (std::abs(v - x) <= 1e-9 * std::max({1.0, std::abs(v), std::abs(x)}))
                return true;
        return false;
    };
    auto code_known = [&](const std::string& v) {
        for (const auto& [c, _] : t1.codes_pos)
            if (c == v) return true;
        for (const auto& [c, _] : t2.codes_pos)
            if (c == v) return true;
        return false;
    };
    std::function<void(const json&)> walk = [&](const json& j) {
        if (j.is_object()) {
            for (const auto& kv : j.items()) walk(kv.value());
        } else if (j.is_array()) {
            for (const json& e : j) walk(e);
        } else if (j.is_boolean() || j.is_null()) {
            ++leaves;
            ++matched;
        } else if (j.is_number()) {
            ++leaves;
            if (tool == "pressBrakePedal") {
                ++matched;
                return;
            }
            double x = j.get<double>();
            if (number_near(t1.numbers, x) || number_near(t2.numbers, x) ||
                number_near(h.num_leaves, x) || number_near(h.id_payloads, x))
                ++matched;
        } else if (j.is_string()) {
            ++leaves;
            const std::string v = j.get<std::string>();
            bool hit = false;
            if (tool == "cd" && v == "..")
                hit = back_phrase;
            else if (tool == "startEngine" && (v == "START" || v == "STOP"))
                hit = true;
            else if (tool == "lockDoors" && (v == "driver" || v == "passenger" ||
                                             v == "rear_left" || v == "rear_right"))
                hit = true;
            else {
                hit = contains(t1.lower_text, lower(v)) || contains(lower_prior, lower(v));
                if (!hit)
                    hit = std::find(h.str_leaves.begin(), h.str_leaves.end(), v) !=
                          h.str_leaves.end();
                if (!hit) hit = code_known(v);
                if (!hit && obs.credentials.is_object())
                    for (const auto& kv : obs.credentials.items())
                        if (kv.value().is_string() && kv.value().get<std::string>() == v)
                            hit = true;
            }
            if (hit) ++matched;
        }
    };
    walk(args);
    return leaves == 0 ? 1.0 : double(matched) / double(leaves);
}

// ---------------------------------------------------------------------------
// Feature: dialogue-visible dependency ordering.  Optimistic where the
// prerequisite cannot be observed: posting is assumed authorized until a call
// fails for lack of auth, and recovers once a login succeeds.

double dep_ok(const std::string& tool, const json& args, const HistoryFacts& h) {
    if (tool == "book_flight") return h.quote_ok ? 1.0 : 0.0;
    if (tool == "cancel_booking") return h.book_ok ? 1.0 : 0.0;
    if (tool == "startEngine" && args.value("ignitionMode", "") == "START")
        return h.brake_ok ? 1.0 : 0.0;
    if (tool == "post_tweet" || tool == "retweet") return h.auth_refuted ? 0.0 : 1.0;
    return 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Candidate enumeration

const char* feature_name(int index) {
    switch (index) {
        case kFeatRegistered: return "registered";
        case kFeatSchemaValid: return "schema_valid";
        case kFeatIntentMatch: return "intent_match";
        case kFeatArgsInContext: return "args_in_context";
        case kFeatDepOk: return "dep_ok";
        case kFeatHintMatch: return "hint_match";
        case kFeatRepeatsFailed: return "repeats_failed";
        case kFeatRepeatsSucceeded: return "repeats_succeeded";
        case kFeatIsAnswer: return "is_answer";
        default: return "unknown";
    }
}

CandidateSet propose_candidates(const Observation& obs, const ToolRegistry& reg,
                                const Scenario& sc) {
    TextPools t1 = scan_text(obs.current_user_text);
    HistoryFacts h = collect_history(obs);
    TextPools t2 = scan_text(h.prior_user_tail);

    // Hints pending in the current turn: error feedback points at a repair
    // tool until a successful call of that tool discharges it.
    std::set<std::string> hinted;
    bool hint_answer = false;
    auto scan_hints = [&](const std::string& text) {
        for (const auto& [pat, target] : hint_patterns()) {
            if (!contains(text, pat)) continue;
            if (std::string(target).empty())
                hint_answer = true;
            else
                hinted.insert(target);
        }
    };
    for (size_t k = h.cur_turn_begin; k < h.steps.size(); ++k) {
        const StepInfo& si = h.steps[k];
        if (si.ok)
            hinted.erase(si.call.name);
        else
            scan_hints(si.error_text);
    }
    // A trailing tool message that never became steps (unpaired transcripts)
    // still carries its hints.
    if (h.last_tool_msg && !h.last_msg_paired) scan_hints(*h.last_tool_msg);

    struct Keyed {
        Candidate cand;
        size_t pos, rank, idx;
    };
    std::vector<Keyed> pool;
    std::set<std::string> labels;

    auto add_tool = [&](const std::string& name, bool registered, size_t rank) {
        size_t ipos = intent_pos(name, t1, h);
        if (!registered && ipos == kNoPos) return;
        std::vector<json> options = args_options(name, t1, t2, h, obs);
        bool probe = false;
        if (options.empty()) {
            // A bare probe elicits feedback, but only for offered tools whose
            // dependencies are met; otherwise there is nothing to learn.
            if (!registered || ipos == kNoPos) return;
            if (dep_ok(name, json::object(), h) < 1.0) return;
            options.push_back(json::object());
            probe = true;
        }
        size_t idx = 0;
        for (json& args : options) {
            ToolCall call{name, std::move(args)};
            std::string label = name + canonical_dump(call.arguments);
            if (!labels.insert(label).second) continue;

            Candidate c;
            c.features.assign(kNumFeatures, 0.0);
            c.features[kFeatRegistered] = registered ? 1.0 : 0.0;
            const ToolRegistry& schema_source = registered ? reg : builtin_tools();
            c.features[kFeatSchemaValid] =
                classify_call(call, schema_source) == CallClass::Correct ? 1.0 : 0.0;
            c.features[kFeatIntentMatch] = ipos != kNoPos ? 1.0 : 0.0;
            c.features[kFeatArgsInContext] =
                probe ? 0.0 : args_in_context(name, call.arguments, t1, t2, h, obs);
            c.features[kFeatDepOk] = dep_ok(name, call.arguments, h);
            c.features[kFeatHintMatch] = hinted.count(name) ? 1.0 : 0.0;

            bool failed_open = false, succeeded = false;
            for (size_t k = h.cur_turn_begin; k < h.steps.size(); ++k) {
                const StepInfo& si = h.steps[k];
                if (si.call.name == call.name && si.call.arguments == call.arguments) {
                    if (si.ok) {
                        succeeded = true;
                    } else {
                        failed_open = true;
                        for (size_t l = k + 1; l < h.steps.size(); ++l)
                            if (h.steps[l].ok && h.steps[l].mutating) failed_open = false;
                    }
                }
            }
            c.features[kFeatRepeatsFailed] = failed_open ? 1.0 : 0.0;
            c.features[kFeatRepeatsSucceeded] = succeeded ? 1.0 : 0.0;

            c.label = std::move(label);
            c.action = AgentAction{"issuing a tool call", ToolCallBatch{{std::move(call)}}};
            pool.push_back({std::move(c), ipos, rank, idx++});
        }
    };

    std::vector<std::string> offered = reg.names();
    for (size_t r = 0; r < offered.size(); ++r) add_tool(offered[r], true, r);

    // In-domain tools the turn does not offer: only when the request points at
    // them, so the agent can discover their absence the hard way.
    std::vector<std::string> catalog = builtin_tools().names();
    for (size_t r = 0; r < catalog.size(); ++r) {
        const std::string& name = catalog[r];
        if (reg.has(name)) continue;
        const std::string& domain = builtin_tools().get(name).domain;
        if (std::find(sc.domains.begin(), sc.domains.end(), domain) == sc.domains.end())
            continue;
        add_tool(name, false, offered.size() + r);
    }

    // Request order first, then the turn's tool listing, then template order.
    std::stable_sort(pool.begin(), pool.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.pos, a.rank, a.idx) < std::tie(b.pos, b.rank, b.idx);
    });

    CandidateSet set;
    {
        Candidate ans;
        ans.action = AgentAction{"deciding the request is handled",
                                 Answer{"Done with this request."}};
        ans.features.assign(kNumFeatures, 0.0);
        ans.features[kFeatIsAnswer] = 1.0;
        ans.features[kFeatHintMatch] = hint_answer ? 1.0 : 0.0;
        ans.label = "answer";
        set.items.push_back(std::move(ans));
    }
    for (Keyed& k : pool) set.items.push_back(std::move(k.cand));
    if (set.items.size() > 64) set.items.resize(64);
    return set;
}
// ---------------------------------------------------------------------------
// Scoring math

std::vector<double> candidate_scores(const PolicyParams& p, const CandidateSet& c) {
    if (p.w.size() != size_t(kNumFeatures))
        throw std::invalid_argument("policy parameter vector has wrong length");
    std::vector<double> s;
    s.reserve(c.items.size());
    for (const Candidate& cand : c.items) {
        if (cand.features.size() != size_t(kNumFeatures))
            throw std::invalid_argument("candidate feature vector has wrong length");
        double dot = 0;
        for (int k = 0; k < kNumFeatures; ++k) dot += p.w[k] * cand.features[k];
        s.push_back(dot);
    }
    return s;
}

std::vector<double> softmax_probs(const PolicyParams& p, const CandidateSet& c) {
    std::vector<double> s = candidate_scores(p, c);
    if (s.empty()) return s;
    double m = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (double& v : s) {
        v = std::exp(v - m);
        z += v;
    }
    for (double& v : s) v /= z;
    return s;
}

double action_logprob(const PolicyParams& p, const CandidateSet& c, int chosen,
                      std::vector<double>* grad) {
    if (chosen < 0 || size_t(chosen) >= c.items.size())
        throw std::out_of_range("chosen candidate index out of range");
    std::vector<double> s = candidate_scores(p, c);
    double m = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (double v : s) z += std::exp(v - m);
    double lse = m + std::log(z);
    double lp = s[chosen] - lse;
    if (grad) {
        grad->assign(kNumFeatures, 0.0);
        for (size_t i = 0; i < c.items.size(); ++i) {
            double pi = std::exp(s[i] - lse);
            for (int k = 0; k < kNumFeatures; ++k)
                (*grad)[k] -= pi * c.items[i].features[k];
        }
        for (int k = 0; k < kNumFeatures; ++k)
            (*grad)[k] += c.items[chosen].features[k];
    }
    return lp;
}

double categorical_entropy(const std::vector<double>& probs) {
    double e = 0;
    for (double p : probs)
        if (p > 0) e -= p * std::log(p);
    return e;
}

std::vector<double> group_advantages(const std::vector<double>& rewards, double eps_a) {
    if (rewards.empty()) throw std::invalid_argument("empty reward group");
    double mean = 0;
    for (double r : rewards) mean += r;
    mean /= double(rewards.size());
    double var = 0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    double sd = std::sqrt(var / double(rewards.size()));
    std::vector<double> a;
    a.reserve(rewards.size());
    for (double r : rewards) a.push_back((r - mean) / (sd + eps_a));
    return a;
}

double surrogate_loss(const GroupRollout& group, const PolicyParams& params,
                      const PolicyParams& ref, const OptimConfig& cfg,
                      std::vector<double>* grad, double* mean_kl) {
    if (group.samples.size() != group.rewards.size())
        throw std::invalid_argument("rollout group: samples/rewards size mismatch");
    size_t steps = 0;
    for (const auto& traj : group.samples) steps += traj.size();
    if (steps == 0) {
        if (grad) grad->assign(kNumFeatures, 0.0);
        if (mean_kl) *mean_kl = 0.0;
        return 0.0;
    }

    std::vector<double> adv = group_advantages(group.rewards, cfg.eps_a);
    for (double a : adv)
        if (!std::isfinite(a)) throw NonFinite("non-finite advantage in group rollout");
    if (grad) grad->assign(kNumFeatures, 0.0);

    double sur_sum = 0, kl_sum = 0;
    std::vector<double> gsur(kNumFeatures, 0.0), gkl(kNumFeatures, 0.0);

    for (size_t t = 0; t < group.samples.size(); ++t) {
        double a = adv[t];
        for (const StepSample& ss : group.samples[t]) {
            std::vector<double> glp;
            double lp = action_logprob(params, ss.cands, ss.chosen, grad ? &glp : nullptr);
            double ratio = std::exp(lp - ss.logp_old);
            if (!std::isfinite(ratio)) throw NonFinite("non-finite probability ratio");
            double clipped = std::clamp(ratio, 1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
            double unclipped_term = ratio * a;
            double clipped_term = clipped * a;
            sur_sum += std::min(unclipped_term, clipped_term);
            if (grad && unclipped_term <= clipped_term) {
                double coef = a * ratio;
                for (int k = 0; k < kNumFeatures; ++k) gsur[k] += coef * glp[k];
            }

            // Exact categorical KL(params || ref) over this candidate set.
            std::vector<double> sp = candidate_scores(params, ss.cands);
            std::vector<double> sq = candidate_scores(ref, ss.cands);
            auto lse = [](const std::vector<double>& v) {
                double m = *std::max_element(v.begin(), v.end());
                double z = 0;
                for (double x : v) z += std::exp(x - m);
                return m + std::log(z);
            };
            double lp_z = lse(sp), lq_z = lse(sq);
            double kl = 0;
            std::vector<double> phibar(kNumFeatures, 0.0);
            std::vector<double> pi(ss.cands.items.size());
            for (size_t i = 0; i < ss.cands.items.size(); ++i) {
                pi[i] = std::exp(sp[i] - lp_z);
                double dlog = (sp[i] - lp_z) - (sq[i] - lq_z);
                kl += pi[i] * dlog;
                for (int k = 0; k < kNumFeatures; ++k)
                    phibar[k] += pi[i] * ss.cands.items[i].features[k];
            }
            if (!std::isfinite(kl)) throw NonFinite("non-finite KL term");
            kl_sum += kl;
            if (grad) {
                for (size_t i = 0; i < ss.cands.items.size(); ++i) {
                    double dlog = (sp[i] - lp_z) - (sq[i] - lq_z);
                    for (int k = 0; k < kNumFeatures; ++k)
                        gkl[k] += pi[i] * dlog * (ss.cands.items[i].features[k] - phibar[k]);
                }
            }
        }
    }

    double inv = 1.0 / double(steps);
    double loss = -sur_sum * inv + cfg.beta * kl_sum * inv;
    if (!std::isfinite(loss)) throw NonFinite("non-finite surrogate loss");
    if (grad) {
        for (int k = 0; k < kNumFeatures; ++k) {
            (*grad)[k] = -gsur[k] * inv + cfg.beta * gkl[k] * inv;
            if (!std::isfinite((*grad)[k])) throw NonFinite("non-finite gradient entry");
        }
    }
    if (mean_kl) *mean_kl = kl_sum * inv;
    return loss;
}

StepDiagnostics train_step(PolicyParams& params, const std::vector<GroupRollout>& batch,
                           const PolicyParams& ref, const OptimConfig& cfg) {
    if (batch.empty()) throw std::invalid_argument("empty training batch");

    StepDiagnostics d;
    std::vector<double> grad(kNumFeatures, 0.0);
    size_t total_samples = 0, total_rewards = 0;
    for (const GroupRollout& g : batch) {
        std::vector<double> ggrad(kNumFeatures, 0.0);
        double gkl = 0;
        d.loss += surrogate_loss(g, params, ref, cfg, &ggrad, &gkl);
        d.mean_kl += gkl;
        for (int k = 0; k < kNumFeatures; ++k) grad[k] += ggrad[k];
        for (const auto& traj : g.samples) {
            for (const StepSample& ss : traj) {
                double e = categorical_entropy(softmax_probs(params, ss.cands));
                if (!std::isfinite(e)) throw NonFinite("non-finite policy entropy");
                d.entropy += e;
                ++total_samples;
            }
        }
        for (double r : g.rewards) {
            if (!std::isfinite(r)) throw NonFinite("non-finite rollout reward");
            d.mean_reward += r;
            ++total_rewards;
        }
    }
    double invb = 1.0 / double(batch.size());
    d.loss *= invb;
    d.mean_kl *= invb;
    for (int k = 0; k < kNumFeatures; ++k) grad[k] *= invb;
    if (total_samples > 0) d.entropy /= double(total_samples);
    if (total_rewards > 0) d.mean_reward /= double(total_rewards);

    double norm = 0;
    for (double g : grad) norm += g * g;
    d.grad_norm = std::sqrt(norm);
    if (!std::isfinite(d.grad_norm) || !std::isfinite(d.loss))
        throw NonFinite("non-finite training diagnostics");

    for (int k = 0; k < kNumFeatures; ++k) params.w[k] -= cfg.lr * grad[k];
    return d;
}

// ---------------------------------------------------------------------------
// Policy wrapper and rollouts

std::string SoftmaxPolicy::act(const Observation& obs, std::mt19937_64& rng) {
    CandidateSet set = propose_candidates(obs, *obs.registry, *sc_);
    std::vector<double> probs = softmax_probs(*params_, set);
    int chosen = 0;
    if (greedy_) {
        for (size_t i = 1; i < probs.size(); ++i)
            if (probs[i] > probs[chosen]) chosen = int(i);
    } else {
        double u = unit_interval(rng), cum = 0;
        chosen = int(probs.size()) - 1;
        for (size_t i = 0; i < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) {
                chosen = int(i);
                break;
            }
        }
    }
    if (record_) {
        double lp = action_logprob(*params_, set, chosen);
        record_->push_back(StepSample{set, chosen, lp});
    }
    return render_response(set.items[chosen].action);
}

std::pair<Trajectory, std::vector<StepSample>> rollout_episode(
    const Scenario& sc, const PolicyParams& params, FeedbackMode mode,
    const MessageCatalog& catalog, int step_budget, uint64_t seed) {
    std::vector<StepSample> samples;
    SoftmaxPolicy policy(params, sc, /*greedy=*/false, &samples);
    std::mt19937_64 rng(seed);
    Trajectory traj = run_episode(policy, sc, mode, catalog, step_budget, rng);
    return {std::move(traj), std::move(samples)};
}

GroupRollout rollout_group(const Scenario& sc, const PolicyParams& params,
                           FeedbackMode mode, const MessageCatalog& catalog,
                           RewardKind kind, const OptimConfig& cfg, uint64_t seed,
                           std::vector<Trajectory>* trajs) {
    for (double w : params.w)
        if (!std::isfinite(w)) throw NonFinite("non-finite policy parameters");
    GroupRollout g;
    g.scenario_id = sc.id;
    if (trajs) trajs->clear();
    for (int i = 0; i < cfg.group_size; ++i) {
        uint64_t s = splitmix64(seed ^ (uint64_t(i) + 1));
        auto [traj, samples] = rollout_episode(sc, params, mode, catalog, cfg.step_budget, s);
        g.rewards.push_back(trajectory_reward(traj, sc, catalog, kind, cfg.w_p, cfg.w_format));
        g.samples.push_back(std::move(samples));
        if (trajs) trajs->push_back(std::move(traj));
    }
    return g;
}

}  // namespace toolgym
