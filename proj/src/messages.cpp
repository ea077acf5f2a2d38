// SPDX-License-Identifier: Apache-2.0

#include "toolgym/messages.hpp"

#include <fstream>
#include <stdexcept>

namespace toolgym {

const char* feedback_mode_name(FeedbackMode m) {
    return m == FeedbackMode::Standard ? "standard" : "augmented";
}

FeedbackMode feedback_mode_from_name(const std::string& s) {
    if (s == "standard") return FeedbackMode::Standard;
    if (s == "augmented") return FeedbackMode::Augmented;
    throw std::invalid_argument("unknown feedback mode: " + s);
}

namespace {

MessageCatalog parse_catalog(const json& j, const std::string& origin) {
    if (!j.is_object()) throw std::runtime_error(origin + ": catalog must be a JSON object");
    MessageCatalog cat;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const json& e = it.value();
        if (!e.is_object() || !e.contains("standard") || !e.contains("augmented"))
            throw std::runtime_error(origin + ": entry '" + it.key() +
                                     "' needs 'standard' and 'augmented' strings");
        MessageTemplate t;
        t.standard = e.at("standard").get<std::string>();
        t.augmented = e.at("augmented").get<std::string>();
        t.wrap = e.value("wrap", "object");
        t.category = e.value("category", "constraint");
        if (t.wrap != "object" && t.wrap != "bare")
            throw std::runtime_error(origin + ": entry '" + it.key() + "' has bad wrap");
        if (t.category != "dependency" && t.category != "constraint")
            throw std::runtime_error(origin + ": entry '" + it.key() + "' has bad category");
        cat.insert(it.key(), std::move(t));
    }
    return cat;
}

}  // namespace

void MessageCatalog::insert(std::string kind, MessageTemplate t) {
    templates_[std::move(kind)] = std::move(t);
}

MessageCatalog MessageCatalog::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open message catalog: " + file.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded())
        throw std::runtime_error("message catalog is not valid JSON: " + file.string());
    return parse_catalog(j, file.string());
}

const MessageCatalog& MessageCatalog::builtin() {
    static const MessageCatalog cat = [] {
        static const char* kEmbedded =
#include "messages_data.inc"
            ;
        return parse_catalog(json::parse(kEmbedded), "<builtin>");
    }();
    return cat;
}

const MessageTemplate& MessageCatalog::get(const std::string& kind) const {
    auto it = templates_.find(kind);
    if (it == templates_.end()) throw std::out_of_range("unknown error kind: " + kind);
    return it->second;
}

std::string MessageCatalog::render(const std::string& kind, FeedbackMode mode,
                                   const std::map<std::string, std::string>& fields) const {
    const MessageTemplate& t = get(kind);
    const std::string& tpl = mode == FeedbackMode::Standard ? t.standard : t.augmented;
    std::string out;
    out.reserve(tpl.size());
    for (size_t i = 0; i < tpl.size();) {
        if (tpl[i] == '{') {
            const size_t close = tpl.find('}', i);
            if (close != std::string::npos) {
                const std::string key = tpl.substr(i + 1, close - i - 1);
                auto it = fields.find(key);
                if (it != fields.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tpl[i++];
    }
    return out;
}

}  // namespace toolgym
