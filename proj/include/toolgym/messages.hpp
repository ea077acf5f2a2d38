// SPDX-License-Identifier: Apache-2.0
//
// Error-message catalog.  Every failure an environment can produce is named
// by a stable `error_kind`; the catalog maps that kind to two renderings of
// the same fault: a terse "standard" string and an "augmented" string that
// adds actionable detail (what was violated, which tool or argument to try).
// Which rendering is used is a display decision only — state transitions and
// error kinds never depend on the feedback mode.

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "toolgym/jsonutil.hpp"

namespace toolgym {

enum class FeedbackMode { Standard, Augmented };

const char* feedback_mode_name(FeedbackMode m);
FeedbackMode feedback_mode_from_name(const std::string& s);  // throws std::invalid_argument

struct MessageTemplate {
    std::string standard;
    std::string augmented;
    // "object" -> responses render as {"error": msg}; "bare" -> msg is the
    // whole response string (runtime-style failures).
    std::string wrap = "object";
    // "dependency" (another call must happen first) or "constraint"
    // (argument/state restriction); informational category of the hint.
    std::string category = "constraint";
};

class MessageCatalog {
  public:
    // Load from a JSON file: {kind: {"standard": .., "augmented": .., "wrap": ..,
    // "category": ..}, ...}.  Throws std::runtime_error on missing/invalid file.
    static MessageCatalog load(const std::filesystem::path& file);
    // The catalog bundled with the library (compiled-in copy of data/messages.json).
    static const MessageCatalog& builtin();

    void insert(std::string kind, MessageTemplate t);
    bool has(const std::string& kind) const { return templates_.count(kind) != 0; }
    const MessageTemplate& get(const std::string& kind) const;  // throws std::out_of_range

    // Render `kind` in the given mode, substituting {placeholder} occurrences
    // from `fields`.  Unknown placeholders are left verbatim; unknown kinds throw.
    std::string render(const std::string& kind, FeedbackMode mode,
                       const std::map<std::string, std::string>& fields) const;

    size_t size() const { return templates_.size(); }

  private:
    std::map<std::string, MessageTemplate> templates_;
};

}  // namespace toolgym
