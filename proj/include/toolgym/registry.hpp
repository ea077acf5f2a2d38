// SPDX-License-Identifier: Apache-2.0
//
// Tool schemas.  A registry is the set of tools visible to the agent at a
// given turn; schema checks are purely name/arity/type based and never touch
// environment state.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toolgym/jsonutil.hpp"

namespace toolgym {

enum class ParamType { String, Number, Boolean, List, Object };

const char* param_type_name(ParamType t);
std::optional<ParamType> param_type_from_name(const std::string& s);

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::String;
    bool required = true;
    std::string description;
};

struct ToolSpec {
    std::string name;
    std::string domain;  // filesystem | travel | social | vehicle
    std::string description;
    std::vector<ParamSpec> params;

    const ParamSpec* find_param(const std::string& n) const;
};

class ToolRegistry {
  public:
    void add(ToolSpec spec);
    bool has(const std::string& name) const;
    const ToolSpec& get(const std::string& name) const;  // throws std::out_of_range
    const ToolSpec* find(const std::string& name) const;
    std::vector<std::string> names() const;              // insertion order
    size_t size() const { return order_.size(); }

    // Registry restricted to the given tool names (unknown names ignored).
    ToolRegistry subset(const std::vector<std::string>& names) const;

    // JSON tool list in the shape shown to the agent inside the system prompt.
    json describe() const;

  private:
    std::map<std::string, ToolSpec> specs_;
    std::vector<std::string> order_;
};

// True when `value` is acceptable for the declared parameter type.  Numbers
// accept both integers and floats; booleans are not numbers.
bool type_matches(ParamType t, const json& value);

// The full built-in tool set across all four domains.
const ToolRegistry& builtin_tools();

}  // namespace toolgym
