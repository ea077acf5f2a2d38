// SPDX-License-Identifier: Apache-2.0
//
// Internal glue shared by the domain implementations.

#pragma once

#include <map>
#include <string>

#include "toolgym/envsuite.hpp"

namespace toolgym::detail {

using Fields = std::map<std::string, std::string>;

struct Ctx {
    FeedbackMode mode;
    const MessageCatalog* catalog;

    ToolResult fail(const std::string& kind, const Fields& fields = {}) const {
        ToolResult r;
        r.ok = false;
        r.error_kind = kind;
        r.message = catalog->render(kind, mode, fields);
        r.bare_error = catalog->get(kind).wrap == "bare";
        return r;
    }
};

inline ToolResult ok_result(json payload) {
    ToolResult r;
    r.ok = true;
    r.payload = std::move(payload);
    return r;
}

// Python-style type name of a JSON value, used in runtime error text.
const char* py_type_name(const json& v);
// Python-style name of a declared parameter type.
const char* py_param_type(ParamType t);

ToolResult fs_execute(FileSystemState& st, const ToolCall& call, const Ctx& ctx);
ToolResult travel_execute(TravelState& st, const ToolCall& call, const Ctx& ctx);
ToolResult social_execute(SocialState& st, const ToolCall& call, const Ctx& ctx);
ToolResult vehicle_execute(VehicleState& st, const ToolCall& call, const Ctx& ctx);

json fs_to_json(const FileSystemState& st);
json travel_to_json(const TravelState& st);
json social_to_json(const SocialState& st);
json vehicle_to_json(const VehicleState& st);

FileSystemState fs_from_json(const json& j);
TravelState travel_from_json(const json& j);
SocialState social_from_json(const json& j);
VehicleState vehicle_from_json(const json& j);

}  // namespace toolgym::detail
