// SPDX-License-Identifier: Apache-2.0

#include "toolgym/envsuite.hpp"

#include "env_internal.hpp"

namespace toolgym {

using detail::Ctx;

namespace {

const char* api_class_for_domain(const std::string& domain) {
    if (domain == "filesystem") return "GorillaFileSystem";
    if (domain == "travel") return "TravelAPI";
    if (domain == "social") return "TwitterAPI";
    if (domain == "vehicle") return "VehicleControlAPI";
    return "API";
}

// Render schema violations as python-style runtime errors, mirroring what a
// keyword-argument call against the real API class would raise.
ToolResult bad_args_result(const ToolCall& call, const ToolSpec& spec, const Ctx& ctx) {
    const char* api = api_class_for_domain(spec.domain);
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        if (!spec.find_param(it.key()))
            return ctx.fail("bad-args.unexpected-kwarg",
                            {{"api", api}, {"fn", call.name}, {"arg", it.key()},
                             {"params", [&] {
                                  std::string s;
                                  for (const auto& p : spec.params) {
                                      if (!s.empty()) s += ", ";
                                      s += p.name;
                                  }
                                  return s;
                              }()}});
    }
    for (const auto& p : spec.params) {
        if (p.required && !call.arguments.contains(p.name))
            return ctx.fail("bad-args.missing-kwarg",
                            {{"api", api}, {"fn", call.name}, {"arg", p.name},
                             {"type", param_type_name(p.type)}});
    }
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
        const ParamSpec* p = spec.find_param(it.key());
        if (p && !type_matches(p->type, it.value()))
            return ctx.fail("bad-args.type-error",
                            {{"expected", detail::py_param_type(p->type)},
                             {"got", detail::py_type_name(it.value())},
                             {"arg", it.key()},
                             {"fn", call.name}});
    }
    // classify_call said BadArgs, so one of the loops above must have fired
    return ctx.fail("bad-args.unexpected-kwarg", {{"api", api}, {"fn", call.name},
                                                  {"arg", "?"}, {"params", ""}});
}

}  // namespace

namespace detail {

const char* py_type_name(const json& v) {
    switch (v.type()) {
        case json::value_t::string: return "str";
        case json::value_t::boolean: return "bool";
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return "int";
        case json::value_t::number_float: return "float";
        case json::value_t::array: return "list";
        case json::value_t::object: return "dict";
        case json::value_t::null: return "NoneType";
        default: return "object";
    }
}

const char* py_param_type(ParamType t) {
    switch (t) {
        case ParamType::String: return "str";
        case ParamType::Number: return "float";
        case ParamType::Boolean: return "bool";
        case ParamType::List: return "list";
        case ParamType::Object: return "dict";
    }
    return "object";
}

}  // namespace detail

ToolResult execute_call(EnvState& state, const ToolCall& call, const ToolRegistry& visible,
                        FeedbackMode mode, const MessageCatalog& catalog) {
    const Ctx ctx{mode, &catalog};
    const ToolSpec* spec = visible.find(call.name);
    if (!spec) {
        std::string tools;
        for (const auto& n : visible.names()) {
            if (!tools.empty()) tools += ", ";
            tools += n;
        }
        return ctx.fail("unknown-tool", {{"fn", call.name}, {"tools", tools}});
    }
    if (classify_call(call, visible) == CallClass::BadArgs)
        return bad_args_result(call, *spec, ctx);

    if (spec->domain == "filesystem") {
        if (!state.filesystem) return ctx.fail("env.domain-inactive");
        return detail::fs_execute(*state.filesystem, call, ctx);
    }
    if (spec->domain == "travel") {
        if (!state.travel) return ctx.fail("env.domain-inactive");
        return detail::travel_execute(*state.travel, call, ctx);
    }
    if (spec->domain == "social") {
        if (!state.social) return ctx.fail("env.domain-inactive");
        return detail::social_execute(*state.social, call, ctx);
    }
    if (spec->domain == "vehicle") {
        if (!state.vehicle) return ctx.fail("env.domain-inactive");
        return detail::vehicle_execute(*state.vehicle, call, ctx);
    }
    return ctx.fail("env.domain-inactive");
}

std::vector<ToolResult> execute_batch(EnvState& state, const std::vector<ToolCall>& calls,
                                      const ToolRegistry& visible, FeedbackMode mode,
                                      const MessageCatalog& catalog) {
    std::vector<ToolResult> out;
    out.reserve(calls.size());
    for (const auto& c : calls) out.push_back(execute_call(state, c, visible, mode, catalog));
    return out;
}

json tool_result_to_json(const ToolResult& r) {
    if (r.ok) return r.payload;
    if (r.bare_error) return json(r.message);
    return json{{"error", r.message}};
}

std::string render_batch_response(const std::vector<ToolResult>& results) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back(tool_result_to_json(r));
    return arr.dump();
}

json env_state_to_json(const EnvState& s) {
    json j = json::object();
    if (s.filesystem) j["filesystem"] = detail::fs_to_json(*s.filesystem);
    if (s.travel) j["travel"] = detail::travel_to_json(*s.travel);
    if (s.social) j["social"] = detail::social_to_json(*s.social);
    if (s.vehicle) j["vehicle"] = detail::vehicle_to_json(*s.vehicle);
    return j;
}

EnvState env_state_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("environment state must be a JSON object");
    EnvState s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "filesystem") s.filesystem = detail::fs_from_json(it.value());
        else if (it.key() == "travel") s.travel = detail::travel_from_json(it.value());
        else if (it.key() == "social") s.social = detail::social_from_json(it.value());
        else if (it.key() == "vehicle") s.vehicle = detail::vehicle_from_json(it.value());
        else throw std::runtime_error("unknown environment domain: " + it.key());
    }
    return s;
}

StateFingerprint fingerprint(const EnvState& s) {
    return StateFingerprint{canonical_dump(env_state_to_json(s))};
}

}  // namespace toolgym
