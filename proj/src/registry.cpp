// SPDX-License-Identifier: Apache-2.0

#include "toolgym/registry.hpp"

#include <stdexcept>

namespace toolgym {

const char* param_type_name(ParamType t) {
    switch (t) {
        case ParamType::String: return "string";
        case ParamType::Number: return "number";
        case ParamType::Boolean: return "boolean";
        case ParamType::List: return "array";
        case ParamType::Object: return "object";
    }
    return "?";
}

std::optional<ParamType> param_type_from_name(const std::string& s) {
    if (s == "string") return ParamType::String;
    if (s == "number" || s == "float" || s == "integer") return ParamType::Number;
    if (s == "boolean" || s == "bool") return ParamType::Boolean;
    if (s == "array" || s == "list") return ParamType::List;
    if (s == "object" || s == "dict") return ParamType::Object;
    return std::nullopt;
}

const ParamSpec* ToolSpec::find_param(const std::string& n) const {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

void ToolRegistry::add(ToolSpec spec) {
    auto [it, inserted] = specs_.emplace(spec.name, std::move(spec));
    if (inserted) order_.push_back(it->first);
    else it->second = spec;
}

bool ToolRegistry::has(const std::string& name) const { return specs_.count(name) != 0; }

const ToolSpec& ToolRegistry::get(const std::string& name) const { return specs_.at(name); }

const ToolSpec* ToolRegistry::find(const std::string& name) const {
    auto it = specs_.find(name);
    return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> ToolRegistry::names() const { return order_; }

ToolRegistry ToolRegistry::subset(const std::vector<std::string>& names) const {
    ToolRegistry out;
    for (const auto& n : names)
        if (const auto* s = find(n)) out.add(*s);
    return out;
}

json ToolRegistry::describe() const {
    json tools = json::array();
    for (const auto& n : order_) {
        const auto& s = specs_.at(n);
        json params = json::object();
        json required = json::array();
        for (const auto& p : s.params) {
            params[p.name] = {{"type", param_type_name(p.type)}};
            if (!p.description.empty()) params[p.name]["description"] = p.description;
            if (p.required) required.push_back(p.name);
        }
        tools.push_back({{"name", s.name},
                         {"description", s.description},
                         {"parameters", {{"properties", params}, {"required", required}}}});
    }
    return tools;
}

bool type_matches(ParamType t, const json& value) {
    switch (t) {
        case ParamType::String: return value.is_string();
        case ParamType::Number: return value.is_number();  // bool is not a number
        case ParamType::Boolean: return value.is_boolean();
        case ParamType::List: return value.is_array();
        case ParamType::Object: return value.is_object();
    }
    return false;
}

namespace {

ToolRegistry make_builtin() {
    ToolRegistry reg;
    using P = ParamType;
    // --- filesystem ---
    reg.add({"ls", "filesystem", "List the contents of the current directory.",
             {{"a", P::Boolean, false, "also show hidden entries"}}});
    reg.add({"cd", "filesystem", "Change the current working directory.",
             {{"folder", P::String, true, "directory name in the current directory, or '..'"}}});
    reg.add({"find", "filesystem", "Recursively find entries by name.",
             {{"path", P::String, false, "directory to search from (default current)"},
              {"name", P::String, false, "substring to match against entry names"}}});
    reg.add({"grep", "filesystem", "Search a file in the current directory for matching lines.",
             {{"file_name", P::String, true, "file name in the current directory"},
              {"pattern", P::String, true, "substring to search for"}}});
    reg.add({"rm", "filesystem", "Remove a file or empty directory in the current directory.",
             {{"file_name", P::String, true, "name in the current directory"}}});
    reg.add({"rmdir", "filesystem", "Remove an empty directory in the current directory.",
             {{"dir_name", P::String, true, "directory name in the current directory"}}});
    reg.add({"cp", "filesystem", "Copy a file or directory within the current directory.",
             {{"source", P::String, true, "existing name in the current directory"},
              {"destination", P::String, true, "new name in the current directory"}}});
    reg.add({"mv", "filesystem", "Move or rename within the current directory.",
             {{"source", P::String, true, "existing name in the current directory"},
              {"destination", P::String, true, "new name or target directory"}}});
    // --- travel ---
    reg.add({"list_all_airports", "travel", "List every known airport code.", {}});
    reg.add({"get_nearest_airport_by_city", "travel",
             "Look up the airport code closest to a city.",
             {{"location", P::String, true, "city name"}}});
    reg.add({"get_flight_cost", "travel", "Quote the cost of a flight.",
             {{"travel_from", P::String, true, "origin airport code"},
              {"travel_to", P::String, true, "destination airport code"},
              {"travel_date", P::String, true, "date, YYYY-MM-DD"},
              {"travel_class", P::String, true, "economy | business | first"}}});
    reg.add({"book_flight", "travel", "Book a flight and charge the given card.",
             {{"access_token", P::String, true, "authentication token"},
              {"card_id", P::String, true, "card to charge"},
              {"travel_date", P::String, true, "date, YYYY-MM-DD"},
              {"travel_from", P::String, true, "origin airport code"},
              {"travel_to", P::String, true, "destination airport code"},
              {"travel_class", P::String, true, "economy | business | first"},
              {"travel_cost", P::Number, true, "cost quoted for this flight"}}});
    reg.add({"cancel_booking", "travel", "Cancel a booking and refund the card.",
             {{"access_token", P::String, true, "authentication token"},
              {"booking_id", P::String, true, "booking to cancel"}}});
    reg.add({"get_zipcode_based_on_city", "travel", "Look up the zipcode of a city.",
             {{"city", P::String, true, "city name"}}});
    reg.add({"estimate_distance", "travel", "Estimate the distance between two zipcodes.",
             {{"cityA", P::String, true, "origin zipcode"},
              {"cityB", P::String, true, "destination zipcode"}}});
    reg.add({"travel_get_login_status", "travel", "Report whether the user is logged in.", {}});
    // --- social ---
    reg.add({"authenticate_twitter", "social", "Authenticate before posting.",
             {{"username", P::String, true, "account user name"},
              {"password", P::String, true, "account password"}}});
    reg.add({"post_tweet", "social", "Post a tweet as the authenticated user.",
             {{"content", P::String, true, "tweet text"},
              {"tags", P::List, false, "hashtag strings"},
              {"mentions", P::List, false, "mentioned user names"}}});
    reg.add({"retweet", "social", "Retweet an existing tweet.",
             {{"tweet_id", P::Number, true, "id of the tweet to retweet"}}});
    reg.add({"get_user_tweets", "social", "Fetch all tweets of one user.",
             {{"username", P::String, true, "account user name"}}});
    // --- vehicle ---
    reg.add({"fillFuelTank", "vehicle", "Add fuel to the tank, in gallons.",
             {{"fuelAmount", P::Number, true, "gallons to add"}}});
    reg.add({"lockDoors", "vehicle", "Lock or unlock the given doors.",
             {{"unlock", P::Boolean, true, "true to unlock, false to lock"},
              {"door", P::List, true, "door names"}}});
    reg.add({"startEngine", "vehicle", "Start or stop the engine.",
             {{"ignitionMode", P::String, true, "START or STOP"}}});
    reg.add({"pressBrakePedal", "vehicle", "Press the brake pedal.",
             {{"pedalPosition", P::Number, true, "0 (released) to 1 (fully pressed)"}}});
    reg.add({"mean", "vehicle", "Arithmetic mean of a list of numbers.",
             {{"numbers", P::List, true, "numbers to average"}}});
    reg.add({"estimate_drive_feasibility_by_mileage", "vehicle",
             "Check whether current fuel covers the given distance.",
             {{"distance", P::Number, true, "distance in miles"}}});
    return reg;
}

}  // namespace

const ToolRegistry& builtin_tools() {
    static const ToolRegistry reg = make_builtin();
    return reg;
}

}  // namespace toolgym
