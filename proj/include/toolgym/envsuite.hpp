// SPDX-License-Identifier: Apache-2.0
//
// Simulated tool domains: filesystem, travel booking, a small twitter clone,
// and a vehicle controller.  All state lives in plain structs; execution is
// deterministic, and a failed call never mutates state (failure atomicity).
// The feedback mode changes only the *text* of error messages, never which
// error kind fires or how state evolves.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toolgym/messages.hpp"
#include "toolgym/protocol.hpp"

namespace toolgym {

// ---------------------------------------------------------------------------
// Domain states

struct FsNode {
    bool is_dir = false;
    std::string content;                   // file payload when !is_dir
    std::map<std::string, FsNode> children;  // sorted by name
};

struct FileSystemState {
    FsNode root;                       // always a directory
    std::vector<std::string> cwd;      // path components below root
};

struct TravelState {
    std::vector<std::string> airports;                       // display order
    std::map<std::string, std::string> nearest_airport;      // city -> code
    std::map<std::string, std::string> zipcodes;             // city -> zipcode
    std::map<std::string, double> flight_costs;              // "FROM|TO|DATE|CLASS" -> cost
    std::map<std::string, double> distances;                 // "ZIPA|ZIPB" -> distance
    std::string access_token;
    bool logged_in = true;
    std::map<std::string, double> card_balance;              // card id -> balance
    struct Booking {
        std::string card_id, travel_date, travel_from, travel_to, travel_class;
        double travel_cost = 0;
    };
    std::map<std::string, Booking> bookings;                 // booking id -> record
    long next_booking_id = 1;
    long next_transaction_id = 1;
};

struct Tweet {
    long id = 0;
    std::string username, content;
    std::vector<std::string> tags, mentions;
};

struct SocialState {
    bool authenticated = false;
    std::string username;                       // account used for posting
    std::map<long, Tweet> tweets;
    long next_tweet_id = 0;
    std::map<std::string, std::set<long>> retweets;  // username -> tweet ids
};

struct VehicleState {
    double fuel_level = 0.0;
    double tank_capacity = 50.0;
    std::map<std::string, bool> door_locked;    // driver/passenger/rear_left/rear_right
    double brake_pedal = 0.0;                   // 0..1
    bool engine_running = false;
    double mpg = 20.0;                          // miles per gallon
    double battery_voltage = 12.6;
};

struct EnvState {
    std::optional<FileSystemState> filesystem;
    std::optional<TravelState> travel;
    std::optional<SocialState> social;
    std::optional<VehicleState> vehicle;
};

// ---------------------------------------------------------------------------
// Results and fingerprints

struct ToolResult {
    bool ok = false;
    json payload;             // set when ok
    std::string error_kind;   // set when !ok
    std::string message;      // error text rendered for the active mode
    bool bare_error = false;  // render as a bare string instead of {"error": ...}
};

// JSON form of one result as it appears in the tool response array.
json tool_result_to_json(const ToolResult& r);

struct StateFingerprint {
    std::string text;  // canonical serialization of the full EnvState
    bool operator==(const StateFingerprint&) const = default;
};

json env_state_to_json(const EnvState& s);
EnvState env_state_from_json(const json& j);  // throws std::runtime_error on bad shape
StateFingerprint fingerprint(const EnvState& s);

// ---------------------------------------------------------------------------
// Execution

// Execute one call against the state.  `visible` is the tool registry for the
// current turn: names outside it are rejected as unknown without touching
// state.  Schema violations (bad arguments) also leave state untouched and
// render python-style runtime errors.  Schema-correct calls dispatch to their
// domain, which may still fail with a domain error kind; on any failure the
// state is unchanged.
ToolResult execute_call(EnvState& state, const ToolCall& call, const ToolRegistry& visible,
                        FeedbackMode mode, const MessageCatalog& catalog);

// Execute a whole batch in order (all calls run; failures do not stop the
// batch) and return per-call results.
std::vector<ToolResult> execute_batch(EnvState& state, const std::vector<ToolCall>& calls,
                                      const ToolRegistry& visible, FeedbackMode mode,
                                      const MessageCatalog& catalog);

// The response text appended to the dialogue for a batch: a JSON array with
// one entry per call (payload object, {"error": ...}, or bare string).
std::string render_batch_response(const std::vector<ToolResult>& results);

// ---------------------------------------------------------------------------
// Filesystem helpers shared with tests

std::string fs_abs_path(const FileSystemState& fs);  // "/" + joined cwd

}  // namespace toolgym
