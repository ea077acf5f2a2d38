// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>

#include "env_internal.hpp"

namespace toolgym::detail {

namespace {

std::string route_key(const std::string& from, const std::string& to, const std::string& date,
                      const std::string& cls) {
    return from + "|" + to + "|" + date + "|" + cls;
}

std::string zip_pair_key(const std::string& a, const std::string& b) {
    return a <= b ? a + "|" + b : b + "|" + a;
}

bool known_airport(const TravelState& st, const std::string& code) {
    if (std::find(st.airports.begin(), st.airports.end(), code) != st.airports.end())
        return true;
    // codes reachable through the nearest-airport lookup are bookable even
    // when the public airport list does not include them
    for (const auto& [city, c] : st.nearest_airport) {
        (void)city;
        if (c == code) return true;
    }
    return false;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::string money(double v) { return format_number(v); }

}  // namespace

ToolResult travel_execute(TravelState& st, const ToolCall& call, const Ctx& ctx) {
    const json& a = call.arguments;

    if (call.name == "list_all_airports") {
        json codes = json::array();
        for (const auto& c : st.airports) codes.push_back(c);
        return ok_result(codes);
    }

    if (call.name == "get_nearest_airport_by_city") {
        const std::string city = a.at("location").get<std::string>();
        auto it = st.nearest_airport.find(city);
        if (it == st.nearest_airport.end())
            return ctx.fail("travel.unknown-city-airport", {{"city", city}});
        return ok_result({{"nearest_airport", it->second}});
    }

    if (call.name == "get_flight_cost") {
        const std::string from = a.at("travel_from").get<std::string>();
        const std::string to = a.at("travel_to").get<std::string>();
        const std::string date = a.at("travel_date").get<std::string>();
        const std::string cls = a.at("travel_class").get<std::string>();
        const bool from_ok = known_airport(st, from);
        const bool to_ok = known_airport(st, to);
        if (!from_ok || !to_ok) {
            std::string detail;
            if (!from_ok) detail += "origin airport '" + from + "'";
            if (!from_ok && !to_ok) detail += ", ";
            if (!to_ok) detail += "destination airport '" + to + "'";
            return ctx.fail("travel.invalid-airport", {{"detail", detail}});
        }
        auto it = st.flight_costs.find(route_key(from, to, date, cls));
        if (it == st.flight_costs.end())
            return ctx.fail("travel.no-route", {{"from", from},
                                                {"to", to},
                                                {"date", date},
                                                {"class", cls}});
        return ok_result({{"travel_cost_list", json::array({it->second})}});
    }

    if (call.name == "book_flight") {
        const std::string token = a.at("access_token").get<std::string>();
        const std::string card = a.at("card_id").get<std::string>();
        const std::string date = a.at("travel_date").get<std::string>();
        const std::string from = a.at("travel_from").get<std::string>();
        const std::string to = a.at("travel_to").get<std::string>();
        const std::string cls = a.at("travel_class").get<std::string>();
        const double cost = a.at("travel_cost").get<double>();
        if (token != st.access_token) return ctx.fail("travel.bad-token");
        auto cit = st.card_balance.find(card);
        if (cit == st.card_balance.end()) {
            std::string cards;
            for (const auto& [id, bal] : st.card_balance) {
                (void)bal;
                if (!cards.empty()) cards += ", ";
                cards += id;
            }
            return ctx.fail("travel.card-not-found", {{"card", card}, {"cards", cards}});
        }
        if (cit->second < cost)
            return ctx.fail("travel.insufficient-balance",
                            {{"card", card}, {"balance", money(cit->second)},
                             {"cost", money(cost)}});
        cit->second -= cost;
        const std::string booking_id = std::to_string(st.next_booking_id++);
        const std::string transaction_id = std::to_string(st.next_transaction_id++);
        st.bookings[booking_id] = {card, date, from, to, cls, cost};
        return ok_result({{"booking_id", booking_id},
                          {"transaction_id", transaction_id},
                          {"booking_status", true}});
    }

    if (call.name == "cancel_booking") {
        const std::string token = a.at("access_token").get<std::string>();
        const std::string id = a.at("booking_id").get<std::string>();
        if (token != st.access_token) return ctx.fail("travel.bad-token");
        auto it = st.bookings.find(id);
        if (it == st.bookings.end()) {
            std::string ids;
            for (const auto& [bid, b] : st.bookings) {
                (void)b;
                if (!ids.empty()) ids += ", ";
                ids += bid;
            }
            return ctx.fail("travel.booking-not-found", {{"id", id}, {"ids", ids}});
        }
        st.card_balance[it->second.card_id] += it->second.travel_cost;
        st.bookings.erase(it);
        return ok_result({{"cancel_status", true}});
    }

    if (call.name == "get_zipcode_based_on_city") {
        const std::string city = a.at("city").get<std::string>();
        auto it = st.zipcodes.find(city);
        if (it == st.zipcodes.end()) return ctx.fail("travel.unknown-city-zip", {{"city", city}});
        return ok_result({{"zipcode", it->second}});
    }

    if (call.name == "estimate_distance") {
        const std::string za = a.at("cityA").get<std::string>();
        const std::string zb = a.at("cityB").get<std::string>();
        auto it = st.distances.find(zip_pair_key(za, zb));
        if (!all_digits(za) || !all_digits(zb) || it == st.distances.end())
            return ctx.fail("travel.distance-not-found", {{"a", za}, {"b", zb}});
        return ok_result({{"distance", it->second}});
    }

    if (call.name == "travel_get_login_status") return ok_result({{"status", st.logged_in}});

    return ctx.fail("unknown-tool", {{"fn", call.name}});
}

json travel_to_json(const TravelState& st) {
    json bookings = json::object();
    for (const auto& [id, b] : st.bookings)
        bookings[id] = {{"card_id", b.card_id},       {"travel_date", b.travel_date},
                        {"travel_from", b.travel_from}, {"travel_to", b.travel_to},
                        {"travel_class", b.travel_class}, {"travel_cost", b.travel_cost}};
    json cards = json::object();
    for (const auto& [id, bal] : st.card_balance) cards[id] = bal;
    json j;
    j["airports"] = st.airports;
    j["nearest_airport"] = st.nearest_airport;
    j["zipcodes"] = st.zipcodes;
    j["flight_costs"] = st.flight_costs;
    j["distances"] = st.distances;
    j["access_token"] = st.access_token;
    j["logged_in"] = st.logged_in;
    j["cards"] = cards;
    j["bookings"] = bookings;
    j["next_booking_id"] = st.next_booking_id;
    j["next_transaction_id"] = st.next_transaction_id;
    return j;
}

TravelState travel_from_json(const json& j) {
    TravelState st;
    for (const auto& c : j.value("airports", json::array())) st.airports.push_back(c);
    for (const auto& [k, v] : object_field(j, "nearest_airport").items())
        st.nearest_airport[k] = v.get<std::string>();
    for (const auto& [k, v] : object_field(j, "zipcodes").items())
        st.zipcodes[k] = v.get<std::string>();
    for (const auto& [k, v] : object_field(j, "flight_costs").items())
        st.flight_costs[k] = v.get<double>();
    for (const auto& [k, v] : object_field(j, "distances").items()) {
        const size_t bar = k.find('|');
        if (bar == std::string::npos) continue;
        // store under the canonical (sorted) key so lookups are symmetric
        st.distances[zip_pair_key(k.substr(0, bar), k.substr(bar + 1))] = v.get<double>();
    }
    st.access_token = j.value("access_token", "");
    st.logged_in = j.value("logged_in", true);
    for (const auto& [k, v] : object_field(j, "cards").items())
        st.card_balance[k] = v.is_object() ? v.value("balance", 0.0) : v.get<double>();
    for (const auto& [k, v] : object_field(j, "bookings").items())
        st.bookings[k] = {v.value("card_id", ""),     v.value("travel_date", ""),
                          v.value("travel_from", ""), v.value("travel_to", ""),
                          v.value("travel_class", ""), v.value("travel_cost", 0.0)};
    st.next_booking_id = j.value("next_booking_id", 1);
    st.next_transaction_id = j.value("next_transaction_id", 1);
    return st;
}

}  // namespace toolgym::detail
