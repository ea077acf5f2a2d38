// SPDX-License-Identifier: Apache-2.0

#include "toolgym/jsonutil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

namespace toolgym {

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
        // integral value: print without exponent/decimal point
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

namespace {

void dump_canonical(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            // ordered_json keeps insertion order; sort keys explicitly
            std::vector<std::pair<std::string, const json*>> entries;
            for (auto it = j.begin(); it != j.end(); ++it)
                entries.emplace_back(it.key(), &it.value());
            std::sort(entries.begin(), entries.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            out += '{';
            bool first = true;
            for (const auto& [k, v] : entries) {
                if (!first) out += ',';
                first = false;
                out += json(k).dump();
                out += ':';
                dump_canonical(*v, out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                dump_canonical(v, out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float:
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
            out += format_number(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

}  // namespace

std::string canonical_dump(const json& j) {
    std::string out;
    dump_canonical(j, out);
    return out;
}

const json& object_field(const json& j, const char* key) {
    static const json empty = json::object();
    if (j.is_object() && j.contains(key) && j.at(key).is_object()) return j.at(key);
    return empty;
}

bool approx_equal(const json& a, const json& b, double rtol) {
    const bool a_num = a.is_number();
    const bool b_num = b.is_number();
    if (a_num && b_num) {
        const double x = a.get<double>();
        const double y = b.get<double>();
        if (x == y) return true;
        const double tol = rtol * std::max({std::fabs(x), std::fabs(y), 1.0});
        return std::fabs(x - y) <= tol;
    }
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return false;
            if (!approx_equal(it.value(), b.at(it.key()), rtol)) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (!approx_equal(a[i], b[i], rtol)) return false;
        return true;
    }
    return a == b;
}

}  // namespace toolgym
