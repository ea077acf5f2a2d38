// SPDX-License-Identifier: Apache-2.0
//
// Small JSON helpers shared across the library.
//
// Two distinct JSON uses exist side by side:
//  * display/user-facing payloads keep insertion order  -> nlohmann::ordered_json
//  * canonical serialization sorts object keys and formats every number with
//    15 significant digits, so equal states give byte-identical strings.

#pragma once

#include <string>

#include "json.hpp"

namespace toolgym {

using json = nlohmann::ordered_json;

// Canonical text form: keys sorted, no insignificant whitespace, numbers
// rendered with "%.15g".  Integral values print without a decimal point.
std::string canonical_dump(const json& j);

// Structural equality with numeric tolerance.  Numbers of any kind compare by
// value with relative tolerance `rtol` (and the same value used as an absolute
// floor near zero); strings/booleans/null compare exactly; objects must have
// identical key sets; arrays are order-sensitive.
bool approx_equal(const json& a, const json& b, double rtol = 1e-9);

// Round `v` through the canonical 15-significant-digit text form.
std::string format_number(double v);

// `j[key]` when it is an object, else a shared empty object.  Unlike
// j.value(key, json::object()) the result is a stable reference, so it is
// safe to chain .items() on it inside a range-for.
const json& object_field(const json& j, const char* key);

}  // namespace toolgym
