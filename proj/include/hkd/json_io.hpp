#pragma once

#include <string>

#include "json.hpp"

#include "hkd/exponent.hpp"
#include "hkd/operators.hpp"

namespace hkd {

using json = nlohmann::ordered_json;

json to_json(const Window& w);
Window window_from_json(const json& j);

json to_json(const CubeAddress& a);
CubeAddress cube_from_json(const json& j);

// Rational payloads round-trip bit-exactly as "p/q" strings; approximate
// payloads are emitted as JSON numbers.
json to_json(const StepFunction& f);
StepFunction step_from_json(const json& j);

json exponent_to_json(const Exponent& p);
Exponent exponent_from_json(const json& j);

json to_json(const GridSystem& g, const CZResult& r);

// Function descriptors: "indicator:a,b" (cell-aligned rationals) or a path
// to a StepFunction JSON file.
StepFunction parse_function(const std::string& desc, const Window& w);

// Exponent descriptors: builtin ("const:q", "jump:p1,p2", "smooth:a,b") or a
// path to an Exponent JSON file.
Exponent parse_exponent(const std::string& desc, const Window& w);

std::string dump_json(const json& j);

}  // namespace hkd
