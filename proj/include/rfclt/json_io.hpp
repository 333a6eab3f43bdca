#pragma once
// JSON bindings for model descriptors and report envelopes. ordered_json is
// used throughout so a given config+seed yields byte-identical output
// (timestamp aside), which keeps golden files diffable.

#include <json.hpp>

#include <string>

#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt {

using Json = nlohmann::ordered_json;

// Array of integers -> Index. expected_dim < 0 accepts any dimension 1..4.
// Errors mention `where` (a JSON-path-ish label) for CLI diagnostics.
Index index_from_json(const Json& j, int expected_dim, const std::string& where);
Json index_to_json(const Index& v);

// Model descriptor:
//   {"kind":"linear","dim":2,
//    "coeffs":[{"index":[0,0],"value":0.5}, ...],
//    "innovations":{"dist":"normal|rademacher|uniform",
//                   "structure":"iid|column-mds","seed":1}}
// Volterra entries use a 2d-component index [u..., v...]. A linear model may
// instead give {"generator":{"name":"alternating","radius":80}}.
// `innovations` defaults to iid standard normal with seed 0.
Model model_from_json(const Json& j, const std::string& where = "model");
Json model_to_json(const Model& m);

Json innovations_to_json(const InnovationSpec& spec);

// {"schema_version":1,"subcommand":...,"timestamp":...,"config":...,
//  "results":...}; timestamp is RFC 3339 UTC or "" when disabled (tests
// strip it anyway).
Json report_envelope(const std::string& subcommand, const Json& config,
                     const Json& results, bool with_timestamp = true);

}  // namespace rfclt
