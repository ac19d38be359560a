#pragma once

#include "dsid/decentral.hpp"
#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <json.hpp>

#include <string>

namespace dsid {

using Json = nlohmann::json;

/// Matrices serialize as row-major nested arrays.
Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);

/// GlobalModel schema: {n, m, r, N, locals: [{A, E_left, E_right, B, C}]},
/// absent couplings as null.
Json model_to_json(const GlobalModel& model);
GlobalModel model_from_json(const Json& j);

Json simconfig_to_json(const SimConfig& cfg);
SimConfig simconfig_from_json(const Json& j);

Json omegaspec_to_json(const OmegaSpec& spec);
OmegaSpec omegaspec_from_json(const Json& j);

/// GlobalModel schema at the top level plus a `provenance` object (variant,
/// windows, regularization, sharing) and a `failures` array. The caller may
/// add run-level provenance (seeds, VAF) before writing.
Json identified_to_json(const IdentifiedGlobal& result);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace dsid
