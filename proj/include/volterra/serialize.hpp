#pragma once

#include <json.hpp>

#include "volterra/asymptotic.hpp"
#include "volterra/characteristic.hpp"
#include "volterra/problem.hpp"

namespace volterra {

nlohmann::json to_json(const ValidationReport& rep);

/// Array of {j, det, rank, class, multiplicity} plus totals.
nlohmann::json to_json(const CharacteristicReport& rep);

/// {terms: [{j, p, vector, param_dirs}], params: [...], text, residual_order}.
nlohmann::json to_json(const AsymptoticResult& res);

}  // namespace volterra
