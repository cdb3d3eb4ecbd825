#pragma once

#include <string>

#include <json.hpp>

#include "volterra/problem.hpp"

namespace volterra {

/// Build a problem from its JSON document: expression-valued kernels, curves
/// and right-hand side, optional derivative expressions and Taylor block, or
/// a "catalog" reference. Throws Error/SyntaxError on malformed input.
ProblemSpec load_problem_json(const nlohmann::json& doc);

ProblemSpec load_problem_file(const std::string& path);

/// Problem-file document for a catalog entry; round-trips through
/// load_problem_json.
nlohmann::json catalog_to_json(const std::string& name);

nlohmann::json taylor_to_json(const TaylorData& td);
TaylorData taylor_from_json(const nlohmann::json& doc, int m, int n);

}  // namespace volterra
