#pragma once

#include <string>

#include "lazyref/semantics.hpp"
#include "lazyref/typecheck.hpp"
#include "vendor_json.hpp"

namespace lazyref {

// Stable machine-readable report schema:
//   {verdict, mode, bindings: [{name, type, termination}],
//    errors: [{rule, span: {line, col}, message, query_id}],
//    stats: {queries, solver_ms}}
nlohmann::json report_to_json(const tc::Report& report);
tc::Report report_from_json(const nlohmann::json& j);

// Run outcomes: {outcome, result?, steps, strategy, fuel}.
nlohmann::json outcome_to_json(const sem::Outcome& outcome,
                               const std::string& strategy, std::size_t fuel);

}  // namespace lazyref
