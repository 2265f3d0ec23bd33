#pragma once

// JSON forms of the exact objects. Exact values are written as the strings of
// ExactScalar::str() and read back with parse_scalar, so a report can be fed
// to another subcommand without loss.

#include <string>

#include "hhp/elliptic.hpp"
#include "hhp/fitter.hpp"
#include "hhp/painleve.hpp"
#include "json.hpp"

namespace hhp::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json header(const std::string& command);

std::string branch_name(Branch b);
Branch parse_branch(const std::string& text);

Json params_json(const ModelParams& p);
ModelParams params_from_json(const Json& j);

Json resonance_json(const ResonanceReport& r, Branch alpha_branch);

Json series_json(const LaurentSeries<ExactScalar>& s);
LaurentSeries<ExactScalar> series_from_json(const Json& j);

Json laurent_json(const LaurentSolution& sol, bool residual_zero);
LaurentSolution laurent_from_json(const Json& j);

Json record_json(const EllipticSolutionRecord& rec);
EllipticSolutionRecord record_from_json(const Json& j);

Json fit_json(const FitSystem& sys, const FitSolution& fit);

}  // namespace hhp::cli
