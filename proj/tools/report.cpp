#include "report.hpp"

#include <algorithm>

namespace hhp::cli {

namespace {

Json exact(const ExactScalar& x) { return x.str(); }

ExactScalar exact_from(const Json& j) { return parse_scalar(j.get<std::string>()); }

Json optional_exact(const std::optional<ExactScalar>& x) { return x ? exact(*x) : Json(nullptr); }

std::optional<ExactScalar> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return exact_from(j.at(key));
}

Json exact_list(const std::vector<ExactScalar>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(exact(x));
  return out;
}

RecordKind kind_from(const std::string& text) {
  for (RecordKind k : {RecordKind::Cubic, RecordKind::LinearD, RecordKind::Quartic})
    if (text == to_string(k)) return k;
  throw Error(ErrorKind::Parse, "unknown record kind '" + text + "'");
}

Json monomial_json(const Monomial& m) { return Json::array({m.j, m.k}); }

Json coefficient_map(const std::map<Monomial, ExactScalar>& h) {
  Json out = Json::array();
  for (const auto& [m, c] : h) out.push_back({{"j", m.j}, {"k", m.k}, {"value", exact(c)}});
  return out;
}

}  // namespace

Json header(const std::string& command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

std::string branch_name(Branch b) { return b == Branch::Plus ? "+" : "-"; }

Branch parse_branch(const std::string& text) {
  if (text == "+" || text == "plus") return Branch::Plus;
  if (text == "-" || text == "minus") return Branch::Minus;
  throw Error(ErrorKind::Parse, "branch must be + or -, got '" + text + "'");
}

Json params_json(const ModelParams& p) {
  return {{"C", exact(p.C)},
          {"lambda1", exact(p.lambda1)},
          {"lambda2", exact(p.lambda2)},
          {"mu", optional_exact(p.mu)},
          {"H", optional_exact(p.H)}};
}

ModelParams params_from_json(const Json& j) {
  return ModelParams{exact_from(j.at("C")), exact_from(j.at("lambda1")), exact_from(j.at("lambda2")),
                     optional_from(j, "mu"), optional_from(j, "H")};
}

Json resonance_json(const ResonanceReport& r, Branch alpha_branch) {
  Json out{{"case", to_string(r.case_id)}};
  if (r.case_id == CaseId::Case2) out["alpha_branch"] = branch_name(alpha_branch);
  out["r"] = exact_list(r.system_resonances);
  out["r4"] = exact_list(r.y_resonances);
  out["r_admissible"] = r.all_admissible;
  out["r4_admissible"] = r.y_admissible;
  out["coincident"] = r.coincident;
  out["logarithmic"] = r.logarithmic;
  return out;
}

Json series_json(const LaurentSeries<ExactScalar>& s) {
  Json coeffs = Json::array();
  for (int p = s.leading_exponent(); p < s.truncation_order(); ++p) {
    ExactScalar c = s.coefficient(p);
    if (!c.is_zero()) coeffs.push_back({{"power", p}, {"value", exact(c)}});
  }
  return {{"truncation", s.truncation_order()}, {"coefficients", coeffs}};
}

LaurentSeries<ExactScalar> series_from_json(const Json& j) {
  int trunc = j.at("truncation").get<int>();
  std::vector<std::pair<int, ExactScalar>> terms;
  for (const auto& t : j.at("coefficients")) terms.emplace_back(t.at("power").get<int>(), exact_from(t.at("value")));
  if (terms.empty()) return LaurentSeries<ExactScalar>::zero(trunc);
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  int first = terms.front().first;
  if (terms.back().first >= trunc) throw Error(ErrorKind::Parse, "series term at or beyond its truncation order");
  std::vector<ExactScalar> c(static_cast<std::size_t>(terms.back().first - first + 1));
  for (const auto& [p, v] : terms) c[static_cast<std::size_t>(p - first)] += v;
  return LaurentSeries<ExactScalar>(first, std::move(c), trunc);
}

Json laurent_json(const LaurentSolution& sol, bool residual_zero) {
  Json out{{"params", params_json(sol.params)}};
  out["energy_defaulted"] = sol.energy_defaulted;
  if (sol.branch)
    out["branch"] = {{"outer", branch_name(sol.branch->outer)}, {"inner", branch_name(sol.branch->inner)}};
  else
    out["branch"] = nullptr;
  Json free = Json::array();
  for (const auto& [p, v] : sol.free_params) free.push_back({{"power", p}, {"value", exact(v)}});
  out["free_params"] = free;
  out["series"] = series_json(sol.series);
  Json log = Json::array();
  for (const auto& c : sol.compatibility_log)
    log.push_back({{"power", c.power},
                   {"constraint", exact(c.constraint)},
                   {"compatible", c.compatible},
                   {"injected", exact(c.injected)}});
  out["compatibility_log"] = log;
  out["residual_zero"] = residual_zero;
  return out;
}

LaurentSolution laurent_from_json(const Json& j) {
  LaurentSolution sol;
  sol.series = series_from_json(j.at("series"));
  if (j.contains("params")) sol.params = params_from_json(j.at("params"));
  if (j.contains("branch") && !j.at("branch").is_null())
    sol.branch = BranchChoice{parse_branch(j.at("branch").at("outer")), parse_branch(j.at("branch").at("inner"))};
  if (j.contains("free_params"))
    for (const auto& f : j.at("free_params")) sol.free_params[f.at("power").get<int>()] = exact_from(f.at("value"));
  sol.energy_defaulted = j.value("energy_defaulted", false);
  return sol;
}

Json record_json(const EllipticSolutionRecord& rec) {
  const auto& c = rec.coeffs;
  Json out{{"pair_id", rec.pair_id}, {"kind", to_string(rec.kind)}};
  out["coefficients"] = {{"A", exact(c.A)}, {"B", exact(c.B)}, {"C", exact(c.C)},
                         {"D", exact(c.D)}, {"E", exact(c.E)}, {"P0", exact(c.P0)}};
  out["params"] = params_json(rec.params);
  if (rec.signs)
    out["signs"] = {{"radical", branch_name(rec.signs->radical)}, {"root", branch_name(rec.signs->root)}};
  else
    out["signs"] = nullptr;
  out["limit_resolved"] = rec.limit_resolved;
  if (rec.params.H) out["dynamical_mu"] = exact(dynamical_mu(rec));
  auto res = quartic_condition_residuals(rec);
  Json residuals = Json::array();
  bool zero = true;
  for (const auto& r : res) {
    residuals.push_back(exact(r));
    zero = zero && r.is_zero();
  }
  out["condition_residuals"] = residuals;
  out["residuals_zero"] = zero;
  auto rel = trajectory_coefficients(rec);
  out["trajectory_relation"] = {{"y2", exact(rel.y2)},
                                {"y1", exact(rel.y1)},
                                {"radical_y", exact(rel.radical_y)},
                                {"radical_const", exact(rel.radical_const)},
                                {"constant", exact(rel.constant)}};
  return out;
}

EllipticSolutionRecord record_from_json(const Json& j) {
  EllipticSolutionRecord rec;
  const auto& c = j.at("coefficients");
  rec.coeffs.A = exact_from(c.at("A"));
  rec.coeffs.B = exact_from(c.at("B"));
  rec.coeffs.C = exact_from(c.at("C"));
  rec.coeffs.D = exact_from(c.at("D"));
  rec.coeffs.E = exact_from(c.at("E"));
  rec.coeffs.P0 = exact_from(c.at("P0"));
  rec.params = params_from_json(j.at("params"));
  rec.kind = kind_from(j.at("kind").get<std::string>());
  rec.pair_id = j.at("pair_id").get<int>();
  if (j.contains("signs") && !j.at("signs").is_null())
    rec.signs = SignChoices{parse_branch(j.at("signs").at("radical")), parse_branch(j.at("signs").at("root"))};
  rec.limit_resolved = j.value("limit_resolved", false);
  return rec;
}

Json fit_json(const FitSystem& sys, const FitSolution& fit) {
  Json order = Json::array({monomial_json({0, sys.m})});
  for (const auto& m : sys.unknowns) order.push_back(monomial_json(m));
  auto counts = count_unknowns(sys.m);
  Json out{{"m", sys.m}, {"monomial_order", order}};
  out["unknowns"] = {{"monomials", counts.monomials},
                     {"unknowns", counts.unknowns},
                     {"pole_bounded_unknowns", counts.pole_bounded_unknowns}};
  out["rows"] = sys.matrix.rows();
  out["row_powers"] = {sys.row_powers.front(), sys.row_powers.back()};
  out["outcome"] = to_string(fit.outcome);
  out["rank"] = fit.rank;
  out["failing_row"] = fit.failing_row ? Json(*fit.failing_row) : Json(nullptr);
  out["failing_power"] = fit.failing_power ? Json(*fit.failing_power) : Json(nullptr);
  out["h"] = fit.candidate ? coefficient_map(fit.candidate->h) : Json(nullptr);
  Json free = Json::array();
  for (const auto& m : fit.free_unknowns) free.push_back(monomial_json(m));
  out["free_unknowns"] = free;
  Json null_space = Json::array();
  for (const auto& v : fit.null_space) null_space.push_back(coefficient_map(v));
  out["null_space"] = null_space;
  return out;
}

}  // namespace hhp::cli
