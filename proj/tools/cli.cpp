#include "cli.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "CLI11.hpp"
#include "hhp/numeric.hpp"
#include "report.hpp"

namespace hhp::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  unsigned precision_bits = 113;
  double tol = 1e-12;
  std::string out = "-";
  std::string format = "json";
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Domain:
    case ErrorKind::Window:
    case ErrorKind::Pole:
    case ErrorKind::Radius:
    case ErrorKind::DegenerateModel:
    case ErrorKind::TowerMismatch:
    case ErrorKind::TowerDepth:
      return kUsage;
    case ErrorKind::Singularity:
    case ErrorKind::StepUnderflow:
      return kVerifyFailed;
    default:
      return kDegenerate;
  }
}

// Rationals only: decimals are refused so that no value is silently rounded.
ExactScalar exact_arg(const std::string& option, const std::string& text) {
  try {
    return ExactScalar(parse_rational(text));
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, "--" + option + ": " + e.what());
  }
}

std::vector<ExactScalar> exact_list_arg(const std::string& option, const std::string& text) {
  std::vector<ExactScalar> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(exact_arg(option, item));
  if (text.back() == ',') throw Error(ErrorKind::Parse, "--" + option + ": trailing comma");
  return out;
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error(ErrorKind::Parse, "cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw Error(ErrorKind::Parse, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  if (g.out == "-")
    out << text;
  else
    write_atomic(g.out, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

void require_json_format(const Globals& g, const std::string& command) {
  if (g.format != "json") throw Error(ErrorKind::Parse, command + " writes json only; csv is available for verify and sweep");
}

// ---- resonances -------------------------------------------------------------

struct ResonanceArgs {
  std::string C;
};

int cmd_resonances(const Globals& g, const ResonanceArgs& a, std::ostream& out, std::ostream& err) {
  require_json_format(g, "resonances");
  ExactScalar C = exact_arg("C", a.C);
  Json r = header("resonances");
  r["C"] = C.str();

  Json balances = Json::array();
  for (const auto& b : dominant_balances(C)) {
    balances.push_back({{"case", to_string(b.case_id)},
                        {"alpha", b.alpha.str()},
                        {"beta", b.beta},
                        {"a_alpha", b.a_alpha ? Json(b.a_alpha->str()) : Json(nullptr)},
                        {"b_beta", b.b_beta.str()},
                        {"root_branch", branch_name(b.root_branch)},
                        {"imaginary", b.imaginary},
                        {"coincident", b.coincident}});
  }
  r["balances"] = balances;

  Json tables = Json::array();
  Json warnings = Json::array();
  bool coincident = false, logarithmic = false;
  auto add = [&](CaseId id, Branch alpha) {
    auto rep = resonances(C, id, alpha);
    coincident = coincident || rep.coincident;
    logarithmic = logarithmic || rep.logarithmic;
    tables.push_back(resonance_json(rep, alpha));
  };
  add(CaseId::Case1, Branch::Minus);
  add(CaseId::Case2, Branch::Minus);
  add(CaseId::Case2, Branch::Plus);
  r["resonances"] = tables;

  Json admissible = nullptr;
  for (const auto& a2 : admissible_C_values())
    if (a2.C == C) admissible = {{"case", to_string(a2.case_id)}, {"logarithmic", a2.logarithmic}};
  r["admissible"] = admissible;

  if (coincident) warnings.push_back("the two dominant balances coincide");
  if (logarithmic) warnings.push_back("r4 contains 0 while the leading coefficient is fixed: the dominant term includes a logarithm");
  r["warnings"] = warnings;
  for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << "\n";
  emit(g, dump(r), out);
  return kOk;
}

// ---- laurent ----------------------------------------------------------------

struct LaurentArgs {
  std::string C, lambda1, lambda2, H, branch = "none";
  int order = 12;
  std::vector<std::string> free;
  std::string record_file;
  int record = 0;
  std::string residue_sign = "+";
};

std::optional<BranchChoice> branch_arg(const std::string& text) {
  if (text == "none") return std::nullopt;
  if (text.size() != 2) throw Error(ErrorKind::Parse, "--branch must be none or two signs such as +-");
  return BranchChoice{parse_branch(text.substr(0, 1)), parse_branch(text.substr(1, 1))};
}

EllipticSolutionRecord pick_record(const Json& doc, int index) {
  if (doc.contains("coefficients")) return record_from_json(doc);
  const auto& recs = doc.at("records");
  if (index < 0 || index >= static_cast<int>(recs.size()))
    throw Error(ErrorKind::Parse, "record index " + std::to_string(index) + " out of range (file has " +
                                      std::to_string(recs.size()) + ")");
  return record_from_json(recs.at(static_cast<std::size_t>(index)));
}

int cmd_laurent(const Globals& g, const LaurentArgs& a, std::ostream& out) {
  require_json_format(g, "laurent");
  if (a.order < 1) throw Error(ErrorKind::Parse, "--order must be at least 1");
  LaurentSolution sol;
  Json r = header("laurent");
  if (!a.record_file.empty()) {
    auto rec = pick_record(read_json(a.record_file), a.record);
    sol = laurent_of_elliptic(rec, a.order, parse_branch(a.residue_sign));
    r["source"] = {{"record_file", a.record_file}, {"record", a.record}, {"residue_sign", a.residue_sign}};
  } else {
    if (a.C.empty() || a.lambda1.empty() || a.lambda2.empty())
      throw Error(ErrorKind::Parse, "laurent needs --C, --lambda1 and --lambda2, or --record-file");
    ModelParams p{exact_arg("C", a.C), exact_arg("lambda1", a.lambda1), exact_arg("lambda2", a.lambda2),
                  std::nullopt, std::nullopt};
    if (!a.H.empty()) p.H = exact_arg("H", a.H);
    std::map<int, ExactScalar> free;
    for (const auto& f : a.free) {
      auto eq = f.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::Parse, "--free expects power=value, got '" + f + "'");
      int power;
      try {
        std::size_t used = 0;
        power = std::stoi(f.substr(0, eq), &used);
        if (used != eq) throw std::invalid_argument("power");
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "--free: bad power in '" + f + "'");
      }
      free[power] = exact_arg("free", f.substr(eq + 1));
    }
    sol = build_laurent_solution(p, branch_arg(a.branch), free, a.order);
    r["source"] = "recursion";
  }
  r["order"] = a.order;
  r.update(laurent_json(sol, fourth_order_residual_series(sol).is_zero()));
  emit(g, dump(r), out);
  return kOk;
}

// ---- elliptic ---------------------------------------------------------------

struct EllipticArgs {
  std::string C, lambda1, lambda2, P0, policy = "strict", free_D = "1";
};

DenominatorPolicy policy_arg(const std::string& text) {
  if (text == "strict") return DenominatorPolicy::Strict;
  if (text == "resolve") return DenominatorPolicy::ResolveLimit;
  throw Error(ErrorKind::Parse, "--policy must be strict or resolve");
}

Json elliptic_report(const ExactScalar& C, const ExactScalar& l1, const ExactScalar& l2, const ExactScalar& P0,
                     const std::string& policy, const ExactScalar& free_D) {
  auto recs = solve_quartic_conditions(C, l1, l2, P0, SolveOptions{policy_arg(policy), free_D});
  Json r = header("elliptic");
  r["params"] = {{"C", C.str()}, {"lambda1", l1.str()}, {"lambda2", l2.str()}, {"P0", P0.str()}};
  r["policy"] = policy;
  Json list = Json::array();
  bool zero = true;
  for (const auto& rec : recs) {
    list.push_back(record_json(rec));
    zero = zero && list.back().at("residuals_zero").get<bool>();
  }
  r["records"] = list;
  r["all_residuals_zero"] = zero;
  return r;
}

int cmd_elliptic(const Globals& g, const EllipticArgs& a, std::ostream& out) {
  require_json_format(g, "elliptic");
  Json r = elliptic_report(exact_arg("C", a.C), exact_arg("lambda1", a.lambda1), exact_arg("lambda2", a.lambda2),
                           exact_arg("P0", a.P0), a.policy, exact_arg("free-D", a.free_D));
  emit(g, dump(r), out);
  return r.at("all_residuals_zero").get<bool>() ? kOk : kVerifyFailed;
}

// ---- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string input;
  int record = 0;
  std::string t_end = "3/2";
  std::string rho0 = "0";
  std::string rho_sign = "+", x_sign = "+";
  std::string mu_offset = "0";
  int samples = 101;
  std::string csv;
  std::string offsets = "1/20,-1/20";
  double max_dy = 1e-6, max_dx2 = 1e-8, max_relation = 1e-9, max_series_error = 1e-8;
};

void write_csv_with_manifest(const std::string& path, const std::string& csv) {
  write_atomic(path, csv);
  Json manifest = Json::array();
  for (const auto& [name, description] : trajectory_csv_columns())
    manifest.push_back({{"name", name}, {"description", description}});
  write_atomic(path + ".columns.json", dump(manifest));
}

template <class Real>
int verify_elliptic(const Globals& g, const VerifyArgs& a, const EllipticSolutionRecord& rec, std::ostream& out) {
  EllipticVerifyOptions<Real> opt;
  opt.rho_t_sign = parse_branch(a.rho_sign);
  opt.x_sign = parse_branch(a.x_sign);
  opt.mu_offset = exact_arg("mu-offset", a.mu_offset);
  opt.integration.samples = a.samples;
  if (a.rho0 == "turning") {
    // Nonzero root of the quartic closest to the origin.
    auto roots = real_roots(real_quartic<Real>(rec.coeffs));
    std::optional<Real> best;
    for (const Real& r : roots) {
      if (abs(r) < Real("1e-20")) continue;
      if (!best || abs(r) < abs(*best)) best = r;
    }
    if (!best) throw Error(ErrorKind::NoRealMotion, "the quartic has no nonzero real root");
    opt.rho0 = *best;
  } else {
    opt.rho0 = real_value<Real>(exact_arg("rho0", a.rho0));
  }
  Real t_end = real_value<Real>(exact_arg("t-end", a.t_end));
  auto v = verify_elliptic_against_direct(rec, t_end, Real(g.tol), opt);

  std::ostringstream csv;
  write_trajectory_csv(csv, v);
  if (!a.csv.empty()) write_csv_with_manifest(a.csv, csv.str());

  bool passed = v.max_dy <= a.max_dy;
  if (!v.complex_trajectory) passed = passed && v.max_dx2 <= a.max_dx2 && v.max_relation_residual <= a.max_relation;
  if (g.format == "csv") {
    emit(g, csv.str(), out);
    return passed ? kOk : kVerifyFailed;
  }
  Json r = header("verify");
  r["kind"] = "elliptic";
  r["record"] = {{"pair_id", rec.pair_id}, {"kind", to_string(rec.kind)}, {"P0", rec.coeffs.P0.str()}};
  r["precision_bits"] = g.precision_bits;
  r["tol"] = g.tol;
  r["t_end"] = a.t_end;
  r["rho0"] = format_real(opt.rho0);
  r["mu_offset"] = opt.mu_offset.str();
  r["complex_trajectory"] = v.complex_trajectory;
  r["x0_squared"] = format_real(v.x0_squared);
  r["max_dy"] = format_real(v.max_dy);
  r["max_dx2"] = v.complex_trajectory ? Json(nullptr) : Json(format_real(v.max_dx2));
  r["max_relation_residual"] = format_real(v.max_relation_residual);
  r["first_integral_residual"] = format_real(v.first_integral_residual);
  r["energy_drift"] = format_real(v.energy_drift);
  r["energy_offset"] = format_real(v.energy_offset);
  r["thresholds"] = {{"max_dy", a.max_dy}, {"max_dx2", a.max_dx2}, {"max_relation", a.max_relation}};
  r["passed"] = passed;
  r["steps"] = {{"direct", v.direct_stats.accepted}, {"quartic", v.quartic_stats.accepted}};
  r["samples"] = v.rows.size();
  r["trajectory_csv"] = a.csv.empty() ? Json(nullptr) : Json(a.csv);
  emit(g, dump(r), out);
  return passed ? kOk : kVerifyFailed;
}

template <class Real>
int verify_series(const Globals& g, const VerifyArgs& a, const LaurentSolution& sol, std::ostream& out) {
  require_json_format(g, "verify of a series");
  std::vector<Real> offsets;
  for (const auto& d : exact_list_arg("offsets", a.offsets)) offsets.push_back(real_value<Real>(d));
  auto v = verify_series_against_direct(sol, offsets, Real(g.tol));
  bool passed = v.max_error <= a.max_series_error;
  Json r = header("verify");
  r["kind"] = "series";
  r["precision_bits"] = g.precision_bits;
  r["tol"] = g.tol;
  r["radius_estimate"] = format_real(v.radius_estimate);
  Json checks = Json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"delta", format_real(c.delta)},
                      {"y_series", format_real(c.y_series)},
                      {"y_numeric", format_real(c.y_numeric)},
                      {"error", format_real(c.error)},
                      {"tail_bound", format_real(c.tail_bound)}});
  r["checks"] = checks;
  r["max_error"] = format_real(v.max_error);
  r["threshold"] = a.max_series_error;
  r["passed"] = passed;
  emit(g, dump(r), out);
  return passed ? kOk : kVerifyFailed;
}

template <class Real>
int verify_typed(const Globals& g, const VerifyArgs& a, const Json& doc, std::ostream& out) {
  if (doc.value("command", "") == "laurent") return verify_series<Real>(g, a, laurent_from_json(doc), out);
  return verify_elliptic<Real>(g, a, pick_record(doc, a.record), out);
}

int cmd_verify(const Globals& g, const VerifyArgs& a, std::ostream& out) {
  Json doc = read_json(a.input);
  if (g.precision_bits == 113) return verify_typed<Quad>(g, a, doc, out);
  PrecisionScope scope(g.precision_bits);
  return verify_typed<BigFloat>(g, a, doc, out);
}

// ---- bbfit ------------------------------------------------------------------

struct FitArgs {
  std::string series_file;
  int m = 2;
  int extra_orders = 8;
};

int cmd_bbfit(const Globals& g, const FitArgs& a, std::ostream& out) {
  require_json_format(g, "bbfit");
  Json doc = read_json(a.series_file);
  auto y = series_from_json(doc.contains("series") ? doc.at("series") : doc);
  auto sys = build_fit_system(y, a.m, a.extra_orders);
  auto fit = solve_fit_system(sys);
  Json r = header("bbfit");
  r["series_file"] = a.series_file;
  r["extra_orders"] = a.extra_orders;
  r.update(fit_json(sys, fit));
  if (fit.candidate) {
    auto res = residual_candidate(*fit.candidate, y);
    int fitted_through = sys.row_powers.back();
    r["residual"] = {{"zero", res.is_zero()},
                     {"checked_below", res.truncation_order()},
                     {"orders_beyond_fit", res.truncation_order() - 1 - fitted_through}};
  } else {
    r["residual"] = nullptr;
  }
  emit(g, dump(r), out);
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string C, P0, lambda1_values, lambda2_values, policy = "strict", out_dir;
  int jobs = 1;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  ExactScalar C = exact_arg("C", a.C), P0 = exact_arg("P0", a.P0);
  auto l1s = exact_list_arg("lambda1-values", a.lambda1_values);
  auto l2s = exact_list_arg("lambda2-values", a.lambda2_values);
  policy_arg(a.policy);
  if (a.jobs < 1) throw Error(ErrorKind::Parse, "--jobs must be at least 1");
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);

  const std::size_t n = l1s.size() * l2s.size();
  std::vector<Json> points(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx; (idx = next++) < n;) {
      std::size_t i = idx / l2s.size(), j = idx % l2s.size();
      Json p{{"lambda1", l1s[i].str()}, {"lambda2", l2s[j].str()}};
      try {
        Json rep = elliptic_report(C, l1s[i], l2s[j], P0, a.policy, ExactScalar(1));
        p["records"] = rep.at("records").size();
        p["residuals_zero"] = rep.at("all_residuals_zero");
        p["error"] = nullptr;
        if (!a.out_dir.empty()) {
          fs::path file = fs::path(a.out_dir) / ("point-" + std::to_string(i) + "-" + std::to_string(j) + ".json");
          write_atomic(file, dump(rep));
          p["file"] = file.string();
        }
      } catch (const Error& e) {
        p["records"] = 0;
        p["residuals_zero"] = nullptr;
        p["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
      }
      points[idx] = std::move(p);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < a.jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool nonzero = false, degenerate = false;
  for (const auto& p : points) {
    if (!p.at("error").is_null()) degenerate = true;
    else if (!p.at("residuals_zero").get<bool>()) nonzero = true;
  }
  int code = nonzero ? kVerifyFailed : degenerate ? kDegenerate : kOk;

  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "lambda1,lambda2,records,residuals_zero,error\n";
    for (const auto& p : points) {
      csv << p.at("lambda1").get<std::string>() << "," << p.at("lambda2").get<std::string>() << ","
          << p.at("records").get<std::size_t>() << ","
          << (p.at("residuals_zero").is_null() ? "" : p.at("residuals_zero").get<bool>() ? "true" : "false") << ","
          << (p.at("error").is_null() ? "" : p.at("error").at("kind").get<std::string>()) << "\n";
    }
    emit(g, csv.str(), out);
    return code;
  }
  Json r = header("sweep");
  r["C"] = C.str();
  r["P0"] = P0.str();
  r["policy"] = a.policy;
  Json v1 = Json::array(), v2 = Json::array();
  for (const auto& x : l1s) v1.push_back(x.str());
  for (const auto& x : l2s) v2.push_back(x.str());
  r["lambda1_values"] = v1;
  r["lambda2_values"] = v2;
  r["points"] = points;
  r["all_residuals_zero"] = !nonzero && !degenerate;
  emit(g, dump(r), out);
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and numerical tools for Painleve analysis and elliptic solutions of a Henon-Heiles type "
               "Hamiltonian with a mu/x^2 term"};
  app.name("hhp");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--precision-bits", g.precision_bits,
                 "working precision of numerical checks; 113 uses quad precision, anything else MPFR")
      ->envname("HHP_PRECISION_BITS")
      ->check(CLI::Range(24u, 4096u));
  app.add_option("--tol", g.tol, "integration tolerance")
      ->envname("HHP_TOL")
      ->check(CLI::Range(1e-14, 1e-6));
  app.add_option("--out", g.out, "output file, '-' for stdout")->envname("HHP_OUT");
  app.add_option("--format", g.format, "json or csv")->envname("HHP_FORMAT")->check(CLI::IsMember({"json", "csv"}));

  std::function<int()> action;

  ResonanceArgs ra;
  auto* res = app.add_subcommand("resonances", "dominant balances, resonances and admissibility for one C");
  res->add_option("--C", ra.C, "the constant C as p/q")->required();
  res->callback([&] { action = [&] { return cmd_resonances(g, ra, out, err); }; });

  LaurentArgs la;
  auto* lau = app.add_subcommand("laurent", "Laurent solution around a movable double pole");
  lau->add_option("--C", la.C);
  lau->add_option("--lambda1", la.lambda1);
  lau->add_option("--lambda2", la.lambda2);
  lau->add_option("--H", la.H, "energy; solved from free[4] or set to 0 when omitted");
  lau->add_option("--branch", la.branch, "t^-1 branch: none, ++, +-, -+ or --")->capture_default_str();
  lau->add_option("--order", la.order, "truncation order")->capture_default_str();
  lau->add_option("--free", la.free, "free slot value as power=p/q; repeatable");
  lau->add_option("--record-file", la.record_file, "expand an elliptic record from an elliptic report instead");
  lau->add_option("--record", la.record, "index into the report's records")->capture_default_str();
  lau->add_option("--residue-sign", la.residue_sign, "sign of rho's residue for --record-file")->capture_default_str();
  lau->callback([&] { action = [&] { return cmd_laurent(g, la, out); }; });

  EllipticArgs ea;
  auto* ell = app.add_subcommand("elliptic", "exact elliptic-type solutions with residual certificates");
  ell->add_option("--C", ea.C)->required();
  ell->add_option("--lambda1", ea.lambda1)->required();
  ell->add_option("--lambda2", ea.lambda2)->required();
  ell->add_option("--P0", ea.P0)->required();
  ell->add_option("--policy", ea.policy, "strict or resolve (take B from its square when the closed form degenerates)")
      ->capture_default_str();
  ell->add_option("--free-D", ea.free_D, "value for an unconstrained D")->capture_default_str();
  ell->callback([&] { action = [&] { return cmd_elliptic(g, ea, out); }; });

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check a record or a series against direct integration");
  ver->add_option("--input", va.input, "elliptic or laurent report")->required();
  ver->add_option("--record", va.record, "index into the report's records")->capture_default_str();
  ver->add_option("--t-end", va.t_end, "end of the window as p/q")->capture_default_str();
  ver->add_option("--rho0", va.rho0, "initial rho as p/q, or 'turning' for the nearest nonzero root")
      ->capture_default_str();
  ver->add_option("--rho-sign", va.rho_sign)->capture_default_str();
  ver->add_option("--x-sign", va.x_sign)->capture_default_str();
  ver->add_option("--mu-offset", va.mu_offset, "added to mu; for negative controls")->capture_default_str();
  ver->add_option("--samples", va.samples)->capture_default_str()->check(CLI::Range(2, 1000000));
  ver->add_option("--csv", va.csv, "also write the trajectory CSV and its column manifest here");
  ver->add_option("--offsets", va.offsets, "series offsets from the pole, comma separated p/q")->capture_default_str();
  ver->add_option("--max-dy", va.max_dy)->capture_default_str();
  ver->add_option("--max-dx2", va.max_dx2)->capture_default_str();
  ver->add_option("--max-relation", va.max_relation)->capture_default_str();
  ver->add_option("--max-series-error", va.max_series_error)->capture_default_str();
  ver->callback([&] { action = [&] { return cmd_verify(g, va, out); }; });

  FitArgs fa;
  auto* fit = app.add_subcommand("bbfit", "fit a polynomial first-order equation to a series");
  fit->add_option("--series-file", fa.series_file, "laurent report or bare series")->required();
  fit->add_option("--m", fa.m)->required()->check(CLI::Range(1, 64));
  fit->add_option("--extra-orders", fa.extra_orders)->capture_default_str();
  fit->callback([&] { action = [&] { return cmd_bbfit(g, fa, out); }; });

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "elliptic solutions over a (lambda1, lambda2) grid");
  sw->add_option("--C", sa.C)->required();
  sw->add_option("--P0", sa.P0)->required();
  sw->add_option("--lambda1-values", sa.lambda1_values, "comma separated p/q; empty for an empty grid");
  sw->add_option("--lambda2-values", sa.lambda2_values, "comma separated p/q; empty for an empty grid");
  sw->add_option("--policy", sa.policy)->capture_default_str();
  sw->add_option("--out-dir", sa.out_dir, "write one report per grid point here");
  sw->add_option("--jobs", sa.jobs, "grid points computed concurrently")->capture_default_str();
  sw->callback([&] { action = [&] { return cmd_sweep(g, sa, out); }; });

  try {
    // CLI11 reads "--name=" as a missing value and takes the next token, so
    // split it into an explicit empty value.
    std::vector<std::string> split;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const auto& a = args[i];
      if (a.size() > 3 && a.rfind("--", 0) == 0 && a.back() == '=' && a.find('=') == a.size() - 1) {
        split.push_back(a.substr(0, a.size() - 1));
        split.emplace_back();
      } else {
        split.push_back(a);
      }
    }
    std::vector<std::string> rev(split.rbegin(), split.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hhp::cli
