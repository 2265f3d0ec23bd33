#include "hhp/painleve.hpp"

#include <algorithm>

namespace hhp {

const char* to_string(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "Case1";
    case CaseId::Case2: return "Case2";
    case CaseId::Coincident: return "coincident";
  }
  return "?";
}

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar::ratio(n, d); }

void require_nonzero(const ExactScalar& C) {
  if (C.is_zero()) throw Error(ErrorKind::DegenerateModel, "C = 0 removes the cubic term; no pole balance");
}

bool is_nonnegative_integer(const ExactScalar& v) {
  if (!v.is_rational()) return false;
  const Rational& r = v.rational();
  return boost::multiprecision::denominator(r) == 1 && r >= 0;
}

bool admissible(const std::vector<ExactScalar>& values) {
  int exceptional = 0;
  for (const auto& v : values) exceptional += is_nonnegative_integer(v) ? 0 : 1;
  if (exceptional != 1) return false;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j]) return false;
  return true;
}

void sort_if_rational(std::vector<ExactScalar>& v) {
  if (!std::all_of(v.begin(), v.end(), [](const ExactScalar& x) { return x.is_rational(); })) return;
  std::sort(v.begin(), v.end(), [](const ExactScalar& a, const ExactScalar& b) { return a.rational() < b.rational(); });
}

// Radicals in the resonance formulas.
ExactScalar case1_radical(const ExactScalar& C) { return sqrt_exact(q(1) - q(24) * (q(1) + C)); }
ExactScalar case2_radical(const ExactScalar& C) { return sqrt_exact(q(1) - q(48) / C); }

}  // namespace

std::vector<DominantBalance> dominant_balances(const ExactScalar& C) {
  require_nonzero(C);
  bool coincident = C == q(-2);
  std::vector<DominantBalance> out;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    DominantBalance d;
    d.case_id = CaseId::Case1;
    d.alpha = q(-2);
    d.a_alpha = sqrt_exact(q(9) * (q(2) + C), b);
    d.b_beta = q(-3);
    d.root_branch = b;
    d.imaginary = phase_of(*d.a_alpha) == Phase::Imaginary;
    d.coincident = coincident;
    out.push_back(d);
  }
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    DominantBalance d;
    d.case_id = CaseId::Case2;
    d.alpha = (q(1) + q(sign_of(b)) * case2_radical(C)) * q(1, 2);
    d.b_beta = q(6) / C;
    d.root_branch = b;
    Phase p = phase_of(d.alpha);
    d.imaginary = p == Phase::Imaginary || p == Phase::Complex;
    d.coincident = coincident;
    out.push_back(d);
  }
  return out;
}

ResonanceReport resonances(const ExactScalar& C, CaseId which, Branch alpha_branch) {
  require_nonzero(C);
  ResonanceReport r;
  r.case_id = which;
  if (which == CaseId::Case1 || which == CaseId::Coincident) {
    ExactScalar s = case1_radical(C) * q(1, 2);
    r.system_resonances = {q(-1), q(6), q(5, 2) + s, q(5, 2) - s};
    r.y_resonances = {q(-1), q(10), q(5, 2) + s, q(5, 2) - s};
  } else {
    ExactScalar s = case2_radical(C);
    // α = (1 ± s)/2 pairs with r = ∓s.
    r.system_resonances = {q(-1), q(0), q(6), q(-sign_of(alpha_branch)) * s};
    r.y_resonances = {q(-1), q(5), q(5) - s, q(5) + s};
  }
  sort_if_rational(r.system_resonances);
  sort_if_rational(r.y_resonances);
  r.all_admissible = admissible(r.system_resonances);
  r.y_admissible = admissible(r.y_resonances);
  r.coincident = C == q(-2);
  r.logarithmic = std::any_of(r.y_resonances.begin(), r.y_resonances.end(),
                              [](const ExactScalar& v) { return v.is_zero(); });
  return r;
}

std::vector<AdmissibleC> admissible_C_values() {
  // Integer resonances need 1−24(1+C) (Case1) or 1−48/C (Case2) to be the
  // square of a rational k; both resonance lists then bound k from above, so a
  // finite range of k covers every candidate.
  constexpr int kMax = 64;
  std::vector<AdmissibleC> found;
  auto add = [&](const ExactScalar& C, CaseId id) {
    ResonanceReport rep = resonances(C, id);
    if (!rep.all_admissible || !rep.y_admissible) return;
    for (auto& f : found) {
      if (f.C == C) {
        f.case_id = CaseId::Coincident;
        f.logarithmic = f.logarithmic || rep.logarithmic;
        return;
      }
    }
    found.push_back({C, rep.coincident ? CaseId::Coincident : id, rep.logarithmic});
  };
  for (int k = 0; k <= kMax; ++k) {
    add((q(1) - q(k) * q(k)) * q(1, 24) - q(1), CaseId::Case1);
    if (k != 1) add(q(48) / (q(1) - q(k) * q(k)), CaseId::Case2);
  }
  return found;
}

ExactScalar leading_coefficient(const ExactScalar& C) {
  require_nonzero(C);
  static const std::vector<AdmissibleC> table = admissible_C_values();
  for (const auto& a : table) {
    if (!(a.C == C)) continue;
    if (a.case_id == CaseId::Case1) return q(-3);
    if (a.case_id == CaseId::Case2) return q(6) / C;
    throw Error(ErrorKind::NotApplicable,
                "C = " + C.str() + ": the two balances coincide and the expansion needs logarithms");
  }
  throw Error(ErrorKind::NotApplicable, "C = " + C.str() + " is not an admissible value");
}

ExactScalar branch_value_bminus1(const ModelParams& p, BranchChoice choice) {
  const ExactScalar &l1 = p.lambda1, &l2 = p.lambda2;
  int inner = sign_of(choice.inner);
  if (p.C == q(-4, 3)) {
    ExactScalar R = sqrt_exact(q(7) * (q(1216) * l1 * l1 - q(1824) * l1 * l2 + q(783) * l2 * l2));
    ExactScalar sq = (q(105) * l2 - q(140) * l1 + q(inner) * R) / q(385);
    return sqrt_exact(sq, choice.outer, R.tower());
  }
  if (p.C == q(-16, 5)) {
    ExactScalar S = sqrt_exact(q(71680) * l1 * l1 - q(44800) * l1 * l2 + q(13545) * l2 * l2);
    ExactScalar inside = q(6872250) * l2 - q(21991200) * l1 + q(inner) * q(52360) * S;
    return sqrt_exact(q(9, 41888L * 41888L) * inside, choice.outer, S.tower());
  }
  throw Error(ErrorKind::NotApplicable, "t^-1 branch values exist for C = -4/3 and C = -16/5 only");
}

std::array<BranchValue, 4> branch_values_bminus1(const ModelParams& p) {
  std::array<BranchValue, 4> out;
  int i = 0;
  for (Branch outer : {Branch::Plus, Branch::Minus})
    for (Branch inner : {Branch::Plus, Branch::Minus}) {
      BranchChoice c{outer, inner};
      out[i++] = {c, branch_value_bminus1(p, c)};
    }
  return out;
}

ExactScalar recursion_linear_coefficient(const ExactScalar& C, const ExactScalar& c, int n) {
  ExactScalar N(n);
  return N * (N - 1) * (N - 2) * (N - 3) - (q(2) * C - 8) * c * (N * N - N + 6) + q(8) * (C + 1) * c * N -
         q(20) * C * c * c;
}

namespace {

// Coefficients c_{-2}, c_{-1}, ... with zeros past the known ones.
class Coefficients {
 public:
  explicit Coefficients(std::vector<ExactScalar>& c) : c_(c) {}
  ExactScalar operator()(int power) const {
    int i = power + 2;
    if (i < 0 || i >= static_cast<int>(c_.size())) return ExactScalar();
    return c_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<ExactScalar>& c_;
};

// Coefficient of t^p in the fourth-order residual, H excluded.
ExactScalar residual_at(const Coefficients& c, int p, const ModelParams& m) {
  const ExactScalar &C = m.C, &l1 = m.lambda1, &l2 = m.lambda2;
  auto d1 = [&](int i) { return ExactScalar(i + 1) * c(i + 1); };
  auto d2 = [&](int i) { return ExactScalar((i + 2) * (i + 1)) * c(i + 2); };
  ExactScalar y4 = ExactScalar((p + 4) * (p + 3)) * ExactScalar((p + 2) * (p + 1)) * c(p + 4);
  ExactScalar yy2, y1y1, y3;
  for (int i = -4; i <= p + 2; ++i) yy2 += d2(i) * c(p - i);
  for (int i = -3; i <= p + 3; ++i) y1y1 += d1(i) * d1(p - i);
  std::vector<ExactScalar> sq;  // (y²)_s for s = -4 .. p+2
  for (int s = -4; s <= p + 2; ++s) {
    ExactScalar v;
    for (int i = -2; i <= s + 2; ++i) v += c(i) * c(s - i);
    sq.push_back(v);
  }
  for (int s = -4; s <= p + 2; ++s) y3 += sq[static_cast<std::size_t>(s + 4)] * c(p - s);
  ExactScalar ysq = p + 4 >= 0 ? sq[static_cast<std::size_t>(p + 4)] : ExactScalar();
  return y4 - (q(2) * C - 8) * yy2 + (q(4) * l1 + l2) * d2(p) - q(2) * (C + 1) * y1y1 - q(20, 3) * C * y3 -
         (q(4) * C * l1 - q(6) * l2) * ysq + q(4) * l1 * l2 * c(p);
}

}  // namespace

LaurentSolution build_laurent_solution(const ModelParams& params, std::optional<BranchChoice> branch,
                                       const std::map<int, ExactScalar>& free, int order) {
  if (order < 1) throw Error(ErrorKind::Domain, "order must be at least 1");
  ExactScalar lead = leading_coefficient(params.C);

  LaurentSolution sol;
  sol.branch = branch;
  sol.params = params;
  std::vector<ExactScalar> coeffs{lead};
  Coefficients c(coeffs);
  std::optional<ExactScalar> H = params.H;

  for (int n = -1; n < order; ++n) {
    coeffs.emplace_back();  // c_n = 0 while its equation is formed
    int p = n - 4;
    ExactScalar r0 = residual_at(c, p, params);
    ExactScalar lin = recursion_linear_coefficient(params.C, lead, n);
    bool h_here = p == 0;

    if (h_here && !H) {
      auto it = free.find(n);
      if (it != free.end()) {
        // Solve for H from the value prescribed at this order.
        H = -(r0 + lin * it->second) * q(1, 4);
        coeffs.back() = it->second;
        if (lin.is_zero()) sol.free_params[n] = it->second;
        continue;
      }
      H = ExactScalar();
      sol.energy_defaulted = true;
    }
    if (h_here) r0 += q(4) * *H;

    if (!lin.is_zero()) {
      coeffs.back() = -r0 / lin;
      continue;
    }
    CompatibilityRecord rec;
    rec.power = n;
    rec.constraint = r0;
    rec.compatible = r0.is_zero();
    if (!rec.compatible) {
      sol.compatibility_log.push_back(rec);
      throw ObstructionError(n, r0.str());
    }
    ExactScalar value;
    if (auto it = free.find(n); it != free.end())
      value = it->second;
    else if (n == -1 && branch)
      value = branch_value_bminus1(params, *branch);
    coeffs.back() = value;
    rec.injected = value;
    sol.free_params[n] = value;
    sol.compatibility_log.push_back(rec);
  }
  for (const auto& [n, v] : free) {
    if (n < order && !sol.free_params.count(n) && !(n == 4 && !params.H))
      throw Error(ErrorKind::Domain, "power " + std::to_string(n) + " is not a free slot for C=" + params.C.str());
  }
  sol.params.H = H ? *H : ExactScalar();
  if (!H) sol.energy_defaulted = true;
  sol.series = LaurentSeries<ExactScalar>(-2, std::move(coeffs), order);
  return sol;
}

LaurentSeries<ExactScalar> fourth_order_residual_series(const LaurentSolution& sol) {
  if (!sol.params.H) throw Error(ErrorKind::MissingEnergy, "residual needs H");
  const ModelParams& m = sol.params;
  return fourth_order_residual(sol.series, m.C, m.lambda1, m.lambda2, *m.H);
}

}  // namespace hhp
