#include "hhp/elliptic.hpp"

#include <string>

namespace hhp {

namespace {

ExactScalar q(long n, long d = 1) { return ExactScalar::ratio(n, d); }

struct Inputs {
  ExactScalar C, l1, l2, P0;
};

ModelParams params_of(const Inputs& in) { return ModelParams{in.C, in.l1, in.l2, std::nullopt, std::nullopt}; }

// Pieces of the seven conditions that do not involve the unknown being solved
// for. Each condition is written as  coefficient·unknown + rest = 0.
ExactScalar cond3_rest(const ExactScalar& A, const ExactScalar& B, const Inputs& in) {
  const auto& [C, l1, l2, P0] = in;
  return q(96) * A * C * P0 - q(192) * A * l1 - q(384) * A * P0 - q(48) * A * l2 - q(105) * B * B +
         q(128) * C * l1 + q(640) * C * P0 - q(192) * l2;
}
ExactScalar cond3_cq_coefficient(const ExactScalar& A, const Inputs& in) {
  return q(-240) * A + q(128) * in.C - q(192);
}

ExactScalar cond4_b_coefficient(const ExactScalar& Cq, const Inputs& in) {
  const auto& [C, l1, l2, P0] = in;
  return q(40) * C * P0 - q(65) * Cq - q(80) * l1 - q(160) * P0 - q(20) * l2;
}
ExactScalar cond4_d_coefficient(const ExactScalar& A, const Inputs& in) { return q(-90) * A + q(56) * in.C - q(64); }

ExactScalar cond5_rest(const ExactScalar& B, const ExactScalar& Cq, const ExactScalar& D, const Inputs& in) {
  const auto& [C, l1, l2, P0] = in;
  return q(16) * Cq * C * P0 - q(21) * B * D - q(8) * Cq * Cq - q(32) * Cq * l1 - q(64) * Cq * P0 -
         q(8) * l2 * Cq + q(64) * l1 * C * P0 + q(160) * C * P0 * P0 - q(32) * l1 * l2 - q(96) * P0 * l2;
}
ExactScalar cond5_e_coefficient(const ExactScalar& A, const Inputs& in) { return q(-36) * A + q(24) * in.C - q(16); }

ExactScalar cond6_d_coefficient(const ExactScalar& Cq, const Inputs& in) {
  const auto& [C, l1, l2, P0] = in;
  return q(5) * Cq - q(8) * C * P0 + q(16) * l1 + q(32) * P0 + q(4) * l2;
}

ExactScalar energy(const ExactScalar& Cq, const ExactScalar& D, const ExactScalar& E, const Inputs& in) {
  const auto& [C, l1, l2, P0] = in;
  ExactScalar rhs = q(-48) * Cq * E + q(96) * C * E * P0 + q(384) * C * l1 * P0 * P0 + q(640) * C * pow(P0, 3) -
                    q(9) * D * D - q(192) * E * l1 - q(384) * E * P0 - q(48) * E * l2 - q(384) * l1 * l2 * P0 -
                    q(576) * l2 * P0 * P0;
  return rhs / q(384);
}

EllipticSolutionRecord make_record(const QuarticCoefficients& c, const Inputs& in, RecordKind kind, int pair_id) {
  EllipticSolutionRecord rec;
  rec.coeffs = c;
  rec.params = params_of(in);
  rec.params.H = energy(c.C, c.D, c.E, in);
  rec.params.mu = mu_closed_form(c, rec.params);
  rec.kind = kind;
  rec.pair_id = pair_id;
  return rec;
}

// Records with B̃ = 0: the cubic ones (D̃ = 0) and, when the ρ-linear condition
// degenerates, the ones with D̃ free.
void append_b_zero_records(const Inputs& in, const SolveOptions& options, std::vector<EllipticSolutionRecord>& out,
                           int& next_pair) {
  std::vector<ExactScalar> a_roots{q(2, 3) * in.C};
  if (!(a_roots.front() == q(-4, 3))) a_roots.push_back(q(-4, 3));

  for (const ExactScalar& A : a_roots) {
    std::vector<ExactScalar> d_values{ExactScalar(0)};
    if (cond4_d_coefficient(A, in).is_zero() && !options.free_D.is_zero()) d_values.push_back(options.free_D);

    for (const ExactScalar& D : d_values) {
      ExactScalar c3 = cond3_cq_coefficient(A, in);
      ExactScalar r3 = cond3_rest(A, ExactScalar(0), in);
      ExactScalar Cq;
      if (!c3.is_zero()) {
        Cq = -r3 / c3;
        if (!D.is_zero() && !cond6_d_coefficient(Cq, in).is_zero()) continue;
      } else {
        if (!r3.is_zero() || D.is_zero()) continue;  // inconsistent, or C̃ undetermined
        // 5C̃ − 8CP₀ + 16λ₁ + 32P₀ + 4λ₂ = 0
        Cq = -(cond6_d_coefficient(ExactScalar(0), in)) / q(5);
      }

      ExactScalar c5 = cond5_e_coefficient(A, in);
      ExactScalar r5 = cond5_rest(ExactScalar(0), Cq, D, in);
      ExactScalar E;
      if (!c5.is_zero()) {
        E = -r5 / c5;
      } else if (!r5.is_zero()) {
        continue;
      }

      QuarticCoefficients c{A, ExactScalar(0), Cq, D, E, in.P0, ExactScalar(0)};
      out.push_back(make_record(c, in, D.is_zero() ? RecordKind::Cubic : RecordKind::LinearD, next_pair++));
    }
  }
}

std::string describe(const Inputs& in) {
  return "lambda1=" + in.l1.str() + ", lambda2=" + in.l2.str() + ", P0=" + in.P0.str();
}

// Closed-form B̃ ≠ 0 coefficients for one sign of the inner radical.
struct QuarticFamily {
  ExactScalar A, Cq, E, F, radical, numerator, denominator, d_scale, f_scale;
  std::string denominator_text;
};

QuarticFamily family_16_5(const Inputs& in, Branch sign) {
  const auto& l1 = in.l1;
  const auto& l2 = in.l2;
  const auto& P0 = in.P0;
  ExactScalar S = sqrt_exact(q(35) * (q(2048) * l1 * l1 - q(1280) * l1 * l2 + q(387) * l2 * l2), sign);

  QuarticFamily f;
  f.radical = S;
  f.A = q(-32, 15);
  f.Cq = q(-240, 187) * l1 - q(32, 5) * P0 + q(4, 1309) * S - q(112, 187) * l2;
  f.E = q(88320, 244783) * l1 * l1 - q(480, 187) * l1 * P0 + q(885, 244783) * l1 * S -
        q(153375, 244783) * l1 * l2 - q(32, 5) * P0 * P0 + q(8, 1309) * P0 * S - q(224, 187) * l2 * P0 -
        ExactScalar(Rational(685, 3916528)) * l2 * S + ExactScalar(Rational(168855, 3916528)) * l2 * l2;

  const ExactScalar l1s = l1 * l1, P0s = P0 * P0, l2s = l2 * l2;
  f.F = ExactScalar(Integer("39474176000")) * l1s * l1 + ExactScalar(Integer("122782105600")) * l1s * P0 -
        ExactScalar(Integer("104358400")) * l1s * S - ExactScalar(Integer("17822336000")) * l1s * l2 +
        ExactScalar(Integer("210552545280")) * l1 * P0s - ExactScalar(Integer("680261120")) * l1 * P0 * S -
        ExactScalar(Integer("10941145600")) * l1 * l2 * P0 - ExactScalar(Integer("41066800")) * l1 * l2 * S +
        ExactScalar(Integer("8305290000")) * l1 * l2s - ExactScalar(Integer("501315584")) * P0s * S -
        ExactScalar(Integer("65797670400")) * l2 * P0s + ExactScalar(Integer("55920480")) * l2 * P0 * S +
        ExactScalar(Integer("1611640800")) * l2s * P0 + ExactScalar(Integer("2884725")) * l2s * S -
        ExactScalar(Integer("468507375")) * l2s * l2;
  f.f_scale = q(1122);
  f.numerator = -(q(1120) * l1 + q(41888) * P0 + q(65) * S + q(6195) * l2);
  f.denominator = q(29373960) * (q(3600) * l1s - q(1120) * l1 * P0 - q(2425) * l1 * l2 - q(20944) * P0s -
                                 q(6195) * l2 * P0 + q(225) * l2s);
  f.d_scale = q(1, 5874792);
  f.denominator_text = "3600*lambda1^2 - 1120*lambda1*P0 - 2425*lambda1*lambda2 - 20944*P0^2 - 6195*lambda2*P0 + "
                       "225*lambda2^2";
  return f;
}

QuarticFamily family_4_3(const Inputs& in, Branch sign) {
  const auto& l1 = in.l1;
  const auto& l2 = in.l2;
  const auto& P0 = in.P0;
  ExactScalar R = sqrt_exact(q(7) * (q(1216) * l1 * l1 - q(1824) * l1 * l2 + q(783) * l2 * l2), sign);

  QuarticFamily f;
  f.radical = R;
  f.A = q(-4, 3);
  f.Cq = q(-4, 33) * l1 - q(4) * P0 - q(1, 66) * R - q(31, 22) * l2;
  f.E = q(3394, 363) * l1 * l1 + q(54, 11) * l1 * P0 - q(1123, 10164) * l1 * R - q(5897, 484) * l1 * l2 -
        q(17, 3) * P0 * P0 - q(31, 308) * P0 * R - q(349, 44) * l2 * P0 + q(1223, 27104) * l2 * R +
        q(13005, 3872) * l2 * l2;

  const ExactScalar l1s = l1 * l1, P0s = P0 * P0, l2s = l2 * l2;
  f.F = q(2099776) * l1s * l1 - q(497728) * l1s * P0 - q(20008) * l1s * R - q(4911144) * l1s * l2 +
        q(948640) * l1 * P0s + q(19096) * l1 * P0 * R + q(1458072) * l1 * l2 * P0 + q(37173) * l1 * l2 * R +
        q(3943233) * l1 * l2s + q(6776) * P0s * R - q(711480) * l2 * P0s - q(9240) * l2 * P0 * R -
        q(615384) * l2s * P0 - q(13581) * l2s * R - q(1006425) * l2s * l2;
  f.f_scale = q(330);
  f.numerator = q(952) * l1 - q(616) * P0 + q(13) * R - q(945) * l2;
  f.denominator = q(38115) * (q(432) * l1s + q(952) * l1 * P0 - q(291) * l1 * l2 - q(308) * P0s -
                              q(945) * P0 * l2 + q(27) * l2s);
  f.d_scale = q(1, 7623);
  f.denominator_text = "432*lambda1^2 + 952*lambda1*P0 - 291*lambda1*lambda2 - 308*P0^2 - 945*P0*lambda2 + "
                       "27*lambda2^2";
  return f;
}

void append_quartic_records(const Inputs& in, const SolveOptions& options, std::vector<EllipticSolutionRecord>& out,
                            int& next_pair) {
  bool is_16_5 = in.C == q(-16, 5);
  for (Branch radical : {Branch::Plus, Branch::Minus}) {
    QuarticFamily f = is_16_5 ? family_16_5(in, radical) : family_4_3(in, radical);
    int pair = next_pair++;
    for (Branch root : {Branch::Plus, Branch::Minus}) {
      ExactScalar g = sqrt_exact(f.f_scale * f.F, root, f.radical.tower());
      ExactScalar B, D;
      bool resolved = false;
      if (!f.denominator.is_zero()) {
        B = f.numerator * g / f.denominator;
        D = f.d_scale * g;
      } else {
        if (options.policy == DenominatorPolicy::Strict)
          throw Error(ErrorKind::DegenerateParameter,
                      "denominator of B~ vanishes: " + f.denominator_text + " = 0 at " + describe(in));
        // B̃² from the third condition, D̃ from the fourth.
        ExactScalar b_squared = cond3_rest(f.A, ExactScalar(0), in) + cond3_cq_coefficient(f.A, in) * f.Cq;
        b_squared /= q(105);
        B = sqrt_exact(b_squared, root, f.radical.tower());
        D = -B * cond4_b_coefficient(f.Cq, in) / cond4_d_coefficient(f.A, in);
        resolved = true;
      }
      QuarticCoefficients c{f.A, B, f.Cq, D, f.E, in.P0, ExactScalar(0)};
      EllipticSolutionRecord rec = make_record(c, in, RecordKind::Quartic, pair);
      rec.signs = SignChoices{radical, root};
      rec.limit_resolved = resolved;
      out.push_back(std::move(rec));
    }
  }
}

}  // namespace

const char* to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Cubic: return "cubic";
    case RecordKind::LinearD: return "linear-D";
    case RecordKind::Quartic: return "quartic";
  }
  return "?";
}

std::vector<EllipticSolutionRecord> solve_quartic_conditions(const ExactScalar& C, const ExactScalar& lambda1,
                                                  const ExactScalar& lambda2, const ExactScalar& P0,
                                                  const SolveOptions& options) {
  if (C.is_zero()) throw Error(ErrorKind::DegenerateModel, "C = 0");
  Inputs in{C, lambda1, lambda2, P0};
  std::vector<EllipticSolutionRecord> out;
  int next_pair = 1;
  append_b_zero_records(in, options, out, next_pair);
  if (C == q(-16, 5) || C == q(-4, 3)) append_quartic_records(in, options, out, next_pair);
  return out;
}

std::array<ExactScalar, 7> quartic_condition_residuals(const QuarticCoefficients& c, const ModelParams& params) {
  Inputs in{params.C, params.lambda1, params.lambda2, c.P0};
  const auto& [A, B, Cq, D, E, P0, G] = c;
  (void)G;
  std::array<ExactScalar, 7> r;
  r[0] = (q(3) * A + q(4)) * (q(-3) * A + q(2) * in.C);
  r[1] = B * (q(-21) * A + q(9) * in.C - q(16));
  r[2] = cond3_rest(A, B, in) + cond3_cq_coefficient(A, in) * Cq;
  r[3] = cond4_b_coefficient(Cq, in) * B + cond4_d_coefficient(A, in) * D;
  r[4] = cond5_rest(B, Cq, D, in) + cond5_e_coefficient(A, in) * E;
  r[5] = q(10) * B * E + cond6_d_coefficient(Cq, in) * D;
  ExactScalar H = params.H ? *params.H : ExactScalar(0);
  r[6] = q(384) * (H - energy(Cq, D, E, in));
  return r;
}

std::array<ExactScalar, 7> quartic_condition_residuals(const EllipticSolutionRecord& rec) {
  if (!rec.params.H) throw Error(ErrorKind::MissingEnergy, "record has no energy");
  return quartic_condition_residuals(rec.coeffs, rec.params);
}

ExactScalar energy_from_coefficients(const QuarticCoefficients& c, const ModelParams& params) {
  return energy(c.C, c.D, c.E, Inputs{params.C, params.lambda1, params.lambda2, c.P0});
}

ExactScalar mu_closed_form(const QuarticCoefficients& c, const ModelParams& params) {
  if (!params.H) throw Error(ErrorKind::MissingEnergy, "mu needs the energy H");
  const ExactScalar& C = params.C;
  const ExactScalar& l1 = params.lambda1;
  const ExactScalar& l2 = params.lambda2;
  const ExactScalar& H = *params.H;
  const ExactScalar& E = c.E;
  const ExactScalar& P = c.P0;
  ExactScalar mu = q(8, 3) * C * C * pow(P, 5);
  mu += (q(2) * l1 * C * C - q(14, 3) * l2 * C) * pow(P, 4);
  mu += (q(2) * l2 * l2 - q(10, 3) * C * E - q(4) * l1 * l2 * C) * pow(P, 3);
  mu += (q(2) * l1 * l2 * l2 - q(2) * l1 * C * E - q(4) * C * H + q(3) * l2 * E) * P * P;
  mu += (q(2) * l1 * l2 * E + E * E + q(4) * l2 * H) * P;
  mu += q(2) * E * H + q(1, 2) * l1 * E * E + q(9, 128) * c.D * c.D * E;
  return mu;
}

ExactScalar mu_from_solution(const EllipticSolutionRecord& rec) { return mu_closed_form(rec.coeffs, rec.params); }

ExactScalar dynamical_mu(const EllipticSolutionRecord& rec) { return -mu_from_solution(rec) / q(2); }

TrajectoryRelation trajectory_coefficients(const EllipticSolutionRecord& rec) {
  const auto& c = rec.coeffs;
  const auto& p = rec.params;
  TrajectoryRelation t;
  t.y2 = p.C - q(3, 2) * c.A;
  t.y1 = q(3) * c.A * c.P0 - c.C - p.lambda2;
  t.radical_y = q(-5, 4) * c.B;
  t.radical_const = q(-1, 4) * (q(3) * c.D - q(5) * c.B * c.P0);
  t.constant = q(-1, 2) * (c.E + q(3) * c.A * c.P0 * c.P0 - q(2) * c.C * c.P0);
  t.P0 = c.P0;
  return t;
}

namespace {

using Poly = BivariatePolynomial;

void add_term(Poly& p, int i, int j, const ExactScalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = p.try_emplace({i, j}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
  }
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) add_term(out, ka.first + kb.first, ka.second + kb.second, ca * cb);
  return out;
}

}  // namespace

BivariatePolynomial squared_trajectory(const TrajectoryRelation& rel) {
  Poly left;
  add_term(left, 1, 0, ExactScalar(1));
  add_term(left, 0, 2, -rel.y2);
  add_term(left, 0, 1, -rel.y1);
  add_term(left, 0, 0, -rel.constant);
  Poly radical;
  add_term(radical, 0, 1, rel.radical_y);
  add_term(radical, 0, 0, rel.radical_const);
  Poly u;
  add_term(u, 0, 1, ExactScalar(1));
  add_term(u, 0, 0, -rel.P0);

  Poly out = multiply(left, left);
  for (const auto& [k, c] : multiply(multiply(radical, radical), u)) add_term(out, k.first, k.second, -c);
  return out;
}

EnergyValue energy_from_initial_data(const ExactScalar& y, const ExactScalar& yt, const ExactScalar& ytt,
                                     const ExactScalar& yttt, const ExactScalar& mu, const ModelParams& params) {
  const ExactScalar& C = params.C;
  const ExactScalar& l1 = params.lambda1;
  const ExactScalar& l2 = params.lambda2;
  ExactScalar X = C * y * y - l2 * y - ytt;
  if (X.is_zero()) throw Error(ErrorKind::NotAFunction, "x0^2 = 0, H is not a function of the initial data");
  ExactScalar Xt = q(2) * C * y * yt - l2 * yt - yttt;
  ExactScalar H = Xt * Xt / (q(8) * X) + yt * yt / q(2) + l2 * y * y / q(2) + (l1 / q(2) + y) * X -
                  C * pow(y, 3) / q(3) + mu / (q(2) * X);
  bool negative = phase_of(X) == Phase::Real && to_float(X, 64) < 0;
  return {H, negative};
}

LaurentSolution laurent_of_elliptic(const EllipticSolutionRecord& rec, int order, Branch branch) {
  const auto& c = rec.coeffs;
  if (c.A.is_zero()) throw Error(ErrorKind::DegenerateQuartic, "A~ = 0, rho has no simple pole");
  if (order < 1) throw Error(ErrorKind::Domain, "order must be at least 1");

  // ρ = κw with κ² = 4/Ã turns the quartic into
  //   w_t² = w⁴ + (κB̃/4)w³ + (C̃/4)w² + (κD̃Ã/16)w + ẼÃ/16,   w ~ 1/t.
  // κB̃ and κD̃ are written as h·(B̃/Z), h·(D̃/Z) with h = √(4Z²/Ã), Z the
  // nonzero one of B̃, D̃, so y = (4/Ã)w² + P₀ stays inside a depth-2 tower.
  const ExactScalar K = q(4) / c.A;
  ExactScalar a3, a1;
  if (!c.B.is_zero() || !c.D.is_zero()) {
    const ExactScalar& Z = c.B.is_zero() ? c.D : c.B;
    ExactScalar b_ratio = c.B / Z;
    ExactScalar d_ratio = c.D / Z;
    ExactScalar z2k = Z * Z * K;
    TowerPtr context = common_tower(common_tower(b_ratio.tower(), d_ratio.tower()),
                                    common_tower(common_tower(c.C.tower(), c.E.tower()), z2k.tower()));
    ExactScalar h = sqrt_exact(z2k, branch, context);
    a3 = h * b_ratio / q(4);
    a1 = h * d_ratio * c.A / q(16);
  }
  const ExactScalar a2 = c.C / q(4);
  const ExactScalar a0 = c.E * c.A / q(16);

  // w_k for k = −1 … order; index shift by one.
  const int count = order + 2;
  std::vector<ExactScalar> w(static_cast<std::size_t>(count));
  auto W = [&](int k) -> const ExactScalar& { return w[static_cast<std::size_t>(k + 1)]; };
  w[0] = ExactScalar(1);

  for (int n = 0; n <= order; ++n) {
    const int p = n - 3;
    // w² coefficients for powers −2 … n−1 (w_n is still zero).
    std::vector<ExactScalar> sq(static_cast<std::size_t>(n + 2));
    for (int s = -2; s <= n - 1; ++s) {
      ExactScalar acc;
      for (int i = -1; i <= s + 1; ++i)
        if (!W(i).is_zero() && !W(s - i).is_zero()) acc += W(i) * W(s - i);
      sq[static_cast<std::size_t>(s + 2)] = acc;
    }
    const ExactScalar zero;
    auto SQ = [&](int s) -> const ExactScalar& { return s < -2 ? zero : sq[static_cast<std::size_t>(s + 2)]; };

    ExactScalar dw2;  // (w_t²) at t^p; w_t has coefficient (i+1)w_{i+1} at t^i
    for (int i = -2; i <= p + 2; ++i) {
      int j = p - i;
      if (j < -2) continue;
      ExactScalar di = q(i + 1) * W(i + 1), dj = q(j + 1) * W(j + 1);
      if (!di.is_zero() && !dj.is_zero()) dw2 += di * dj;
    }
    ExactScalar w4, w3;
    for (int a = -2; a <= p + 2; ++a)
      if (!SQ(a).is_zero() && !SQ(p - a).is_zero()) w4 += SQ(a) * SQ(p - a);
    for (int a = -2; a <= p + 1; ++a)
      if (!SQ(a).is_zero() && !W(p - a).is_zero()) w3 += SQ(a) * W(p - a);
    ExactScalar r0 = dw2 - w4 - a3 * w3 - a2 * SQ(p) - (p >= -1 ? a1 * W(p) : ExactScalar(0)) -
                     (p == 0 ? a0 : ExactScalar(0));
    // Linear part in w_n at t^p is −(2n+4)w_n.
    w[static_cast<std::size_t>(n + 1)] = r0 / q(2 * n + 4);
  }

  // y = K·w² + P₀, known below t^order.
  std::vector<ExactScalar> y_coeffs;
  for (int s = -2; s < order; ++s) {
    ExactScalar acc;
    for (int i = -1; i <= s + 1; ++i) acc += W(i) * W(s - i);
    acc *= K;
    if (s == 0) acc += c.P0;
    y_coeffs.push_back(acc);
  }

  LaurentSolution sol;
  sol.series = LaurentSeries<ExactScalar>(-2, std::move(y_coeffs), order);
  sol.params = rec.params;
  for (int n = -1; n < order; ++n)
    if (recursion_linear_coefficient(rec.params.C, K, n).is_zero()) sol.free_params[n] = sol.series.coefficient(n);
  return sol;
}

}  // namespace hhp
