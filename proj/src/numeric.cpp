#include "hhp/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <type_traits>

namespace hhp {

namespace {

template <class Real>
void check_tolerance(const Real& tol) {
  if (!(tol >= Real("1e-14") && tol <= Real("1e-6")))
    throw Error(ErrorKind::Domain, "tolerance must lie in [1e-14, 1e-6], got " + format_real(tol));
}

template <class Real>
std::vector<Real> sample_times(const Real& t0, const Real& t1, int samples) {
  if (samples < 2) throw Error(ErrorKind::Domain, "at least two sample times are required");
  std::vector<Real> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (samples - 1);
  t.back() = t1;
  return t;
}

template <class Real>
Real abs_of(const Real& x) {
  using std::abs;
  return Real(abs(x));
}

template <class Real>
Real optional_value(const std::optional<ExactScalar>& v) {
  return v ? real_value<Real>(*v) : Real(0);
}

}  // namespace

template <class Real>
Real real_value(const ExactScalar& x) {
  if constexpr (std::is_same_v<Real, BigFloat>) {
    return to_float(x, BigFloat::default_precision() * 332 / 100 + 8);
  } else {
    return static_cast<Real>(to_float(x, std::numeric_limits<Real>::digits + 16));
  }
}

template <class Real>
Real imag_value(const ExactScalar& x) {
  if constexpr (std::is_same_v<Real, BigFloat>) {
    return to_float_imag(x, BigFloat::default_precision() * 332 / 100 + 8);
  } else {
    return static_cast<Real>(to_float_imag(x, std::numeric_limits<Real>::digits + 16));
  }
}

template <class Real>
std::string format_real(const Real& x) {
  std::ostringstream os;
  if constexpr (std::is_same_v<Real, BigFloat>) {
    os << std::setprecision(static_cast<int>(x.precision())) << x;
  } else {
    os << std::setprecision(std::numeric_limits<Real>::max_digits10) << x;
  }
  return os.str();
}

// ---- system ---------------------------------------------------------------

template <class Real>
IntegrationResult<Real> integrate_flow(const ModelParams& params, const FlowState<Real>& s0, const Real& t_end,
                                       const Real& tol, const IntegrationOptions& options) {
  check_tolerance(tol);
  if (t_end < s0.t) throw Error(ErrorKind::Domain, "end time precedes the initial time");
  const Real C = real_value<Real>(params.C);
  const Real l1 = real_value<Real>(params.lambda1);
  const Real l2 = real_value<Real>(params.lambda2);
  const Real mu = optional_value<Real>(params.mu);
  const bool singular_force = mu != 0;
  if (singular_force && s0.x == 0) throw Error(ErrorKind::Domain, "x(0) = 0 with nonzero mu");

  IntegrationResult<Real> result;
  result.energy_initial = hamiltonian(s0.x, s0.xt, s0.y, s0.yt, C, l1, l2, mu);
  result.samples.push_back(s0);
  if (t_end == s0.t) return result;

  using Solver = Dop853<Real, 4>;
  using V = typename Solver::State;
  auto rhs = [&](const Real&, const V& s, V& d) {
    d[0] = s[1];
    d[1] = -l1 * s[0] - 2 * s[0] * s[2];
    if (singular_force) d[1] += mu / (s[0] * s[0] * s[0]);
    d[2] = s[3];
    d[3] = -l2 * s[2] - s[0] * s[0] + C * s[2] * s[2];
  };
  const Real guard = options.overflow_guard;
  const Real H0 = result.energy_initial;
  const Real H_scale = abs_of(H0) <= Real(options.energy_floor) ? Real(1) : abs_of(H0);
  int x_sign = s0.x > 0 ? 1 : (s0.x < 0 ? -1 : 0);
  auto accept = [&](const Real& t, const V& s) {
    if (abs_of(s[0]) > guard || abs_of(s[2]) > guard)
      throw SingularityError(static_cast<double>(t), "|x| or |y| passed the overflow guard");
    if (singular_force && (s[0] == 0 || (s[0] > 0 ? 1 : -1) != x_sign))
      throw SingularityError(static_cast<double>(t), "x crossed zero with nonzero mu");
    if (singular_force && abs_of(s[0]) < 1 / guard)
      throw SingularityError(static_cast<double>(t), "x approached zero with nonzero mu");
    Real drift = abs_of(Real(hamiltonian(s[0], s[1], s[2], s[3], C, l1, l2, mu) - H0)) / H_scale;
    if (drift > result.energy_drift) result.energy_drift = drift;
  };

  const Real local_tol = tol * Real(options.local_factor);
  Solver solver(local_tol, local_tol, options.max_steps);
  V state;
  state << s0.x, s0.xt, s0.y, s0.yt;
  Real t = s0.t;
  auto times = sample_times(s0.t, t_end, options.samples);
  for (std::size_t i = 1; i < times.size(); ++i) {
    solver.advance(rhs, t, state, times[i], accept);
    result.samples.push_back({t, state[0], state[1], state[2], state[3]});
  }
  result.stats = solver.statistics();
  return result;
}

// ---- quartic --------------------------------------------------------------

template <class Real>
RealQuartic<Real> real_quartic(const QuarticCoefficients& q) {
  for (const auto* v : {&q.A, &q.C, &q.E, &q.P0}) {
    Phase p = phase_of(*v);
    if (p == Phase::Imaginary || p == Phase::Complex)
      throw Error(ErrorKind::Domain, "quartic coefficient A, C, E or P0 is not real: " + v->str());
  }
  RealQuartic<Real> r;
  r.P0 = real_value<Real>(q.P0);
  Phase pb = phase_of(q.B), pd = phase_of(q.D);
  bool real_odd = (pb == Phase::Zero || pb == Phase::Real) && (pd == Phase::Zero || pd == Phase::Real);
  bool imag_odd = (pb == Phase::Zero || pb == Phase::Imaginary) && (pd == Phase::Zero || pd == Phase::Imaginary);
  if (real_odd) {
    r.a4 = real_value<Real>(q.A);
    r.a3 = real_value<Real>(q.B);
    r.a2 = real_value<Real>(q.C);
    r.a1 = real_value<Real>(q.D);
    r.a0 = real_value<Real>(q.E);
  } else if (imag_odd) {
    // ρ = iσ: σ_t² = ¼(−Ãσ⁴ − b σ³ + C̃σ² + d σ − Ẽ) with B̃ = ib, D̃ = id.
    r.a4 = -real_value<Real>(q.A);
    r.a3 = -imag_value<Real>(q.B);
    r.a2 = real_value<Real>(q.C);
    r.a1 = imag_value<Real>(q.D);
    r.a0 = -real_value<Real>(q.E);
    r.orientation = -1;
  } else {
    throw Error(ErrorKind::Domain, "B and D are neither both real nor both imaginary");
  }
  return r;
}

template <class Real>
std::vector<Real> real_roots(const RealQuartic<Real>& quartic) {
  if (quartic.a4 == 0) throw Error(ErrorKind::DegenerateQuartic, "leading quartic coefficient is zero");
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  const double lead = static_cast<double>(quartic.a4);
  const Real coeffs[] = {quartic.a0, quartic.a1, quartic.a2, quartic.a3};
  for (int i = 0; i < 4; ++i) companion(i, 3) = -static_cast<double>(coeffs[i]) / lead;
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);

  std::vector<double> guesses;
  for (const auto& z : solver.eigenvalues()) {
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
    guesses.push_back(z.real());
  }
  std::sort(guesses.begin(), guesses.end());

  // Newton on the quartic, or on its derivative for a pair of nearly equal
  // guesses: Newton on the quartic itself only converges linearly to a double root.
  auto polish = [&](Real r, bool double_root) {
    for (int i = 0; i < 60; ++i) {
      Real d = double_root ? quartic.second_derivative(r) : quartic.derivative(r);
      if (d == 0) break;
      Real step = (double_root ? quartic.derivative(r) : quartic(r)) / d;
      r -= step;
      if (abs_of(step) <= std::numeric_limits<Real>::epsilon() * std::max(Real(1), abs_of(r))) break;
    }
    return r;
  };
  std::vector<Real> roots;
  for (std::size_t i = 0; i < guesses.size(); ++i) {
    auto near = [&](std::size_t j) {
      return j < guesses.size() && std::abs(guesses[i] - guesses[j]) <= 1e-6 * std::max(1.0, std::abs(guesses[i]));
    };
    bool paired = near(i + 1) || (i > 0 && near(i - 1));
    roots.push_back(polish(Real(guesses[i]), paired));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

template <class Real>
QuarticResult<Real> integrate_quartic(const RealQuartic<Real>& quartic, const Real& rho0, Branch rho_t_sign,
                                      const Real& t_end, const Real& tol, const IntegrationOptions& options) {
  using std::sqrt;
  check_tolerance(tol);
  if (t_end < 0) throw Error(ErrorKind::Domain, "end time precedes the initial time");
  Real Q0 = quartic(rho0);
  if (Q0 < 0) {
    // A start at a root may evaluate slightly negative; that is a turning point.
    Real r = abs_of(rho0);
    Real scale = (((abs_of(quartic.a4) * r + abs_of(quartic.a3)) * r + abs_of(quartic.a2)) * r + abs_of(quartic.a1)) * r +
                 abs_of(quartic.a0);
    if (-Q0 > 64 * std::numeric_limits<Real>::epsilon() * scale)
      throw Error(ErrorKind::NoRealMotion, "quartic is negative at the initial point: " + format_real(Q0));
    Q0 = 0;
  }

  QuarticResult<Real> result;
  Real rho_t0 = Real(sqrt(Q0)) / 2;
  if (rho_t_sign == Branch::Minus) rho_t0 = -rho_t0;
  result.samples.push_back({Real(0), rho0, rho_t0});
  if (t_end == 0) return result;

  using Solver = Dop853<Real, 2>;
  using V = typename Solver::State;
  auto rhs = [&](const Real&, const V& s, V& d) {
    d[0] = s[1];
    d[1] = quartic.derivative(s[0]) / 8;
  };
  const Real guard = options.overflow_guard;
  auto accept = [&](const Real& t, const V& s) {
    if (abs_of(s[0]) > guard) throw SingularityError(static_cast<double>(t), "rho passed the overflow guard");
    Real r = abs_of(Real(s[1] * s[1] - quartic(s[0]) / 4));
    if (r > result.first_integral_residual) result.first_integral_residual = r;
  };

  const Real local_tol = tol * Real(options.local_factor);
  Solver solver(local_tol, local_tol, options.max_steps);
  V state;
  state << rho0, rho_t0;
  Real t = 0;
  auto times = sample_times(Real(0), t_end, options.samples);
  for (std::size_t i = 1; i < times.size(); ++i) {
    solver.advance(rhs, t, state, times[i], accept);
    result.samples.push_back({t, state[0], state[1]});
  }
  result.stats = solver.statistics();
  return result;
}

template <class Real>
QuarticResult<Real> integrate_quartic(const QuarticCoefficients& q, const Real& rho0, Branch rho_t_sign,
                                      const Real& t_end, const Real& tol, const IntegrationOptions& options) {
  return integrate_quartic(real_quartic<Real>(q), rho0, rho_t_sign, t_end, tol, options);
}

// ---- fourth-order equation ------------------------------------------------

template <class Real>
JetResult<Real> integrate_fourth_order(const ModelParams& params, const Jet<Real>& j0, const Real& t_end,
                                       const Real& tol, const IntegrationOptions& options) {
  check_tolerance(tol);
  if (!params.H) throw Error(ErrorKind::MissingEnergy, "the fourth-order equation needs the energy H");
  if (t_end < j0.t) throw Error(ErrorKind::Domain, "end time precedes the initial time");
  const Real C = real_value<Real>(params.C);
  const Real l1 = real_value<Real>(params.lambda1);
  const Real l2 = real_value<Real>(params.lambda2);
  const Real H = real_value<Real>(*params.H);

  JetResult<Real> result;
  result.samples.push_back(j0);
  if (t_end == j0.t) return result;

  using Solver = Dop853<Real, 4>;
  using V = typename Solver::State;
  auto rhs = [&](const Real&, const V& s, V& d) {
    d[0] = s[1];
    d[1] = s[2];
    d[2] = s[3];
    d[3] = fourth_order_derivative(s[0], s[1], s[2], C, l1, l2, H);
  };
  const Real guard = options.overflow_guard;
  auto accept = [&](const Real& t, const V& s) {
    if (abs_of(s[0]) > guard) throw SingularityError(static_cast<double>(t), "|y| passed the overflow guard");
  };

  const Real local_tol = tol * Real(options.local_factor);
  Solver solver(local_tol, local_tol, options.max_steps);
  V state;
  state << j0.y, j0.yt, j0.ytt, j0.yttt;
  Real t = j0.t;
  auto times = sample_times(j0.t, t_end, options.samples);
  for (std::size_t i = 1; i < times.size(); ++i) {
    solver.advance(rhs, t, state, times[i], accept);
    result.samples.push_back({t, state[0], state[1], state[2], state[3]});
  }
  result.stats = solver.statistics();
  return result;
}

// ---- elliptic records -----------------------------------------------------

template <class Real>
EllipticVerification<Real> verify_elliptic_against_direct(const EllipticSolutionRecord& rec, const Real& t_end,
                                                          const Real& tol,
                                                          const EllipticVerifyOptions<Real>& options) {
  using std::sqrt;
  const RealQuartic<Real> quartic = real_quartic<Real>(rec.coeffs);
  const QuarticResult<Real> rho = integrate_quartic(quartic, options.rho0, options.rho_t_sign, t_end, tol,
                                                    options.integration);
  const Real C = real_value<Real>(rec.params.C);
  const Real l1 = real_value<Real>(rec.params.lambda1);
  const Real l2 = real_value<Real>(rec.params.lambda2);
  const Real s = quartic.orientation;

  auto y_jet = [&](const QuarticSample<Real>& q) {
    Real r = q.rho, rt = q.rho_t;
    Real rtt = quartic.derivative(r) / 8;
    Real rttt = quartic.second_derivative(r) * rt / 8;
    return Jet<Real>{q.t, quartic.P0 + s * r * r, 2 * s * r * rt, 2 * s * (rt * rt + r * rtt),
                     2 * s * (3 * rt * rtt + r * rttt)};
  };

  // x² from the trajectory relation; after ρ = iσ the radical terms are
  // −Im(coefficient)·σ.
  const TrajectoryRelation tr = trajectory_coefficients(rec);
  const Real y2 = real_value<Real>(tr.y2), y1 = real_value<Real>(tr.y1), k0 = real_value<Real>(tr.constant);
  Real ry, rc;
  if (quartic.orientation == 1) {
    ry = real_value<Real>(tr.radical_y);
    rc = real_value<Real>(tr.radical_const);
  } else {
    ry = -imag_value<Real>(tr.radical_y);
    rc = -imag_value<Real>(tr.radical_const);
  }
  auto x2_relation = [&](const Real& y, const Real& r) { return (y2 * y + y1) * y + (ry * y + rc) * r + k0; };
  const PolynomialRelation<Real> relation =
      polynomial_relation<Real>(rec, [](const ExactScalar& v) { return real_value<Real>(v); });

  EllipticVerification<Real> report;
  report.first_integral_residual = rho.first_integral_residual;
  report.quartic_stats = rho.stats;
  const Jet<Real> j0 = y_jet(rho.samples.front());
  const Real X0 = C * j0.y * j0.y - l2 * j0.y - j0.ytt;
  report.x0_squared = X0;

  auto add_row = [&](std::size_t i, VerificationRow<Real> row) {
    const auto& q = rho.samples[i];
    row.y_quartic = quartic.P0 + s * q.rho * q.rho;
    row.x2_relation = x2_relation(row.y_quartic, q.rho);
    row.relation_residual = relation(row.y, row.yt);
    report.max_dy = std::max(report.max_dy, abs_of(Real(row.y - row.y_quartic)));
    report.max_relation_residual = std::max(report.max_relation_residual, abs_of(row.relation_residual));
    if (!report.complex_trajectory)
      report.max_dx2 = std::max(report.max_dx2, abs_of(Real(row.x * row.x - row.x2_relation)));
    report.rows.push_back(row);
  };

  if (!(X0 > 0)) {
    report.complex_trajectory = true;
    ModelParams p = rec.params;
    const JetResult<Real> direct = integrate_fourth_order(p, j0, t_end, tol, options.integration);
    report.direct_stats = direct.stats;
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    for (std::size_t i = 0; i < direct.samples.size(); ++i) {
      const auto& j = direct.samples[i];
      add_row(i, {j.t, nan, nan, j.y, j.yt, nan});
    }
    return report;
  }

  Real x0 = sqrt(X0);
  if (options.x_sign == Branch::Minus) x0 = -x0;
  const Real x0t = (2 * C * j0.y * j0.yt - l2 * j0.yt - j0.yttt) / (2 * x0);
  ModelParams p = rec.params;
  p.mu = dynamical_mu(rec) + options.mu_offset;
  const Real mu = real_value<Real>(*p.mu);
  const FlowState<Real> s0{Real(0), x0, x0t, j0.y, j0.yt};
  const IntegrationResult<Real> direct = integrate_flow(p, s0, t_end, tol, options.integration);
  report.direct_stats = direct.stats;
  report.energy_drift = direct.energy_drift;
  if (rec.params.H) report.energy_offset = abs_of(Real(direct.energy_initial - real_value<Real>(*rec.params.H)));
  for (std::size_t i = 0; i < direct.samples.size(); ++i) {
    const auto& f = direct.samples[i];
    add_row(i, {f.t, f.x, f.xt, f.y, f.yt, hamiltonian(f.x, f.xt, f.y, f.yt, C, l1, l2, mu)});
  }
  return report;
}

// ---- Laurent series -------------------------------------------------------

template <class Real>
Real convergence_radius_estimate(const LaurentSeries<ExactScalar>& series) {
  using std::pow;
  int trunc = series.truncation_order();
  Real worst = 0;
  for (int n = std::max(1, trunc / 2); n < trunc; ++n) {
    const ExactScalar c = series.coefficient(n);
    if (c.is_zero()) continue;
    Real root = pow(abs_of(real_value<Real>(c)), Real(1) / n);
    if (root > worst) worst = root;
  }
  return worst == 0 ? std::numeric_limits<Real>::infinity() : Real(1 / worst);
}

template <class Real>
SeriesVerification<Real> verify_series_against_direct(const LaurentSolution& sol, const std::vector<Real>& offsets,
                                                      const Real& tol) {
  using std::pow;
  auto convert = [](const ExactScalar& v) { return real_value<Real>(v); };
  const auto& y = sol.series;
  const auto y1 = diff(y);
  const auto y2 = diff(y1);
  const auto y3 = diff(y2);

  SeriesVerification<Real> report;
  report.radius_estimate = convergence_radius_estimate<Real>(y);
  // The comparison should be limited by the series, not by the integrator.
  const Real integrator_tol("1e-14");
  IntegrationOptions options;
  options.samples = 2;

  for (const Real& delta : offsets) {
    if (delta == 0) throw Error(ErrorKind::Pole, "offset 0 is the pole itself");
    // The fourth-order equation is invariant under t → −t, so negative offsets
    // run forward in the reflected time.
    const Real sign = delta > 0 ? Real(1) : Real(-1);
    const Real d = abs_of(delta);
    if (!(2 * d < report.radius_estimate))
      throw Error(ErrorKind::Radius, "offset " + format_real(delta) + " reaches the estimated radius " +
                                         format_real(report.radius_estimate));
    auto v = eval(y, delta, convert);
    auto v1 = eval(y1, delta, convert);
    auto v2 = eval(y2, delta, convert);
    auto v3 = eval(y3, delta, convert);
    auto far = eval(y, Real(2 * delta), convert);
    Real tail = std::max(v.tail_bound, far.tail_bound);
    if (tail > tol)
      throw Error(ErrorKind::Radius, "tail bound " + format_real(tail) + " exceeds tolerance at offset " +
                                         format_real(delta));
    Jet<Real> j0{d, v.value, sign * v1.value, v2.value, sign * v3.value};
    JetResult<Real> run = integrate_fourth_order(sol.params, j0, Real(2 * d), integrator_tol, options);
    SeriesCheck<Real> check;
    check.delta = delta;
    check.y_series = far.value;
    check.y_numeric = run.samples.back().y;
    check.error = abs_of(Real(check.y_numeric - check.y_series));
    check.tail_bound = tail;
    report.max_error = std::max(report.max_error, check.error);
    report.checks.push_back(check);
  }
  return report;
}

// ---- CSV ------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> trajectory_csv_columns() {
  return {
      {"t", "time"},
      {"x", "x from the direct integration (nan when x0^2 <= 0)"},
      {"x_t", "x velocity from the direct integration"},
      {"y", "y from the direct integration"},
      {"y_t", "y velocity from the direct integration"},
      {"H", "Hamiltonian along the direct integration"},
      {"y_quartic", "y = P0 + orientation*rho^2 from the quartic equation"},
      {"dy", "|y - y_quartic|"},
      {"x2_relation", "x^2 from the trajectory relation at the quartic's (y, rho)"},
      {"dx2", "|x^2 - x2_relation|"},
      {"relation_residual", "polynomial relation between y and y_t at the direct solution"},
  };
}

template <class Real>
void write_trajectory_csv(std::ostream& out, const EllipticVerification<Real>& report) {
  const auto columns = trajectory_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i].first;
  out << "\n";
  for (const auto& r : report.rows) {
    Real dx2 = report.complex_trajectory ? std::numeric_limits<Real>::quiet_NaN()
                                         : abs_of(Real(r.x * r.x - r.x2_relation));
    const Real values[] = {r.t, r.x, r.xt, r.y, r.yt, r.H, r.y_quartic, abs_of(Real(r.y - r.y_quartic)),
                           r.x2_relation, dx2, r.relation_residual};
    bool first = true;
    for (const Real& v : values) {
      out << (first ? "" : ",") << format_real(v);
      first = false;
    }
    out << "\n";
  }
}

#define HHP_INSTANTIATE(Real)                                                                                     \
  template Real real_value<Real>(const ExactScalar&);                                                             \
  template Real imag_value<Real>(const ExactScalar&);                                                             \
  template std::string format_real<Real>(const Real&);                                                            \
  template IntegrationResult<Real> integrate_flow<Real>(const ModelParams&, const FlowState<Real>&, const Real&,  \
                                                        const Real&, const IntegrationOptions&);                  \
  template RealQuartic<Real> real_quartic<Real>(const QuarticCoefficients&);                                      \
  template std::vector<Real> real_roots<Real>(const RealQuartic<Real>&);                                          \
  template QuarticResult<Real> integrate_quartic<Real>(const RealQuartic<Real>&, const Real&, Branch, const Real&, \
                                                       const Real&, const IntegrationOptions&);                   \
  template QuarticResult<Real> integrate_quartic<Real>(const QuarticCoefficients&, const Real&, Branch,           \
                                                       const Real&, const Real&, const IntegrationOptions&);      \
  template JetResult<Real> integrate_fourth_order<Real>(const ModelParams&, const Jet<Real>&, const Real&,        \
                                                        const Real&, const IntegrationOptions&);                  \
  template EllipticVerification<Real> verify_elliptic_against_direct<Real>(                                       \
      const EllipticSolutionRecord&, const Real&, const Real&, const EllipticVerifyOptions<Real>&);               \
  template Real convergence_radius_estimate<Real>(const LaurentSeries<ExactScalar>&);                             \
  template SeriesVerification<Real> verify_series_against_direct<Real>(const LaurentSolution&,                    \
                                                                       const std::vector<Real>&, const Real&);    \
  template void write_trajectory_csv<Real>(std::ostream&, const EllipticVerification<Real>&);

HHP_INSTANTIATE(Quad)
HHP_INSTANTIATE(BigFloat)

#undef HHP_INSTANTIATE

}  // namespace hhp
