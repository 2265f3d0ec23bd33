#pragma once

// Numerical integration of the two-degree-of-freedom system, the fourth-order
// equation for y and the quartic equation for ρ, used to check the exact
// objects against the actual flow. Everything is instantiated for Quad
// (binary128) and BigFloat (MPFR at the current default precision).

#include <boost/multiprecision/float128.hpp>

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hhp/dop853.hpp"
#include "hhp/elliptic.hpp"
#include "hhp/exact.hpp"
#include "hhp/model.hpp"
#include "hhp/painleve.hpp"

namespace hhp {

using Quad = boost::multiprecision::float128;

// Real embedding of an exact value at the working precision of Real; the
// imaginary variant requires a purely imaginary value.
template <class Real>
Real real_value(const ExactScalar& x);
template <class Real>
Real imag_value(const ExactScalar& x);

struct IntegrationOptions {
  int samples = 101;            // uniformly spaced sample times, both ends included
  double overflow_guard = 1e8;  // |x| or |y| above this is reported as a pole approach
  double energy_floor = 1e-20;  // |H(0)| at or below this is treated as zero: drift is then absolute
  long max_steps = 5'000'000;
  // tol is the accuracy asked of the trajectory; each step is held to
  // tol·local_factor so that the error accumulated over many steps stays near tol.
  double local_factor = 1e-2;
};

template <class Real>
struct FlowState {
  Real t = 0, x = 0, xt = 0, y = 0, yt = 0;
};

template <class Real>
struct IntegrationResult {
  std::vector<FlowState<Real>> samples;
  Real energy_initial = 0;
  // max |H(t) − H(0)| / |H(0)| over accepted steps, absolute when H(0) is zero
  // up to IntegrationOptions::energy_floor
  Real energy_drift = 0;
  StepStatistics stats;
};

// x_tt = −λ₁x − 2xy + μ/x³,  y_tt = −λ₂y − x² + Cy², from s0.t to t_end ≥ s0.t.
// tol ∈ [1e-14, 1e-6] is used as both relative and absolute tolerance.
template <class Real>
IntegrationResult<Real> integrate_flow(const ModelParams& params, const FlowState<Real>& s0, const Real& t_end,
                                       const Real& tol, const IntegrationOptions& options = {});

// ρ_t² = Q(ρ)/4 with y = P₀ + orientation·ρ². orientation = −1 is the real
// form of a quartic with imaginary B̃, D̃: substituting ρ = iσ leaves real
// coefficients in σ.
template <class Real>
struct RealQuartic {
  Real a4 = 0, a3 = 0, a2 = 0, a1 = 0, a0 = 0;
  Real P0 = 0;
  int orientation = 1;

  Real operator()(const Real& r) const { return (((a4 * r + a3) * r + a2) * r + a1) * r + a0; }
  Real derivative(const Real& r) const { return ((4 * a4 * r + 3 * a3) * r + 2 * a2) * r + a1; }
  Real second_derivative(const Real& r) const { return (12 * a4 * r + 6 * a3) * r + 2 * a2; }
};

template <class Real>
RealQuartic<Real> real_quartic(const QuarticCoefficients& q);

// Real roots of the quartic in ascending order, located in double precision
// from the companion matrix and polished by Newton steps at full precision.
template <class Real>
std::vector<Real> real_roots(const RealQuartic<Real>& quartic);

template <class Real>
struct QuarticSample {
  Real t = 0, rho = 0, rho_t = 0;
};

template <class Real>
struct QuarticResult {
  std::vector<QuarticSample<Real>> samples;
  Real first_integral_residual = 0;  // max |ρ_t² − Q(ρ)/4| over accepted steps
  StepStatistics stats;
};

// Integrates ρ_tt = Q'(ρ)/8 from ρ(0) = rho0, ρ_t(0) = ±√Q(rho0)/2. Throws
// no-real-motion when Q(rho0) < 0.
template <class Real>
QuarticResult<Real> integrate_quartic(const RealQuartic<Real>& quartic, const Real& rho0, Branch rho_t_sign,
                                      const Real& t_end, const Real& tol, const IntegrationOptions& options = {});
template <class Real>
QuarticResult<Real> integrate_quartic(const QuarticCoefficients& q, const Real& rho0, Branch rho_t_sign,
                                      const Real& t_end, const Real& tol, const IntegrationOptions& options = {});

template <class Real>
struct Jet {
  Real t = 0, y = 0, yt = 0, ytt = 0, yttt = 0;
};

template <class Real>
struct JetResult {
  std::vector<Jet<Real>> samples;
  StepStatistics stats;
};

// The fourth-order equation for y as a first-order system in (y, y_t, y_tt,
// y_ttt); params.H is required.
template <class Real>
JetResult<Real> integrate_fourth_order(const ModelParams& params, const Jet<Real>& j0, const Real& t_end,
                                       const Real& tol, const IntegrationOptions& options = {});

template <class Real>
struct EllipticVerifyOptions {
  Real rho0 = 0;
  Branch rho_t_sign = Branch::Plus;
  Branch x_sign = Branch::Plus;
  ExactScalar mu_offset = 0;  // added to the dynamical μ; nonzero only for negative controls
  IntegrationOptions integration;
};

template <class Real>
struct VerificationRow {
  Real t = 0, x = 0, xt = 0, y = 0, yt = 0, H = 0;
  Real y_quartic = 0;        // y from the quartic integration
  Real x2_relation = 0;      // x² from the trajectory relation at the quartic's (y, ρ)
  Real relation_residual = 0;  // polynomial relation between y and y_t at the direct solution
};

template <class Real>
struct EllipticVerification {
  bool complex_trajectory = false;  // x₀² ≤ 0: only y is compared, through the fourth-order equation
  Real x0_squared = 0;
  Real max_dy = 0;
  Real max_dx2 = 0;                  // |x² − trajectory relation| along the direct solution
  Real max_relation_residual = 0;    // polynomial relation between y and y_t
  Real first_integral_residual = 0;  // of the quartic equation
  Real energy_drift = 0;
  Real energy_offset = 0;  // |H(0) − record H| for the reconstructed initial state
  std::vector<VerificationRow<Real>> rows;
  StepStatistics direct_stats, quartic_stats;
};

// Builds y = P₀ ± ρ² from the quartic equation on [0, t_end], reconstructs
// (x, x_t) at t = 0 from the y-jet, integrates the system with the dynamical μ
// from the record and compares.
template <class Real>
EllipticVerification<Real> verify_elliptic_against_direct(const EllipticSolutionRecord& rec, const Real& t_end,
                                                          const Real& tol,
                                                          const EllipticVerifyOptions<Real>& options = {});

template <class Real>
struct SeriesCheck {
  Real delta = 0;
  Real y_series = 0, y_numeric = 0, error = 0;
  Real tail_bound = 0;  // larger of the last retained terms at δ and 2δ
};

template <class Real>
struct SeriesVerification {
  Real radius_estimate = 0;
  Real max_error = 0;
  std::vector<SeriesCheck<Real>> checks;
};

// For each δ: the series jet at δ seeds the fourth-order equation, which is
// integrated to 2δ and compared with the series there. Throws pole for δ = 0
// and radius when 2δ reaches the coefficient-based radius estimate or a tail
// bound exceeds tol.
template <class Real>
SeriesVerification<Real> verify_series_against_direct(const LaurentSolution& sol, const std::vector<Real>& offsets,
                                                      const Real& tol);

// Root-test estimate 1 / max |c_n|^(1/n) over the upper half of the positive
// powers; infinite when they all vanish.
template <class Real>
Real convergence_radius_estimate(const LaurentSeries<ExactScalar>& series);

// CSV with columns t, x, x_t, y, y_t, H followed by the residual columns, and
// the column manifest describing them.
std::vector<std::pair<std::string, std::string>> trajectory_csv_columns();
template <class Real>
void write_trajectory_csv(std::ostream& out, const EllipticVerification<Real>& report);

template <class Real>
std::string format_real(const Real& x);

}  // namespace hhp
