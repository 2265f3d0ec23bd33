#pragma once

// Dominant balances, resonances and Laurent solutions of the fourth-order
// equation for y around a movable double pole t₀ = 0.

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "hhp/exact.hpp"
#include "hhp/model.hpp"
#include "hhp/series.hpp"

namespace hhp {

// Case1: α = β = −2, b_β = −3.  Case2: β = −2 < Re α, b_β = 6/C.
enum class CaseId { Case1, Case2, Coincident };

const char* to_string(CaseId id);

struct DominantBalance {
  CaseId case_id = CaseId::Case1;
  ExactScalar alpha;
  int beta = -2;
  std::optional<ExactScalar> a_alpha;  // nullopt: arbitrary
  ExactScalar b_beta;
  Branch root_branch = Branch::Plus;   // sign of the radical in a_α (Case1) or α (Case2)
  bool imaginary = false;              // a_α or α is not real
  bool coincident = false;             // C = −2
};

std::vector<DominantBalance> dominant_balances(const ExactScalar& C);

struct ResonanceReport {
  CaseId case_id = CaseId::Case1;
  std::vector<ExactScalar> system_resonances;  // r
  std::vector<ExactScalar> y_resonances;     // r₄
  bool all_admissible = false;                 // r: all but one nonnegative integers, all distinct
  bool y_admissible = false;                 // the same criterion on r₄
  bool coincident = false;
  bool logarithmic = false;                    // r₄ = 0 while b_β is fixed
};

// For Case2 the sign of r depends on the α root; Minus is α = (1 − √(1−48/C))/2.
ResonanceReport resonances(const ExactScalar& C, CaseId which, Branch alpha_branch = Branch::Minus);

struct AdmissibleC {
  ExactScalar C;
  CaseId case_id;
  bool logarithmic = false;
};

// Values of C for which both resonance lists pass the admissibility criterion,
// found by scanning the C values that make the resonance radicals rational.
std::vector<AdmissibleC> admissible_C_values();

// Leading coefficient of y for an admissible C; throws not-applicable otherwise.
ExactScalar leading_coefficient(const ExactScalar& C);

// The four values of the t⁻¹ coefficient (C = −4/3 or −16/5): the outer sign
// selects ±√, the inner sign the ± under it.
struct BranchChoice {
  Branch outer = Branch::Plus;
  Branch inner = Branch::Plus;
};

struct BranchValue {
  BranchChoice choice;
  ExactScalar value;
};

std::array<BranchValue, 4> branch_values_bminus1(const ModelParams& params);
ExactScalar branch_value_bminus1(const ModelParams& params, BranchChoice choice);

struct CompatibilityRecord {
  int power = 0;            // power of t of the coefficient being solved
  ExactScalar constraint;   // residual with the coefficient set to zero
  bool compatible = true;
  ExactScalar injected;     // value placed in the free slot
};

struct LaurentSolution {
  LaurentSeries<ExactScalar> series;
  std::optional<BranchChoice> branch;
  std::map<int, ExactScalar> free_params;  // power → value, one entry per free slot
  ModelParams params;                       // H filled in by the builder
  std::vector<CompatibilityRecord> compatibility_log;
  bool energy_defaulted = false;            // H was neither supplied nor solved for
};

// Linear coefficient of c_n in the residual at power n − 4, leading coefficient c.
ExactScalar recursion_linear_coefficient(const ExactScalar& C, const ExactScalar& c, int n);

// Coefficients t⁻²…t^(order−1) of y solving the fourth-order equation.
// Free slots take `free` values (default 0; the t⁻¹ slot defaults to the
// branch value when a branch is given). If params.H is unset it is solved from
// free[4] when supplied, otherwise set to 0.
LaurentSolution build_laurent_solution(const ModelParams& params, std::optional<BranchChoice> branch,
                                       const std::map<int, ExactScalar>& free, int order);

LaurentSeries<ExactScalar> fourth_order_residual_series(const LaurentSolution& sol);

}  // namespace hhp
