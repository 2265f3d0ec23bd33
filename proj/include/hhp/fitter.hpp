#pragma once

// Fitting a polynomial autonomous first-order equation
//   Σ_{k=0}^{m} Σ_{j=0}^{2m−2k} h_jk y^j y_t^k = 0,   h_0m = 1,
// to a Laurent solution: substituting the series makes every power of t a
// linear condition on the h_jk.

#include <Eigen/Core>

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hhp/exact.hpp"
#include "hhp/painleve.hpp"
#include "hhp/series.hpp"

namespace hhp {

// y^j · y_t^k
struct Monomial {
  int j = 0;
  int k = 0;
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

// All monomials for the given m, ordered by k descending, then j ascending:
// (0,m), (0,m−1), (1,m−1), (2,m−1), ..., (0,0), ..., (2m,0). Count (m+1)².
std::vector<Monomial> enumerate_monomials(int m);

struct UnknownCount {
  int monomials = 0;  // (m+1)²
  int unknowns = 0;   // monomials − 1, h_0m being fixed
  // Unknowns among monomials whose pole order 2j + 3k at a double pole of y
  // does not exceed that of y_t^m; 60 for m = 8.
  int pole_bounded_unknowns = 0;
};

UnknownCount count_unknowns(int m);

using ExactMatrix = Eigen::Matrix<ExactScalar, Eigen::Dynamic, Eigen::Dynamic>;
using ExactVector = Eigen::Matrix<ExactScalar, Eigen::Dynamic, 1>;

// matrix · h = rhs, one row per power of t, columns in enumerate_monomials
// order with (0,m) moved to the right side.
struct FitSystem {
  int m = 0;
  std::vector<Monomial> unknowns;
  std::vector<int> row_powers;
  ExactMatrix matrix;
  ExactVector rhs;
  int series_truncation = 0;
};

struct BriotBouquetCandidate {
  int m = 0;
  std::map<Monomial, ExactScalar> h;  // zero entries omitted; h(0,m) = 1

  ExactScalar coefficient(int j, int k) const;
};

// Rows start at the lowest power occurring in any y^j y_t^k and run for
// unknowns + extra_orders powers. extra_orders < 5 is a domain error; a series
// truncated too early is a window error naming the truncation order required.
FitSystem build_fit_system(const LaurentSolution& series, int m, int extra_orders = 8);
FitSystem build_fit_system(const LaurentSeries<ExactScalar>& y, int m, int extra_orders = 8);

// Truncation order of y needed for build_fit_system(y, m, extra_orders),
// assuming the double pole of a nonzero y.
int required_truncation(int m, int extra_orders = 8);

enum class FitOutcome { Unique, Family, Inconsistent };

const char* to_string(FitOutcome outcome);

struct FitSolution {
  FitOutcome outcome = FitOutcome::Inconsistent;
  int rank = 0;
  // Inconsistent: the first row (in system order) that contradicts the rows
  // before it, and its power of t.
  std::optional<int> failing_row;
  std::optional<int> failing_power;
  // Consistent: the solution with every free unknown set to zero, and one
  // null-space vector per free unknown.
  std::optional<BriotBouquetCandidate> candidate;
  std::vector<Monomial> free_unknowns;
  std::vector<std::map<Monomial, ExactScalar>> null_space;
};

// Exact row-by-row elimination in system order.
FitSolution solve_fit_system(const FitSystem& sys);

// Σ h_jk y^j y_t^k with the series substituted, valid to the truncation the
// products allow.
LaurentSeries<ExactScalar> residual_candidate(const BriotBouquetCandidate& candidate,
                                              const LaurentSeries<ExactScalar>& y);
LaurentSeries<ExactScalar> residual_candidate(const BriotBouquetCandidate& candidate, const LaurentSolution& series);

}  // namespace hhp
