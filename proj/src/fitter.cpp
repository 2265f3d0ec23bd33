#include "hhp/fitter.hpp"

#include <algorithm>
#include <string>

namespace hhp {

namespace {

using Series = LaurentSeries<ExactScalar>;

constexpr int kUnbounded = 1 << 20;

void check_m(int m) {
  if (m < 1) throw Error(ErrorKind::Domain, "m must be at least 1, got " + std::to_string(m));
}

// y^j y_t^k for every monomial, keyed like enumerate_monomials.
class MonomialSeries {
 public:
  MonomialSeries(const Series& y, int m) {
    // The constant 1 is exact; it is given y's relative precision so that it
    // never binds and sums with it stay short.
    Series one(0, {ExactScalar(1)}, y.truncation_order() - std::min(y.leading_exponent(), 0));
    Series yt = diff(y);
    ypow_.push_back(one);
    for (int j = 1; j <= 2 * m; ++j) ypow_.push_back(ypow_.back() * y);
    ytpow_.push_back(one);
    for (int k = 1; k <= m; ++k) ytpow_.push_back(ytpow_.back() * yt);
  }

  Series operator()(const Monomial& mono) const {
    if (mono.j == 0) return ytpow_[mono.k];
    if (mono.k == 0) return ypow_[mono.j];
    return ypow_[mono.j] * ytpow_[mono.k];
  }

 private:
  std::vector<Series> ypow_, ytpow_;
};

}  // namespace

std::vector<Monomial> enumerate_monomials(int m) {
  check_m(m);
  std::vector<Monomial> out;
  for (int k = m; k >= 0; --k) {
    for (int j = 0; j <= 2 * m - 2 * k; ++j) out.push_back({j, k});
  }
  return out;
}

UnknownCount count_unknowns(int m) {
  UnknownCount c;
  for (const auto& mono : enumerate_monomials(m)) {
    ++c.monomials;
    if (mono == Monomial{0, m}) continue;
    ++c.unknowns;
    if (2 * mono.j + 3 * mono.k <= 3 * m) ++c.pole_bounded_unknowns;
  }
  return c;
}

ExactScalar BriotBouquetCandidate::coefficient(int j, int k) const {
  auto it = h.find({j, k});
  return it == h.end() ? ExactScalar(0) : it->second;
}

const char* to_string(FitOutcome outcome) {
  switch (outcome) {
    case FitOutcome::Unique: return "unique";
    case FitOutcome::Family: return "family";
    case FitOutcome::Inconsistent: return "inconsistent";
  }
  return "?";
}

int required_truncation(int m, int extra_orders) {
  // Lowest row at t^(−4m); every product keeps the relative precision
  // truncation + 2 of y, so the worst one, y^(2m), is valid below
  // truncation + 2 − 4m.
  int rows = count_unknowns(m).unknowns + extra_orders;
  return rows - 2;
}

FitSystem build_fit_system(const LaurentSolution& series, int m, int extra_orders) {
  return build_fit_system(series.series, m, extra_orders);
}

FitSystem build_fit_system(const Series& y, int m, int extra_orders) {
  check_m(m);
  if (extra_orders < 5)
    throw Error(ErrorKind::Domain, "extra_orders must be at least 5, got " + std::to_string(extra_orders));
  auto monomials = enumerate_monomials(m);
  MonomialSeries products(y, m);

  std::vector<Series> columns;
  int lowest = 0;
  int min_trunc = kUnbounded;
  for (const auto& mono : monomials) {
    columns.push_back(products(mono));
    const auto& s = columns.back();
    if (!s.is_zero()) lowest = std::min(lowest, s.leading_exponent());
    min_trunc = std::min(min_trunc, s.truncation_order());
  }

  FitSystem sys;
  sys.m = m;
  sys.series_truncation = y.truncation_order();
  sys.unknowns.assign(monomials.begin() + 1, monomials.end());
  int n = static_cast<int>(sys.unknowns.size());
  int rows = n + extra_orders;
  int top = lowest + rows - 1;
  if (top >= min_trunc) {
    int needed = y.truncation_order() + top + 1 - min_trunc;
    throw Error(ErrorKind::Window, "fit with m=" + std::to_string(m) + " and " + std::to_string(extra_orders) +
                                       " extra orders needs the series to truncation order " +
                                       std::to_string(needed) + ", got " + std::to_string(y.truncation_order()));
  }

  sys.matrix.resize(rows, n);
  sys.rhs.resize(rows);
  for (int r = 0; r < rows; ++r) {
    int p = lowest + r;
    sys.row_powers.push_back(p);
    sys.rhs(r) = -columns[0].coefficient(p);
    for (int c = 0; c < n; ++c) sys.matrix(r, c) = columns[c + 1].coefficient(p);
  }
  return sys;
}

FitSolution solve_fit_system(const FitSystem& sys) {
  const int n = static_cast<int>(sys.matrix.cols());
  struct PivotRow {
    int col;
    std::vector<ExactScalar> v;  // n coefficients followed by the right side
  };
  std::vector<PivotRow> pivots;
  FitSolution out;

  for (int r = 0; r < sys.matrix.rows(); ++r) {
    std::vector<ExactScalar> v(n + 1);
    for (int c = 0; c < n; ++c) v[c] = sys.matrix(r, c);
    v[n] = sys.rhs(r);
    for (const auto& p : pivots) {
      if (v[p.col].is_zero()) continue;
      ExactScalar f = v[p.col];
      for (int c = 0; c <= n; ++c) {
        if (!p.v[c].is_zero()) v[c] -= f * p.v[c];
      }
    }
    int lead = 0;
    while (lead < n && v[lead].is_zero()) ++lead;
    if (lead == n) {
      if (v[n].is_zero()) continue;
      out.outcome = FitOutcome::Inconsistent;
      out.rank = static_cast<int>(pivots.size());
      out.failing_row = r;
      out.failing_power = r < static_cast<int>(sys.row_powers.size()) ? sys.row_powers[r] : 0;
      return out;
    }
    ExactScalar inv = v[lead].inverse();
    for (int c = lead; c <= n; ++c) v[c] *= inv;
    for (auto& p : pivots) {
      if (p.v[lead].is_zero()) continue;
      ExactScalar f = p.v[lead];
      for (int c = lead; c <= n; ++c) p.v[c] -= f * v[c];
    }
    pivots.push_back({lead, std::move(v)});
  }

  out.rank = static_cast<int>(pivots.size());
  std::vector<bool> is_pivot(n, false);
  for (const auto& p : pivots) is_pivot[p.col] = true;

  BriotBouquetCandidate cand;
  cand.m = sys.m;
  cand.h[{0, sys.m}] = ExactScalar(1);
  for (const auto& p : pivots) {
    if (!p.v[n].is_zero()) cand.h[sys.unknowns[p.col]] = p.v[n];
  }
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    out.free_unknowns.push_back(sys.unknowns[f]);
    std::map<Monomial, ExactScalar> vec{{sys.unknowns[f], ExactScalar(1)}};
    for (const auto& p : pivots) {
      if (!p.v[f].is_zero()) vec[sys.unknowns[p.col]] = -p.v[f];
    }
    out.null_space.push_back(std::move(vec));
  }
  out.outcome = out.free_unknowns.empty() ? FitOutcome::Unique : FitOutcome::Family;
  out.candidate = std::move(cand);
  return out;
}

Series residual_candidate(const BriotBouquetCandidate& candidate, const Series& y) {
  check_m(candidate.m);
  MonomialSeries products(y, candidate.m);
  Series sum = Series::zero(kUnbounded);
  for (const auto& [mono, h] : candidate.h) {
    if (mono.k < 0 || mono.k > candidate.m || mono.j < 0 || mono.j > 2 * candidate.m - 2 * mono.k)
      throw Error(ErrorKind::Domain, "monomial outside the index set for m=" + std::to_string(candidate.m));
    sum = sum + h * products(mono);
  }
  return sum;
}

Series residual_candidate(const BriotBouquetCandidate& candidate, const LaurentSolution& series) {
  return residual_candidate(candidate, series.series);
}

}  // namespace hhp
