#include "mcpulse/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcpulse {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-12;

// Dictionary form: basic_r = coef(r, 0) + sum_j coef(r, j + 1) * nonbasic_j.
// Variable labels: 0..n-1 structural, n..n+m-1 slacks, n+m auxiliary.
class Dictionary {
 public:
  Dictionary(std::size_t rows, std::size_t nonbasic)
      : rows_(rows), width_(nonbasic + 1), coef_(rows * (nonbasic + 1), 0.0),
        obj_(nonbasic + 1, 0.0), basic_(rows), nonbasic_(nonbasic) {}

  double& at(std::size_t r, std::size_t j) { return coef_[r * width_ + j]; }
  double at(std::size_t r, std::size_t j) const { return coef_[r * width_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return width_ - 1; }

  std::vector<double>& objective() { return obj_; }
  std::vector<std::size_t>& basic() { return basic_; }
  std::vector<std::size_t>& nonbasic() { return nonbasic_; }

  // Exchange basic row r with nonbasic column j (1-based in coef layout).
  void pivot(std::size_t r, std::size_t j) {
    const double a = at(r, j);
    double* prow = &coef_[r * width_];
    for (std::size_t k = 0; k < width_; ++k) prow[k] = (k == j) ? 1.0 / a : -prow[k] / a;
    auto eliminate = [&](double* row) {
      const double f = row[j];
      if (f == 0.0) return;
      for (std::size_t k = 0; k < width_; ++k) {
        row[k] = (k == j) ? f * prow[k] : row[k] + f * prow[k];
      }
    };
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i != r) eliminate(&coef_[i * width_]);
    }
    eliminate(obj_.data());
    std::swap(basic_[r], nonbasic_[j - 1]);
  }

  // Drops nonbasic column j (1-based), used to remove the auxiliary variable.
  void drop_column(std::size_t j) {
    std::vector<double> next(rows_ * (width_ - 1));
    for (std::size_t r = 0; r < rows_; ++r) {
      std::size_t w = 0;
      for (std::size_t k = 0; k < width_; ++k) {
        if (k != j) next[r * (width_ - 1) + w++] = at(r, k);
      }
    }
    obj_.erase(obj_.begin() + static_cast<std::ptrdiff_t>(j));
    nonbasic_.erase(nonbasic_.begin() + static_cast<std::ptrdiff_t>(j - 1));
    coef_ = std::move(next);
    --width_;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> coef_;
  std::vector<double> obj_;
  std::vector<std::size_t> basic_;
  std::vector<std::size_t> nonbasic_;
};

enum class PhaseOutcome { optimal, unbounded };

// Minimizes the dictionary objective with Bland's rule: entering variable is
// the smallest label with negative reduced cost, leaving variable the
// smallest label among the tied minimum ratios.
PhaseOutcome run_simplex(Dictionary& dict, double eps_opt, std::size_t& pivots) {
  const std::size_t max_pivots = 50 * (dict.rows() + dict.columns() + 10);
  for (;;) {
    auto& obj = dict.objective();
    auto& nb = dict.nonbasic();
    std::size_t enter = 0;
    for (std::size_t j = 1; j <= dict.columns(); ++j) {
      if (obj[j] < -eps_opt && (enter == 0 || nb[j - 1] < nb[enter - 1])) enter = j;
    }
    if (enter == 0) return PhaseOutcome::optimal;

    std::size_t leave = dict.rows();
    double best = std::numeric_limits<double>::infinity();
    auto& basic = dict.basic();
    for (std::size_t r = 0; r < dict.rows(); ++r) {
      const double a = dict.at(r, enter);
      if (a >= -kPivotTol) continue;
      const double ratio = std::max(dict.at(r, 0), 0.0) / -a;
      const double tie = 1e-12 * (1.0 + std::abs(best));
      if (leave == dict.rows() || ratio < best - tie) {
        best = ratio;
        leave = r;
      } else if (ratio <= best + tie && basic[r] < basic[leave]) {
        best = std::min(best, ratio);
        leave = r;
      }
    }
    if (leave == dict.rows()) return PhaseOutcome::unbounded;
    dict.pivot(leave, enter);
    if (++pivots > max_pivots) throw std::runtime_error("simplex exceeded pivot limit");
  }
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite value in ") + what);
  }
}

void check_finite(const Matrix& A, const char* what) {
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (double x : A.row(r)) {
      if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite value in ") + what);
    }
  }
}

}  // namespace

LpResult solve_lp(const LinearProgram& prob, const LpOptions& options) {
  const std::size_t n = prob.variables();
  if (prob.A_ge.rows() > 0 && prob.A_ge.cols() != n) {
    throw std::invalid_argument("A_ge column count differs from objective length");
  }
  if (prob.A_le.rows() > 0 && prob.A_le.cols() != n) {
    throw std::invalid_argument("A_le column count differs from objective length");
  }
  if (prob.A_ge.rows() != prob.b_ge.size() || prob.A_le.rows() != prob.b_le.size()) {
    throw std::invalid_argument("constraint matrix and right-hand side sizes differ");
  }
  check_finite(prob.c, "c");
  check_finite(prob.A_ge, "A_ge");
  check_finite(prob.b_ge, "b_ge");
  check_finite(prob.A_le, "A_le");
  check_finite(prob.b_le, "b_le");

  LpResult result;

  // Every row becomes g x >= h, scaled to unit max |g|.
  struct Row {
    std::vector<double> g;
    double h;
  };
  std::vector<Row> rows;
  rows.reserve(prob.A_ge.rows() + prob.A_le.rows());
  auto add_row = [&](std::span<const double> coeffs, double rhs, double sign) -> bool {
    double scale = 0.0;
    for (double v : coeffs) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return sign * rhs <= options.eps_feas;  // 0 >= h
    Row row{std::vector<double>(coeffs.size()), sign * rhs / scale};
    for (std::size_t j = 0; j < coeffs.size(); ++j) row.g[j] = sign * coeffs[j] / scale;
    rows.push_back(std::move(row));
    return true;
  };
  for (std::size_t r = 0; r < prob.A_ge.rows(); ++r) {
    if (!add_row(prob.A_ge.row(r), prob.b_ge[r], 1.0)) return result;
  }
  for (std::size_t r = 0; r < prob.A_le.rows(); ++r) {
    if (!add_row(prob.A_le.row(r), prob.b_le[r], -1.0)) return result;
  }
  const std::size_t m = rows.size();

  double c_scale = 0.0;
  for (double v : prob.c) c_scale = std::max(c_scale, std::abs(v));
  if (c_scale == 0.0) c_scale = 1.0;

  // Phase 1 with a single auxiliary column: s_r = -h_r + g_r x + x_aux.
  Dictionary dict(m, n + 1);
  for (std::size_t j = 0; j < n; ++j) dict.nonbasic()[j] = j;
  dict.nonbasic()[n] = n + m;
  std::size_t most_negative = m;
  for (std::size_t r = 0; r < m; ++r) {
    dict.basic()[r] = n + r;
    dict.at(r, 0) = -rows[r].h;
    for (std::size_t j = 0; j < n; ++j) dict.at(r, j + 1) = rows[r].g[j];
    dict.at(r, n + 1) = 1.0;
    if (dict.at(r, 0) < -options.eps_feas &&
        (most_negative == m || dict.at(r, 0) < dict.at(most_negative, 0))) {
      most_negative = r;
    }
  }

  if (most_negative != m) {
    dict.objective().assign(n + 2, 0.0);
    dict.objective()[n + 1] = 1.0;  // minimize x_aux
    dict.pivot(most_negative, n + 1);
    ++result.pivots;
    run_simplex(dict, options.eps_opt, result.pivots);
    if (dict.objective()[0] > options.eps_feas) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Degenerate case: the auxiliary variable is basic at zero.
    const auto aux = std::find(dict.basic().begin(), dict.basic().end(), n + m);
    if (aux != dict.basic().end()) {
      const std::size_t r = static_cast<std::size_t>(aux - dict.basic().begin());
      std::size_t col = 0;
      for (std::size_t j = 1; j <= dict.columns(); ++j) {
        if (std::abs(dict.at(r, j)) > kPivotTol &&
            (col == 0 || std::abs(dict.at(r, j)) > std::abs(dict.at(r, col)))) {
          col = j;
        }
      }
      if (col != 0) {
        dict.pivot(r, col);
        ++result.pivots;
      } else {
        dict.at(r, 0) = 0.0;  // row is identically zero in the remaining columns
      }
    }
  }
  {
    const auto& nb = dict.nonbasic();
    const auto it = std::find(nb.begin(), nb.end(), n + m);
    if (it != nb.end()) dict.drop_column(static_cast<std::size_t>(it - nb.begin()) + 1);
  }

  // Phase 2: express c^T x / c_scale through the current nonbasic variables.
  auto& obj = dict.objective();
  obj.assign(dict.columns() + 1, 0.0);
  for (std::size_t j = 0; j < dict.columns(); ++j) {
    if (dict.nonbasic()[j] < n) obj[j + 1] += prob.c[dict.nonbasic()[j]] / c_scale;
  }
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t label = dict.basic()[r];
    if (label >= n) continue;
    const double cj = prob.c[label] / c_scale;
    if (cj == 0.0) continue;
    for (std::size_t j = 0; j <= dict.columns(); ++j) obj[j] += cj * dict.at(r, j);
  }

  if (run_simplex(dict, options.eps_opt, result.pivots) == PhaseOutcome::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (dict.basic()[r] < n) x[dict.basic()[r]] = std::max(dict.at(r, 0), 0.0);
  }
  double objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) objective += prob.c[j] * x[j];
  result.status = LpStatus::optimal;
  result.x = std::move(x);
  result.objective = objective;
  return result;
}

}  // namespace mcpulse
