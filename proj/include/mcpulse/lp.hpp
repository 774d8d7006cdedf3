#pragma once

// Small dense linear programs:
//
//   minimize c^T x  subject to  A_ge x >= b_ge,  A_le x <= b_le,  x >= 0.
//
// Two-phase simplex on a condensed dictionary (one row per constraint, one
// column per nonbasic variable) with Bland's rule. Problems here have a
// handful of variables and up to a few thousand rows, so the dictionary stays
// (rows x variables) and each pivot costs O(rows * variables).

#include <optional>
#include <vector>

#include "mcpulse/matrix.hpp"

namespace mcpulse {

struct LinearProgram {
  std::vector<double> c;
  Matrix A_ge;
  std::vector<double> b_ge;
  Matrix A_le;
  std::vector<double> b_le;

  explicit LinearProgram(std::size_t n_vars = 0)
      : c(n_vars, 0.0), A_ge(0, n_vars), A_le(0, n_vars) {}

  std::size_t variables() const { return c.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::optional<std::vector<double>> x;
  std::optional<double> objective;
  std::size_t pivots = 0;
};

struct LpOptions {
  double eps_feas = 1e-9;  // absolute, on rows scaled to unit max coefficient
  double eps_opt = 1e-9;   // reduced-cost tolerance, relative to max |c_j|
};

/// Throws std::domain_error on NaN/Inf input and std::invalid_argument when
/// the column or row counts disagree. Deterministic for identical input.
LpResult solve_lp(const LinearProgram& prob, const LpOptions& options = {});

}  // namespace mcpulse
