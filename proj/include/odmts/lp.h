// Copyright 2026 The ODMTS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ODMTS_LP_H_
#define ODMTS_LP_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace odmts {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* LpStatusName(LpStatus status);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

// Statuses of the structural variables followed by one logical per row. A
// basis from a previous solve of an LP with the same columns can seed the next
// solve; rows appended since then should get kBasic logicals.
using LpBasis = std::vector<VarStatus>;

// min c'x  s.t.  rows (<=, =, >=) and lower <= x <= upper. Bounds may be
// +-infinity. The matrix is stored by column.
class LinearProgram {
 public:
  using Entry = std::pair<int, double>;  // (row or column index, coefficient)

  int AddVariable(double lower, double upper, double cost);
  // Terms reference existing variables; repeated variables are summed.
  int AddRow(std::span<const Entry> terms, RowSense sense, double rhs);

  void SetBounds(int var, double lower, double upper);
  void SetCost(int var, double cost) { cost_[var] = cost; }

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }
  double cost(int var) const { return cost_[var]; }
  RowSense sense(int row) const { return sense_[row]; }
  double rhs(int row) const { return rhs_[row]; }
  // (row, coefficient) pairs of one column, in insertion order.
  const std::vector<Entry>& column(int var) const { return columns_[var]; }

 private:
  std::vector<double> lower_, upper_, cost_;
  std::vector<std::vector<Entry>> columns_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
};

struct LpOptions {
  double feasibility_tolerance = 1e-8;
  double optimality_tolerance = 1e-7;
  int refactor_interval = 64;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_pivot_limit = 50;
  // 0 picks a limit from the problem size.
  int iteration_limit = 0;
};

// Duals follow the sensitivity convention d(objective)/d(rhs): >= rows carry
// nonnegative duals, <= rows nonpositive ones. reduced_costs[j] =
// cost_j - sum_i duals_i * a_ij.
struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> row_activity;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  LpBasis basis;
  int iterations = 0;
};

// Bounded-variable primal simplex on an explicit basis inverse with a slack
// ("logical") variable per row. Phase 1 minimizes the sum of bound
// infeasibilities, so any basis can seed a solve. Dantzig pricing switches to
// Bland's rule while pivots stay degenerate.
LpSolution SolveLp(const LinearProgram& lp, const LpBasis* warm_start = nullptr,
                   const LpOptions& options = {});

// b'y plus the bound terms of the reduced costs; equals the primal objective
// at an optimal basis.
double DualObjective(const LinearProgram& lp, const LpSolution& solution);

// CPLEX-LP-style text for cross-checking with external solvers.
void WriteLpFormat(const LinearProgram& lp, std::ostream& out);

}  // namespace odmts

#endif  // ODMTS_LP_H_
