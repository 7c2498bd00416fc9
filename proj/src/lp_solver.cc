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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "odmts/lp.h"

namespace odmts {

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

int LinearProgram::AddVariable(double lower, double upper, double cost) {
  if (lower > upper) throw std::invalid_argument("variable lower bound exceeds upper bound");
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  columns_.emplace_back();
  return num_variables() - 1;
}

int LinearProgram::AddRow(std::span<const Entry> terms, RowSense sense, double rhs) {
  const int row = num_rows();
  for (const auto& [var, coeff] : terms) {
    if (var < 0 || var >= num_variables()) throw std::out_of_range("row references unknown variable");
    auto& col = columns_[var];
    if (!col.empty() && col.back().first == row) {
      col.back().second += coeff;
    } else {
      col.emplace_back(row, coeff);
    }
  }
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  return row;
}

void LinearProgram::SetBounds(int var, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable lower bound exceeds upper bound");
  lower_[var] = lower;
  upper_[var] = upper;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& options)
      : lp_(lp), options_(options), n_(lp.num_variables()), m_(lp.num_rows()), total_(n_ + m_) {
    lo_.resize(total_);
    up_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.lower(j);
      up_[j] = lp.upper(j);
      cost_[j] = lp.cost(j);
    }
    for (int i = 0; i < m_; ++i) {
      const double b = lp.rhs(i);
      switch (lp.sense(i)) {
        case RowSense::kLessEqual:
          lo_[n_ + i] = -kInf;
          up_[n_ + i] = b;
          break;
        case RowSense::kEqual:
          lo_[n_ + i] = b;
          up_[n_ + i] = b;
          break;
        case RowSense::kGreaterEqual:
          lo_[n_ + i] = b;
          up_[n_ + i] = kInf;
          break;
      }
    }
    iteration_limit_ = options.iteration_limit > 0 ? options.iteration_limit
                                                   : std::max(20000, 50 * (total_ + 1));
  }

  LpSolution Solve(const LpBasis* warm) {
    if (!(warm && WarmStart(*warm))) ColdStart();
    LpStatus status = LpStatus::kNumericalFailure;
    // A clean refactorization confirms the final basis; a few retries cover
    // drift in the updated inverse.
    for (int attempt = 0; attempt < 4; ++attempt) {
      status = Iterate();
      if (status != LpStatus::kOptimal) break;
      if (!Refactor()) {
        ColdStart();
        continue;
      }
      ComputeBasicValues();
      if (MaxInfeasibility() <= options_.feasibility_tolerance && !HasEligible()) break;
      status = LpStatus::kNumericalFailure;
    }
    return Extract(status);
  }

 private:
  template <typename F>
  void ForColumn(int j, F&& f) const {
    if (j < n_) {
      for (const auto& [r, v] : lp_.column(j)) f(r, v);
    } else {
      f(j - n_, -1.0);
    }
  }

  double Bound(double b) const { return kPrimalTol * (1.0 + std::abs(b)); }
  bool BelowLower(int k) const { return lo_[k] > -kInf && x_[k] < lo_[k] - Bound(lo_[k]); }
  bool AboveUpper(int k) const { return up_[k] < kInf && x_[k] > up_[k] + Bound(up_[k]); }

  double Violation(int k) const {
    if (lo_[k] > -kInf && x_[k] < lo_[k]) return lo_[k] - x_[k];
    if (up_[k] < kInf && x_[k] > up_[k]) return x_[k] - up_[k];
    return 0.0;
  }

  double MaxInfeasibility() const {
    double worst = 0.0;
    for (int k : head_) worst = std::max(worst, Violation(k) / (1.0 + std::abs(x_[k])));
    return worst;
  }

  void NonbasicValue(int j) {
    switch (status_[j]) {
      case VarStatus::kAtLower:
        x_[j] = lo_[j];
        break;
      case VarStatus::kAtUpper:
        x_[j] = up_[j];
        break;
      case VarStatus::kFree:
        x_[j] = 0.0;
        break;
      case VarStatus::kBasic:
        break;
    }
  }

  VarStatus DefaultNonbasic(int j) const {
    if (lo_[j] > -kInf) return VarStatus::kAtLower;
    if (up_[j] < kInf) return VarStatus::kAtUpper;
    return VarStatus::kFree;
  }

  void ColdStart() {
    status_.assign(total_, VarStatus::kBasic);
    x_.assign(total_, 0.0);
    head_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      status_[j] = DefaultNonbasic(j);
      NonbasicValue(j);
    }
    for (int i = 0; i < m_; ++i) head_[i] = n_ + i;
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = -1.0;
    since_refactor_ = 0;
    ComputeBasicValues();
  }

  bool WarmStart(const LpBasis& basis) {
    if (static_cast<int>(basis.size()) != total_) return false;
    status_ = basis;
    x_.assign(total_, 0.0);
    head_.clear();
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic) {
        head_.push_back(j);
        continue;
      }
      if ((status_[j] == VarStatus::kAtLower && lo_[j] == -kInf) ||
          (status_[j] == VarStatus::kAtUpper && up_[j] == kInf) ||
          (status_[j] == VarStatus::kFree && (lo_[j] > -kInf || up_[j] < kInf))) {
        status_[j] = DefaultNonbasic(j);
      }
      NonbasicValue(j);
    }
    if (static_cast<int>(head_.size()) != m_) return false;
    if (!Refactor()) return false;
    ComputeBasicValues();
    return true;
  }

  // Inverts B = [A_S, -I_L] by blocks: only the rows R without a basic logical
  // need a dense s x s inverse of A_RS.
  bool Refactor() {
    since_refactor_ = 0;
    std::vector<int> logical_pos(m_, -1);
    std::vector<int> struct_pos;
    for (int p = 0; p < m_; ++p) {
      if (head_[p] >= n_) {
        logical_pos[head_[p] - n_] = p;
      } else {
        struct_pos.push_back(p);
      }
    }
    std::vector<int> rows_r;
    std::vector<int> local(m_, -1);
    for (int i = 0; i < m_; ++i) {
      if (logical_pos[i] < 0) {
        local[i] = static_cast<int>(rows_r.size());
        rows_r.push_back(i);
      }
    }
    const int s = static_cast<int>(struct_pos.size());
    if (static_cast<int>(rows_r.size()) != s) return false;

    std::vector<double> mat(static_cast<size_t>(s) * s, 0.0);
    for (int a = 0; a < s; ++a) {
      for (const auto& [r, v] : lp_.column(head_[struct_pos[a]]))
        if (local[r] >= 0) mat[static_cast<size_t>(local[r]) * s + a] += v;
    }
    std::vector<double> inv;
    if (!Invert(mat, s, inv)) return false;

    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int a = 0; a < s; ++a) {
      double* row = &binv_[static_cast<size_t>(struct_pos[a]) * m_];
      for (int b = 0; b < s; ++b) row[rows_r[b]] = inv[static_cast<size_t>(a) * s + b];
    }
    for (int a = 0; a < s; ++a) {
      for (const auto& [r, v] : lp_.column(head_[struct_pos[a]])) {
        if (logical_pos[r] < 0) continue;
        double* row = &binv_[static_cast<size_t>(logical_pos[r]) * m_];
        const double* src = &inv[static_cast<size_t>(a) * s];
        for (int b = 0; b < s; ++b) row[rows_r[b]] += v * src[b];
      }
    }
    for (int i = 0; i < m_; ++i)
      if (logical_pos[i] >= 0) binv_[static_cast<size_t>(logical_pos[i]) * m_ + i] = -1.0;
    return true;
  }

  // Gauss-Jordan with partial pivoting.
  static bool Invert(std::vector<double> a, int s, std::vector<double>& inv) {
    inv.assign(static_cast<size_t>(s) * s, 0.0);
    for (int i = 0; i < s; ++i) inv[static_cast<size_t>(i) * s + i] = 1.0;
    for (int c = 0; c < s; ++c) {
      int piv = c;
      double best = std::abs(a[static_cast<size_t>(c) * s + c]);
      for (int r = c + 1; r < s; ++r) {
        double v = std::abs(a[static_cast<size_t>(r) * s + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-11) return false;
      if (piv != c) {
        for (int k = 0; k < s; ++k) {
          std::swap(a[static_cast<size_t>(c) * s + k], a[static_cast<size_t>(piv) * s + k]);
          std::swap(inv[static_cast<size_t>(c) * s + k], inv[static_cast<size_t>(piv) * s + k]);
        }
      }
      const double d = a[static_cast<size_t>(c) * s + c];
      for (int k = 0; k < s; ++k) {
        a[static_cast<size_t>(c) * s + k] /= d;
        inv[static_cast<size_t>(c) * s + k] /= d;
      }
      for (int r = 0; r < s; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<size_t>(r) * s + c];
        if (f == 0.0) continue;
        for (int k = 0; k < s; ++k) {
          a[static_cast<size_t>(r) * s + k] -= f * a[static_cast<size_t>(c) * s + k];
          inv[static_cast<size_t>(r) * s + k] -= f * inv[static_cast<size_t>(c) * s + k];
        }
      }
    }
    return true;
  }

  void ComputeBasicValues() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
      const double xj = x_[j];
      ForColumn(j, [&](int r, double v) { rhs[r] -= v * xj; });
    }
    for (int p = 0; p < m_; ++p) {
      const double* row = &binv_[static_cast<size_t>(p) * m_];
      double sum = 0.0;
      for (int i = 0; i < m_; ++i) sum += row[i] * rhs[i];
      x_[head_[p]] = sum;
    }
  }

  void Ftran(int j, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    ForColumn(j, [&](int r, double v) {
      for (int p = 0; p < m_; ++p) alpha[p] += binv_[static_cast<size_t>(p) * m_ + r] * v;
    });
  }

  void Btran(const std::vector<double>& cb, std::vector<double>& pi) const {
    pi.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      if (cb[p] == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(p) * m_];
      for (int i = 0; i < m_; ++i) pi[i] += cb[p] * row[i];
    }
  }

  double ReducedCost(int j, const std::vector<double>& pi, bool phase_one) const {
    double d = phase_one ? 0.0 : cost_[j];
    ForColumn(j, [&](int r, double v) { d -= pi[r] * v; });
    return d;
  }

  // Phase-1 costs: +-1 on basic variables outside their bounds.
  bool PhaseCosts(bool phase_one, std::vector<double>& cb) const {
    cb.assign(m_, 0.0);
    bool infeasible = false;
    for (int p = 0; p < m_; ++p) {
      const int k = head_[p];
      if (phase_one) {
        if (BelowLower(k)) {
          cb[p] = -1.0;
          infeasible = true;
        } else if (AboveUpper(k)) {
          cb[p] = 1.0;
          infeasible = true;
        }
      } else {
        cb[p] = cost_[k];
      }
    }
    return infeasible;
  }

  // Direction (+1 increase, -1 decrease) in which nonbasic j improves, or 0.
  int Direction(int j, double d) const {
    if (status_[j] == VarStatus::kBasic || lo_[j] == up_[j]) return 0;
    const double tol = kDualTol * (1.0 + std::abs(cost_[j]));
    switch (status_[j]) {
      case VarStatus::kAtLower:
        return d < -tol ? 1 : 0;
      case VarStatus::kAtUpper:
        return d > tol ? -1 : 0;
      case VarStatus::kFree:
        return d < -tol ? 1 : (d > tol ? -1 : 0);
      case VarStatus::kBasic:
        return 0;
    }
    return 0;
  }

  bool HasEligible() const {
    std::vector<double> cb, pi;
    PhaseCosts(false, cb);
    Btran(cb, pi);
    for (int j = 0; j < total_; ++j)
      if (Direction(j, ReducedCost(j, pi, false)) != 0) return true;
    return false;
  }

  void Pivot(int r, const std::vector<double>& alpha) {
    double* prow = &binv_[static_cast<size_t>(r) * m_];
    const double inv = 1.0 / alpha[r];
    for (int i = 0; i < m_; ++i) prow[i] *= inv;
    for (int p = 0; p < m_; ++p) {
      if (p == r || alpha[p] == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(p) * m_];
      const double f = alpha[p];
      for (int i = 0; i < m_; ++i) row[i] -= f * prow[i];
    }
  }

  LpStatus Iterate() {
    std::vector<double> cb, pi, alpha;
    bool phase_one = true;
    int degenerate = 0;
    while (iterations_ < iteration_limit_) {
      if (since_refactor_ >= options_.refactor_interval) {
        if (!Refactor()) return LpStatus::kNumericalFailure;
        ComputeBasicValues();
      }
      // Rechecked every iteration so drift in phase 2 returns to phase 1.
      phase_one = PhaseCosts(true, cb);
      if (!phase_one) PhaseCosts(false, cb);
      Btran(cb, pi);

      const bool bland = degenerate > options_.degenerate_pivot_limit;
      int q = -1, dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (status_[j] == VarStatus::kBasic) continue;
        const double d = ReducedCost(j, pi, phase_one);
        const int dj = Direction(j, d);
        if (dj == 0) continue;
        if (bland) {
          q = j;
          dir = dj;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = dj;
        }
      }
      if (q < 0) {
        if (!phase_one) return LpStatus::kOptimal;
        return LpStatus::kInfeasible;
      }

      Ftran(q, alpha);
      // Harris two-pass ratio test; phase-1 breakpoints where an infeasible
      // basic variable reaches its violated bound are taken exactly.
      double relaxed_limit = kInf;
      for (int p = 0; p < m_; ++p) {
        if (std::abs(alpha[p]) <= kPivotTol) continue;
        const int k = head_[p];
        const double rate = -dir * alpha[p];
        double limit = kInf;
        if (rate < 0.0) {
          if (phase_one && AboveUpper(k)) {
            limit = (x_[k] - up_[k]) / -rate;
          } else if (!(phase_one && BelowLower(k)) && lo_[k] > -kInf) {
            limit = (x_[k] - lo_[k] + (bland ? 0.0 : Bound(lo_[k]))) / -rate;
          }
        } else {
          if (phase_one && BelowLower(k)) {
            limit = (lo_[k] - x_[k]) / rate;
          } else if (!(phase_one && AboveUpper(k)) && up_[k] < kInf) {
            limit = (up_[k] - x_[k] + (bland ? 0.0 : Bound(up_[k]))) / rate;
          }
        }
        // A basic variable already past its bound by less than the
        // tolerance gives a negative limit; the second pass clamps ratios
        // at 0, so clamp here too or it would find no candidate.
        relaxed_limit = std::min(relaxed_limit, std::max(0.0, limit));
      }
      int leave = -1;
      double step = kInf, leave_bound = 0.0, leave_pivot = 0.0;
      if (relaxed_limit < kInf) {
        for (int p = 0; p < m_; ++p) {
          if (std::abs(alpha[p]) <= kPivotTol) continue;
          const int k = head_[p];
          const double rate = -dir * alpha[p];
          double target;
          if (rate < 0.0) {
            if (phase_one && AboveUpper(k)) {
              target = up_[k];
            } else if (!(phase_one && BelowLower(k)) && lo_[k] > -kInf) {
              target = lo_[k];
            } else {
              continue;
            }
          } else {
            if (phase_one && BelowLower(k)) {
              target = lo_[k];
            } else if (!(phase_one && AboveUpper(k)) && up_[k] < kInf) {
              target = up_[k];
            } else {
              continue;
            }
          }
          const double ratio = std::max(0.0, (target - x_[k]) / rate);
          if (ratio > relaxed_limit) continue;
          const bool take = leave < 0 ||
                            (bland ? (ratio < step || (ratio == step && k < head_[leave]))
                                   : std::abs(alpha[p]) > leave_pivot);
          if (take) {
            leave = p;
            step = ratio;
            leave_bound = target;
            leave_pivot = std::abs(alpha[p]);
          }
        }
      }
      const double flip = (lo_[q] > -kInf && up_[q] < kInf) ? up_[q] - lo_[q] : kInf;
      if (flip <= step) {
        leave = -1;
        step = flip;
      }
      if (step == kInf) return phase_one ? LpStatus::kNumericalFailure : LpStatus::kUnbounded;

      ++iterations_;
      degenerate = step <= 1e-12 ? degenerate + 1 : 0;
      x_[q] += dir * step;
      for (int p = 0; p < m_; ++p)
        if (alpha[p] != 0.0) x_[head_[p]] -= dir * alpha[p] * step;
      if (leave < 0) {
        status_[q] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        NonbasicValue(q);
        continue;
      }
      const int out = head_[leave];
      x_[out] = leave_bound;
      status_[out] = leave_bound == lo_[out] ? VarStatus::kAtLower : VarStatus::kAtUpper;
      status_[q] = VarStatus::kBasic;
      head_[leave] = q;
      Pivot(leave, alpha);
      ++since_refactor_;
    }
    return LpStatus::kNumericalFailure;
  }

  LpSolution Extract(LpStatus status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    sol.basis = status_;
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    sol.row_activity.assign(x_.begin() + n_, x_.end());
    if (status != LpStatus::kOptimal) return sol;
    std::vector<double> cb, pi;
    PhaseCosts(false, cb);
    Btran(cb, pi);
    sol.duals = pi;
    for (int i = 0; i < m_; ++i)
      if (status_[n_ + i] == VarStatus::kBasic) sol.duals[i] = 0.0;
    sol.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (status_[j] != VarStatus::kBasic) sol.reduced_costs[j] = ReducedCost(j, pi, false);
    for (int j = 0; j < n_; ++j) sol.objective += cost_[j] * sol.primal[j];
    return sol;
  }

  const LinearProgram& lp_;
  LpOptions options_;
  int n_, m_, total_;
  std::vector<double> lo_, up_, cost_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  std::vector<double> x_;
  std::vector<double> binv_;  // row p holds the p-th row of B^-1
  int since_refactor_ = 0;
  int iterations_ = 0;
  int iteration_limit_ = 0;
};

}  // namespace

LpSolution SolveLp(const LinearProgram& lp, const LpBasis* warm_start, const LpOptions& options) {
  Simplex simplex(lp, options);
  LpSolution sol = simplex.Solve(warm_start);
  if (sol.status == LpStatus::kOptimal) {
    const double gap = std::abs(sol.objective - DualObjective(lp, sol));
    if (gap > options.optimality_tolerance * (1.0 + std::abs(sol.objective))) {
      sol.status = LpStatus::kNumericalFailure;
    }
  }
  return sol;
}

double DualObjective(const LinearProgram& lp, const LpSolution& sol) {
  double total = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) total += sol.duals[i] * lp.rhs(i);
  for (int j = 0; j < lp.num_variables(); ++j) {
    // Near-zero reduced costs may sit on either side; use the bound the
    // variable actually occupies for those.
    const double d = sol.reduced_costs[j];
    if (d > 0.0 && lp.lower(j) > -kInf) {
      total += d * lp.lower(j);
    } else if (d < 0.0 && lp.upper(j) < kInf) {
      total += d * lp.upper(j);
    } else {
      total += d * sol.primal[j];
    }
  }
  return total;
}

}  // namespace odmts
