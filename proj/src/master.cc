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

#include "odmts/master.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace odmts {

const char* MipStatusName(MipStatus status) {
  switch (status) {
    case MipStatus::kOptimal:
      return "optimal";
    case MipStatus::kInfeasible:
      return "infeasible";
    case MipStatus::kNodeLimit:
      return "node_limit";
    case MipStatus::kTimeLimit:
      return "time_limit";
  }
  return "unknown";
}

Master::Master(std::span<const Arc> arcs, int num_vertices, int num_theta)
    : arcs_(arcs.begin(), arcs.end()), num_theta_(num_theta) {
  if (num_theta < 1) throw std::invalid_argument("master needs at least one theta");
  decision_ = DecisionArcs(arcs_);
  std::vector<int> column_of(arcs_.size(), -1);
  for (size_t k = 0; k < decision_.size(); ++k) {
    column_of[decision_[k]] = static_cast<int>(k);
    lp_.AddVariable(0.0, 1.0, arcs_[decision_[k]].fixed_cost);
  }
  for (int t = 0; t < num_theta; ++t) lp_.AddVariable(0.0, std::numeric_limits<double>::infinity(), 1.0);

  // Frequency balance per (vertex, mode); fixed-open arcs move to the rhs.
  const DeltaIndex delta(num_vertices, arcs_);
  for (int v = 0; v < num_vertices; ++v) {
    for (int m = 0; m < kNumModes; ++m) {
      std::vector<LinearProgram::Entry> terms;
      double constant = 0.0;
      auto visit = [&](const std::vector<int>& ids, double sign) {
        for (int id : ids) {
          const Arc& a = arcs_[id];
          if (a.frequency == 0) continue;
          if (column_of[id] >= 0) {
            terms.emplace_back(column_of[id], sign * a.frequency);
          } else {
            constant += sign * a.frequency;
          }
        }
      };
      visit(delta.Out(v, static_cast<Mode>(m)), 1.0);
      visit(delta.In(v, static_cast<Mode>(m)), -1.0);
      if (terms.empty()) {
        if (constant != 0.0) throw std::invalid_argument("fixed-open arcs violate frequency balance");
        continue;
      }
      lp_.AddRow(terms, RowSense::kEqual, -constant);
      ++num_balance_rows_;
    }
  }

  // At most one frequency per connection.
  std::map<std::tuple<int, int, int>, std::vector<int>> groups;
  for (int id : decision_) {
    const Arc& a = arcs_[id];
    groups[{a.tail, a.head, static_cast<int>(a.mode)}].push_back(column_of[id]);
  }
  for (const auto& [key, columns] : groups) {
    if (columns.size() < 2) continue;
    std::vector<LinearProgram::Entry> terms;
    for (int c : columns) terms.emplace_back(c, 1.0);
    lp_.AddRow(terms, RowSense::kLessEqual, 1.0);
    ++num_frequency_rows_;
  }
}

namespace {

std::uint64_t HashCut(int theta_index, double rhs, std::span<const std::pair<int, double>> terms) {
  std::uint64_t h = 14695981039346656037ull ^ static_cast<std::uint64_t>(theta_index);
  auto mix = [&](const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(&rhs, sizeof rhs);
  for (const auto& [c, v] : terms) {
    mix(&c, sizeof c);
    mix(&v, sizeof v);
  }
  return h;
}

}  // namespace

bool Master::AddCut(const BendersCut& cut) {
  if (cut.theta_index < 0 || cut.theta_index >= num_theta_) throw std::invalid_argument("cut theta index out of range");
  if (!std::isfinite(cut.constant)) throw std::invalid_argument("cut constant is not finite");
  std::vector<int> column_of(arcs_.size(), -1);
  for (size_t k = 0; k < decision_.size(); ++k) column_of[decision_[k]] = static_cast<int>(k);

  StoredCut stored{cut.theta_index, cut.constant, {}};
  for (const auto& [arc, c] : cut.coefficients) {
    if (arc < 0 || arc >= static_cast<int>(arcs_.size())) throw std::invalid_argument("cut references unknown arc");
    if (!std::isfinite(c) || c > 0.0) throw std::invalid_argument("cut coefficients must be finite and <= 0");
    if (column_of[arc] < 0) {
      stored.rhs += c;  // fixed-open arc, z = 1
    } else if (c != 0.0) {
      stored.terms.emplace_back(column_of[arc], c);
    }
  }
  std::sort(stored.terms.begin(), stored.terms.end());

  const std::uint64_t h = HashCut(stored.theta_index, stored.rhs, stored.terms);
  const auto [lo, hi] = cut_index_.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (cuts_[it->second] == stored) return false;

  // theta_t - sum c_a z_a >= rhs
  std::vector<LinearProgram::Entry> row;
  for (const auto& [col, c] : stored.terms) row.emplace_back(col, -c);
  row.emplace_back(static_cast<int>(decision_.size()) + stored.theta_index, 1.0);
  lp_.AddRow(row, RowSense::kGreaterEqual, stored.rhs);
  if (!basis_.empty()) basis_.push_back(VarStatus::kBasic);
  cut_index_.emplace(h, static_cast<int>(cuts_.size()));
  cuts_.push_back(std::move(stored));
  return true;
}

DesignVector Master::FullDesign(std::span<const double> primal) const {
  DesignVector z = ClosedDesign(arcs_);
  for (size_t k = 0; k < decision_.size(); ++k) z[decision_[k]] = primal[k];
  return z;
}

std::vector<double> Master::Theta(std::span<const double> primal) const {
  return {primal.begin() + decision_.size(), primal.begin() + decision_.size() + num_theta_};
}

MasterRelaxation Master::SolveRelaxation() {
  for (size_t k = 0; k < decision_.size(); ++k) lp_.SetBounds(static_cast<int>(k), 0.0, 1.0);
  const LpSolution sol = SolveLp(lp_, basis_.empty() ? nullptr : &basis_);
  MasterRelaxation out;
  out.status = sol.status;
  if (sol.status != LpStatus::kOptimal) {
    basis_.clear();
    return out;
  }
  basis_ = sol.basis;
  out.z = FullDesign(sol.primal);
  out.theta = Theta(sol.primal);
  out.objective = sol.objective;
  return out;
}

MipResult Master::SolveMip(const CandidateCallback& callback, const MipOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const int nd = static_cast<int>(decision_.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  struct Node {
    int id;
    int depth;
    double bound;
    std::vector<signed char> fix;  // -1 free, 0 or 1 fixed
    LpBasis basis;
  };
  auto worse = [](const Node& a, const Node& b) { return std::tie(a.bound, a.id) > std::tie(b.bound, b.id); };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  MipResult result;
  double incumbent = kInf;
  auto prunable = [&](double bound) {
    return incumbent < kInf && bound >= incumbent - options.relative_gap * std::max(1.0, std::abs(incumbent));
  };
  auto take = [&](const DesignVector& z, std::span<const double> theta, double value) {
    if (value < incumbent) {
      incumbent = value;
      result.has_incumbent = true;
      result.design = z;
      result.theta.assign(theta.begin(), theta.end());
    }
  };

  int next_id = 0;
  open.push({next_id++, 0, -kInf, std::vector<signed char>(nd, -1), basis_});
  result.status = MipStatus::kOptimal;
  double root_bound = -kInf;
  // Smallest bound among subtrees discarded within the gap tolerance.
  double pruned_bound = kInf;

  while (!open.empty()) {
    if (result.nodes >= options.node_limit) {
      result.status = MipStatus::kNodeLimit;
      break;
    }
    if (options.time_limit_seconds > 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > options.time_limit_seconds) {
      result.status = MipStatus::kTimeLimit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (prunable(node.bound)) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }
    ++result.nodes;
    // Cuts added since the node was queued get basic logicals.
    if (!node.basis.empty()) node.basis.resize(lp_.num_variables() + lp_.num_rows(), VarStatus::kBasic);

    for (int k = 0; k < nd; ++k) {
      const double lo = node.fix[k] == 1 ? 1.0 : 0.0;
      const double hi = node.fix[k] == 0 ? 0.0 : 1.0;
      lp_.SetBounds(k, lo, hi);
    }
    double node_bound = node.bound;
    for (;;) {
      const LpSolution sol = SolveLp(lp_, node.basis.empty() ? nullptr : &node.basis);
      if (sol.status == LpStatus::kInfeasible) {
        node_bound = kInf;
        break;
      }
      if (sol.status != LpStatus::kOptimal) {
        throw std::runtime_error(std::string("master LP at node ") + std::to_string(node.id) + ": " +
                                 LpStatusName(sol.status));
      }
      node.basis = sol.basis;
      node_bound = std::max(node.bound, sol.objective);
      if (node.id == 0) {
        basis_ = sol.basis;
        root_bound = sol.objective;
      }
      if (prunable(node_bound)) {
        pruned_bound = std::min(pruned_bound, node_bound);
        break;
      }

      int branch = -1;
      double best_distance = kInf;
      for (int k = 0; k < nd; ++k) {
        const double v = sol.primal[k];
        const double frac = v - std::floor(v);
        if (frac <= options.integrality_tolerance || frac >= 1.0 - options.integrality_tolerance) continue;
        const double distance = std::abs(frac - 0.5);
        if (distance < best_distance) {
          best_distance = distance;
          branch = k;
        }
      }
      if (branch >= 0) {
        ++result.branchings;
        for (int side = 0; side <= 1; ++side) {
          Node child{next_id++, node.depth + 1, node_bound, node.fix, node.basis};
          child.fix[branch] = static_cast<signed char>(side);
          open.push(std::move(child));
        }
        break;
      }

      std::vector<double> rounded(sol.primal.begin(), sol.primal.begin() + nd);
      for (double& v : rounded) v = std::round(v);
      const DesignVector z = FullDesign(rounded);
      const std::vector<double> theta = Theta(sol.primal);
      CandidateVerdict verdict = callback(z, theta);
      if (verdict.objective) take(z, theta, *verdict.objective);
      int added = 0;
      for (const BendersCut& cut : verdict.cuts) added += AddCut(cut) ? 1 : 0;
      result.cuts_added += added;
      if (added > 0) {
        node.basis.resize(lp_.num_variables() + lp_.num_rows(), VarStatus::kBasic);
        continue;
      }
      // Accepted (or every returned cut was already present).
      double value = 0.0;
      for (int k = 0; k < nd; ++k) value += lp_.cost(k) * rounded[k];
      for (double t : theta) value += t;
      take(z, theta, verdict.objective.value_or(value));
      break;
    }
    if (options.node_log != nullptr) {
      *options.node_log << node.id << ',' << node.depth << ',' << node_bound << ',';
      if (incumbent < kInf) {
        *options.node_log << incumbent;
      } else {
        *options.node_log << "inf";
      }
      *options.node_log << '\n';
    }
  }

  double bound = std::min(incumbent, pruned_bound);
  while (!open.empty()) {
    bound = std::min(bound, open.top().bound);
    open.pop();
  }
  if (!result.has_incumbent && result.status == MipStatus::kOptimal) result.status = MipStatus::kInfeasible;
  result.objective = incumbent;
  result.best_bound = std::isfinite(bound) ? bound : root_bound;
  for (int k = 0; k < nd; ++k) lp_.SetBounds(k, 0.0, 1.0);
  return result;
}

}  // namespace odmts
