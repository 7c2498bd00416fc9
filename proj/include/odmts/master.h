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

#ifndef ODMTS_MASTER_H_
#define ODMTS_MASTER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "odmts/lp.h"
#include "odmts/multigraph.h"
#include "odmts/subproblem.h"

namespace odmts {

struct MasterRelaxation {
  LpStatus status = LpStatus::kNumericalFailure;
  DesignVector z;              // full design, fixed-open arcs at 1
  std::vector<double> theta;
  double objective = 0.0;
};

// Verdict on an integer candidate. Returning cuts rejects the candidate;
// `objective` is its true objective (design cost plus routing cost) when the
// callback knows it, which lets a rejected candidate still become the
// incumbent.
struct CandidateVerdict {
  std::vector<BendersCut> cuts;
  std::optional<double> objective;
};

using CandidateCallback = std::function<CandidateVerdict(const DesignVector& z, std::span<const double> theta)>;

enum class MipStatus { kOptimal, kInfeasible, kNodeLimit, kTimeLimit };

const char* MipStatusName(MipStatus status);

struct MipOptions {
  double relative_gap = 1e-6;
  int node_limit = 1'000'000;
  double time_limit_seconds = 0.0;  // 0 means none
  double integrality_tolerance = 1e-6;
  // CSV "node,depth,bound,incumbent" per processed node when set.
  std::ostream* node_log = nullptr;
};

struct MipResult {
  MipStatus status = MipStatus::kInfeasible;
  bool has_incumbent = false;
  DesignVector design;
  std::vector<double> theta;
  double objective = 0.0;   // incumbent objective
  double best_bound = 0.0;
  int nodes = 0;
  int branchings = 0;
  int cuts_added = 0;
};

// min sum beta_a z_a + sum theta over the bus arcs, subject to frequency
// balance per (vertex, mode) and at most one frequency per (i, j, mode), plus
// every Benders cut added so far. Fixed-open arcs are constants.
class Master {
 public:
  // Throws std::invalid_argument if the fixed-open arcs alone violate
  // frequency balance somewhere.
  Master(std::span<const Arc> arcs, int num_vertices, int num_theta = 1);

  int num_theta() const { return num_theta_; }
  const std::vector<int>& decision_arcs() const { return decision_; }
  int num_balance_rows() const { return num_balance_rows_; }
  int num_frequency_rows() const { return num_frequency_rows_; }
  int num_cuts() const { return static_cast<int>(cuts_.size()); }
  const LinearProgram& lp() const { return lp_; }

  // Appends a cut unless an identical one is present (returns false then).
  // Throws std::invalid_argument for positive coefficients, unknown arcs,
  // a bad theta index or non-finite numbers.
  bool AddCut(const BendersCut& cut);

  MasterRelaxation SolveRelaxation();

  // Branch-and-bound: best-bound node order (ties by node id), branching on
  // the most fractional bus arc (ties by lowest arc id), down branch first.
  // Every integer node solution is passed to `callback`; rejected candidates
  // have their cuts installed globally and the node is re-solved. There are
  // no primal heuristics.
  MipResult SolveMip(const CandidateCallback& callback, const MipOptions& options = {});

 private:
  DesignVector FullDesign(std::span<const double> primal) const;
  std::vector<double> Theta(std::span<const double> primal) const;

  std::vector<Arc> arcs_;
  int num_theta_;
  std::vector<int> decision_;
  LinearProgram lp_;
  LpBasis basis_;
  int num_balance_rows_ = 0;
  int num_frequency_rows_ = 0;

  struct StoredCut {
    int theta_index;
    double rhs;
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
    bool operator==(const StoredCut&) const = default;
  };
  std::vector<StoredCut> cuts_;
  std::unordered_multimap<std::uint64_t, int> cut_index_;
};

}  // namespace odmts

#endif  // ODMTS_MASTER_H_
