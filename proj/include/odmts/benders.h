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

#ifndef ODMTS_BENDERS_H_
#define ODMTS_BENDERS_H_

#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "odmts/instance.h"
#include "odmts/master.h"
#include "odmts/multigraph.h"
#include "odmts/subproblem.h"

namespace odmts {

enum class SolveMode { kExact, kRelaxed };

const char* SolveModeName(SolveMode mode);
// Accepts "exact" and "relaxed"; throws std::invalid_argument otherwise.
SolveMode ParseSolveMode(std::string_view name);

struct BendersConfig {
  SolveMode mode = SolveMode::kExact;
  // Root separation happens at (1 - epsilon) zbar + epsilon core.
  double epsilon = 1e-5;
  double core_value = 0.25;  // bus arcs; fixed-open arcs use 1
  double relative_gap = 1e-6;
  int root_iteration_cap = 500;
  // A cut is added when the routing cost exceeds theta by more than
  // cut_tolerance * max(1, |routing cost|).
  double cut_tolerance = 1e-6;
  int threads = 1;
  // One theta per trip instead of a single aggregated theta.
  bool disaggregate = false;
  int node_limit = 1'000'000;
  double time_limit_seconds = 0.0;  // 0 means none; covers both phases
  // Keep every added cut with the point it was generated at.
  bool record_cuts = false;
  // One line per root iteration and per new incumbent.
  std::ostream* progress = nullptr;
};

// Throws std::invalid_argument unless epsilon is in (0, 0.5), core_value in
// [0, 1] and the remaining fields are in range.
void ValidateConfig(const BendersConfig& config);

// (1 - epsilon) zbar + epsilon core, with core = core_value on decision arcs
// and 1 on fixed-open arcs.
DesignVector StabilizedPoint(std::span<const double> zbar, std::span<const Arc> arcs, double core_value,
                             double epsilon);

struct RootPhaseResult {
  int iterations = 0;
  int cuts = 0;
  double bound = 0.0;
  bool converged = false;
  std::vector<double> bounds;  // master LP objective after each iteration's solve
};

struct BoundPoint {
  std::string phase;  // "root", "mip" or "final"
  int iteration = 0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double seconds = 0.0;
};

struct RecordedCut {
  std::string phase;  // "root" or "mip"
  BendersCut cut;
  DesignVector point;  // where the cut was generated
};

struct DesignEvaluation {
  double design_cost = 0.0;
  double routing_cost = 0.0;
  double objective = 0.0;
  std::vector<double> trip_values;
  std::vector<std::vector<int>> routes;  // arc ids per trip
};

// Throws std::invalid_argument unless z is binary, fixed-open arcs are 1, and
// z satisfies frequency balance and at most one frequency per connection.
void ValidateDesign(std::span<const Arc> arcs, int num_vertices, std::span<const double> z);

// Design cost plus exact routing on the expanded graphs; every route has at
// most max_arcs arcs.
DesignEvaluation EvaluateDesign(const Subproblem& subproblem, std::span<const double> z, int threads = 1);
DesignEvaluation EvaluateDesign(const Instance& instance, std::span<const double> z, int threads = 1);

struct SolveReport {
  SolveMode mode = SolveMode::kExact;
  MipStatus status = MipStatus::kInfeasible;
  int max_arcs = 0;
  DesignVector design;
  // Recomputed by EvaluateDesign at the end.
  DesignEvaluation evaluation;
  // Master objective of the final design: the exact optimum in exact mode,
  // the relaxed optimum in relaxed mode.
  double model_objective = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  RootPhaseResult root;
  int mip_cuts = 0;
  int nodes = 0;
  int branchings = 0;
  std::vector<BoundPoint> trajectory;
  std::vector<RecordedCut> cuts;
  double wall_seconds = 0.0;
  double root_seconds = 0.0;
  double evaluation_seconds = 0.0;

  bool optimal() const { return status == MipStatus::kOptimal; }
  bool hit_resource_cap() const { return status == MipStatus::kNodeLimit || status == MipStatus::kTimeLimit; }
};

// Fractional Benders on the master LP until no cut is violated or the cap.
// Separation uses the expanded-graph LP, or the relaxed original-graph LP when
// `method` says so.
RootPhaseResult RunRootPhase(Master& master, Subproblem& subproblem, const BendersConfig& config,
                             SeparationMethod method, std::vector<RecordedCut>* record = nullptr);

// Root phase then branch-and-bound with lazy cuts. Exact mode separates
// integer candidates combinatorially; relaxed mode uses the relaxed trip LP
// throughout and scores its design with EvaluateDesign.
SolveReport Solve(const Instance& instance, const BendersConfig& config);
SolveReport RunExact(const Instance& instance, BendersConfig config);
SolveReport RunRelaxed(const Instance& instance, BendersConfig config);

// Open decision arcs as {from, to, mode, frequency, beta} in arc id order.
nlohmann::json OpenArcsJson(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z);

// Timing fields are written only when include_timing is set, so reports of
// repeated runs compare byte for byte without them.
nlohmann::json ReportToJson(const SolveReport& report, const Instance& instance, bool include_timing);

// "phase,iteration,lower,upper" per trajectory point.
void WriteBoundsCsv(const SolveReport& report, std::ostream& out);

}  // namespace odmts

#endif  // ODMTS_BENDERS_H_
