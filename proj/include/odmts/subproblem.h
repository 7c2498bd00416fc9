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

#ifndef ODMTS_SUBPROBLEM_H_
#define ODMTS_SUBPROBLEM_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "odmts/expanded_graph.h"
#include "odmts/instance.h"
#include "odmts/lp.h"
#include "odmts/multigraph.h"

namespace odmts {

// Duals of one trip's routing LP on its expanded graph. `lambda` holds the
// multipliers of y <= z_a per expanded arc (all <= 0) and `potential` the
// flow-conservation multipliers per expanded vertex, normalized so the sink
// has potential 0. `objective` is the dual objective at the queried design.
struct TripDuals {
  std::vector<double> lambda;
  std::vector<double> potential;
  double objective = 0.0;
};

struct TripSolution {
  double value = 0.0;
  std::vector<int> path;      // original arc ids; empty for fractional solves
  std::vector<double> flow;   // per LP column (expanded or original arc); LP solves only
  TripDuals duals;
  // Cut coefficients per original arc (sum of lambda over its copies),
  // sorted by arc id, zeros dropped.
  std::vector<std::pair<int, double>> coefficients;
};

// theta_index >= constant + sum coefficient_a * z_a. Coefficients are sorted
// by arc id and nonpositive. `point_hash` identifies the design it was
// generated at.
struct BendersCut {
  int theta_index = 0;
  // Trip whose routing cost the cut bounds, or -1 for the sum over trips.
  int trip = -1;
  double constant = 0.0;
  std::vector<std::pair<int, double>> coefficients;
  std::uint64_t point_hash = 0;

  double Rhs(std::span<const double> z) const;
};

// What one trip contributes to a cut generated at a design.
struct CutContribution {
  double value = 0.0;
  std::vector<std::pair<int, double>> coefficients;
  std::uint64_t point_hash = 0;
};

// FNV-1a over the bytes of the design values.
std::uint64_t DesignHash(std::span<const double> z);

// Sums the contributions into theta >= sum value + sum lambda (z - zbar).
// Throws std::invalid_argument if a contribution was computed at a
// different design than `zbar`.
BendersCut MakeCut(std::span<const CutContribution> contributions, std::span<const double> zbar,
                   int theta_index = 0, int trip = -1);

enum class SeparationMethod {
  kCombinatorial,  // integer designs: shortest path plus capped distances
  kExpandedLp,     // any design: LP on the expanded graph
  kRelaxedLp,      // any design: LP relaxation of the CSP on the original graph
};

struct RoutingResult {
  std::vector<double> trip_values;
  std::vector<std::vector<int>> paths;  // empty for LP methods
  double total = 0.0;
};

struct Separation {
  RoutingResult routing;
  std::vector<CutContribution> contributions;  // one per trip
};

// Binary z only. Duals: lambda = 0 on open copies and
// min(0, gamma + cap(f(tail)) - cap(f(head))) on closed ones, where f are
// forward distances over open copies and cap(x) = min(x, value). Vertices
// the sweep never reaches get cap = value. Throws std::runtime_error when
// the sink is unreachable.
TripSolution SolveTripInteger(const ExpandedGraph& graph, std::span<const double> z);

// Routing LP on the expanded graph with y_a <= z_a as column bounds; lambda
// is the reduced cost of each copy clipped at 0. A non-null `warm` seeds the
// solve and receives the final basis.
TripSolution SolveTripLp(const ExpandedGraph& graph, std::span<const double> z, LpBasis* warm = nullptr);

// LP relaxation of the CSP on the original graph: flow conservation,
// y_a <= z_a, sum y_a <= max_arcs. `cost` is indexed by arc id. Columns are
// generated by reduced-cost pricing starting from `columns`, which receives
// the final column set, so only a small part of the multigraph enters the LP.
// If the starting columns hold no route, every arc with z_a > 0 is added.
// `duals.lambda`, `duals.potential` and `flow` are indexed by arc id and
// vertex index.
TripSolution RelaxedTripLp(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                           std::span<const double> cost, std::span<const double> z, int max_arcs,
                           std::vector<int>& columns);

// Per-trip routing state for one instance: expanded graphs are built once
// (pruned and trimmed) and reused across designs; only z changes between
// solves. LP solves keep a per-trip warm-start basis, so distinct trips may
// be solved concurrently but one trip must not be solved twice at once.
class Subproblem {
 public:
  Subproblem(const Instance& instance, std::span<const Arc> arcs, int max_arcs);

  int num_trips() const { return static_cast<int>(graphs_.size()); }
  int max_arcs() const { return max_arcs_; }
  const ExpandedGraph& graph(int trip) const { return graphs_[trip]; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  // Arcs removed from the trip's graph by dominance pruning.
  int pruned_arcs(int trip) const { return pruned_[trip]; }

  // The free functions above applied to one trip; errors name the trip.
  TripSolution SolveInteger(int trip, std::span<const double> z) const;

  TripSolution SolveLp(int trip, std::span<const double> z);

  // Starts from the arcs of the trip's expanded graph and keeps the generated
  // columns for the next call.
  TripSolution SolveRelaxed(int trip, std::span<const double> z);

  // Exact routing of every trip at binary z (value and path), in parallel.
  RoutingResult Route(std::span<const double> z, int threads) const;

  // Solves every trip with `method` and returns the per-trip contributions.
  // Trips run in parallel with OpenMP; results are stored per trip and
  // reduced in trip order, so the output does not depend on `threads`.
  Separation Separate(std::span<const double> z, SeparationMethod method, int threads);
  // Reference implementation: one trip after another on the calling thread.
  Separation SeparateSerial(std::span<const double> z, SeparationMethod method);

 private:
  TripSolution SolveOne(int trip, std::span<const double> z, SeparationMethod method);
  CutContribution Contribution(const TripSolution& s, std::uint64_t hash) const;

  Instance instance_;  // owned copy, so the subproblem may outlive its argument
  std::vector<Arc> arcs_;
  int max_arcs_;
  std::vector<ExpandedGraph> graphs_;
  std::vector<int> pruned_;
  std::vector<LpBasis> lp_basis_;
  // Original-graph columns kept per trip by SolveRelaxed.
  std::vector<std::vector<int>> relaxed_columns_;
};

// True iff every coefficient is <= 0 and Phi(z) >= cut.Rhs(z) - tol at the
// binary design z, with Phi from exact routing (one trip's value for per-trip
// cuts).
bool CheckCutValid(const BendersCut& cut, std::span<const double> z, const Subproblem& subproblem,
                   double tol = 1e-6);

struct CutLogEntry {
  int iteration = 0;
  double constant = 0.0;
  int nnz = 0;
  double violation = 0.0;
};
// Header plus one "iteration,constant,nnz,violation" row per entry.
void WriteCutLogCsv(std::span<const CutLogEntry> entries, std::ostream& out);

}  // namespace odmts

#endif  // ODMTS_SUBPROBLEM_H_
