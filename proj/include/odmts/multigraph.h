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

#ifndef ODMTS_MULTIGRAPH_H_
#define ODMTS_MULTIGRAPH_H_

#include <array>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "odmts/instance.h"

namespace odmts {

enum class Mode { kShuttle = 0, kBus = 1, kRail = 2 };
inline constexpr int kNumModes = 3;

std::string_view ModeName(Mode mode);
// Accepts "shuttle", "bus", "rail"; throws ParseError otherwise.
Mode ParseMode(std::string_view name);

// One member of the multigraph. `tail`/`head` are vertex indices into
// Instance::stops(). Shuttles are on demand and carry frequency 0.
struct Arc {
  int id = 0;
  int tail = 0;
  int head = 0;
  Mode mode = Mode::kShuttle;
  int frequency = 0;
  double distance = 0.0;  // miles
  double time = 0.0;      // minutes
  double fixed_cost = 0.0;
  // Shuttle and rail arcs are always available; only bus arcs are decisions.
  bool fixed_open = true;
};

// Per-arc availability z_a in [0,1], indexed by arc id. Fixed-open arcs carry 1.
using DesignVector = std::vector<double>;

// Shuttle arcs (origin->hub, hub->destination, origin->destination per trip,
// deduplicated), then bus candidates (every ordered hub pair, plus both
// directions between each hub and its three nearest rail stations, one copy
// per frequency), then rail arcs between every ordered station pair of a line.
// Ids are dense and the ordering is a pure function of the instance.
std::vector<Arc> BuildArcs(const Instance& instance);

// (1 - alpha) * c^B * f(a) * d_a for bus arcs; 0 for fixed-open arcs.
double ArcFixedCost(const Arc& arc, const CostParams& params);

// Routing cost of one trip on one arc.
//   shuttle:    p * ((1 - alpha) * c^S * d + alpha * t)
//   bus, rail:  alpha * (t + L + H / (2 f))   (times p when
//               params.scale_transit_cost_by_passengers is set)
double TripArcCost(const Arc& arc, int passengers, const CostParams& params);

// Fills `costs` (resized to arcs.size()) with TripArcCost for one trip.
void TripArcCosts(std::span<const Arc> arcs, int passengers, const CostParams& params,
                  std::vector<double>& costs);

// Out/in arc lists per vertex, overall and per mode.
class DeltaIndex {
 public:
  DeltaIndex(int num_vertices, std::span<const Arc> arcs);

  int num_vertices() const { return static_cast<int>(out_.size()); }
  const std::vector<int>& Out(int v) const { return out_[v]; }
  const std::vector<int>& In(int v) const { return in_[v]; }
  const std::vector<int>& Out(int v, Mode m) const { return out_by_mode_[v][static_cast<int>(m)]; }
  const std::vector<int>& In(int v, Mode m) const { return in_by_mode_[v][static_cast<int>(m)]; }

 private:
  std::vector<std::vector<int>> out_, in_;
  std::vector<std::array<std::vector<int>, kNumModes>> out_by_mode_, in_by_mode_;
};

// Design with every decision arc closed and every fixed-open arc at 1.
DesignVector ClosedDesign(std::span<const Arc> arcs);

// Ids of the arcs that are decisions (bus arcs), ascending.
std::vector<int> DecisionArcs(std::span<const Arc> arcs);

// Sum of fixed_cost * z over all arcs.
double DesignCost(std::span<const Arc> arcs, std::span<const double> z);

// Debug table: id,i,j,mode,f,d,t,beta (stop ids for i and j).
void WriteArcTableCsv(std::span<const Arc> arcs, const Instance& instance, std::ostream& out);

}  // namespace odmts

#endif  // ODMTS_MULTIGRAPH_H_
