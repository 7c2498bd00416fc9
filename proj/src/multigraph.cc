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

#include "odmts/multigraph.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <utility>

namespace odmts {

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kShuttle:
      return "shuttle";
    case Mode::kBus:
      return "bus";
    case Mode::kRail:
      return "rail";
  }
  return "?";
}

Mode ParseMode(std::string_view name) {
  if (name == "shuttle") return Mode::kShuttle;
  if (name == "bus") return Mode::kBus;
  if (name == "rail") return Mode::kRail;
  throw ParseError("unknown mode '" + std::string(name) + "'");
}

double ArcFixedCost(const Arc& arc, const CostParams& params) {
  if (arc.mode != Mode::kBus) return 0.0;
  return (1.0 - params.alpha) * params.bus_cost_per_mile * arc.frequency * arc.distance;
}

double TripArcCost(const Arc& arc, int passengers, const CostParams& params) {
  if (arc.mode == Mode::kShuttle) {
    return passengers *
           ((1.0 - params.alpha) * params.shuttle_cost_per_mile * arc.distance + params.alpha * arc.time);
  }
  const double wait = params.horizon / (2.0 * arc.frequency);
  const double cost = params.alpha * (arc.time + params.transfer_time + wait);
  return params.scale_transit_cost_by_passengers ? passengers * cost : cost;
}

void TripArcCosts(std::span<const Arc> arcs, int passengers, const CostParams& params,
                  std::vector<double>& costs) {
  costs.resize(arcs.size());
  for (size_t a = 0; a < arcs.size(); ++a) costs[a] = TripArcCost(arcs[a], passengers, params);
}

namespace {

Arc MakeArc(const Instance& inst, int tail, int head, Mode mode, int frequency) {
  Arc arc;
  arc.tail = tail;
  arc.head = head;
  arc.mode = mode;
  arc.frequency = frequency;
  arc.distance = GreatCircleDistance(inst.Location(tail), inst.Location(head));
  arc.time = TravelTime(arc.distance, inst.params());
  arc.fixed_open = mode != Mode::kBus;
  arc.fixed_cost = ArcFixedCost(arc, inst.params());
  return arc;
}

// The three rail stations nearest to `hub` (ties by vertex index), excluding
// the hub itself.
std::vector<int> NearestStations(const Instance& inst, int hub, const std::vector<int>& stations) {
  std::vector<std::pair<double, int>> ranked;
  for (int s : stations) {
    if (s == hub) continue;
    ranked.emplace_back(GreatCircleDistance(inst.Location(hub), inst.Location(s)), s);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> result;
  for (size_t k = 0; k < ranked.size() && k < 3; ++k) result.push_back(ranked[k].second);
  return result;
}

}  // namespace

std::vector<Arc> BuildArcs(const Instance& inst) {
  const CostParams& params = inst.params();
  std::vector<int> hubs, stations;
  for (int v = 0; v < inst.num_stops(); ++v) {
    if (inst.stops()[v].is_hub) hubs.push_back(v);
    if (!inst.stops()[v].rail_line_ids.empty()) stations.push_back(v);
  }

  std::vector<Arc> arcs;

  std::set<std::pair<int, int>> shuttle_pairs;
  for (int r = 0; r < inst.num_trips(); ++r) {
    const int o = inst.TripOrigin(r), d = inst.TripDestination(r);
    shuttle_pairs.emplace(o, d);
    for (int h : hubs) {
      if (h != o) shuttle_pairs.emplace(o, h);
      if (h != d) shuttle_pairs.emplace(h, d);
    }
  }
  for (const auto& [i, j] : shuttle_pairs) arcs.push_back(MakeArc(inst, i, j, Mode::kShuttle, 0));

  std::set<std::pair<int, int>> bus_pairs;
  std::vector<std::pair<int, int>> bus_order;
  auto add_bus_pair = [&](int i, int j) {
    if (i != j && bus_pairs.emplace(i, j).second) bus_order.emplace_back(i, j);
  };
  for (int h : hubs)
    for (int g : hubs) add_bus_pair(h, g);
  for (int h : hubs) {
    for (int s : NearestStations(inst, h, stations)) {
      add_bus_pair(h, s);
      add_bus_pair(s, h);
    }
  }
  std::vector<int> frequencies = params.bus_frequencies;
  std::sort(frequencies.begin(), frequencies.end());
  for (const auto& [i, j] : bus_order)
    for (int f : frequencies) arcs.push_back(MakeArc(inst, i, j, Mode::kBus, f));

  std::set<std::pair<int, int>> rail_pairs;
  for (const auto& line : inst.RailLineVertices()) {
    for (int i : line)
      for (int j : line)
        if (i != j && rail_pairs.emplace(i, j).second)
          arcs.push_back(MakeArc(inst, i, j, Mode::kRail, params.rail_frequency));
  }

  for (size_t a = 0; a < arcs.size(); ++a) arcs[a].id = static_cast<int>(a);
  return arcs;
}

DeltaIndex::DeltaIndex(int num_vertices, std::span<const Arc> arcs)
    : out_(num_vertices), in_(num_vertices), out_by_mode_(num_vertices), in_by_mode_(num_vertices) {
  for (const Arc& a : arcs) {
    out_[a.tail].push_back(a.id);
    in_[a.head].push_back(a.id);
    out_by_mode_[a.tail][static_cast<int>(a.mode)].push_back(a.id);
    in_by_mode_[a.head][static_cast<int>(a.mode)].push_back(a.id);
  }
}

DesignVector ClosedDesign(std::span<const Arc> arcs) {
  DesignVector z(arcs.size(), 0.0);
  for (const Arc& a : arcs)
    if (a.fixed_open) z[a.id] = 1.0;
  return z;
}

std::vector<int> DecisionArcs(std::span<const Arc> arcs) {
  std::vector<int> ids;
  for (const Arc& a : arcs)
    if (!a.fixed_open) ids.push_back(a.id);
  return ids;
}

double DesignCost(std::span<const Arc> arcs, std::span<const double> z) {
  double total = 0.0;
  for (const Arc& a : arcs) total += a.fixed_cost * z[a.id];
  return total;
}

void WriteArcTableCsv(std::span<const Arc> arcs, const Instance& instance, std::ostream& out) {
  out << "id,i,j,mode,f,d,t,beta\n";
  char buf[128];
  for (const Arc& a : arcs) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", a.distance, a.time, a.fixed_cost);
    out << a.id << ',' << instance.stops()[a.tail].id << ',' << instance.stops()[a.head].id << ','
        << ModeName(a.mode) << ',' << a.frequency << ',' << buf << '\n';
  }
}

}  // namespace odmts
