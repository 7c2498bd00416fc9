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

#ifndef ODMTS_EXPANDED_GRAPH_H_
#define ODMTS_EXPANDED_GRAPH_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "odmts/multigraph.h"

namespace odmts {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ExpandedVertex {
  int stop = 0;
  int layer = 0;  // 1..K+1
};

// Copy of original arc `arc` from layer `from_layer` to `to_layer`. `tail` and
// `head` index ExpandedGraph::vertices; `cost` is the trip's cost on `arc`.
struct ExpandedArc {
  int arc = 0;
  int from_layer = 0;
  int to_layer = 0;
  int tail = 0;
  int head = 0;
  double cost = 0.0;
};

// Layered copy of the multigraph for one trip. A path from `source` to `sink`
// uses at most `max_arcs` arcs because every arc advances at least one layer.
//
// Vertices are stored in topological order (by layer, then stop) and arcs are
// sorted by the position of their tail, so a single forward sweep over `arcs`
// relaxes every vertex after all of its predecessors.
struct ExpandedGraph {
  int origin = 0;
  int destination = 0;
  int max_arcs = 0;
  int source = 0;
  int sink = 0;
  std::vector<ExpandedVertex> vertices;
  std::vector<ExpandedArc> arcs;
};

// Applies the three layering rules for the trip origin -> destination:
//   1. a leaving the origin:         (a,1,2), or (a,1,K+1) when a ends at the destination
//   2. a touching neither endpoint:  (a,k,k+1) for k = 2..K-1
//   3. a entering the destination from elsewhere: (a,k,K+1) for k = 2..K
// Vertices are (origin,1), (destination,K+1) and (i,k) for every other stop i
// and k = 2..K. `arc_costs` is indexed by arc id.
// Throws std::invalid_argument for max_arcs < 2 or origin == destination.
ExpandedGraph BuildExpanded(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                            std::span<const double> arc_costs, int max_arcs);

// Removes the shuttle copies (i,2) -> (destination,K+1), which are dominated
// by the direct shuttle when the endpoints are served only by shuttles and the
// costs obey the triangle inequality. The gate is checked on the actual costs;
// when it fails nothing is removed. Returns the number of removed arcs.
int PruneDominated(ExpandedGraph& graph, std::span<const Arc> arcs);

// Drops vertices and arcs that lie on no source-sink path of the full graph
// (ignoring the design). Path values are unchanged for every design.
void TrimDeadEnds(ExpandedGraph& graph);

// Throws std::logic_error unless every arc goes from a lower to a higher
// vertex position and a higher layer.
void VerifyTopologicalOrder(const ExpandedGraph& graph);

struct PathResult {
  double value = kInfinity;
  std::vector<int> arcs;           // original arc ids, in travel order
  std::vector<int> expanded_arcs;  // indices into ExpandedGraph::arcs

  bool reachable() const { return value < kInfinity; }
};

// Cheapest source-sink path over arcs with z_a >= 0.5, in one topological
// sweep. Ties prefer fewer arcs, then the lexicographically smallest sequence
// of original arc ids. Unreachable sinks yield value = infinity.
PathResult ShortestPath(const ExpandedGraph& graph, std::span<const double> z);

// Independent check: dynamic program over (vertex, arcs used) on the
// original graph. Returns the cheapest origin-destination walk with at most
// `max_arcs` open arcs, or infinity.
double CspOracle(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                 std::span<const double> z, std::span<const double> arc_costs, int max_arcs);

// Graphviz rendering for inspection.
std::string ToDot(const ExpandedGraph& graph);

}  // namespace odmts

#endif  // ODMTS_EXPANDED_GRAPH_H_
