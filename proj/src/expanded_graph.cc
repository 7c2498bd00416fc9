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

#include "odmts/expanded_graph.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace odmts {

ExpandedGraph BuildExpanded(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                            std::span<const double> arc_costs, int max_arcs) {
  if (max_arcs < 2) throw std::invalid_argument("expanded graph needs max_arcs >= 2");
  if (origin == destination) throw std::invalid_argument("trip origin equals destination");
  const int K = max_arcs;

  ExpandedGraph g;
  g.origin = origin;
  g.destination = destination;
  g.max_arcs = K;

  // slot[(k-2) * n + i] is the vertex index of (i,k) for the middle layers.
  const int n = num_vertices;
  std::vector<int> slot(static_cast<size_t>(n) * (K - 1), -1);
  g.vertices.push_back({origin, 1});
  g.source = 0;
  for (int k = 2; k <= K; ++k) {
    for (int i = 0; i < n; ++i) {
      if (i == origin || i == destination) continue;
      slot[static_cast<size_t>(k - 2) * n + i] = static_cast<int>(g.vertices.size());
      g.vertices.push_back({i, k});
    }
  }
  g.sink = static_cast<int>(g.vertices.size());
  g.vertices.push_back({destination, K + 1});
  auto middle = [&](int i, int k) { return slot[static_cast<size_t>(k - 2) * n + i]; };

  auto add = [&](const Arc& a, int from_layer, int to_layer, int tail, int head) {
    g.arcs.push_back({a.id, from_layer, to_layer, tail, head, arc_costs[a.id]});
  };
  for (const Arc& a : arcs) {
    if (a.tail == origin) {
      if (a.head == destination) {
        add(a, 1, K + 1, g.source, g.sink);
      } else if (a.head != origin) {
        add(a, 1, 2, g.source, middle(a.head, 2));
      }
    } else if (a.tail != destination && a.head != origin) {
      if (a.head == destination) {
        for (int k = 2; k <= K; ++k) add(a, k, K + 1, middle(a.tail, k), g.sink);
      } else {
        for (int k = 2; k <= K - 1; ++k) add(a, k, k + 1, middle(a.tail, k), middle(a.head, k + 1));
      }
    }
  }
  std::sort(g.arcs.begin(), g.arcs.end(), [](const ExpandedArc& x, const ExpandedArc& y) {
    if (x.tail != y.tail) return x.tail < y.tail;
    if (x.head != y.head) return x.head < y.head;
    return x.arc < y.arc;
  });
  VerifyTopologicalOrder(g);
  return g;
}

int PruneDominated(ExpandedGraph& g, std::span<const Arc> arcs) {
  double direct = kInfinity;
  for (const ExpandedArc& e : g.arcs) {
    const Arc& a = arcs[e.arc];
    if (e.tail == g.source && a.mode != Mode::kShuttle) return 0;
    if (e.head == g.sink && a.mode != Mode::kShuttle) return 0;
    if (e.tail == g.source && e.head == g.sink) direct = std::min(direct, e.cost);
  }
  if (direct == kInfinity) return 0;

  // Cheapest first leg into each layer-2 vertex.
  std::vector<double> first_leg(g.vertices.size(), kInfinity);
  for (const ExpandedArc& e : g.arcs)
    if (e.tail == g.source && e.head != g.sink) first_leg[e.head] = std::min(first_leg[e.head], e.cost);

  std::vector<char> drop(g.arcs.size(), 0);
  int removed = 0;
  for (size_t idx = 0; idx < g.arcs.size(); ++idx) {
    const ExpandedArc& e = g.arcs[idx];
    if (e.head != g.sink || e.from_layer != 2) continue;
    // The triangle inequality must hold on the actual costs.
    if (first_leg[e.tail] < kInfinity && first_leg[e.tail] + e.cost < direct) return 0;
    drop[idx] = 1;
    ++removed;
  }
  size_t w = 0;
  for (size_t idx = 0; idx < g.arcs.size(); ++idx)
    if (!drop[idx]) g.arcs[w++] = g.arcs[idx];
  g.arcs.resize(w);
  return removed;
}

void TrimDeadEnds(ExpandedGraph& g) {
  const size_t nv = g.vertices.size();
  std::vector<char> fwd(nv, 0), bwd(nv, 0);
  fwd[g.source] = 1;
  for (const ExpandedArc& e : g.arcs)
    if (fwd[e.tail]) fwd[e.head] = 1;
  bwd[g.sink] = 1;
  for (auto it = g.arcs.rbegin(); it != g.arcs.rend(); ++it)
    if (bwd[it->head]) bwd[it->tail] = 1;

  std::vector<int> remap(nv, -1);
  std::vector<ExpandedVertex> vertices;
  for (size_t v = 0; v < nv; ++v) {
    if ((fwd[v] && bwd[v]) || static_cast<int>(v) == g.source || static_cast<int>(v) == g.sink) {
      remap[v] = static_cast<int>(vertices.size());
      vertices.push_back(g.vertices[v]);
    }
  }
  std::vector<ExpandedArc> arcs;
  for (const ExpandedArc& e : g.arcs) {
    if (!fwd[e.tail] || !bwd[e.head]) continue;
    ExpandedArc copy = e;
    copy.tail = remap[e.tail];
    copy.head = remap[e.head];
    arcs.push_back(copy);
  }
  g.source = remap[g.source];
  g.sink = remap[g.sink];
  g.vertices = std::move(vertices);
  g.arcs = std::move(arcs);
}

void VerifyTopologicalOrder(const ExpandedGraph& g) {
  int last_tail = -1;
  for (const ExpandedArc& e : g.arcs) {
    if (e.tail >= e.head || e.from_layer >= e.to_layer ||
        g.vertices[e.tail].layer != e.from_layer || g.vertices[e.head].layer != e.to_layer ||
        e.tail < last_tail) {
      throw std::logic_error("expanded graph is not in topological order");
    }
    last_tail = e.tail;
  }
}

namespace {

// Original arc ids along the label chain ending in expanded arc `last`.
std::vector<int> Sequence(const ExpandedGraph& g, const std::vector<int>& pred, int last) {
  std::vector<int> seq;
  for (int e = last; e >= 0; e = pred[g.arcs[e].tail]) seq.push_back(g.arcs[e].arc);
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

PathResult ShortestPath(const ExpandedGraph& g, std::span<const double> z) {
  const size_t nv = g.vertices.size();
  std::vector<double> dist(nv, kInfinity);
  std::vector<int> hops(nv, 0);
  std::vector<int> pred(nv, -1);
  dist[g.source] = 0.0;
  for (size_t idx = 0; idx < g.arcs.size(); ++idx) {
    const ExpandedArc& e = g.arcs[idx];
    if (dist[e.tail] == kInfinity || z[e.arc] < 0.5) continue;
    const double candidate = dist[e.tail] + e.cost;
    const int candidate_hops = hops[e.tail] + 1;
    bool better = candidate < dist[e.head] ||
                  (candidate == dist[e.head] && candidate_hops < hops[e.head]);
    if (!better && candidate == dist[e.head] && candidate_hops == hops[e.head]) {
      better = Sequence(g, pred, static_cast<int>(idx)) < Sequence(g, pred, pred[e.head]);
    }
    if (better) {
      dist[e.head] = candidate;
      hops[e.head] = candidate_hops;
      pred[e.head] = static_cast<int>(idx);
    }
  }
  PathResult result;
  if (dist[g.sink] == kInfinity) return result;
  result.value = dist[g.sink];
  for (int e = pred[g.sink]; e >= 0; e = pred[g.arcs[e].tail]) {
    result.expanded_arcs.push_back(e);
    result.arcs.push_back(g.arcs[e].arc);
  }
  std::reverse(result.expanded_arcs.begin(), result.expanded_arcs.end());
  std::reverse(result.arcs.begin(), result.arcs.end());
  return result;
}

double CspOracle(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                 std::span<const double> z, std::span<const double> arc_costs, int max_arcs) {
  std::vector<double> current(num_vertices, kInfinity), next;
  current[origin] = 0.0;
  double best = kInfinity;
  for (int used = 0; used < max_arcs; ++used) {
    next.assign(num_vertices, kInfinity);
    for (const Arc& a : arcs) {
      if (z[a.id] < 0.5 || current[a.tail] == kInfinity) continue;
      next[a.head] = std::min(next[a.head], current[a.tail] + arc_costs[a.id]);
    }
    best = std::min(best, next[destination]);
    current.swap(next);
  }
  return best;
}

std::string ToDot(const ExpandedGraph& g) {
  std::ostringstream out;
  out << "digraph expanded {\n  rankdir=LR;\n";
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    out << "  v" << v << " [label=\"" << g.vertices[v].stop << "," << g.vertices[v].layer << "\"];\n";
  }
  for (const ExpandedArc& e : g.arcs) {
    out << "  v" << e.tail << " -> v" << e.head << " [label=\"a" << e.arc << " (" << e.from_layer << ","
        << e.to_layer << ") " << e.cost << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace odmts
