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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Oracles live here or in test_util and never call
// the code path they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "odmts/benders.h"
#include "odmts/design_io.h"
#include "odmts/expanded_graph.h"
#include "odmts/instance.h"
#include "odmts/lp.h"
#include "odmts/multigraph.h"
#include "odmts/subproblem.h"
#include "test_util.h"

#ifndef ODMTS_DATA_DIR
#error "ODMTS_DATA_DIR must point at the bundled instances"
#endif

namespace {

using namespace odmts;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double Seconds(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Lines are printed in criterion order at the end; stderr shows progress.
std::map<int, std::string> results;
int failures = 0;

void Report(int criterion, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d: %s  ", criterion, pass ? "PASS" : "FAIL");
  results[criterion] = head + detail;
  std::cerr << results[criterion] << std::endl;
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Cheapest walk with at most max_arcs open arcs: best[v][h] over hop counts.
double HopDp(int origin, int destination, int n, std::span<const Arc> arcs, std::span<const double> z,
             std::span<const double> costs, int max_arcs) {
  std::vector<double> cur(n, kInf);
  cur[origin] = 0.0;
  double best = kInf;
  for (int h = 1; h <= max_arcs; ++h) {
    std::vector<double> next(n, kInf);
    for (const Arc& a : arcs)
      if (z[a.id] >= 0.5 && cur[a.tail] < kInf) next[a.head] = std::min(next[a.head], cur[a.tail] + costs[a.id]);
    best = std::min(best, next[destination]);
    cur = std::move(next);
  }
  return best;
}

// One unit of min-cost flow from source to sink on the expanded graph with
// capacity z per copy, by successive shortest paths over the residual graph.
double MinCostUnitFlow(const ExpandedGraph& g, std::span<const double> z) {
  struct Edge {
    int to;
    double cap;
    double cost;
  };
  const int n = static_cast<int>(g.vertices.size());
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out(n);
  for (const ExpandedArc& e : g.arcs) {
    const double cap = std::clamp(z[e.arc], 0.0, 1.0);
    out[e.tail].push_back(static_cast<int>(edges.size()));
    edges.push_back({e.head, cap, e.cost});
    out[e.head].push_back(static_cast<int>(edges.size()));
    edges.push_back({e.tail, 0.0, -e.cost});
  }
  double remaining = 1.0, total = 0.0;
  while (remaining > 1e-12) {
    std::vector<double> dist(n, kInf);
    std::vector<int> via(n, -1);
    dist[g.source] = 0.0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int v = 0; v < n; ++v) {
        if (dist[v] == kInf) continue;
        for (int id : out[v]) {
          const Edge& e = edges[id];
          if (e.cap > 1e-12 && dist[v] + e.cost < dist[e.to] - 1e-12) {
            dist[e.to] = dist[v] + e.cost;
            via[e.to] = id;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[g.sink] == kInf) return kInf;
    double push = remaining;
    for (int v = g.sink; v != g.source; v = edges[via[v] ^ 1].to) push = std::min(push, edges[via[v]].cap);
    for (int v = g.sink; v != g.source; v = edges[via[v] ^ 1].to) {
      edges[via[v]].cap -= push;
      edges[via[v] ^ 1].cap += push;
    }
    total += push * dist[g.sink];
    remaining -= push;
  }
  return total;
}

double FullLpRouting(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z, int max_arcs,
                     int trip) {
  double total = 0.0;
  std::vector<double> costs;
  for (int r = 0; r < instance.num_trips(); ++r) {
    if (trip >= 0 && r != trip) continue;
    TripArcCosts(arcs, instance.trips()[r].passengers, instance.params(), costs);
    const ExpandedGraph g = BuildExpanded(instance.TripOrigin(r), instance.TripDestination(r), instance.num_stops(),
                                          arcs, costs, max_arcs);
    total += MinCostUnitFlow(g, z);
  }
  return total;
}

std::vector<double> PerTripEnumerated(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z,
                                      int max_arcs) {
  std::vector<double> values(instance.num_trips());
  std::vector<double> costs;
  for (int r = 0; r < instance.num_trips(); ++r) {
    TripArcCosts(arcs, instance.trips()[r].passengers, instance.params(), costs);
    values[r] = testing::EnumerateCsp(instance.TripOrigin(r), instance.TripDestination(r), instance.num_stops(), arcs,
                                      z, costs, max_arcs);
  }
  return values;
}

// Leg-count audit shared by every criterion that produces routes.
struct RouteAudit {
  long routes = 0;
  long violations = 0;

  void Add(const DesignEvaluation& e, int max_arcs) {
    for (const auto& route : e.routes) {
      ++routes;
      if (static_cast<int>(route.size()) > max_arcs || route.empty()) ++violations;
    }
  }
};

RouteAudit route_audit;

BendersConfig Quiet(SolveMode mode) {
  BendersConfig c;
  c.mode = mode;
  return c;
}

void Criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int K = 2 + static_cast<int>(rng() % 3);
    testing::RandomGraph g = testing::MakeRandomGraph(rng, n, 0.6, 20);
    const int origin = static_cast<int>(rng() % n);
    int destination = static_cast<int>(rng() % (n - 1));
    if (destination >= origin) ++destination;
    std::vector<double> z(g.arcs.size(), 1.0);
    for (const Arc& a : g.arcs)
      if (!a.fixed_open) z[a.id] = rng() % 2 ? 1.0 : 0.0;
    ExpandedGraph eg = BuildExpanded(origin, destination, n, g.arcs, g.costs, K);
    PruneDominated(eg, g.arcs);
    TrimDeadEnds(eg);
    const PathResult path = ShortestPath(eg, z);
    const double oracle = HopDp(origin, destination, n, g.arcs, z, g.costs, K);
    bool ok = path.value == oracle;
    if (ok && path.reachable()) {
      double cost = 0.0;
      int at = origin;
      for (int id : path.arcs) {
        ok = ok && g.arcs[id].tail == at && z[id] >= 0.5;
        at = g.arcs[id].head;
        cost += g.costs[id];
      }
      ok = ok && at == destination && cost == path.value && static_cast<int>(path.arcs.size()) <= K;
      if (static_cast<int>(path.arcs.size()) > K) ++route_audit.violations;
      ++route_audit.routes;
    }
    if (!ok) ++mismatches;
  }
  const double t = Seconds(start);
  Report(1, mismatches == 0 && t < 30.0, Fmt("1000 graphs, %d mismatches vs hop DP, %.2f s (limit 30 s)", mismatches, t));
}

struct SmallRun {
  Instance instance;
  std::vector<Arc> arcs;
  SolveReport exact;
  double enumerated = 0.0;
};

std::vector<SmallRun> small_runs;

void Criterion2() {
  const auto start = Clock::now();
  int mismatches = 0, not_optimal = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    SmallRun run{testing::SmallRandomInstance(5000 + i), {}, {}, 0.0};
    run.arcs = BuildArcs(run.instance);
    BendersConfig config = Quiet(SolveMode::kExact);
    config.record_cuts = true;
    run.exact = RunExact(run.instance, config);
    route_audit.Add(run.exact.evaluation, run.exact.max_arcs);
    run.enumerated = testing::EnumerateOptimum(run.instance, run.arcs, run.instance.params().max_arcs).objective;
    const double rel = std::abs(run.exact.evaluation.objective - run.enumerated) / std::max(1.0, run.enumerated);
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++mismatches;
    if (!run.exact.optimal()) ++not_optimal;
    small_runs.push_back(std::move(run));
  }
  const double t = Seconds(start);
  Report(2, mismatches == 0 && not_optimal == 0 && t < 300.0,
         Fmt("100 instances, %d mismatches, %d not optimal, worst rel gap %.2e, %.1f s (limit 300 s)", mismatches,
             not_optimal, worst, t));
}

void Criterion3() {
  long cuts = 0, loose = 0, checks = 0, violations = 0;
  double worst_tight = 0.0, worst_violation = 0.0;
  std::mt19937_64 rng(303);
  for (const SmallRun& run : small_runs) {
    const int K = run.exact.max_arcs;
    const std::vector<DesignVector> feasible = testing::EnumerateFeasibleDesigns(run.arcs, run.instance.num_stops());
    std::vector<int> sample(feasible.size());
    for (size_t i = 0; i < sample.size(); ++i) sample[i] = static_cast<int>(i);
    std::shuffle(sample.begin(), sample.end(), rng);
    if (sample.size() > 100) sample.resize(100);
    std::vector<std::vector<double>> phi;
    for (int s : sample) phi.push_back(PerTripEnumerated(run.instance, run.arcs, feasible[s], K));

    for (const RecordedCut& rc : run.exact.cuts) {
      ++cuts;
      const BendersCut& cut = rc.cut;
      double at_point;
      if (rc.phase == "mip") {
        const std::vector<double> v = PerTripEnumerated(run.instance, run.arcs, rc.point, K);
        at_point = cut.trip >= 0 ? v[cut.trip] : 0.0;
        if (cut.trip < 0)
          for (double x : v) at_point += x;
      } else {
        at_point = FullLpRouting(run.instance, run.arcs, rc.point, K, cut.trip);
      }
      const double tight = std::abs(cut.Rhs(rc.point) - at_point);
      worst_tight = std::max(worst_tight, tight);
      if (!(tight <= 1e-6)) ++loose;
      for (size_t d = 0; d < sample.size(); ++d) {
        double value = cut.trip >= 0 ? phi[d][cut.trip] : 0.0;
        if (cut.trip < 0)
          for (double x : phi[d]) value += x;
        const double excess = cut.Rhs(feasible[sample[d]]) - value;
        ++checks;
        worst_violation = std::max(worst_violation, excess);
        if (excess > 1e-6) ++violations;
      }
    }
  }
  Report(3, cuts > 0 && loose == 0 && violations == 0,
         Fmt("%ld cuts, %ld not tight (worst %.2e), %ld/%ld validity violations (worst excess %.2e)", cuts, loose,
             worst_tight, violations, checks, worst_violation));
}

struct BundledRun {
  std::string name;
  Instance instance;
  SolveReport exact;
  SolveReport relaxed;
};

std::vector<BundledRun> bundled;

void SolveBundled() {
  const std::filesystem::path dir = ODMTS_DATA_DIR;
  for (const char* name : {"desk_200", "strict_gap_60", "bench_60_s4", "bench_60_s5"}) {
    BundledRun run{name, ParseInstance(ReadFile(dir / (std::string(name) + ".json"))), {}, {}};
    run.exact = RunExact(run.instance, Quiet(SolveMode::kExact));
    run.relaxed = RunRelaxed(run.instance, Quiet(SolveMode::kRelaxed));
    route_audit.Add(run.exact.evaluation, run.exact.max_arcs);
    route_audit.Add(run.relaxed.evaluation, run.relaxed.max_arcs);
    bundled.push_back(std::move(run));
  }
}

void Criterion4() {
  int broken = 0;
  for (const SmallRun& run : small_runs) {
    const SolveReport relaxed = RunRelaxed(run.instance, Quiet(SolveMode::kRelaxed));
    route_audit.Add(relaxed.evaluation, relaxed.max_arcs);
    const double exact = run.exact.evaluation.objective;
    const bool left = relaxed.model_objective <= exact + 1e-6 * std::max(1.0, std::abs(exact));
    const bool right = exact <= relaxed.evaluation.objective + 1e-6 * std::max(1.0, std::abs(exact));
    if (!left || !right || !relaxed.optimal()) ++broken;
  }
  std::string strict;
  bool any_strict = false;
  for (const BundledRun& run : bundled) {
    const double lo = run.relaxed.model_objective, mid = run.exact.evaluation.objective,
                 hi = run.relaxed.evaluation.objective;
    const bool ordered = lo <= mid + 1e-6 * mid && mid <= hi + 1e-6 * mid;
    if (!ordered) ++broken;
    const bool is_strict = hi > mid * (1 + 1e-6);
    any_strict = any_strict || is_strict;
    strict += Fmt("; %s %.2f <= %.2f %s %.2f", run.name.c_str(), lo, mid, is_strict ? "<" : "<=", hi);
  }
  Report(4, broken == 0 && any_strict,
         Fmt("100 small instances, %d out of order", broken) + strict);
}

void Criterion5() {
  Report(5, route_audit.violations == 0 && route_audit.routes > 0,
         Fmt("%ld routes checked, %ld over K arcs", route_audit.routes, route_audit.violations));
}

void Criterion6() {
  std::mt19937_64 rng(606);
  int mismatches = 0, count_errors = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const int K = 2 + static_cast<int>(rng() % 3);
    std::vector<int> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rng() % 10);
      y[i] = static_cast<int>(rng() % 10);
    }
    const int origin = static_cast<int>(rng() % n);
    int destination = static_cast<int>(rng() % (n - 1));
    if (destination >= origin) ++destination;
    // Shuttles between every pair; bus arcs only between intermediate stops,
    // so the endpoints are shuttle-only and the metric obeys the triangle
    // inequality (1 + Manhattan).
    std::vector<Arc> arcs;
    std::vector<double> costs;
    auto add = [&](int i, int j, Mode mode, double cost) {
      Arc a;
      a.id = static_cast<int>(arcs.size());
      a.tail = i;
      a.head = j;
      a.mode = mode;
      a.fixed_open = mode != Mode::kBus;
      arcs.push_back(a);
      costs.push_back(cost);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double metric = 1 + std::abs(x[i] - x[j]) + std::abs(y[i] - y[j]);
        add(i, j, Mode::kShuttle, metric);
        const bool inner = i != origin && i != destination && j != origin && j != destination;
        if (inner && rng() % 2) add(i, j, Mode::kBus, static_cast<double>(rng() % 4));
      }
    int expected = 0;
    for (const Arc& a : arcs)
      if (a.mode == Mode::kShuttle && a.head == destination && a.tail != origin) ++expected;
    std::vector<double> z(arcs.size(), 1.0);
    for (const Arc& a : arcs)
      if (!a.fixed_open) z[a.id] = rng() % 2 ? 1.0 : 0.0;
    const ExpandedGraph full = BuildExpanded(origin, destination, n, arcs, costs, K);
    ExpandedGraph pruned = full;
    const int removed = PruneDominated(pruned, arcs);
    if (removed != expected || pruned.arcs.size() + removed != full.arcs.size()) ++count_errors;
    const double a = ShortestPath(full, z).value, b = ShortestPath(pruned, z).value;
    if (a != b || a != HopDp(origin, destination, n, arcs, z, costs, K)) ++mismatches;
  }
  Report(6, mismatches == 0 && count_errors == 0,
         Fmt("500 instances, %d value mismatches, %d pruned-count mismatches", mismatches, count_errors));
}

void Criterion7() {
  std::mt19937_64 rng(707);
  std::map<int, std::pair<Instance, std::vector<DesignVector>>> pool;
  int mismatches = 0;
  double worst = 0.0;
  std::vector<double> costs;
  for (int draw = 0; draw < 1000; ++draw) {
    const int seed = 7000 + static_cast<int>(rng() % 40);
    auto it = pool.find(seed);
    if (it == pool.end()) {
      Instance instance = testing::SmallRandomInstance(seed);
      std::vector<DesignVector> designs = testing::EnumerateFeasibleDesigns(BuildArcs(instance), instance.num_stops());
      it = pool.emplace(seed, std::make_pair(std::move(instance), std::move(designs))).first;
    }
    const Instance& instance = it->second.first;
    const DesignVector& z = it->second.second[rng() % it->second.second.size()];
    const std::vector<Arc> arcs = BuildArcs(instance);
    const int K = 2 + static_cast<int>(rng() % 3);
    const int r = static_cast<int>(rng() % instance.num_trips());
    Subproblem sub(instance, arcs, K);
    const double combinatorial = sub.SolveInteger(r, z).duals.objective;
    const double lp = SolveTripLp(sub.graph(r), z).duals.objective;
    TripArcCosts(arcs, instance.trips()[r].passengers, instance.params(), costs);
    const double phi = testing::EnumerateCsp(instance.TripOrigin(r), instance.TripDestination(r),
                                             instance.num_stops(), arcs, z, costs, K);
    const double err = std::max(std::abs(combinatorial - phi), std::abs(lp - phi));
    worst = std::max(worst, err);
    if (!(err <= 1e-7)) ++mismatches;
  }
  Report(7, mismatches == 0, Fmt("1000 draws, %d mismatches, worst |dual - Phi| %.2e", mismatches, worst));
}

void Criterion8() {
  std::mt19937_64 rng(808);
  int bad = 0;
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const LinearProgram lp = testing::RandomBoundedLp(rng, 30, 20);
    const LpSolution sol = SolveLp(lp);
    if (sol.status != LpStatus::kOptimal) {
      ++bad;
      continue;
    }
    const double gap = std::abs(sol.objective - DualObjective(lp, sol));
    const double kkt = testing::ComputeKkt(lp, sol).Max();
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, kkt);
    if (gap > 1e-7 || kkt > 1e-7) ++bad;
  }
  Report(8, bad == 0, Fmt("500 LPs, %d failures, worst gap %.2e, worst KKT %.2e", bad, worst_gap, worst_kkt));
}

void Criterion9() {
  int increases = 0;
  for (int i = 0; i < 50; ++i) {
    const Instance base = testing::SmallRandomInstance(9000 + i);
    double previous = kInf;
    for (int K = 2; K <= 4; ++K) {
      CostParams p = base.params();
      p.max_arcs = K;
      const SolveReport report = RunExact(base.WithParams(p), Quiet(SolveMode::kExact));
      route_audit.Add(report.evaluation, K);
      const double value = report.evaluation.objective;
      if (!report.optimal() || value > previous + 1e-6 * std::max(1.0, std::abs(previous))) ++increases;
      previous = value;
    }
  }
  Report(9, increases == 0, Fmt("50 instances x K in {2,3,4}, %d increases", increases));
}

void Criterion10() {
  const BundledRun& desk = bundled.front();
  bool pass = desk.exact.optimal() && desk.exact.wall_seconds < 600.0;
  std::string detail = Fmt("%s exact %s in %.2f s (limit 600 s) on %u hardware threads", desk.name.c_str(),
                           MipStatusName(desk.exact.status), desk.exact.wall_seconds,
                           std::thread::hardware_concurrency());
  for (const BundledRun& run : bundled) {
    const bool faster = run.exact.wall_seconds < run.relaxed.wall_seconds;
    pass = pass && faster;
    detail += Fmt("; %s exact %.2f s vs relaxed+eval %.2f s", run.name.c_str(), run.exact.wall_seconds,
                  run.relaxed.wall_seconds);
  }
  Report(10, pass, detail);
}

void Criterion11() {
  int differ = 0;
  std::string detail;
  for (const BundledRun& run : bundled) {
    if (run.name != "desk_200" && run.name != "bench_60_s4") continue;
    const std::string first = ReportToJson(run.exact, run.instance, false).dump();
    const SolveReport again = RunExact(run.instance, Quiet(SolveMode::kExact));
    const bool same = ReportToJson(again, run.instance, false).dump() == first;
    if (!same) ++differ;
    detail += Fmt("%s%s exact %s", detail.empty() ? "" : "; ", run.name.c_str(), same ? "identical" : "differs");
  }
  const std::string first = ReportToJson(bundled[1].relaxed, bundled[1].instance, false).dump();
  const bool same = ReportToJson(RunRelaxed(bundled[1].instance, Quiet(SolveMode::kRelaxed)), bundled[1].instance,
                                 false)
                        .dump() == first;
  if (!same) ++differ;
  detail += Fmt("; %s relaxed %s", bundled[1].name.c_str(), same ? "identical" : "differs");
  Report(11, differ == 0, detail);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  Criterion1();
  Criterion2();
  Criterion3();
  SolveBundled();
  Criterion4();
  Criterion6();
  Criterion7();
  Criterion8();
  Criterion9();
  Criterion5();
  Criterion10();
  Criterion11();
  for (const auto& [criterion, line] : results) std::printf("%s\n", line.c_str());
  std::printf("acceptance: %d failing criteria, %.1f s\n", failures, Seconds(start));
  return failures == 0 ? 0 : 1;
}
