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

#include "odmts/subproblem.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include <omp.h>

namespace odmts {
namespace {

// Merges (arc, value) pairs by arc and drops zeros.
std::vector<std::pair<int, double>> Aggregate(std::vector<std::pair<int, double>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<int, double>> out;
  for (const auto& [arc, v] : terms) {
    if (!out.empty() && out.back().first == arc) {
      out.back().second += v;
    } else {
      out.emplace_back(arc, v);
    }
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0.0; });
  return out;
}

}  // namespace

double BendersCut::Rhs(std::span<const double> z) const {
  double rhs = constant;
  for (const auto& [arc, c] : coefficients) rhs += c * z[arc];
  return rhs;
}

std::uint64_t DesignHash(std::span<const double> z) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : z) {
    if (v == 0.0) v = 0.0;  // fold -0
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

BendersCut MakeCut(std::span<const CutContribution> contributions, std::span<const double> zbar,
                   int theta_index, int trip) {
  const std::uint64_t hash = DesignHash(zbar);
  BendersCut cut;
  cut.theta_index = theta_index;
  cut.trip = trip;
  cut.point_hash = hash;
  std::vector<std::pair<int, double>> terms;
  double value = 0.0;
  for (const CutContribution& c : contributions) {
    if (c.point_hash != hash) throw std::invalid_argument("cut contribution computed at a different design");
    value += c.value;
    terms.insert(terms.end(), c.coefficients.begin(), c.coefficients.end());
  }
  cut.coefficients = Aggregate(std::move(terms));
  cut.constant = value;
  for (const auto& [arc, c] : cut.coefficients) cut.constant -= c * zbar[arc];
  return cut;
}

Subproblem::Subproblem(const Instance& instance, std::span<const Arc> arcs, int max_arcs)
    : instance_(instance), arcs_(arcs.begin(), arcs.end()), max_arcs_(max_arcs) {
  const int T = instance.num_trips();
  graphs_.resize(T);
  pruned_.assign(T, 0);
  lp_basis_.resize(T);
  relaxed_columns_.resize(T);
#pragma omp parallel
  {
    std::vector<double> costs;
#pragma omp for schedule(dynamic, 8)
    for (int r = 0; r < T; ++r) {
      TripArcCosts(arcs_, instance.trips()[r].passengers, instance.params(), costs);
      graphs_[r] = BuildExpanded(instance.TripOrigin(r), instance.TripDestination(r), instance.num_stops(),
                                 arcs_, costs, max_arcs);
      pruned_[r] = PruneDominated(graphs_[r], arcs_);
      TrimDeadEnds(graphs_[r]);
    }
  }
}

TripSolution SolveTripInteger(const ExpandedGraph& g, std::span<const double> z) {
  TripSolution s;
  const PathResult sp = ShortestPath(g, z);
  if (!sp.reachable()) throw std::runtime_error("no route within the arc budget");
  s.value = sp.value;
  s.path = sp.arcs;

  std::vector<double> f(g.vertices.size(), kInfinity);
  f[g.source] = 0.0;
  for (const ExpandedArc& e : g.arcs)
    if (z[e.arc] >= 0.5 && f[e.tail] < kInfinity) f[e.head] = std::min(f[e.head], f[e.tail] + e.cost);
  auto cap = [&](double x) { return std::min(x, s.value); };

  TripDuals& d = s.duals;
  d.potential.resize(g.vertices.size());
  for (size_t v = 0; v < g.vertices.size(); ++v) d.potential[v] = s.value - cap(f[v]);
  d.lambda.assign(g.arcs.size(), 0.0);
  std::vector<std::pair<int, double>> terms;
  for (size_t idx = 0; idx < g.arcs.size(); ++idx) {
    const ExpandedArc& e = g.arcs[idx];
    if (z[e.arc] >= 0.5) continue;
    const double lambda = std::min(0.0, e.cost + cap(f[e.tail]) - cap(f[e.head]));
    d.lambda[idx] = lambda;
    if (lambda < 0.0) terms.emplace_back(e.arc, lambda);
  }
  d.objective = d.potential[g.source] - d.potential[g.sink];
  s.coefficients = Aggregate(std::move(terms));
  return s;
}

TripSolution SolveTripLp(const ExpandedGraph& g, std::span<const double> z, LpBasis* warm) {
  const int nv = static_cast<int>(g.vertices.size());
  if (g.sink != nv - 1) throw std::logic_error("sink must be the last expanded vertex");

  // One conservation row per vertex except the sink, whose row is implied.
  LinearProgram lp;
  std::vector<std::vector<LinearProgram::Entry>> rows(nv - 1);
  for (size_t idx = 0; idx < g.arcs.size(); ++idx) {
    const ExpandedArc& e = g.arcs[idx];
    lp.AddVariable(0.0, std::clamp(z[e.arc], 0.0, 1.0), e.cost);
    rows[e.tail].emplace_back(static_cast<int>(idx), 1.0);
    if (e.head != g.sink) rows[e.head].emplace_back(static_cast<int>(idx), -1.0);
  }
  for (int v = 0; v < nv - 1; ++v) lp.AddRow(rows[v], RowSense::kEqual, v == g.source ? 1.0 : 0.0);

  const LpSolution sol = SolveLp(lp, warm != nullptr && !warm->empty() ? warm : nullptr);
  if (sol.status != LpStatus::kOptimal) {
    if (warm != nullptr) warm->clear();
    throw std::runtime_error(std::string("routing LP: ") + LpStatusName(sol.status));
  }
  if (warm != nullptr) *warm = sol.basis;

  TripSolution s;
  s.flow = sol.primal;
  TripDuals& d = s.duals;
  d.potential.assign(nv, 0.0);
  for (int v = 0; v < nv - 1; ++v) d.potential[v] = sol.duals[v];
  d.lambda.assign(g.arcs.size(), 0.0);
  std::vector<std::pair<int, double>> terms;
  double objective = d.potential[g.source];
  for (size_t idx = 0; idx < g.arcs.size(); ++idx) {
    const ExpandedArc& e = g.arcs[idx];
    const double reduced = e.cost - d.potential[e.tail] + d.potential[e.head];
    const double lambda = std::min(0.0, reduced);
    d.lambda[idx] = lambda;
    if (lambda < 0.0) {
      terms.emplace_back(e.arc, lambda);
      objective += lambda * std::clamp(z[e.arc], 0.0, 1.0);
    }
  }
  d.objective = objective;
  s.value = sol.objective;
  s.coefficients = Aggregate(std::move(terms));
  return s;
}

TripSolution RelaxedTripLp(int origin, int destination, int num_vertices, std::span<const Arc> arcs,
                           std::span<const double> cost, std::span<const double> z, int K,
                           std::vector<int>& columns) {
  const int n = num_vertices;
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

  constexpr double kPricingTolerance = 1e-9;
  std::vector<char> active(arcs.size(), 0);
  std::vector<double> potential(n);
  std::vector<int> row_of(n);
  LpSolution sol;
  double budget_dual = 0.0;
  bool seeded_all = false;
  for (;;) {
    for (int a : columns) active[a] = 1;
    // Rows: every vertex touched by a column except the destination, plus
    // the origin and the budget row.
    std::fill(row_of.begin(), row_of.end(), -1);
    int num_rows = 0;
    auto row = [&](int v) {
      if (v == destination) return -1;
      if (row_of[v] < 0) row_of[v] = num_rows++;
      return row_of[v];
    };
    row(origin);
    for (int a : columns) {
      row(arcs[a].tail);
      row(arcs[a].head);
    }
    std::vector<std::vector<LinearProgram::Entry>> rows(num_rows + 1);
    LinearProgram lp;
    for (size_t c = 0; c < columns.size(); ++c) {
      const Arc& a = arcs[columns[c]];
      lp.AddVariable(0.0, std::clamp(z[a.id], 0.0, 1.0), cost[a.id]);
      const int col = static_cast<int>(c);
      if (a.tail != destination) rows[row_of[a.tail]].emplace_back(col, 1.0);
      if (a.head != destination) rows[row_of[a.head]].emplace_back(col, -1.0);
      rows[num_rows].emplace_back(col, 1.0);
    }
    for (int v = 0; v < num_rows; ++v) lp.AddRow(rows[v], RowSense::kEqual, v == row_of[origin] ? 1.0 : 0.0);
    lp.AddRow(rows[num_rows], RowSense::kLessEqual, K);
    sol = SolveLp(lp);
    if (sol.status == LpStatus::kInfeasible && !seeded_all) {
      // The starting columns hold no route; fall back to every usable arc.
      seeded_all = true;
      for (const Arc& a : arcs)
        if (z[a.id] > 0.0 && !active[a.id]) columns.push_back(a.id);
      std::sort(columns.begin(), columns.end());
      continue;
    }
    if (sol.status != LpStatus::kOptimal) {
      throw std::runtime_error(std::string("relaxed routing LP: ") + LpStatusName(sol.status));
    }
    budget_dual = sol.duals[num_rows];

    // Potentials of vertices outside the LP: cost-to-go over usable arcs,
    // capped at the origin's potential. Any choice keeps the dual feasible
    // once the lambdas absorb negative reduced costs; this one keeps them
    // small.
    const double top = sol.duals[row_of[origin]];
    std::vector<char> fixed(n, 0);
    for (int v = 0; v < n; ++v) {
      if (v == destination) {
        potential[v] = 0.0;
        fixed[v] = 1;
      } else if (row_of[v] >= 0) {
        potential[v] = sol.duals[row_of[v]];
        fixed[v] = 1;
      } else {
        potential[v] = top;
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const Arc& a : arcs) {
        if (fixed[a.tail] || z[a.id] <= 0.0) continue;
        const double via = cost[a.id] - budget_dual + potential[a.head];
        if (via < potential[a.tail] - 1e-12) {
          potential[a.tail] = via;
          changed = true;
        }
      }
    }

    std::vector<int> added;
    for (const Arc& a : arcs) {
      if (active[a.id] || z[a.id] <= 0.0) continue;
      const double reduced = cost[a.id] - potential[a.tail] + potential[a.head] - budget_dual;
      if (reduced < -kPricingTolerance) added.push_back(a.id);
    }
    if (added.empty()) break;
    columns.insert(columns.end(), added.begin(), added.end());
    std::sort(columns.begin(), columns.end());
  }

  TripSolution s;
  s.value = sol.objective;
  TripDuals& d = s.duals;
  d.potential = potential;
  d.lambda.assign(arcs.size(), 0.0);
  double objective = potential[origin] + budget_dual * K;
  std::vector<std::pair<int, double>> terms;
  s.flow.assign(arcs.size(), 0.0);
  for (size_t c = 0; c < columns.size(); ++c) s.flow[columns[c]] = sol.primal[c];
  for (const Arc& a : arcs) {
    const double reduced = cost[a.id] - potential[a.tail] + potential[a.head] - budget_dual;
    const double lambda = std::min(0.0, reduced);
    d.lambda[a.id] = lambda;
    if (lambda < 0.0) {
      terms.emplace_back(a.id, lambda);
      objective += lambda * std::clamp(z[a.id], 0.0, 1.0);
    }
  }
  d.objective = objective;
  s.coefficients = std::move(terms);
  return s;
}

TripSolution Subproblem::SolveInteger(int trip, std::span<const double> z) const {
  try {
    return SolveTripInteger(graphs_[trip], z);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("trip " + instance_.trips()[trip].id + ": " + e.what());
  }
}

TripSolution Subproblem::SolveLp(int trip, std::span<const double> z) {
  try {
    return SolveTripLp(graphs_[trip], z, &lp_basis_[trip]);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("trip " + instance_.trips()[trip].id + ": " + e.what());
  }
}

TripSolution Subproblem::SolveRelaxed(int trip, std::span<const double> z) {
  const Instance& inst = instance_;
  std::vector<double> cost;
  TripArcCosts(arcs_, inst.trips()[trip].passengers, inst.params(), cost);
  std::vector<int>& columns = relaxed_columns_[trip];
  if (columns.empty())
    for (const ExpandedArc& e : graphs_[trip].arcs) columns.push_back(e.arc);
  try {
    return RelaxedTripLp(inst.TripOrigin(trip), inst.TripDestination(trip), inst.num_stops(), arcs_, cost, z,
                         max_arcs_, columns);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("trip " + inst.trips()[trip].id + ": " + e.what());
  }
}

RoutingResult Subproblem::Route(std::span<const double> z, int threads) const {
  const int T = num_trips();
  RoutingResult result;
  result.trip_values.assign(T, 0.0);
  result.paths.assign(T, {});
  std::vector<std::string> errors(T);
#pragma omp parallel for schedule(dynamic, 8) num_threads(std::max(1, threads))
  for (int r = 0; r < T; ++r) {
    const PathResult p = ShortestPath(graphs_[r], z);
    if (!p.reachable()) errors[r] = "trip " + instance_.trips()[r].id + " has no route";
    result.trip_values[r] = p.value;
    result.paths[r] = p.arcs;
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  for (double v : result.trip_values) result.total += v;
  return result;
}

TripSolution Subproblem::SolveOne(int trip, std::span<const double> z, SeparationMethod method) {
  switch (method) {
    case SeparationMethod::kCombinatorial:
      return SolveInteger(trip, z);
    case SeparationMethod::kExpandedLp:
      return SolveLp(trip, z);
    case SeparationMethod::kRelaxedLp:
      return SolveRelaxed(trip, z);
  }
  throw std::logic_error("unknown separation method");
}

CutContribution Subproblem::Contribution(const TripSolution& s, std::uint64_t hash) const {
  // The dual objective is an exact lower bound for every design, so the cut
  // is built from it rather than from the primal value.
  return {s.duals.objective, s.coefficients, hash};
}

Separation Subproblem::Separate(std::span<const double> z, SeparationMethod method, int threads) {
  const int T = num_trips();
  const std::uint64_t hash = DesignHash(z);
  std::vector<TripSolution> solutions(T);
  std::vector<std::string> errors(T);
#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(1, threads))
  for (int r = 0; r < T; ++r) {
    try {
      solutions[r] = SolveOne(r, z, method);
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  Separation out;
  out.routing.trip_values.resize(T);
  out.routing.paths.resize(T);
  out.contributions.resize(T);
  for (int r = 0; r < T; ++r) {
    out.routing.trip_values[r] = solutions[r].value;
    out.routing.total += solutions[r].value;
    out.routing.paths[r] = std::move(solutions[r].path);
    out.contributions[r] = Contribution(solutions[r], hash);
  }
  return out;
}

Separation Subproblem::SeparateSerial(std::span<const double> z, SeparationMethod method) {
  const int T = num_trips();
  const std::uint64_t hash = DesignHash(z);
  Separation out;
  out.routing.trip_values.resize(T);
  out.routing.paths.resize(T);
  out.contributions.resize(T);
  for (int r = 0; r < T; ++r) {
    TripSolution s = SolveOne(r, z, method);
    out.routing.trip_values[r] = s.value;
    out.routing.total += s.value;
    out.contributions[r] = Contribution(s, hash);
    out.routing.paths[r] = std::move(s.path);
  }
  return out;
}

bool CheckCutValid(const BendersCut& cut, std::span<const double> z, const Subproblem& subproblem,
                   double tol) {
  for (const auto& [arc, c] : cut.coefficients)
    if (c > 0.0) return false;
  double phi = 0.0;
  if (cut.trip >= 0) {
    phi = ShortestPath(subproblem.graph(cut.trip), z).value;
  } else {
    phi = subproblem.Route(z, 1).total;
  }
  return phi >= cut.Rhs(z) - tol;
}

void WriteCutLogCsv(std::span<const CutLogEntry> entries, std::ostream& out) {
  out << "iteration,constant,nnz,violation\n";
  const auto old = out.precision(17);
  for (const CutLogEntry& e : entries)
    out << e.iteration << ',' << e.constant << ',' << e.nnz << ',' << e.violation << '\n';
  out.precision(old);
}

}  // namespace odmts
