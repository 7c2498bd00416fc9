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

#include "odmts/benders.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace odmts {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

// Cuts from one separation that are violated at (zbar, theta). The
// separation was done at `point`, which is zbar or a stabilized version.
std::vector<BendersCut> ViolatedCuts(const Separation& sep, std::span<const double> point,
                                     std::span<const double> zbar, std::span<const double> theta,
                                     bool disaggregate, double tolerance) {
  std::vector<BendersCut> out;
  auto violated = [&](const BendersCut& cut) {
    const double rhs = cut.Rhs(zbar);
    return rhs - theta[cut.theta_index] > tolerance * std::max(1.0, std::abs(rhs));
  };
  if (!disaggregate) {
    BendersCut cut = MakeCut(sep.contributions, point);
    if (violated(cut)) out.push_back(std::move(cut));
    return out;
  }
  for (size_t r = 0; r < sep.contributions.size(); ++r) {
    const int trip = static_cast<int>(r);
    BendersCut cut = MakeCut(std::span(&sep.contributions[r], 1), point, trip, trip);
    if (violated(cut)) out.push_back(std::move(cut));
  }
  return out;
}

}  // namespace

const char* SolveModeName(SolveMode mode) { return mode == SolveMode::kExact ? "exact" : "relaxed"; }

SolveMode ParseSolveMode(std::string_view name) {
  if (name == "exact") return SolveMode::kExact;
  if (name == "relaxed") return SolveMode::kRelaxed;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected exact or relaxed)");
}

void ValidateConfig(const BendersConfig& config) {
  if (!(config.epsilon > 0.0 && config.epsilon < 0.5)) throw std::invalid_argument("epsilon must be in (0, 0.5)");
  if (!(config.core_value >= 0.0 && config.core_value <= 1.0))
    throw std::invalid_argument("core value must be in [0, 1]");
  if (!(config.relative_gap >= 0.0)) throw std::invalid_argument("gap must be >= 0");
  if (!(config.cut_tolerance >= 0.0)) throw std::invalid_argument("cut tolerance must be >= 0");
  if (config.root_iteration_cap < 0) throw std::invalid_argument("root iteration cap must be >= 0");
  if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (config.node_limit < 1) throw std::invalid_argument("node limit must be >= 1");
  if (!(config.time_limit_seconds >= 0.0)) throw std::invalid_argument("time limit must be >= 0");
}

DesignVector StabilizedPoint(std::span<const double> zbar, std::span<const Arc> arcs, double core_value,
                             double epsilon) {
  DesignVector z(zbar.size());
  for (size_t a = 0; a < zbar.size(); ++a) {
    const double core = arcs[a].fixed_open ? 1.0 : core_value;
    z[a] = (1.0 - epsilon) * zbar[a] + epsilon * core;
  }
  return z;
}

void ValidateDesign(std::span<const Arc> arcs, int num_vertices, std::span<const double> z) {
  if (z.size() != arcs.size())
    throw std::invalid_argument("design has " + std::to_string(z.size()) + " entries, expected " +
                                std::to_string(arcs.size()));
  for (const Arc& a : arcs) {
    const double v = z[a.id];
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("design value of arc " + std::to_string(a.id) + " is not 0 or 1");
    if (a.fixed_open && v != 1.0) throw std::invalid_argument("fixed arc " + std::to_string(a.id) + " is closed");
  }
  std::vector<long> balance(static_cast<size_t>(num_vertices) * kNumModes, 0);
  std::map<std::tuple<int, int, int>, int> open_per_connection;
  for (const Arc& a : arcs) {
    if (z[a.id] == 0.0) continue;
    const int m = static_cast<int>(a.mode);
    balance[static_cast<size_t>(a.tail) * kNumModes + m] += a.frequency;
    balance[static_cast<size_t>(a.head) * kNumModes + m] -= a.frequency;
    if (!a.fixed_open && ++open_per_connection[{a.tail, a.head, m}] > 1)
      throw std::invalid_argument("more than one frequency open between vertices " + std::to_string(a.tail) +
                                  " and " + std::to_string(a.head));
  }
  for (int v = 0; v < num_vertices; ++v)
    for (int m = 0; m < kNumModes; ++m)
      if (balance[static_cast<size_t>(v) * kNumModes + m] != 0)
        throw std::invalid_argument("frequency balance violated at vertex " + std::to_string(v) + " for " +
                                    std::string(ModeName(static_cast<Mode>(m))));
}

DesignEvaluation EvaluateDesign(const Subproblem& subproblem, std::span<const double> z, int threads) {
  const auto& arcs = subproblem.arcs();
  int num_vertices = 0;
  for (const Arc& a : arcs) num_vertices = std::max({num_vertices, a.tail + 1, a.head + 1});
  ValidateDesign(arcs, num_vertices, z);
  RoutingResult routing = subproblem.Route(z, threads);
  DesignEvaluation out;
  out.design_cost = DesignCost(arcs, z);
  out.routing_cost = routing.total;
  out.objective = out.design_cost + out.routing_cost;
  out.trip_values = std::move(routing.trip_values);
  out.routes = std::move(routing.paths);
  for (const auto& route : out.routes)
    if (static_cast<int>(route.size()) > subproblem.max_arcs()) throw std::logic_error("route exceeds the arc budget");
  return out;
}

DesignEvaluation EvaluateDesign(const Instance& instance, std::span<const double> z, int threads) {
  const std::vector<Arc> arcs = BuildArcs(instance);
  ValidateDesign(arcs, instance.num_stops(), z);
  const Subproblem subproblem(instance, arcs, instance.params().max_arcs);
  return EvaluateDesign(subproblem, z, threads);
}

RootPhaseResult RunRootPhase(Master& master, Subproblem& subproblem, const BendersConfig& config,
                             SeparationMethod method, std::vector<RecordedCut>* record) {
  const auto start = Clock::now();
  const bool disaggregate = master.num_theta() > 1;
  RootPhaseResult result;
  while (result.iterations < config.root_iteration_cap) {
    if (config.time_limit_seconds > 0 && Seconds(start) > config.time_limit_seconds) break;
    const MasterRelaxation relax = master.SolveRelaxation();
    if (relax.status != LpStatus::kOptimal)
      throw std::runtime_error(std::string("master LP relaxation: ") + LpStatusName(relax.status));
    ++result.iterations;
    result.bound = relax.objective;
    result.bounds.push_back(relax.objective);

    DesignVector point = StabilizedPoint(relax.z, subproblem.arcs(), config.core_value, config.epsilon);
    std::vector<BendersCut> cuts =
        ViolatedCuts(subproblem.Separate(point, method, config.threads), point, relax.z, relax.theta,
                     disaggregate, config.cut_tolerance);
    if (cuts.empty()) {
      // The stabilized cut can miss a violation of order epsilon; confirm at
      // the master point itself before declaring convergence.
      point = relax.z;
      cuts = ViolatedCuts(subproblem.Separate(point, method, config.threads), point, relax.z, relax.theta,
                          disaggregate, config.cut_tolerance);
    }
    int added = 0;
    for (BendersCut& cut : cuts) {
      if (!master.AddCut(cut)) continue;
      ++added;
      if (record != nullptr) record->push_back({"root", std::move(cut), point});
    }
    result.cuts += added;
    if (config.progress != nullptr) {
      *config.progress << "root iter=" << result.iterations << " bound=" << relax.objective << " cuts=" << added
                       << " time=" << Seconds(start) << "s\n";
    }
    if (added == 0) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged && config.progress != nullptr)
    *config.progress << "root phase stopped after " << result.iterations << " iterations without converging\n";
  return result;
}

SolveReport Solve(const Instance& instance, const BendersConfig& config) {
  ValidateConfig(config);
  const auto start = Clock::now();
  const std::vector<Arc> arcs = BuildArcs(instance);
  const int max_arcs = instance.params().max_arcs;
  Subproblem subproblem(instance, arcs, max_arcs);
  const int num_theta = config.disaggregate ? std::max(1, instance.num_trips()) : 1;
  Master master(arcs, instance.num_stops(), num_theta);
  const bool exact = config.mode == SolveMode::kExact;

  SolveReport report;
  report.mode = config.mode;
  report.max_arcs = max_arcs;
  std::vector<RecordedCut>* record = config.record_cuts ? &report.cuts : nullptr;

  report.root = RunRootPhase(master, subproblem, config,
                             exact ? SeparationMethod::kExpandedLp : SeparationMethod::kRelaxedLp, record);
  report.root_seconds = Seconds(start);
  double lower = -kInf;
  for (size_t i = 0; i < report.root.bounds.size(); ++i) {
    lower = std::max(lower, report.root.bounds[i]);
    report.trajectory.push_back({"root", static_cast<int>(i + 1), lower, kInf, 0.0});
  }
  if (!report.trajectory.empty()) report.trajectory.back().seconds = report.root_seconds;

  const SeparationMethod candidate_method = exact ? SeparationMethod::kCombinatorial : SeparationMethod::kRelaxedLp;
  double upper = kInf;
  int candidates = 0;
  auto callback = [&](const DesignVector& z, std::span<const double> theta) {
    ++candidates;
    const Separation sep = subproblem.Separate(z, candidate_method, config.threads);
    CandidateVerdict verdict;
    verdict.objective = DesignCost(arcs, z) + sep.routing.total;
    verdict.cuts = ViolatedCuts(sep, z, z, theta, config.disaggregate, config.cut_tolerance);
    if (record != nullptr)
      for (const BendersCut& cut : verdict.cuts) report.cuts.push_back({"mip", cut, z});
    if (*verdict.objective < upper) {
      upper = *verdict.objective;
      report.trajectory.push_back({"mip", candidates, std::max(lower, report.root.bound), upper, Seconds(start)});
      if (config.progress != nullptr) {
        *config.progress << "mip candidate=" << candidates << " incumbent=" << upper
                         << " time=" << Seconds(start) << "s\n";
      }
    }
    return verdict;
  };

  MipOptions options;
  options.relative_gap = config.relative_gap;
  options.node_limit = config.node_limit;
  if (config.time_limit_seconds > 0)
    options.time_limit_seconds = std::max(1e-3, config.time_limit_seconds - Seconds(start));
  const MipResult mip = master.SolveMip(callback, options);
  report.status = mip.status;
  report.mip_cuts = mip.cuts_added;
  report.nodes = mip.nodes;
  report.branchings = mip.branchings;
  if (mip.has_incumbent) {
    report.design = mip.design;
    report.model_objective = mip.objective;
  } else {
    // Fixed-open arcs alone always balance, so the closed design is a
    // feasible fallback when no candidate was reached.
    report.design = ClosedDesign(arcs);
    report.model_objective = kInf;
  }
  if (record != nullptr) {
    // Cuts the master rejected as duplicates are not part of the model.
    const int kept = report.root.cuts + mip.cuts_added;
    if (static_cast<int>(report.cuts.size()) > kept) {
      std::vector<RecordedCut> unique;
      Master probe(arcs, instance.num_stops(), num_theta);
      for (RecordedCut& c : report.cuts)
        if (probe.AddCut(c.cut)) unique.push_back(std::move(c));
      report.cuts = std::move(unique);
    }
  }

  const auto eval_start = Clock::now();
  report.evaluation = EvaluateDesign(subproblem, report.design, config.threads);
  report.evaluation_seconds = Seconds(eval_start);
  if (!mip.has_incumbent) report.model_objective = exact ? report.evaluation.objective : kInf;
  if (exact && mip.has_incumbent) {
    const double diff = std::abs(report.evaluation.objective - report.model_objective);
    if (diff > 1e-9 * std::max(1.0, std::abs(report.model_objective)))
      throw std::logic_error("evaluated objective disagrees with the incumbent");
  }

  report.upper_bound = report.model_objective;
  report.lower_bound = std::max(report.root.bound, mip.best_bound);
  if (mip.status == MipStatus::kOptimal) report.lower_bound = std::min(report.lower_bound, report.upper_bound);
  report.gap = std::isfinite(report.upper_bound)
                   ? std::max(0.0, report.upper_bound - report.lower_bound) / std::max(1.0, std::abs(report.upper_bound))
                   : kInf;
  report.wall_seconds = Seconds(start);
  report.trajectory.push_back({"final", candidates, std::max(lower, report.lower_bound), report.upper_bound,
                               report.wall_seconds});
  if (config.progress != nullptr) {
    *config.progress << "done status=" << MipStatusName(report.status) << " objective=" << report.evaluation.objective
                     << " bound=" << report.lower_bound << " gap=" << report.gap << " nodes=" << report.nodes
                     << " cuts=" << report.root.cuts + report.mip_cuts << " time=" << report.wall_seconds << "s\n";
  }
  return report;
}

SolveReport RunExact(const Instance& instance, BendersConfig config) {
  config.mode = SolveMode::kExact;
  return Solve(instance, config);
}

SolveReport RunRelaxed(const Instance& instance, BendersConfig config) {
  config.mode = SolveMode::kRelaxed;
  return Solve(instance, config);
}

nlohmann::json OpenArcsJson(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z) {
  nlohmann::json out = nlohmann::json::array();
  for (const Arc& a : arcs) {
    if (a.fixed_open || z[a.id] < 0.5) continue;
    out.push_back({{"from", instance.stops()[a.tail].id},
                   {"to", instance.stops()[a.head].id},
                   {"mode", std::string(ModeName(a.mode))},
                   {"frequency", a.frequency},
                   {"beta", a.fixed_cost}});
  }
  return out;
}

nlohmann::json ReportToJson(const SolveReport& report, const Instance& instance, bool include_timing) {
  const std::vector<Arc> arcs = BuildArcs(instance);
  nlohmann::json j;
  j["mode"] = SolveModeName(report.mode);
  j["status"] = MipStatusName(report.status);
  j["max_arcs"] = report.max_arcs;
  j["objective"] = report.evaluation.objective;
  j["design_cost"] = report.evaluation.design_cost;
  j["routing_cost"] = report.evaluation.routing_cost;
  j["model_objective"] = report.model_objective;
  j["lower_bound"] = report.lower_bound;
  j["upper_bound"] = report.upper_bound;
  j["gap"] = report.gap;
  j["open_arcs"] = OpenArcsJson(instance, arcs, report.design);

  nlohmann::json routes = nlohmann::json::array();
  for (int r = 0; r < instance.num_trips(); ++r) {
    nlohmann::json legs = nlohmann::json::array();
    for (int id : report.evaluation.routes[r]) {
      const Arc& a = arcs[id];
      legs.push_back({{"arc", id},
                      {"from", instance.stops()[a.tail].id},
                      {"to", instance.stops()[a.head].id},
                      {"mode", std::string(ModeName(a.mode))},
                      {"frequency", a.frequency}});
    }
    routes.push_back({{"trip", instance.trips()[r].id}, {"cost", report.evaluation.trip_values[r]}, {"legs", legs}});
  }
  j["routes"] = routes;
  j["root"] = {{"iterations", report.root.iterations},
               {"cuts", report.root.cuts},
               {"bound", report.root.bound},
               {"converged", report.root.converged}};
  j["mip"] = {{"cuts", report.mip_cuts}, {"nodes", report.nodes}, {"branchings", report.branchings}};
  nlohmann::json trajectory = nlohmann::json::array();
  for (const BoundPoint& p : report.trajectory) {
    nlohmann::json point = {{"phase", p.phase}, {"iteration", p.iteration}, {"lower", p.lower}};
    point["upper"] = std::isfinite(p.upper) ? nlohmann::json(p.upper) : nlohmann::json(nullptr);
    if (include_timing) point["seconds"] = p.seconds;
    trajectory.push_back(point);
  }
  j["trajectory"] = trajectory;
  if (include_timing) {
    j["timing"] = {{"wall_seconds", report.wall_seconds},
                   {"root_seconds", report.root_seconds},
                   {"evaluation_seconds", report.evaluation_seconds}};
  }
  return j;
}

void WriteBoundsCsv(const SolveReport& report, std::ostream& out) {
  const auto old = out.precision(17);
  out << "phase,iteration,lower,upper\n";
  for (const BoundPoint& p : report.trajectory) {
    out << p.phase << ',' << p.iteration << ',' << p.lower << ',';
    if (std::isfinite(p.upper)) out << p.upper;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace odmts
