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

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "odmts/benders.h"
#include "test_util.h"

namespace odmts {
namespace {

bool Near(double a, double b, double rel = 1e-6) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

TEST(StabilizedPointTest, Examples) {
  std::vector<Arc> arcs(3);
  arcs[0].fixed_open = false;
  arcs[1].fixed_open = false;
  arcs[2].fixed_open = true;
  const std::vector<double> zbar = {1.0, 0.0, 1.0};
  const DesignVector z = StabilizedPoint(zbar, arcs, 0.25, 1e-5);
  EXPECT_DOUBLE_EQ(z[0], 0.9999925);
  EXPECT_DOUBLE_EQ(z[1], 2.5e-6);
  EXPECT_EQ(z[2], 1.0);

  const DesignVector tiny = StabilizedPoint(zbar, arcs, 0.25, 1e-15);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(tiny[a], zbar[a], 1e-14);

  const std::vector<double> core = {0.25, 0.25, 1.0};
  EXPECT_EQ(StabilizedPoint(core, arcs, 0.25, 1e-5), DesignVector(core.begin(), core.end()));
}

TEST(BendersConfigTest, Validation) {
  BendersConfig c;
  EXPECT_NO_THROW(ValidateConfig(c));
  c.epsilon = 0.5;
  EXPECT_THROW(ValidateConfig(c), std::invalid_argument);
  c.epsilon = 0.0;
  EXPECT_THROW(ValidateConfig(c), std::invalid_argument);
  c = {};
  c.core_value = 1.5;
  EXPECT_THROW(ValidateConfig(c), std::invalid_argument);
  c = {};
  c.threads = 0;
  EXPECT_THROW(ValidateConfig(c), std::invalid_argument);
  EXPECT_EQ(ParseSolveMode("relaxed"), SolveMode::kRelaxed);
  EXPECT_THROW(ParseSolveMode("fast"), std::invalid_argument);
}

// Origin near h1, destination near h2, hubs far apart: a bus pair between
// the hubs pays off once enough passengers ride.
Instance Corridor(int passengers, double alpha = 0.5) {
  CostParams p;
  p.alpha = alpha;
  p.bus_frequencies = {12};
  std::vector<Stop> stops = {{"o", 33.700, -84.500, false, {}},
                             {"h1", 33.705, -84.495, true, {}},
                             {"h2", 33.895, -84.255, true, {}},
                             {"d", 33.900, -84.250, false, {}}};
  return Instance::Create(stops, {}, {{"t", "o", "d", passengers}}, p);
}

TEST(BendersTest, ZeroTripsConvergeImmediately) {
  CostParams p;
  std::vector<Stop> stops = {{"a", 33.7, -84.4, true, {}}, {"b", 33.8, -84.3, true, {}}};
  const Instance inst = Instance::Create(stops, {}, {}, p);
  const SolveReport report = RunExact(inst, {});
  EXPECT_EQ(report.root.iterations, 1);
  EXPECT_TRUE(report.root.converged);
  EXPECT_EQ(report.root.bound, 0.0);
  EXPECT_EQ(report.evaluation.objective, 0.0);
  EXPECT_TRUE(report.optimal());
}

TEST(BendersTest, OpensExactlyTheProfitablePair) {
  const Instance few = Corridor(1);
  const Instance many = Corridor(40);
  const std::vector<Arc> arcs = BuildArcs(many);
  const std::vector<int> decision = DecisionArcs(arcs);
  ASSERT_EQ(decision.size(), 2u);

  const SolveReport closed = RunExact(few, {});
  EXPECT_EQ(closed.evaluation.design_cost, 0.0);
  const auto oracle_few = testing::EnumerateOptimum(few, arcs, 3);
  EXPECT_TRUE(Near(closed.evaluation.objective, oracle_few.objective));

  const SolveReport open = RunExact(many, {});
  ASSERT_TRUE(open.optimal());
  for (int a : decision) EXPECT_EQ(open.design[a], 1.0);
  const auto oracle_many = testing::EnumerateOptimum(many, arcs, 3);
  EXPECT_TRUE(Near(open.evaluation.objective, oracle_many.objective));
  EXPECT_EQ(open.design, oracle_many.design);
  // The route uses the bus.
  bool uses_bus = false;
  for (int id : open.evaluation.routes[0]) uses_bus |= arcs[id].mode == Mode::kBus;
  EXPECT_TRUE(uses_bus);
}

TEST(BendersTest, AlphaOneMakesDesignFree) {
  const Instance inst = testing::SmallRandomInstance(11).WithParams([] {
    CostParams p = testing::SmallRandomInstance(11).params();
    p.alpha = 1.0;
    return p;
  }());
  const std::vector<Arc> arcs = BuildArcs(inst);
  for (int a : DecisionArcs(arcs)) EXPECT_EQ(arcs[a].fixed_cost, 0.0);
  const SolveReport report = RunExact(inst, {});
  EXPECT_EQ(report.evaluation.design_cost, 0.0);
  const auto oracle = testing::EnumerateOptimum(inst, arcs, inst.params().max_arcs);
  EXPECT_TRUE(Near(report.evaluation.objective, oracle.objective));
  EXPECT_TRUE(Near(report.evaluation.objective, report.evaluation.routing_cost, 0.0));
}

TEST(BendersTest, ExactMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    const std::vector<Arc> arcs = BuildArcs(inst);
    const auto oracle = testing::EnumerateOptimum(inst, arcs, inst.params().max_arcs);
    const SolveReport report = RunExact(inst, {});
    ASSERT_TRUE(report.optimal()) << seed;
    EXPECT_TRUE(Near(report.evaluation.objective, oracle.objective)) << "seed " << seed << ": "
                                                                     << report.evaluation.objective << " vs "
                                                                     << oracle.objective;
    EXPECT_LE(report.root.bound, report.evaluation.objective + 1e-6 * std::abs(report.evaluation.objective));
    for (size_t i = 1; i < report.root.bounds.size(); ++i)
      EXPECT_GE(report.root.bounds[i], report.root.bounds[i - 1] - 1e-9 * std::abs(report.root.bounds[i]));
  }
}

TEST(BendersTest, RelaxedSandwich) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    const SolveReport exact = RunExact(inst, {});
    const SolveReport relaxed = RunRelaxed(inst, {});
    ASSERT_TRUE(relaxed.optimal());
    const double tol = 1e-6 * std::abs(exact.evaluation.objective);
    EXPECT_LE(relaxed.model_objective, exact.evaluation.objective + tol) << seed;
    EXPECT_GE(relaxed.evaluation.objective, exact.evaluation.objective - tol) << seed;
  }
}

TEST(BendersTest, DisaggregatedAgrees) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    BendersConfig config;
    const SolveReport single = RunExact(inst, config);
    config.disaggregate = true;
    const SolveReport multi = RunExact(inst, config);
    EXPECT_TRUE(Near(single.evaluation.objective, multi.evaluation.objective)) << seed;
    EXPECT_GE(multi.root.bound, single.root.bound - 1e-6 * std::abs(single.root.bound)) << seed;
  }
}

TEST(BendersTest, RecordedCutsAreValidAndTight) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    BendersConfig config;
    config.record_cuts = true;
    const SolveReport report = RunExact(inst, config);
    ASSERT_EQ(static_cast<int>(report.cuts.size()), report.root.cuts + report.mip_cuts);
    const std::vector<Arc> arcs = BuildArcs(inst);
    const Subproblem sub(inst, arcs, inst.params().max_arcs);
    const auto designs = testing::EnumerateFeasibleDesigns(arcs, inst.num_stops());
    for (const RecordedCut& c : report.cuts) {
      for (int k = 0; k < 10; ++k) EXPECT_TRUE(CheckCutValid(c.cut, designs[rng() % designs.size()], sub));
      if (c.phase == "mip") {
        const double phi = testing::EnumeratedRoutingCost(inst, arcs, c.point, inst.params().max_arcs);
        EXPECT_NEAR(c.cut.Rhs(c.point), phi, 1e-6);
      }
    }
  }
}

TEST(EvaluateDesignTest, ClosedDesignIsDirectShuttles) {
  const Instance inst = testing::SmallRandomInstance(3);
  const std::vector<Arc> arcs = BuildArcs(inst);
  const DesignEvaluation e = EvaluateDesign(inst, ClosedDesign(arcs));
  const CostParams& p = inst.params();
  double expected = 0.0;
  for (int r = 0; r < inst.num_trips(); ++r) {
    const double d = GreatCircleDistance(inst.Location(inst.TripOrigin(r)), inst.Location(inst.TripDestination(r)));
    const double t = d / p.speed * 60.0;
    expected += inst.trips()[r].passengers * ((1 - p.alpha) * p.shuttle_cost_per_mile * d + p.alpha * t);
  }
  EXPECT_NEAR(e.objective, expected, 1e-9 * expected);
  EXPECT_EQ(e.design_cost, 0.0);
}

TEST(EvaluateDesignTest, RejectsInfeasibleDesigns) {
  const Instance inst = Corridor(1);
  const std::vector<Arc> arcs = BuildArcs(inst);
  const std::vector<int> decision = DecisionArcs(arcs);
  DesignVector z = ClosedDesign(arcs);
  z[decision[0]] = 1.0;
  EXPECT_THROW(EvaluateDesign(inst, z), std::invalid_argument);
  z[decision[0]] = 0.5;
  z[decision[1]] = 0.5;
  EXPECT_THROW(EvaluateDesign(inst, z), std::invalid_argument);
  z = ClosedDesign(arcs);
  z[0] = 0.0;
  EXPECT_THROW(EvaluateDesign(inst, z), std::invalid_argument);
  z.pop_back();
  EXPECT_THROW(EvaluateDesign(inst, z), std::invalid_argument);

  const Instance two = Instance::Create(inst.stops(), {}, inst.trips(), [&] {
    CostParams p = inst.params();
    p.bus_frequencies = {12, 24};
    return p;
  }());
  const std::vector<Arc> arcs2 = BuildArcs(two);
  DesignVector all = ClosedDesign(arcs2);
  for (int a : DecisionArcs(arcs2)) all[a] = 1.0;
  EXPECT_THROW(EvaluateDesign(two, all), std::invalid_argument);
}

TEST(EvaluateDesignTest, MonotoneInBudget) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    const SolveReport report = RunExact(inst, {});
    CostParams p2 = inst.params();
    p2.max_arcs = 2;
    CostParams p3 = inst.params();
    p3.max_arcs = 3;
    const DesignEvaluation e2 = EvaluateDesign(inst.WithParams(p2), report.design);
    const DesignEvaluation e3 = EvaluateDesign(inst.WithParams(p3), report.design);
    EXPECT_LE(e3.objective, e2.objective) << seed;
    for (const auto& route : e2.routes) EXPECT_LE(route.size(), 2u);
  }
}

TEST(BendersTest, EvaluationMatchesReport) {
  const Instance inst = testing::SmallRandomInstance(21);
  const SolveReport report = RunExact(inst, {});
  const DesignEvaluation e = EvaluateDesign(inst, report.design);
  EXPECT_EQ(e.objective, report.evaluation.objective);
  EXPECT_EQ(e.objective, report.model_objective);
}

TEST(BendersTest, TrajectoryMonotone) {
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    const SolveReport report = RunExact(inst, {});
    ASSERT_FALSE(report.trajectory.empty());
    EXPECT_EQ(report.trajectory.back().phase, "final");
    for (size_t i = 1; i < report.trajectory.size(); ++i) {
      EXPECT_GE(report.trajectory[i].lower, report.trajectory[i - 1].lower);
      EXPECT_LE(report.trajectory[i].upper, report.trajectory[i - 1].upper);
    }
    EXPECT_LE(report.gap, 1e-6);
    std::ostringstream csv;
    WriteBoundsCsv(report, csv);
    EXPECT_EQ(csv.str().substr(0, 27), "phase,iteration,lower,upper");
  }
}

TEST(BendersTest, DeterministicAcrossRunsAndThreads) {
  const Instance inst = GenerateSynthetic([] {
    GeneratorOptions o;
    o.seed = 9;
    o.num_stops = 40;
    o.num_hubs = 4;
    o.num_trips = 60;
    return o;
  }());
  BendersConfig config;
  const std::string a = ReportToJson(RunExact(inst, config), inst, false).dump();
  const std::string b = ReportToJson(RunExact(inst, config), inst, false).dump();
  EXPECT_EQ(a, b);
  config.threads = 3;
  const std::string c = ReportToJson(RunExact(inst, config), inst, false).dump();
  EXPECT_EQ(a, c);
  const nlohmann::json timed = ReportToJson(RunExact(inst, config), inst, true);
  EXPECT_TRUE(timed.contains("timing"));
}

TEST(BendersTest, NodeLimitKeepsFeasibleDesign) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = testing::SmallRandomInstance(seed);
    BendersConfig config;
    config.node_limit = 1;
    config.root_iteration_cap = 1;
    const SolveReport report = RunExact(inst, config);
    if (report.optimal()) continue;
    EXPECT_EQ(report.status, MipStatus::kNodeLimit);
    EXPECT_TRUE(report.hit_resource_cap());
    const std::vector<Arc> arcs = BuildArcs(inst);
    EXPECT_NO_THROW(ValidateDesign(arcs, inst.num_stops(), report.design));
    EXPECT_LE(report.lower_bound, report.evaluation.objective + 1e-9);
    return;
  }
  GTEST_SKIP() << "every instance solved at the root";
}

}  // namespace
}  // namespace odmts
