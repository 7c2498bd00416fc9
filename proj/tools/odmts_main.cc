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

// odmts: generate instances, solve them, evaluate designs, export maps.
//
// Exit codes: 0 success, 1 input error, 2 solver stopped at a node or time
// limit (the best design found is still written), 3 internal failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "odmts/benders.h"
#include "odmts/design_io.h"
#include "odmts/instance.h"
#include "odmts/multigraph.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitResourceCap = 2;
constexpr int kExitInternal = 3;

// Input problems the user can fix, as opposed to solver failures.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  std::string bytes;
  odmts::Instance instance;
};

Loaded Load(const std::string& path) {
  std::string bytes = odmts::ReadFile(path);
  odmts::Instance instance = odmts::ParseInstance(bytes);
  return {std::move(bytes), std::move(instance)};
}

odmts::Instance WithMaxArcs(const odmts::Instance& instance, int max_arcs) {
  odmts::CostParams p = instance.params();
  p.max_arcs = max_arcs;
  return instance.WithParams(p);
}

void WriteText(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    odmts::WriteFile(path, text);
  }
}

struct GenerateArgs {
  odmts::GeneratorOptions options;
  int max_arcs = 3;
  std::vector<int> frequencies = {12, 24};
  std::string output = "-";
};

int Generate(const GenerateArgs& args) {
  odmts::GeneratorOptions options = args.options;
  options.params.max_arcs = args.max_arcs;
  options.params.bus_frequencies = args.frequencies;
  WriteText(args.output, odmts::SerializeInstance(odmts::GenerateSynthetic(options)));
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string mode = "exact";
  int max_arcs = -1;  // -1 keeps the instance's value
  double gap = 1e-6;
  int threads = 1;
  std::string output = "design.json";
  std::string report;
  std::string bounds;
  std::string routes;
  int node_limit = 1'000'000;
  double time_limit = 0.0;
  int root_cap = 500;
  bool disaggregate = false;
  bool timing = false;
  bool quiet = false;
};

int Solve(const SolveArgs& args) {
  const Loaded in = Load(args.instance);
  const odmts::Instance instance = args.max_arcs != -1 ? WithMaxArcs(in.instance, args.max_arcs) : in.instance;
  odmts::BendersConfig config;
  try {
    config.mode = odmts::ParseSolveMode(args.mode);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  config.relative_gap = args.gap;
  config.threads = args.threads;
  config.node_limit = args.node_limit;
  config.time_limit_seconds = args.time_limit;
  config.root_iteration_cap = args.root_cap;
  config.disaggregate = args.disaggregate;
  config.progress = args.quiet ? nullptr : &std::cerr;
  try {
    odmts::ValidateConfig(config);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  const odmts::SolveReport report = odmts::Solve(instance, config);
  odmts::DesignFile design = odmts::MakeDesignFile(report, instance, args.instance, in.bytes);
  design.solver.threads = args.threads;
  WriteText(args.output, odmts::SerializeDesignFile(design));
  if (!args.report.empty()) WriteText(args.report, odmts::ReportToJson(report, instance, args.timing).dump(2) + "\n");
  if (!args.bounds.empty()) {
    std::ostringstream csv;
    odmts::WriteBoundsCsv(report, csv);
    WriteText(args.bounds, csv.str());
  }
  if (!args.routes.empty()) {
    std::ostringstream csv;
    odmts::WriteRoutesCsv(instance, odmts::BuildArcs(instance), report.evaluation, csv);
    WriteText(args.routes, csv.str());
  }
  if (report.hit_resource_cap()) {
    std::cerr << "stopped at " << odmts::MipStatusName(report.status) << " with gap " << report.gap
              << "; best design written to " << args.output << "\n";
    return kExitResourceCap;
  }
  return kExitOk;
}

struct DesignArgs {
  std::string instance;
  std::string design;
  std::string output = "-";
  std::string routes;
  int threads = 1;
};

struct Resolved {
  odmts::Instance instance;
  std::vector<odmts::Arc> arcs;
  odmts::DesignVector z;
  odmts::DesignFile file;
};

Resolved ResolveInputs(const DesignArgs& args) {
  const Loaded in = Load(args.instance);
  odmts::DesignFile file = odmts::ParseDesignFile(odmts::ReadFile(args.design));
  odmts::Instance instance = WithMaxArcs(in.instance, file.max_arcs);
  std::vector<odmts::Arc> arcs = odmts::BuildArcs(instance);
  odmts::DesignVector z = odmts::ResolveDesign(file, instance, arcs, in.bytes);
  try {
    odmts::ValidateDesign(arcs, instance.num_stops(), z);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return {std::move(instance), std::move(arcs), std::move(z), std::move(file)};
}

int Evaluate(const DesignArgs& args) {
  const Resolved r = ResolveInputs(args);
  const odmts::DesignEvaluation e = odmts::EvaluateDesign(r.instance, r.z, args.threads);
  nlohmann::json out = {{"design_cost", e.design_cost},
                        {"routing_cost", e.routing_cost},
                        {"objective", e.objective},
                        {"recorded_objective", r.file.objective},
                        {"max_arcs", r.file.max_arcs}};
  WriteText(args.output, out.dump(2) + "\n");
  if (!args.routes.empty()) {
    std::ostringstream csv;
    odmts::WriteRoutesCsv(r.instance, r.arcs, e, csv);
    WriteText(args.routes, csv.str());
  }
  return kExitOk;
}

int ExportGeoJson(const DesignArgs& args) {
  const Resolved r = ResolveInputs(args);
  const odmts::DesignEvaluation e = odmts::EvaluateDesign(r.instance, r.z, args.threads);
  WriteText(args.output, odmts::ExportGeoJson(r.instance, r.arcs, r.z, e).dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-demand multimodal transit network design"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic instance");
  generate->add_option("--seed", gen.options.seed, "Random seed")->capture_default_str();
  generate->add_option("--stops", gen.options.num_stops, "Number of stops")->capture_default_str();
  generate->add_option("--hubs", gen.options.num_hubs, "Number of hubs")->capture_default_str();
  generate->add_option("--rail-lines", gen.options.num_rail_lines, "Number of rail lines")->capture_default_str();
  generate->add_option("--trips", gen.options.num_trips, "Number of trips")->capture_default_str();
  generate->add_option("--k", gen.max_arcs, "Maximum arcs per route")->capture_default_str();
  generate->add_option("--frequencies", gen.frequencies, "Bus frequencies per horizon")->capture_default_str();
  generate->add_option("-o,--output", gen.output, "Output file, - for stdout")->capture_default_str();

  SolveArgs sol;
  CLI::App* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("instance", sol.instance, "Instance JSON")->required();
  solve->add_option("--mode", sol.mode, "exact or relaxed")->capture_default_str();
  solve->add_option("--k", sol.max_arcs, "Maximum arcs per route (default: from the instance)");
  solve->add_option("--gap", sol.gap, "Relative optimality gap")->capture_default_str();
  solve->add_option("--threads", sol.threads, "Worker threads for trip solves")->capture_default_str();
  solve->add_option("-o,--output", sol.output, "Design file")->capture_default_str();
  solve->add_option("--report", sol.report, "Full solve report JSON");
  solve->add_option("--bounds", sol.bounds, "Bound trajectory CSV");
  solve->add_option("--routes", sol.routes, "Route CSV");
  solve->add_option("--node-limit", sol.node_limit, "Branch-and-bound node limit")->capture_default_str();
  solve->add_option("--time-limit", sol.time_limit, "Seconds, 0 for none")->capture_default_str();
  solve->add_option("--root-cap", sol.root_cap, "Root cut rounds")->capture_default_str();
  solve->add_flag("--disaggregate", sol.disaggregate, "One theta per trip");
  solve->add_flag("--timing", sol.timing, "Include timings in the report");
  solve->add_flag("-q,--quiet", sol.quiet, "No progress log");

  DesignArgs eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a design with exact routing");
  evaluate->add_option("instance", eval.instance, "Instance JSON")->required();
  evaluate->add_option("design", eval.design, "Design JSON")->required();
  evaluate->add_option("-o,--output", eval.output, "Summary JSON, - for stdout")->capture_default_str();
  evaluate->add_option("--routes", eval.routes, "Route CSV");
  evaluate->add_option("--threads", eval.threads, "Worker threads")->capture_default_str();

  DesignArgs geo;
  CLI::App* geojson = app.add_subcommand("export-geojson", "Write the design as GeoJSON");
  geojson->add_option("instance", geo.instance, "Instance JSON")->required();
  geojson->add_option("design", geo.design, "Design JSON")->required();
  geojson->add_option("-o,--output", geo.output, "GeoJSON file, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*generate) return Generate(gen);
    if (*solve) return Solve(sol);
    if (*evaluate) return Evaluate(eval);
    if (*geojson) return ExportGeoJson(geo);
  } catch (const odmts::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const odmts::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}
