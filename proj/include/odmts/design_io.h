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

#ifndef ODMTS_DESIGN_IO_H_
#define ODMTS_DESIGN_IO_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

#include "odmts/benders.h"
#include "odmts/instance.h"
#include "odmts/multigraph.h"

namespace odmts {

// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
std::string ContentHash(std::string_view bytes);

std::string ReadFile(const std::filesystem::path& path);
// Writes via a temporary file in the same directory and renames it.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

struct SolverMetadata {
  std::string mode = "exact";
  std::string status = "optimal";
  double gap = 0.0;
  double wall_seconds = 0.0;
  int threads = 1;
};

// A solved design. Open arcs are stored by (from, to, mode, frequency) so the
// file stays readable; fixed-open arcs are implied. max_arcs is the K the
// design was solved with and is applied again on evaluation.
struct DesignFile {
  std::string instance_path;
  std::string instance_hash;
  int max_arcs = 3;
  nlohmann::json open_arcs = nlohmann::json::array();
  double design_cost = 0.0;
  double routing_cost = 0.0;
  double objective = 0.0;
  SolverMetadata solver;
};

DesignFile MakeDesignFile(const SolveReport& report, const Instance& instance, std::string instance_path,
                          std::string_view instance_bytes);

std::string SerializeDesignFile(const DesignFile& file);
// Throws ParseError on malformed JSON or missing fields.
DesignFile ParseDesignFile(std::string_view json_text);

// Rebuilds the design vector against `arcs`. Throws ValidationError if the
// instance hash differs or an open arc is not in the arc set.
DesignVector ResolveDesign(const DesignFile& file, const Instance& instance, std::span<const Arc> arcs,
                           std::string_view instance_bytes);

// FeatureCollection with one LineString per open bus arc and per shuttle or
// rail arc that some route uses. Coordinates are [lon, lat] of the stops.
nlohmann::json ExportGeoJson(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z,
                             const DesignEvaluation& evaluation);

// "trip,leg,arc,mode,cost" with one row per leg of every route.
void WriteRoutesCsv(const Instance& instance, std::span<const Arc> arcs, const DesignEvaluation& evaluation,
                    std::ostream& out);

}  // namespace odmts

#endif  // ODMTS_DESIGN_IO_H_
