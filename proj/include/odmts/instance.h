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

#ifndef ODMTS_INSTANCE_H_
#define ODMTS_INSTANCE_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace odmts {

// Raised for malformed input files (bad JSON, wrong types, unknown keys).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when well-formed input violates an instance invariant. The message
// always names the offending field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct Stop {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  bool is_hub = false;
  std::vector<std::string> rail_line_ids;

  bool operator==(const Stop&) const = default;
};

struct RailLine {
  std::string id;
  std::vector<std::string> station_ids;

  bool operator==(const RailLine&) const = default;
};

struct Trip {
  std::string id;
  std::string origin_stop;
  std::string destination_stop;
  int passengers = 1;

  bool operator==(const Trip&) const = default;
};

// Units: miles, minutes, abstract currency. Frequencies count departures over
// the whole horizon, so 3 buses per hour over 240 minutes is 12.
struct CostParams {
  double alpha = 0.5;
  double shuttle_cost_per_mile = 5.0;
  double bus_cost_per_mile = 1.0;
  double transfer_time = 5.0;
  double horizon = 240.0;
  double speed = 30.0;  // mph
  std::vector<int> bus_frequencies = {12, 24};
  int rail_frequency = 24;
  // Maximum number of arcs on a passenger route (transfers + 1).
  int max_arcs = 3;
  // Multiply bus/rail traversal costs by the trip's passenger count, like the
  // shuttle cost. Off by default.
  bool scale_transit_cost_by_passengers = false;

  bool operator==(const CostParams&) const = default;
};

// Immutable, validated problem instance. Stops are addressed internally by
// their position ("vertex index") in stops().
class Instance {
 public:
  // Validates every invariant and throws ValidationError on the first
  // violation.
  static Instance Create(std::vector<Stop> stops, std::vector<RailLine> rail_lines,
                         std::vector<Trip> trips, CostParams params);

  const std::vector<Stop>& stops() const { return stops_; }
  const std::vector<RailLine>& rail_lines() const { return rail_lines_; }
  const std::vector<Trip>& trips() const { return trips_; }
  const CostParams& params() const { return params_; }

  int num_stops() const { return static_cast<int>(stops_.size()); }
  int num_trips() const { return static_cast<int>(trips_.size()); }

  // Vertex index of a stop id; throws std::out_of_range for unknown ids.
  int StopIndex(std::string_view id) const;
  int TripOrigin(int trip) const { return trip_origin_[trip]; }
  int TripDestination(int trip) const { return trip_destination_[trip]; }
  LatLon Location(int vertex) const { return {stops_[vertex].lat, stops_[vertex].lon}; }

  // Rail station vertex indices per line, in line order.
  const std::vector<std::vector<int>>& RailLineVertices() const { return rail_line_vertices_; }

  // Same data with different cost parameters (revalidated).
  Instance WithParams(CostParams params) const;

  bool operator==(const Instance& other) const {
    return stops_ == other.stops_ && rail_lines_ == other.rail_lines_ &&
           trips_ == other.trips_ && params_ == other.params_;
  }

 private:
  Instance() = default;

  std::vector<Stop> stops_;
  std::vector<RailLine> rail_lines_;
  std::vector<Trip> trips_;
  CostParams params_;

  std::unordered_map<std::string, int> stop_index_;
  std::vector<int> trip_origin_;
  std::vector<int> trip_destination_;
  std::vector<std::vector<int>> rail_line_vertices_;
};

void ValidateParams(const CostParams& params);

Instance ParseInstance(std::string_view json_text);
Instance LoadInstance(const std::filesystem::path& path);
// Deterministic JSON text; identical instances serialize to identical bytes.
std::string SerializeInstance(const Instance& instance);
void SaveInstance(const Instance& instance, const std::filesystem::path& path);

inline constexpr double kEarthRadiusMiles = 3958.8;

// Haversine distance in miles.
double GreatCircleDistance(LatLon p, LatLon q);

// Minutes needed to cover `miles` at params.speed.
double TravelTime(double miles, const CostParams& params);

struct BoundingBox {
  double min_lat = 33.65;
  double max_lat = 33.90;
  double min_lon = -84.50;
  double max_lon = -84.25;
};

struct GeneratorOptions {
  std::uint64_t seed = 1;
  int num_stops = 60;
  int num_hubs = 4;
  int num_rail_lines = 1;
  int num_trips = 120;
  BoundingBox box;
  CostParams params;
};

// Synthetic stand-in for proprietary stop/trip data. Deterministic in
// options (including the seed) on every platform: it uses its own
// uniform/geometric sampling on top of mt19937_64.
Instance GenerateSynthetic(const GeneratorOptions& options);

}  // namespace odmts

#endif  // ODMTS_INSTANCE_H_
