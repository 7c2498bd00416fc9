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

#include "odmts/instance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace odmts {
namespace {

using nlohmann::json;

std::string Quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

void Require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void ValidateParams(const CostParams& p) {
  Require(std::isfinite(p.alpha) && p.alpha >= 0.0 && p.alpha <= 1.0,
          "params.alpha out of [0,1]");
  Require(std::isfinite(p.shuttle_cost_per_mile) && p.shuttle_cost_per_mile > 0.0,
          "params.shuttle_cost_per_mile must be > 0");
  Require(std::isfinite(p.bus_cost_per_mile) && p.bus_cost_per_mile > 0.0,
          "params.bus_cost_per_mile must be > 0");
  Require(std::isfinite(p.transfer_time) && p.transfer_time > 0.0,
          "params.transfer_time must be > 0");
  Require(std::isfinite(p.horizon) && p.horizon > 0.0, "params.horizon must be > 0");
  Require(std::isfinite(p.speed) && p.speed > 0.0, "params.speed must be > 0");
  std::set<int> seen;
  for (int f : p.bus_frequencies) {
    Require(f > 0, "params.bus_frequencies entries must be > 0");
    Require(seen.insert(f).second, "params.bus_frequencies has duplicate " + std::to_string(f));
  }
  Require(p.rail_frequency > 0, "params.rail_frequency must be > 0");
  Require(p.max_arcs >= 2, "params.max_arcs must be >= 2");
}

Instance Instance::Create(std::vector<Stop> stops, std::vector<RailLine> rail_lines,
                          std::vector<Trip> trips, CostParams params) {
  ValidateParams(params);
  Instance inst;
  for (size_t v = 0; v < stops.size(); ++v) {
    const Stop& s = stops[v];
    const std::string where = "stops[" + std::to_string(v) + "]";
    Require(!s.id.empty(), where + ".id is empty");
    Require(std::isfinite(s.lat) && s.lat >= -90.0 && s.lat <= 90.0,
            where + " (id " + Quoted(s.id) + "): lat out of [-90,90]");
    Require(std::isfinite(s.lon) && s.lon >= -180.0 && s.lon <= 180.0,
            where + " (id " + Quoted(s.id) + "): lon out of [-180,180]");
    Require(inst.stop_index_.emplace(s.id, static_cast<int>(v)).second,
            where + ": duplicate stop id " + Quoted(s.id));
  }

  std::unordered_map<std::string, int> line_index;
  for (size_t l = 0; l < rail_lines.size(); ++l) {
    const RailLine& line = rail_lines[l];
    const std::string where = "rail_lines[" + std::to_string(l) + "] (id " + Quoted(line.id) + ")";
    Require(!line.id.empty(), "rail_lines[" + std::to_string(l) + "].id is empty");
    Require(line_index.emplace(line.id, static_cast<int>(l)).second,
            where + ": duplicate rail line id");
    Require(line.station_ids.size() >= 2, where + ": needs at least 2 stations");
    std::vector<int> vertices;
    std::unordered_set<std::string> seen;
    for (const std::string& station : line.station_ids) {
      auto it = inst.stop_index_.find(station);
      Require(it != inst.stop_index_.end(), where + ": unknown station " + Quoted(station));
      Require(seen.insert(station).second, where + ": repeated station " + Quoted(station));
      vertices.push_back(it->second);
    }
    inst.rail_line_vertices_.push_back(std::move(vertices));
  }

  // Stop membership lists and line station lists must agree.
  for (size_t v = 0; v < stops.size(); ++v) {
    const Stop& s = stops[v];
    std::unordered_set<std::string> seen;
    for (const std::string& lid : s.rail_line_ids) {
      const std::string where = "stops[" + std::to_string(v) + "] (id " + Quoted(s.id) + ").rail_lines";
      Require(seen.insert(lid).second, where + ": repeated line " + Quoted(lid));
      auto it = line_index.find(lid);
      Require(it != line_index.end(), where + ": unknown rail line " + Quoted(lid));
      const auto& members = inst.rail_line_vertices_[it->second];
      Require(std::find(members.begin(), members.end(), static_cast<int>(v)) != members.end(),
              where + ": line " + Quoted(lid) + " does not list this stop");
    }
  }
  for (size_t l = 0; l < rail_lines.size(); ++l) {
    for (int v : inst.rail_line_vertices_[l]) {
      const auto& ids = stops[v].rail_line_ids;
      Require(std::find(ids.begin(), ids.end(), rail_lines[l].id) != ids.end(),
              "rail_lines[" + std::to_string(l) + "] (id " + Quoted(rail_lines[l].id) +
                  "): station " + Quoted(stops[v].id) + " does not list the line");
    }
  }

  std::unordered_set<std::string> trip_ids;
  for (size_t r = 0; r < trips.size(); ++r) {
    const Trip& t = trips[r];
    const std::string where = "trips[" + std::to_string(r) + "] (id " + Quoted(t.id) + ")";
    Require(!t.id.empty(), "trips[" + std::to_string(r) + "].id is empty");
    Require(trip_ids.insert(t.id).second, where + ": duplicate trip id");
    auto o = inst.stop_index_.find(t.origin_stop);
    Require(o != inst.stop_index_.end(), where + ": unknown origin stop " + Quoted(t.origin_stop));
    auto d = inst.stop_index_.find(t.destination_stop);
    Require(d != inst.stop_index_.end(),
            where + ": unknown destination stop " + Quoted(t.destination_stop));
    Require(o->second != d->second, where + ": origin equals destination");
    Require(t.passengers >= 1, where + ": passengers must be >= 1");
    inst.trip_origin_.push_back(o->second);
    inst.trip_destination_.push_back(d->second);
  }

  inst.stops_ = std::move(stops);
  inst.rail_lines_ = std::move(rail_lines);
  inst.trips_ = std::move(trips);
  inst.params_ = std::move(params);
  return inst;
}

int Instance::StopIndex(std::string_view id) const {
  auto it = stop_index_.find(std::string(id));
  if (it == stop_index_.end()) throw std::out_of_range("unknown stop id " + Quoted(id));
  return it->second;
}

Instance Instance::WithParams(CostParams params) const {
  return Create(stops_, rail_lines_, trips_, std::move(params));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void CheckKeys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || item.key() == key;
    if (!ok) throw ParseError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
T Field(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

template <typename T>
void OptionalField(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

const json& ArrayField(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  const json& value = obj.at(key);
  if (!value.is_array()) throw ParseError(std::string(key) + ": expected an array");
  return value;
}

CostParams ParseParams(const json& j) {
  CostParams p;
  const std::string where = "params";
  CheckKeys(j, where,
            {"alpha", "shuttle_cost_per_mile", "bus_cost_per_mile", "transfer_time", "horizon",
             "speed", "bus_frequencies", "rail_frequency", "max_arcs",
             "scale_transit_cost_by_passengers"});
  OptionalField(j, where, "alpha", p.alpha);
  OptionalField(j, where, "shuttle_cost_per_mile", p.shuttle_cost_per_mile);
  OptionalField(j, where, "bus_cost_per_mile", p.bus_cost_per_mile);
  OptionalField(j, where, "transfer_time", p.transfer_time);
  OptionalField(j, where, "horizon", p.horizon);
  OptionalField(j, where, "speed", p.speed);
  OptionalField(j, where, "bus_frequencies", p.bus_frequencies);
  OptionalField(j, where, "rail_frequency", p.rail_frequency);
  OptionalField(j, where, "max_arcs", p.max_arcs);
  OptionalField(j, where, "scale_transit_cost_by_passengers", p.scale_transit_cost_by_passengers);
  return p;
}

json ParamsToJson(const CostParams& p) {
  return json{{"alpha", p.alpha},
              {"shuttle_cost_per_mile", p.shuttle_cost_per_mile},
              {"bus_cost_per_mile", p.bus_cost_per_mile},
              {"transfer_time", p.transfer_time},
              {"horizon", p.horizon},
              {"speed", p.speed},
              {"bus_frequencies", p.bus_frequencies},
              {"rail_frequency", p.rail_frequency},
              {"max_arcs", p.max_arcs},
              {"scale_transit_cost_by_passengers", p.scale_transit_cost_by_passengers}};
}

}  // namespace

Instance ParseInstance(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  CheckKeys(root, "instance", {"stops", "rail_lines", "trips", "params"});

  std::vector<Stop> stops;
  const json& jstops = ArrayField(root, "stops");
  for (size_t i = 0; i < jstops.size(); ++i) {
    const std::string where = "stops[" + std::to_string(i) + "]";
    const json& js = jstops[i];
    CheckKeys(js, where, {"id", "lat", "lon", "is_hub", "rail_lines"});
    Stop s;
    s.id = Field<std::string>(js, where, "id");
    s.lat = Field<double>(js, where, "lat");
    s.lon = Field<double>(js, where, "lon");
    OptionalField(js, where, "is_hub", s.is_hub);
    OptionalField(js, where, "rail_lines", s.rail_line_ids);
    stops.push_back(std::move(s));
  }

  std::vector<RailLine> lines;
  if (root.contains("rail_lines")) {
    const json& jlines = ArrayField(root, "rail_lines");
    for (size_t i = 0; i < jlines.size(); ++i) {
      const std::string where = "rail_lines[" + std::to_string(i) + "]";
      CheckKeys(jlines[i], where, {"id", "stations"});
      RailLine line;
      line.id = Field<std::string>(jlines[i], where, "id");
      line.station_ids = Field<std::vector<std::string>>(jlines[i], where, "stations");
      lines.push_back(std::move(line));
    }
  }

  std::vector<Trip> trips;
  const json& jtrips = ArrayField(root, "trips");
  for (size_t i = 0; i < jtrips.size(); ++i) {
    const std::string where = "trips[" + std::to_string(i) + "]";
    const json& jt = jtrips[i];
    CheckKeys(jt, where, {"id", "origin", "destination", "passengers"});
    Trip t;
    t.id = Field<std::string>(jt, where, "id");
    t.origin_stop = Field<std::string>(jt, where, "origin");
    t.destination_stop = Field<std::string>(jt, where, "destination");
    t.passengers = Field<int>(jt, where, "passengers");
    trips.push_back(std::move(t));
  }

  CostParams params;
  if (root.contains("params")) params = ParseParams(root.at("params"));
  return Instance::Create(std::move(stops), std::move(lines), std::move(trips), std::move(params));
}

Instance LoadInstance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseInstance(buffer.str());
}

std::string SerializeInstance(const Instance& instance) {
  json root;
  json stops = json::array();
  for (const Stop& s : instance.stops()) {
    stops.push_back(json{{"id", s.id}, {"lat", s.lat}, {"lon", s.lon}, {"is_hub", s.is_hub},
                         {"rail_lines", s.rail_line_ids}});
  }
  json lines = json::array();
  for (const RailLine& l : instance.rail_lines()) {
    lines.push_back(json{{"id", l.id}, {"stations", l.station_ids}});
  }
  json trips = json::array();
  for (const Trip& t : instance.trips()) {
    trips.push_back(json{{"id", t.id},
                         {"origin", t.origin_stop},
                         {"destination", t.destination_stop},
                         {"passengers", t.passengers}});
  }
  root["stops"] = std::move(stops);
  root["rail_lines"] = std::move(lines);
  root["trips"] = std::move(trips);
  root["params"] = ParamsToJson(instance.params());
  return root.dump(2) + "\n";
}

void SaveInstance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << SerializeInstance(instance);
}

// ---------------------------------------------------------------------------
// Geography

double GreatCircleDistance(LatLon p, LatLon q) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (q.lat - p.lat) * kDeg;
  const double dlon = (q.lon - p.lon) * kDeg;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(p.lat * kDeg) * std::cos(q.lat * kDeg) * t * t;
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(h)));
}

double TravelTime(double miles, const CostParams& params) { return miles / params.speed * 60.0; }

}  // namespace odmts
