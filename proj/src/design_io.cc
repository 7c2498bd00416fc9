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

#include "odmts/design_io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace odmts {

using nlohmann::json;

std::string ContentHash(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

DesignFile MakeDesignFile(const SolveReport& report, const Instance& instance, std::string instance_path,
                          std::string_view instance_bytes) {
  const std::vector<Arc> arcs = BuildArcs(instance);
  DesignFile f;
  f.instance_path = std::move(instance_path);
  f.instance_hash = ContentHash(instance_bytes);
  f.max_arcs = report.max_arcs;
  f.open_arcs = OpenArcsJson(instance, arcs, report.design);
  f.design_cost = report.evaluation.design_cost;
  f.routing_cost = report.evaluation.routing_cost;
  f.objective = report.evaluation.objective;
  f.solver.mode = SolveModeName(report.mode);
  f.solver.status = MipStatusName(report.status);
  f.solver.gap = report.gap;
  f.solver.wall_seconds = report.wall_seconds;
  return f;
}

std::string SerializeDesignFile(const DesignFile& f) {
  json j;
  j["instance"] = {{"path", f.instance_path}, {"hash", f.instance_hash}};
  j["max_arcs"] = f.max_arcs;
  j["open_arcs"] = f.open_arcs;
  j["objective"] = {{"design_cost", f.design_cost}, {"routing_cost", f.routing_cost}, {"total", f.objective}};
  j["solver"] = {{"mode", f.solver.mode},
                 {"status", f.solver.status},
                 {"gap", f.solver.gap},
                 {"wall_seconds", f.solver.wall_seconds},
                 {"threads", f.solver.threads},
                 // The solver draws no random numbers.
                 {"seed", nullptr}};
  return j.dump(2) + "\n";
}

DesignFile ParseDesignFile(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("design file: ") + e.what());
  }
  try {
    DesignFile f;
    f.instance_path = j.at("instance").at("path").get<std::string>();
    f.instance_hash = j.at("instance").at("hash").get<std::string>();
    f.max_arcs = j.at("max_arcs").get<int>();
    f.open_arcs = j.at("open_arcs");
    if (!f.open_arcs.is_array()) throw ParseError("design file: open_arcs is not an array");
    for (const json& a : f.open_arcs) {
      a.at("from").get<std::string>();
      a.at("to").get<std::string>();
      a.at("mode").get<std::string>();
      a.at("frequency").get<int>();
    }
    f.design_cost = j.at("objective").at("design_cost").get<double>();
    f.routing_cost = j.at("objective").at("routing_cost").get<double>();
    f.objective = j.at("objective").at("total").get<double>();
    const json& s = j.at("solver");
    f.solver.mode = s.at("mode").get<std::string>();
    f.solver.status = s.at("status").get<std::string>();
    f.solver.gap = s.at("gap").is_null() ? 0.0 : s.at("gap").get<double>();
    f.solver.wall_seconds = s.at("wall_seconds").get<double>();
    f.solver.threads = s.at("threads").get<int>();
    return f;
  } catch (const json::exception& e) {
    throw ParseError(std::string("design file: ") + e.what());
  }
}

DesignVector ResolveDesign(const DesignFile& file, const Instance& instance, std::span<const Arc> arcs,
                           std::string_view instance_bytes) {
  const std::string hash = ContentHash(instance_bytes);
  if (hash != file.instance_hash)
    throw ValidationError("design was solved for instance hash " + file.instance_hash + ", this file hashes to " +
                          hash);
  std::map<std::tuple<int, int, int, int>, int> by_key;
  for (const Arc& a : arcs)
    if (!a.fixed_open) by_key[{a.tail, a.head, static_cast<int>(a.mode), a.frequency}] = a.id;
  DesignVector z = ClosedDesign(arcs);
  for (const json& a : file.open_arcs) {
    const std::string from = a.at("from").get<std::string>(), to = a.at("to").get<std::string>();
    int tail, head;
    try {
      tail = instance.StopIndex(from);
      head = instance.StopIndex(to);
    } catch (const std::out_of_range&) {
      throw ValidationError("design references unknown stop in arc " + from + " -> " + to);
    }
    const Mode mode = ParseMode(a.at("mode").get<std::string>());
    const auto it = by_key.find({tail, head, static_cast<int>(mode), a.at("frequency").get<int>()});
    if (it == by_key.end())
      throw ValidationError("design arc " + from + " -> " + to + " is not a candidate of this instance");
    z[it->second] = 1.0;
  }
  return z;
}

json ExportGeoJson(const Instance& instance, std::span<const Arc> arcs, std::span<const double> z,
                   const DesignEvaluation& evaluation) {
  std::vector<double> flow(arcs.size(), 0.0);
  for (int r = 0; r < instance.num_trips(); ++r)
    for (int id : evaluation.routes[r]) flow[id] += instance.trips()[r].passengers;
  int low_frequency = 0;
  for (int f : instance.params().bus_frequencies)
    if (low_frequency == 0 || f < low_frequency) low_frequency = f;

  json features = json::array();
  for (const Arc& a : arcs) {
    const bool include = a.fixed_open ? flow[a.id] > 0.0 : z[a.id] >= 0.5;
    if (!include) continue;
    std::string tier, stroke;
    double width = 1.0;
    switch (a.mode) {
      case Mode::kShuttle:
        tier = "shuttle";
        stroke = "#555555";
        width = 1.0;
        break;
      case Mode::kRail:
        tier = "rail";
        stroke = "#1f3b73";
        width = 4.0;
        break;
      case Mode::kBus:
        tier = a.frequency <= low_frequency ? "bus_low_frequency" : "bus_high_frequency";
        stroke = a.frequency <= low_frequency ? "#f5a623" : "#6a1b9a";
        width = 2.5;
        break;
    }
    const Stop& s = instance.stops()[a.tail];
    const Stop& t = instance.stops()[a.head];
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "LineString"}, {"coordinates", {{s.lon, s.lat}, {t.lon, t.lat}}}};
    feature["properties"] = {{"arc", a.id},
                             {"from", s.id},
                             {"to", t.id},
                             {"mode", std::string(ModeName(a.mode))},
                             {"frequency", a.frequency},
                             {"beta", a.fixed_cost},
                             {"passenger_flow", flow[a.id]},
                             {"style", tier},
                             {"stroke", stroke},
                             {"stroke-width", width},
                             {"arrow", a.mode == Mode::kBus}};
    features.push_back(std::move(feature));
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

void WriteRoutesCsv(const Instance& instance, std::span<const Arc> arcs, const DesignEvaluation& evaluation,
                    std::ostream& out) {
  const auto old = out.precision(17);
  out << "trip,leg,arc,mode,cost\n";
  for (int r = 0; r < instance.num_trips(); ++r) {
    const Trip& trip = instance.trips()[r];
    const auto& route = evaluation.routes[r];
    for (size_t leg = 0; leg < route.size(); ++leg) {
      const Arc& a = arcs[route[leg]];
      out << trip.id << ',' << leg << ',' << a.id << ',' << ModeName(a.mode) << ','
          << TripArcCost(a, trip.passengers, instance.params()) << '\n';
    }
  }
  out.precision(old);
}

}  // namespace odmts
