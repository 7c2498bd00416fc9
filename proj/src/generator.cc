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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "odmts/instance.h"

namespace odmts {
namespace {

// Distribution objects in <random> are implementation-defined; these are not.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  int Index(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  // 1 + Geometric(success), truncated at `cap`.
  int SmallGeometric(double success, int cap) {
    int k = 1;
    while (k < cap && Uniform() >= success) ++k;
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

double Distance(const std::vector<Stop>& stops, int a, int b) {
  return GreatCircleDistance({stops[a].lat, stops[a].lon}, {stops[b].lat, stops[b].lon});
}

int NearestStop(const std::vector<Stop>& stops, LatLon p, const std::vector<bool>& excluded) {
  int best = -1;
  double best_d = 0.0;
  for (int v = 0; v < static_cast<int>(stops.size()); ++v) {
    if (excluded[v]) continue;
    double d = GreatCircleDistance(p, {stops[v].lat, stops[v].lon});
    if (best < 0 || d < best_d) {
      best = v;
      best_d = d;
    }
  }
  return best;
}

// Farthest-point seeding followed by a few Lloyd rounds; centroids snap to
// distinct stops.
std::vector<int> SpreadHubs(const std::vector<Stop>& stops, int num_hubs, const BoundingBox& box) {
  const int n = static_cast<int>(stops.size());
  std::vector<LatLon> centers;
  std::vector<bool> none(n, false);
  int first = NearestStop(stops, {(box.min_lat + box.max_lat) / 2, (box.min_lon + box.max_lon) / 2}, none);
  centers.push_back({stops[first].lat, stops[first].lon});
  while (static_cast<int>(centers.size()) < num_hubs) {
    int far = 0;
    double far_d = -1.0;
    for (int v = 0; v < n; ++v) {
      double d = 1e300;
      for (const LatLon& c : centers) d = std::min(d, GreatCircleDistance(c, {stops[v].lat, stops[v].lon}));
      if (d > far_d) {
        far_d = d;
        far = v;
      }
    }
    centers.push_back({stops[far].lat, stops[far].lon});
  }
  for (int round = 0; round < 10; ++round) {
    std::vector<double> sum_lat(num_hubs, 0.0), sum_lon(num_hubs, 0.0);
    std::vector<int> count(num_hubs, 0);
    for (int v = 0; v < n; ++v) {
      int best = 0;
      double best_d = 1e300;
      for (int c = 0; c < num_hubs; ++c) {
        double d = GreatCircleDistance(centers[c], {stops[v].lat, stops[v].lon});
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      sum_lat[best] += stops[v].lat;
      sum_lon[best] += stops[v].lon;
      ++count[best];
    }
    for (int c = 0; c < num_hubs; ++c) {
      if (count[c] > 0) centers[c] = {sum_lat[c] / count[c], sum_lon[c] / count[c]};
    }
  }
  std::vector<bool> taken(n, false);
  std::vector<int> hubs;
  for (const LatLon& c : centers) {
    int v = NearestStop(stops, c, taken);
    taken[v] = true;
    hubs.push_back(v);
  }
  return hubs;
}

}  // namespace

Instance GenerateSynthetic(const GeneratorOptions& opt) {
  if (opt.num_stops < 1) throw ValidationError("generator: num_stops must be >= 1");
  if (opt.num_hubs < 0 || opt.num_hubs > opt.num_stops)
    throw ValidationError("generator: num_hubs must be in [0, num_stops]");
  if (opt.num_trips < 1) throw ValidationError("generator: num_trips must be >= 1");
  if (opt.num_rail_lines < 0) throw ValidationError("generator: num_rail_lines must be >= 0");
  if (opt.num_rail_lines > 0 && opt.num_stops < 2)
    throw ValidationError("generator: rail lines need at least 2 stops");
  const long long max_pairs = static_cast<long long>(opt.num_stops) * (opt.num_stops - 1);
  if (opt.num_trips > max_pairs)
    throw ValidationError("generator: more trips than distinct origin-destination pairs");
  if (!(opt.box.min_lat < opt.box.max_lat) || !(opt.box.min_lon < opt.box.max_lon))
    throw ValidationError("generator: empty bounding box");
  ValidateParams(opt.params);

  Sampler rng(opt.seed);
  const int n = opt.num_stops;

  std::vector<Stop> stops(n);
  for (int v = 0; v < n; ++v) {
    stops[v].id = "s" + std::to_string(v);
    stops[v].lat = rng.Uniform(opt.box.min_lat, opt.box.max_lat);
    stops[v].lon = rng.Uniform(opt.box.min_lon, opt.box.max_lon);
  }

  if (opt.num_hubs > 0) {
    for (int h : SpreadHubs(stops, opt.num_hubs, opt.box)) stops[h].is_hub = true;
  }

  // Rail lines: stations sorted along a random heading, preferring stops not
  // already on another line.
  std::vector<RailLine> lines;
  const int stations_per_line = std::clamp(n / 8, 2, 10);
  std::vector<bool> on_line(n, false);
  for (int l = 0; l < opt.num_rail_lines; ++l) {
    const double heading = rng.Uniform(0.0, std::numbers::pi);
    const double dx = std::cos(heading), dy = std::sin(heading);
    std::vector<int> pool;
    for (int v = 0; v < n; ++v)
      if (!on_line[v]) pool.push_back(v);
    if (static_cast<int>(pool.size()) < stations_per_line) {
      pool.clear();
      for (int v = 0; v < n; ++v) pool.push_back(v);
    }
    std::vector<int> chosen;
    for (int k = 0; k < stations_per_line; ++k) {
      int pick = k + rng.Index(static_cast<int>(pool.size()) - k);
      std::swap(pool[k], pool[pick]);
      chosen.push_back(pool[k]);
    }
    std::sort(chosen.begin(), chosen.end(), [&](int a, int b) {
      double pa = stops[a].lon * dx + stops[a].lat * dy;
      double pb = stops[b].lon * dx + stops[b].lat * dy;
      return pa != pb ? pa < pb : a < b;
    });
    RailLine line;
    line.id = "rail" + std::to_string(l);
    for (int v : chosen) {
      on_line[v] = true;
      line.station_ids.push_back(stops[v].id);
      stops[v].rail_line_ids.push_back(line.id);
    }
    lines.push_back(std::move(line));
  }

  // Trip endpoints cluster around a few activity centers.
  const int num_centers = std::max(1, n / 10);
  const int neighborhood = std::min(n, 5);
  std::vector<std::vector<int>> clusters;
  for (int c = 0; c < num_centers; ++c) {
    int center = rng.Index(n);
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return Distance(stops, center, a) < Distance(stops, center, b);
    });
    order.resize(neighborhood);
    clusters.push_back(std::move(order));
  }
  auto draw_endpoint = [&]() {
    if (rng.Uniform() < 0.6) {
      const auto& cluster = clusters[rng.Index(num_centers)];
      return cluster[rng.Index(static_cast<int>(cluster.size()))];
    }
    return rng.Index(n);
  };

  std::set<std::pair<int, int>> used;
  std::vector<Trip> trips;
  const int max_attempts = 50 * opt.num_trips + 1000;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(trips.size()) < opt.num_trips; ++attempt) {
    int o = draw_endpoint();
    int d = draw_endpoint();
    if (o == d || !used.insert({o, d}).second) continue;
    trips.push_back(Trip{"t" + std::to_string(trips.size()), stops[o].id, stops[d].id,
                         rng.SmallGeometric(0.6, 6)});
  }
  // Dense requests fall back to the unused pairs in order.
  for (int o = 0; o < n && static_cast<int>(trips.size()) < opt.num_trips; ++o) {
    for (int d = 0; d < n && static_cast<int>(trips.size()) < opt.num_trips; ++d) {
      if (o == d || !used.insert({o, d}).second) continue;
      trips.push_back(Trip{"t" + std::to_string(trips.size()), stops[o].id, stops[d].id,
                           rng.SmallGeometric(0.6, 6)});
    }
  }

  return Instance::Create(std::move(stops), std::move(lines), std::move(trips), opt.params);
}

}  // namespace odmts
