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
#include <string>

#include <gtest/gtest.h>

#include "odmts/instance.h"

namespace odmts {
namespace {

constexpr char kMinimal[] = R"({
  "stops": [
    {"id": "a", "lat": 33.75, "lon": -84.39},
    {"id": "b", "lat": 33.80, "lon": -84.35}
  ],
  "trips": [{"id": "t0", "origin": "a", "destination": "b", "passengers": 1}]
})";

std::string WithTrip(const std::string& trip) {
  return R"({"stops": [{"id": "a", "lat": 0, "lon": 0}, {"id": "b", "lat": 0, "lon": 1}], "trips": [)" + trip +
         "]}";
}

TEST(InstanceTest, MinimalFile) {
  const Instance inst = ParseInstance(kMinimal);
  EXPECT_EQ(inst.num_stops(), 2);
  EXPECT_EQ(inst.num_trips(), 1);
  EXPECT_EQ(inst.params(), CostParams{});
  EXPECT_EQ(inst.TripOrigin(0), 0);
  EXPECT_EQ(inst.TripDestination(0), 1);
}

TEST(InstanceTest, UnknownStopNamesTrip) {
  try {
    ParseInstance(WithTrip(R"({"id": "ride7", "origin": "a", "destination": "zz", "passengers": 1})"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ride7"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos) << e.what();
  }
}

TEST(InstanceTest, AlphaOutOfRange) {
  const std::string text = R"({"stops": [{"id": "a", "lat": 0, "lon": 0}, {"id": "b", "lat": 0, "lon": 1}],
    "trips": [], "params": {"alpha": 1.5}})";
  try {
    ParseInstance(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha out of [0,1]"), std::string::npos) << e.what();
  }
}

TEST(InstanceTest, RejectsBadInput) {
  EXPECT_THROW(ParseInstance("{not json"), ParseError);
  EXPECT_THROW(ParseInstance(R"({"stops": [], "trips": [], "extra": 1})"), ParseError);
  EXPECT_THROW(ParseInstance(WithTrip(R"({"id": "t", "origin": "a", "destination": "a", "passengers": 1})")),
               ValidationError);
  EXPECT_THROW(ParseInstance(WithTrip(R"({"id": "t", "origin": "a", "destination": "b", "passengers": 0})")),
               ValidationError);
  EXPECT_THROW(ParseInstance(R"({"stops": [{"id": "a", "lat": 91, "lon": 0}], "trips": []})"), ValidationError);
  EXPECT_THROW(ParseInstance(R"({"stops": [{"id": "a", "lat": 0, "lon": 0}, {"id": "a", "lat": 1, "lon": 0}],
                                 "trips": []})"),
               ValidationError);
  EXPECT_THROW(ParseInstance(R"({"stops": [{"id": "a", "lat": 0, "lon": 0}], "trips": [],
                                 "params": {"max_arcs": 1}})"),
               ValidationError);
  EXPECT_THROW(ParseInstance(R"({"stops": [{"id": "a", "lat": 0, "lon": 0, "rail_lines": ["r"]},
                                           {"id": "b", "lat": 0, "lon": 1}],
                                 "rail_lines": [{"id": "r", "stations": ["a", "a"]}], "trips": []})"),
               ValidationError);
}

TEST(InstanceTest, GreatCircleDistance) {
  EXPECT_EQ(GreatCircleDistance({33.749, -84.388}, {33.749, -84.388}), 0.0);
  EXPECT_NEAR(GreatCircleDistance({0, 0}, {0, 1}), 69.09, 0.01);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-179, 179);
  for (int i = 0; i < 1000; ++i) {
    const LatLon p{lat(rng), lon(rng)}, q{lat(rng), lon(rng)}, r{lat(rng), lon(rng)};
    const double pq = GreatCircleDistance(p, q);
    EXPECT_EQ(pq, GreatCircleDistance(q, p));
    EXPECT_GT(pq, 0.0);
    const double via = GreatCircleDistance(p, r) + GreatCircleDistance(r, q);
    EXPECT_LE(pq, via * (1 + 1e-9));
  }
}

TEST(InstanceTest, TravelTime) {
  const CostParams params;
  EXPECT_DOUBLE_EQ(TravelTime(15, params), 30);
  EXPECT_DOUBLE_EQ(TravelTime(0, params), 0);
  EXPECT_DOUBLE_EQ(TravelTime(7.5, params), 15);
}

TEST(InstanceTest, SerializeRoundTrip) {
  GeneratorOptions opt;
  opt.num_stops = 20;
  opt.num_trips = 50;
  opt.params.scale_transit_cost_by_passengers = true;
  opt.params.alpha = 0.3;
  const Instance inst = GenerateSynthetic(opt);
  const std::string text = SerializeInstance(inst);
  const Instance back = ParseInstance(text);
  EXPECT_EQ(back, inst);
  EXPECT_EQ(SerializeInstance(back), text);
}

TEST(GeneratorTest, DeterministicAndValid) {
  GeneratorOptions opt;
  opt.seed = 1;
  opt.num_stops = 20;
  opt.num_hubs = 4;
  opt.num_rail_lines = 1;
  opt.num_trips = 50;
  const Instance a = GenerateSynthetic(opt);
  const Instance b = GenerateSynthetic(opt);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.num_stops(), 20);
  EXPECT_EQ(a.num_trips(), 50);
  int hubs = 0;
  for (const Stop& s : a.stops()) {
    hubs += s.is_hub;
    EXPECT_GE(s.lat, opt.box.min_lat);
    EXPECT_LE(s.lat, opt.box.max_lat);
  }
  EXPECT_EQ(hubs, 4);
  ASSERT_EQ(a.rail_lines().size(), 1u);
  EXPECT_GE(a.rail_lines()[0].station_ids.size(), 2u);
  for (const Trip& t : a.trips()) EXPECT_GE(t.passengers, 1);

  opt.seed = 2;
  EXPECT_NE(GenerateSynthetic(opt), a);
}

TEST(GeneratorTest, ShuttleOnly) {
  GeneratorOptions opt;
  opt.num_hubs = 0;
  opt.num_rail_lines = 0;
  opt.num_stops = 10;
  opt.num_trips = 5;
  opt.params.bus_frequencies.clear();
  const Instance inst = GenerateSynthetic(opt);
  EXPECT_EQ(ParseInstance(SerializeInstance(inst)), inst);
}

TEST(GeneratorTest, RejectsInfeasibleOptions) {
  GeneratorOptions opt;
  opt.num_stops = 1;
  opt.num_rail_lines = 1;
  opt.num_hubs = 0;
  EXPECT_THROW(GenerateSynthetic(opt), ValidationError);
  opt = {};
  opt.num_hubs = opt.num_stops + 1;
  EXPECT_THROW(GenerateSynthetic(opt), ValidationError);
  opt = {};
  opt.num_stops = 3;
  opt.num_trips = 7;
  EXPECT_THROW(GenerateSynthetic(opt), ValidationError);
}

}  // namespace
}  // namespace odmts
