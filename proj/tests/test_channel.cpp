// Copyright 2026 The mpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mpqkd/channel.hpp"
#include "mpqkd/pso.hpp"

using namespace mpqkd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ParameterVector random_feasible(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  FreeVector raw;
  for (double& v : raw) v = u(rng);
  return repair(raw);
}

ChannelConfig table_channel(double la, double lb,
                            Strategy strategy = Strategy::Symmetric) {
  ChannelConfig c;
  c.length_a_km = la;
  c.length_b_km = lb;
  c.strategy = strategy;
  return c;
}

}  // namespace

TEST_CASE("transmittance folds detector efficiency and strategy", "[channel]") {
  ChannelConfig c = table_channel(0.0, 0.0);
  CHECK_THAT(transmittance(c).eta_a, WithinRel(0.75, 1e-15));

  c = table_channel(50.0, 50.0);
  CHECK_THAT(transmittance(c).eta_a, WithinRel(0.075, 1e-12));

  c = table_channel(50.0, 150.0, Strategy::ExtraAttenuation);
  const Transmittances t = transmittance(c);
  CHECK_THAT(t.eta_a, WithinRel(0.75e-3, 1e-12));
  CHECK_THAT(t.eta_b, WithinRel(0.75e-3, 1e-12));
}

TEST_CASE("transmittance is monotone in length and linear in eta_d", "[channel]") {
  double prev = 1.0;
  for (double l = 0.0; l <= 300.0; l += 25.0) {
    const double v = transmittance(table_channel(l, l)).eta_a;
    CHECK(v <= prev);
    prev = v;
  }
  ChannelConfig c = table_channel(80.0, 80.0);
  const double full = transmittance(c).eta_a;
  c.eta_d = 0.375;
  CHECK_THAT(transmittance(c).eta_a, WithinRel(full * 0.5, 1e-12));
}

TEST_CASE("response probability limits", "[channel]") {
  const Transmittances t{0.1, 0.1};
  CHECK(response_prob(0.0, 0.0, t, 0.0) == 0.0);
  // one arm dark: the interference term collapses to I0(0) = 1
  const double kb = 0.7;
  const double y = std::exp(-0.1 * kb / 2.0);
  CHECK_THAT(response_prob(0.0, kb, t, 0.0), WithinRel(2.0 * y * (1.0 - y), 1e-13));
}

TEST_CASE("response probability stays in [0,1]", "[channel]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eta(1e-6, 1.0), k(0.0, 1.0), pd(0.0, 0.2);
  for (int i = 0; i < 5000; ++i) {
    const Transmittances t{eta(rng), eta(rng)};
    const double q = response_prob(k(rng), k(rng), t, pd(rng));
    REQUIRE(q >= 0.0);
    REQUIRE(q <= 1.0);
  }
}

TEST_CASE("response probability grows with dark counts in the lossy regime",
          "[channel]") {
  // In the operating regime (substantial fiber loss, rare dark counts) an
  // extra dark count can only add effective detections. At very high loads
  // that fails: darkness then mostly upgrades singles to double clicks.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eta(1e-6, 0.25), k(0.0, 1.0), pd(0.0, 0.05);
  for (int i = 0; i < 5000; ++i) {
    const Transmittances t{eta(rng), eta(rng)};
    const double ka = k(rng), kb = k(rng);
    const double p0 = pd(rng);
    const double q = response_prob(ka, kb, t, p0);
    CHECK(response_prob(ka, kb, t, p0 + 0.05) >= q - 1e-15);
  }
}

TEST_CASE("average response probability degenerate cases", "[channel]") {
  const Transmittances t{0.075, 0.075};
  ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 1e-9, 1e-9);
  // effectively all-vacuum: with no dark counts nothing responds
  CHECK_THAT(avg_response_prob(g, t, 0.0),
             WithinAbs(0.0, 1e-10));
  // all weight on the signal pulses: the average collapses to one term
  g = ParameterVector::symmetric(0.424, 0.0213, 1.0, 0.0);
  CHECK_THAT(avg_response_prob(g, t, 1e-8),
             WithinRel(response_prob(0.424, 0.424, t, 1e-8), 1e-12));
}

TEST_CASE("pairs per round limiting forms", "[channel]") {
  CHECK(pairs_per_round(0.0, 2000) == 0.0);
  CHECK_THAT(pairs_per_round(1.0, 1), WithinRel(0.5, 1e-15));
  CHECK_THAT(pairs_per_round(1.0, 2000), WithinRel(0.5, 1e-15));
  // large interval: every click finds a partner, half the clicks seed a pair
  CHECK_THAT(pairs_per_round(0.01, 2000), WithinRel(0.005, 1e-6));
  // interval one: only adjacent clicks pair
  for (double p : {0.001, 0.05, 0.3, 0.9}) {
    CHECK_THAT(pairs_per_round(p, 1), WithinRel(p * p / (1.0 + p), 1e-12));
  }
  CHECK_THROWS_AS(pairs_per_round(0.5, 0), std::domain_error);
}

TEST_CASE("x-pair response reduces to the squared single response at x = 0",
          "[channel]") {
  for (double y : {0.2, 0.5, 0.9, 0.999}) {
    const detail::ResponseParts p{y, 1.0 - y, 0.0};
    const auto r = detail::x_pair_response(p, std::numbers::pi / 16.0);
    CHECK_THAT(r.joint, WithinRel(4.0 * y * y * (1.0 - y) * (1.0 - y), 1e-12));
    CHECK_THAT(r.error, WithinRel(2.0 * y * y * (1.0 - y) * (1.0 - y), 1e-12));
  }
}

TEST_CASE("x-pair error term never exceeds the joint term", "[channel]") {
  // physical loads: k eta on each arm, dark counts, any retained misalignment
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> load(0.0, 3.0), pd(0.0, 0.2),
      delta(1e-3, std::numbers::pi / 2.0);
  for (int i = 0; i < 20000; ++i) {
    const Transmittances t{1.0, 1.0};
    const auto parts = detail::response_parts(load(rng), load(rng), t, pd(rng));
    const auto r = detail::x_pair_response(parts, delta(rng));
    REQUIRE(r.error >= 0.0);
    REQUIRE(r.error <= r.joint * (1.0 + 1e-12));
  }
}

TEST_CASE("expected statistics satisfy the tally invariants", "[channel]") {
  std::mt19937_64 rng(17);
  ProtocolConfig proto;
  for (int trial = 0; trial < 200; ++trial) {
    const ParameterVector g = random_feasible(rng);
    std::uniform_real_distribution<double> len(0.0, 150.0);
    const double la = len(rng);
    const ChannelConfig cfg = table_channel(la, la + len(rng) / 2.0);
    const ObservedStats s = expected_statistics(g, cfg, proto);
    for (const auto* table : {&s.z, &s.x}) {
      for (const auto& row : *table) {
        for (const PairTally& e : row) {
          REQUIRE(std::isfinite(e.n));
          REQUIRE(e.n >= 0.0);
          REQUIRE(e.t >= 0.0);
          REQUIRE(e.t <= e.n * (1.0 + 1e-12));
          REQUIRE(e.n <= e.pairs * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("vacuum-containing combinations have half errors without misalignment",
          "[channel]") {
  ProtocolConfig proto;
  proto.e_d_x = 0.0;
  proto.e_d_z = 0.0;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  const ObservedStats s = expected_statistics(g, table_channel(100.0, 100.0), proto);
  for (Level a : {Level::Signal, Level::Decoy}) {
    CHECK(s.z_at(a, Level::Vacuum).t == s.z_at(a, Level::Vacuum).n / 2.0);
    CHECK(s.z_at(Level::Vacuum, a).t == s.z_at(Level::Vacuum, a).n / 2.0);
    CHECK(s.x_at(a, Level::Vacuum).t == s.x_at(a, Level::Vacuum).n / 2.0);
    CHECK(s.x_at(Level::Vacuum, a).t == s.x_at(Level::Vacuum, a).n / 2.0);
  }
  CHECK(s.z_at(Level::Vacuum, Level::Vacuum).t ==
        s.z_at(Level::Vacuum, Level::Vacuum).n / 2.0);
}

TEST_CASE("all counts scale linearly in the pulse count", "[channel]") {
  ProtocolConfig proto;
  ProtocolConfig doubled = proto;
  doubled.total_pulses = 2.0 * proto.total_pulses;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  const ChannelConfig cfg = table_channel(100.0, 100.0);
  const ObservedStats s1 = expected_statistics(g, cfg, proto);
  const ObservedStats s2 = expected_statistics(g, cfg, doubled);
  for (Level a : kLevels) {
    for (Level b : kLevels) {
      CHECK(s2.z_at(a, b).n == 2.0 * s1.z_at(a, b).n);
      CHECK(s2.z_at(a, b).t == 2.0 * s1.z_at(a, b).t);
      CHECK(s2.x_at(a, b).n == 2.0 * s1.x_at(a, b).n);
      CHECK(s2.x_at(a, b).pairs == 2.0 * s1.x_at(a, b).pairs);
    }
  }
}

TEST_CASE("both-vacuum combination is dark-count driven", "[channel]") {
  ProtocolConfig proto;
  ChannelConfig cfg = table_channel(100.0, 100.0);
  cfg.p_d = 0.0;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  const ObservedStats s = expected_statistics(g, cfg, proto);
  CHECK(s.z_at(Level::Vacuum, Level::Vacuum).n == 0.0);
  CHECK(s.x_at(Level::Vacuum, Level::Vacuum).n == 0.0);
}

TEST_CASE("degenerate channel is signalled", "[channel]") {
  ProtocolConfig proto;
  ChannelConfig cfg = table_channel(20000.0, 20000.0);
  cfg.p_d = 0.0;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  CHECK_THROWS_AS(expected_statistics(g, cfg, proto), std::domain_error);
}
