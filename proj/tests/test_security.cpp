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

#include "mpqkd/security.hpp"

using namespace mpqkd;
using Catch::Matchers::WithinRel;

namespace {

// Optimal working points at 200 km total distance with the standard device
// parameters, and the rates they reproduce.
struct TablePoint {
  const char* name;
  ParameterVector params;
  double length_a_km, length_b_km;
  Strategy strategy;
  double rate;            // published value, three significant digits
  double rate_reference;  // value from an independent reimplementation of the
                          // same chain, for cross-implementation regression
};

ParameterVector asym(double mu_a, double nu_a, double pm_a, double pn_a, double mu_b,
                     double nu_b, double pm_b, double pn_b) {
  ParameterVector g;
  g.mu_a = mu_a; g.nu_a = nu_a; g.p_mu_a = pm_a; g.p_nu_a = pn_a;
  g.p_o_a = 1.0 - pm_a - pn_a;
  g.mu_b = mu_b; g.nu_b = nu_b; g.p_mu_b = pm_b; g.p_nu_b = pn_b;
  g.p_o_b = 1.0 - pm_b - pn_b;
  return g;
}

const TablePoint kPoints[] = {
    {"A", ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180), 100.0, 100.0,
     Strategy::Symmetric, 2.95e-5, 2.600447200049e-05},
    {"B", asym(0.216, 0.00449, 0.170, 0.229, 0.621, 0.0376, 0.305, 0.192), 75.0, 125.0,
     Strategy::AsymmetricIntensity, 1.84e-5, 1.573209206885e-05},
    {"C", ParameterVector::symmetric(0.492, 0.0258, 0.271, 0.220), 75.0, 125.0,
     Strategy::ExtraAttenuation, 5.71e-6, 4.785530670124e-06},
    {"D", asym(0.107, 0.000624, 0.0902, 0.309, 0.718, 0.0549, 0.327, 0.230), 50.0, 150.0,
     Strategy::AsymmetricIntensity, 5.89e-6, 4.752240462863e-06},
    {"E", ParameterVector::symmetric(0.560, 0.0321, 0.278, 0.281), 50.0, 150.0,
     Strategy::ExtraAttenuation, 6.37e-7, 4.870652557306e-07},
};

ChannelConfig channel_for(const TablePoint& pt) {
  ChannelConfig c;
  c.length_a_km = pt.length_a_km;
  c.length_b_km = pt.length_b_km;
  c.strategy = pt.strategy;
  return c;
}

}  // namespace

TEST_CASE("single-photon yield matches the closed-form pair yield", "[security]") {
  // Fluctuations off, no dark counts, no misalignment: the decoy lower bound
  // must land within 5% of the exact single-photon pair yield. With both
  // parties' photons split across the two slots, a pair clicks only in the
  // alternating configuration, giving eta_a * eta_b / 2.
  for (double arm_km : {50.0, 100.0}) {
    ChannelConfig cfg;
    cfg.length_a_km = cfg.length_b_km = arm_km;
    cfg.p_d = 0.0;
    ProtocolConfig proto;
    proto.e_d_x = 0.0;
    proto.e_d_z = 0.0;
    proto.budget.eps_cb = 1.0;  // beta = 0
    const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
    const ObservedStats s = expected_statistics(g, cfg, proto);
    const double y11 = estimate_y11(s, proto.budget, g);
    const Transmittances t = transmittance(cfg);
    const double exact = t.eta_a * t.eta_b / 2.0;
    CHECK(y11 <= exact * (1.0 + 1e-9));  // it is a lower bound
    CHECK_THAT(y11, WithinRel(exact, 0.05));
  }
}

TEST_CASE("larger samples tighten the yield estimate", "[security]") {
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 100.0;
  ProtocolConfig proto;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  double prev = -1.0;
  for (double n : {1e11, 1e12, 1e13, 1e14}) {
    proto.total_pulses = n;
    const ObservedStats s = expected_statistics(g, cfg, proto);
    const double y11 = estimate_y11(s, proto.budget, g);
    CHECK(y11 >= prev);
    prev = y11;
  }
}

TEST_CASE("single-photon pair counts", "[security]") {
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 100.0;
  ProtocolConfig proto;
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  const ObservedStats s = expected_statistics(g, cfg, proto);
  CHECK(compute_m11_z(0.0, s, g) == 0.0);
  const double y11 = estimate_y11(s, proto.budget, g);
  const double m11z = compute_m11_z(y11, s, g);
  CHECK(m11z > 0.0);
  CHECK_THAT(m11z, WithinRel(s.z_at(Level::Signal, Level::Signal).pairs * g.mu_a * g.mu_b *
                                 std::exp(-g.mu_a - g.mu_b) * y11,
                             1e-12));
  // the X-side mirror cannot exceed its own pair normalizer
  const double m11x = compute_m11_x(y11, s, g);
  CHECK(m11x >= 0.0);
  CHECK(m11x <= s.x_at(Level::Decoy, Level::Decoy).pairs);
}

TEST_CASE("phase error rate composition", "[security]") {
  CHECK(phase_error_rate(0.0, 1e5, 1e6, 1e-10) == 0.0);
  // huge samples: the correction vanishes
  CHECK_THAT(phase_error_rate(0.05, 1e14, 1e15, 1e-10), WithinRel(0.05, 1e-4));
  // frozen composite value
  CHECK_THAT(phase_error_rate(0.05, 1e5, 1e6, 1e-10),
             WithinRel(0.05 + 0.0043275963683480424, 1e-12));
  CHECK(phase_error_rate(0.49, 1e3, 1e3, 1e-10) == 0.5);
  CHECK_THROWS_AS(phase_error_rate(0.1, 0.0, 1e6, 1e-10), std::domain_error);
}

TEST_CASE("key length clamps", "[security]") {
  ProtocolConfig proto;
  CHECK(key_length(0.0, 0.1, 1e6, 0.01, proto) == 0.0);
  CHECK(key_length(1e4, 0.5, 0.0, 0.0, proto) == 0.0);  // entropy term vanishes
  CHECK(key_length(1e9, 0.05, 1e6, 0.01, proto) > 0.0);
}

TEST_CASE("published working points reproduce within tolerance", "[security]") {
  for (const TablePoint& pt : kPoints) {
    const KeyRateBreakdown b = secure_key_rate(pt.params, channel_for(pt), ProtocolConfig{});
    INFO("point " << pt.name);
    CHECK(b.status == RateStatus::Ok);
    CHECK_THAT(b.rate, WithinRel(pt.rate, 0.25));
    CHECK_THAT(b.rate, WithinRel(pt.rate_reference, 1e-6));
  }
}

TEST_CASE("asymmetric intensities beat extra attenuation", "[security]") {
  const auto rate = [](const TablePoint& pt) {
    return secure_key_rate(pt.params, channel_for(pt), ProtocolConfig{}).rate;
  };
  CHECK(rate(kPoints[1]) > rate(kPoints[2]));  // 50 km difference
  CHECK(rate(kPoints[3]) > rate(kPoints[4]));  // 100 km difference
  // and the symmetric channel beats both increasingly asymmetric ones
  CHECK(rate(kPoints[0]) > rate(kPoints[1]));
  CHECK(rate(kPoints[1]) > rate(kPoints[3]));
}

TEST_CASE("rate responds monotonically to noise", "[security]") {
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 100.0;
  ProtocolConfig proto;

  double prev = 1.0;
  for (double pd : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
    ChannelConfig c = cfg;
    c.p_d = pd;
    const double r = secure_key_rate(g, c, proto).rate;
    CHECK(r <= prev * (1.0 + 1e-12));
    prev = r;
  }
  prev = 1.0;
  for (double ed : {0.01, 0.05, 0.1, 0.2, 0.3}) {
    ProtocolConfig p = proto;
    p.e_d_x = ed;
    const double r = secure_key_rate(g, cfg, p).rate;
    CHECK(r <= prev * (1.0 + 1e-12));
    prev = r;
  }
  prev = 1.0;
  for (double ed : {1e-6, 1e-4, 1e-2, 0.05, 0.1}) {
    ProtocolConfig p = proto;
    p.e_d_z = ed;
    const double r = secure_key_rate(g, cfg, p).rate;
    CHECK(r <= prev * (1.0 + 1e-12));
    prev = r;
  }
}

TEST_CASE("fluctuation-free rate dominates the finite-key rate", "[security]") {
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 100.0;
  ProtocolConfig finite;
  ProtocolConfig loose = finite;
  loose.budget.eps_cb = 1.0;  // beta = 0
  loose.budget.xi_ee = 1.0;   // sampling correction vacuous at these sizes
  const double r_finite = secure_key_rate(g, cfg, finite).rate;
  const double r_loose = secure_key_rate(g, cfg, loose).rate;
  CHECK(r_loose >= r_finite);
}

TEST_CASE("finite-key orderings in pulse count and pairing interval", "[security]") {
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 100.0;
  double prev = -1.0;
  for (double n : {1e11, 1e12, 1e13}) {
    ProtocolConfig proto;
    proto.total_pulses = n;
    const double r = secure_key_rate(g, cfg, proto).rate;
    CHECK(r >= prev);
    prev = r;
  }
  ProtocolConfig short_l, long_l;
  short_l.pairing_interval = 200;
  long_l.pairing_interval = 2000;
  CHECK(secure_key_rate(g, cfg, short_l).rate <= secure_key_rate(g, cfg, long_l).rate);
}

TEST_CASE("invalid parameter vectors are rejected, not zero-rated", "[security]") {
  ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  g.nu_a = 0.5;  // decoy above signal
  ChannelConfig cfg;
  CHECK_THROWS_AS(secure_key_rate(g, cfg, ProtocolConfig{}), std::invalid_argument);
  CHECK_THROWS_WITH(secure_key_rate(g, cfg, ProtocolConfig{}),
                    Catch::Matchers::ContainsSubstring("nu_a"));
}

TEST_CASE("degenerate and unphysical regimes zero the rate with a reason", "[security]") {
  const ParameterVector g = ParameterVector::symmetric(0.424, 0.0213, 0.254, 0.180);
  ProtocolConfig proto;

  ChannelConfig dead;
  dead.length_a_km = dead.length_b_km = 20000.0;
  dead.p_d = 0.0;
  KeyRateBreakdown b = secure_key_rate(g, dead, proto);
  CHECK(b.rate == 0.0);
  CHECK(b.status == RateStatus::DegenerateChannel);

  ChannelConfig no_dark;
  no_dark.length_a_km = no_dark.length_b_km = 100.0;
  no_dark.p_d = 0.0;  // vacuum-fed combinations never click
  b = secure_key_rate(g, no_dark, proto);
  CHECK(b.rate == 0.0);
  CHECK(b.status == RateStatus::PhysicalityViolation);
}

TEST_CASE("long distance drives the bit error estimate toward but below one half",
          "[security]") {
  const ParameterVector g = ParameterVector::symmetric(0.560, 0.0321, 0.278, 0.281);
  ChannelConfig cfg;
  cfg.length_a_km = cfg.length_b_km = 150.0;
  const KeyRateBreakdown b = secure_key_rate(g, cfg, ProtocolConfig{});
  CHECK(b.status == RateStatus::Ok);
  CHECK(b.e11_x_bit > 0.2);
  CHECK(b.e11_x_bit < 0.5);
}
