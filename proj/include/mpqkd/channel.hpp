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

#ifndef MPQKD_CHANNEL_HPP
#define MPQKD_CHANNEL_HPP

#include <cmath>
#include <stdexcept>

#include "mpqkd/math.hpp"
#include "mpqkd/types.hpp"

// Analytic model of the asymmetric mode-pairing experiment: per-round
// response probabilities, the pairing rate of the neighbor-pairing scan, and
// the expected detection/error counts for every intensity combination in both
// bases. Everything is an expectation; finite-size fluctuation is applied by
// the estimators, not here.

namespace mpqkd {

// Detector efficiency is folded into each arm. Under the extra-attenuation
// strategy the shorter arm is padded with loss until it matches the longer
// one.
inline Transmittances transmittance(const ChannelConfig& cfg) {
  double la = cfg.length_a_km;
  const double lb = cfg.length_b_km;
  if (cfg.strategy == Strategy::ExtraAttenuation) la = lb;
  auto arm = [&](double length_km) {
    return cfg.eta_d * std::pow(10.0, -cfg.alpha_db_per_km * length_km / 10.0);
  };
  return Transmittances{arm(la), arm(lb)};
}

namespace detail {

// No-click amplitude y = (1-p_d) exp(-(k_a eta_a + k_b eta_b)/2), its
// complement kept at full relative precision, and the interference amplitude.
struct ResponseParts {
  double y;
  double one_minus_y;
  double x;
};

inline ResponseParts response_parts(double k_a, double k_b, const Transmittances& t,
                                    double p_d) {
  ResponseParts r;
  const double s = (k_a * t.eta_a + k_b * t.eta_b) / 2.0;
  const double decay = std::exp(-s);
  r.y = (1.0 - p_d) * decay;
  r.one_minus_y = -std::expm1(-s) + p_d * decay;  // 1 - (1-p_d) e^{-s}
  r.x = std::sqrt(t.eta_a * k_a * t.eta_b * k_b);
  return r;
}

}  // namespace detail

// Probability that a round with intensities (k_a, k_b) yields an effective
// detection (exactly one detector fires), averaged over the relative phase.
inline double response_prob(double k_a, double k_b, const Transmittances& t, double p_d) {
  const auto r = detail::response_parts(k_a, k_b, t, p_d);
  return 2.0 * r.y * (r.one_minus_y + bessel_i0_minus_one(r.x));
}

// Average response probability over the 3x3 intensity grid.
inline double avg_response_prob(const ParameterVector& g, const Transmittances& t,
                                double p_d) {
  double p = 0.0;
  for (Level a : kLevels)
    for (Level b : kLevels)
      p += g.prob_a(a) * g.prob_b(b) *
           response_prob(g.intensity_a(a), g.intensity_b(b), t, p_d);
  return p;
}

// Expected pairs formed per round by the scan that pairs each effective
// detection with the next one at most l rounds later (an unmatched click is
// dropped and the scan restarts at the following click). The bracketed sum is
// the expected number of rounds consumed per pair; its reciprocal tends to
// p/2 for large l and to p^2/(1+p) at l = 1.
inline double pairs_per_round(double p, std::int64_t l) {
  if (p <= 0.0) return 0.0;
  if (l < 1) throw std::domain_error("pairs_per_round: l must be >= 1");
  const double hit = -std::expm1(static_cast<double>(l) * std::log1p(-p));  // 1-(1-p)^l
  return 1.0 / (1.0 / (p * hit) + 1.0 / p);
}

namespace detail {

// Joint probability that both rounds of a phase-matched X-pair are effective
// detections, and the part of it where the click pattern disagrees with the
// encoded relative phase. Evaluated at the sifting edge delta, the largest
// phase misalignment a retained pair can carry. The quartic in y cancels
// almost completely at long distance, so it is regrouped around the small
// quantities d = I0(x) - y and I0(.) - 1.
struct XPairResponse {
  double joint;
  double error;
};

inline XPairResponse x_pair_response(const ResponseParts& p, double delta) {
  const double i0x = bessel_i0_minus_one(p.x);
  const double lo = bessel_i0_minus_one(p.x * std::sqrt(2.0 - 2.0 * std::cos(delta)));
  const double hi = bessel_i0_minus_one(p.x * std::sqrt(2.0 + 2.0 * std::cos(delta)));
  const double d = p.one_minus_y + i0x;
  const double y2 = p.y * p.y;
  XPairResponse r;
  r.error = std::max(2.0 * y2 * (d * d + lo - 2.0 * i0x - i0x * i0x), 0.0);
  r.joint = r.error + std::max(2.0 * y2 * (d * d + hi - 2.0 * i0x - i0x * i0x), 0.0);
  return r;
}

inline double misalign(double t0, double n, double e_d) {
  return (1.0 - e_d) * t0 + e_d * (n - t0);
}

}  // namespace detail

// Expected counts for all Z-pair and X-pair intensity combinations, plus the
// pair-number normalizers (the same sums with the per-round response factors
// removed). Throws if the average response probability underflows to zero.
inline ObservedStats expected_statistics(const ParameterVector& g,
                                         const ChannelConfig& cfg,
                                         const ProtocolConfig& proto) {
  const Transmittances t = transmittance(cfg);
  const double p = avg_response_prob(g, t, cfg.p_d);
  if (!(p > 0.0))
    throw std::domain_error("expected_statistics: degenerate channel, response probability is zero");

  double q[3][3];
  for (Level a : kLevels)
    for (Level b : kLevels)
      q[static_cast<int>(a)][static_cast<int>(b)] =
          response_prob(g.intensity_a(a), g.intensity_b(b), t, cfg.p_d);
  auto qq = [&](Level a, Level b) { return q[static_cast<int>(a)][static_cast<int>(b)]; };

  const double r_p = pairs_per_round(p, proto.pairing_interval);
  const double scale = proto.total_pulses * r_p / (p * p);

  ObservedStats s;
  s.avg_response_prob = p;
  s.pair_rate = r_p;

  constexpr Level kSig = Level::Signal, kDec = Level::Decoy, kVac = Level::Vacuum;
  const Level nonvac[2] = {kSig, kDec};

  // Z-pairs with both aggregates non-vacuum: each party sent its intensity in
  // one slot and vacuum in the other (4 slot assignments). Bit errors come
  // from the assignments where the two vacuum slots coincide.
  for (Level a : nonvac) {
    for (Level b : nonvac) {
      const double pppp = g.prob_a(a) * g.prob_a(kVac) * g.prob_b(b) * g.prob_b(kVac);
      const double n = scale * pppp * 2.0 * (qq(a, b) * qq(kVac, kVac) + qq(a, kVac) * qq(kVac, b));
      const double t0 = scale * pppp * 2.0 * qq(kVac, kVac) * qq(a, b);
      auto& e = s.z_at(a, b);
      e.n = n;
      e.t = detail::misalign(t0, n, proto.e_d_z);
      e.pairs = scale * pppp * 4.0;
    }
  }
  // Z-pairs with one party sending vacuum in both slots: the bit of that
  // party is undefined, so half of the detections are errors.
  for (Level a : nonvac) {
    const double pppp = g.prob_a(a) * g.prob_a(kVac) * g.prob_b(kVac) * g.prob_b(kVac);
    auto& e = s.z_at(a, kVac);
    e.n = scale * pppp * 2.0 * qq(a, kVac) * qq(kVac, kVac);
    e.t = e.n / 2.0;
    e.pairs = scale * pppp * 2.0;
  }
  for (Level b : nonvac) {
    const double pppp = g.prob_a(kVac) * g.prob_a(kVac) * g.prob_b(b) * g.prob_b(kVac);
    auto& e = s.z_at(kVac, b);
    e.n = scale * pppp * 2.0 * qq(kVac, b) * qq(kVac, kVac);
    e.t = e.n / 2.0;
    e.pairs = scale * pppp * 2.0;
  }
  {
    const double pppp = g.prob_a(kVac) * g.prob_a(kVac) * g.prob_b(kVac) * g.prob_b(kVac);
    auto& e = s.z_at(kVac, kVac);
    e.n = scale * pppp * qq(kVac, kVac) * qq(kVac, kVac);
    e.t = e.n / 2.0;
    e.pairs = scale * pppp;
    s.x_at(kVac, kVac) = e;  // the both-vacuum combination feeds both tables
  }

  // X-pairs with both parties repeating a non-vacuum intensity: interference
  // of the two rounds carries the phase encoding; only the phase-sifted
  // fraction 2*delta/pi is retained.
  const double sift = 2.0 * proto.delta_phase / std::numbers::pi;
  for (Level a : nonvac) {
    for (Level b : nonvac) {
      const double ka = g.intensity_a(a), kb = g.intensity_b(b);
      const auto parts = detail::response_parts(ka, kb, t, cfg.p_d);
      const auto r = detail::x_pair_response(parts, proto.delta_phase);
      const double pppp = g.prob_a(a) * g.prob_a(a) * g.prob_b(b) * g.prob_b(b);
      auto& e = s.x_at(a, b);
      e.n = scale * sift * pppp * r.joint;
      e.t = detail::misalign(scale * sift * pppp * r.error, e.n, proto.e_d_x);
      e.pairs = scale * sift * pppp;
    }
  }
  // X-pairs with one vacuum party: not phase-sifted, bit undefined.
  for (Level a : nonvac) {
    const double pppp = g.prob_a(a) * g.prob_a(a) * g.prob_b(kVac) * g.prob_b(kVac);
    auto& e = s.x_at(a, kVac);
    e.n = scale * pppp * qq(a, kVac) * qq(a, kVac);
    e.t = e.n / 2.0;
    e.pairs = scale * pppp;
  }
  for (Level b : nonvac) {
    const double pppp = g.prob_a(kVac) * g.prob_a(kVac) * g.prob_b(b) * g.prob_b(b);
    auto& e = s.x_at(kVac, b);
    e.n = scale * pppp * qq(kVac, b) * qq(kVac, b);
    e.t = e.n / 2.0;
    e.pairs = scale * pppp;
  }

  return s;
}

}  // namespace mpqkd

#endif  // MPQKD_CHANNEL_HPP
