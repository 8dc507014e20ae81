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

#ifndef MPQKD_TYPES_HPP
#define MPQKD_TYPES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mpqkd {

// Pulse intensity classes used by the three-intensity decoy method.
enum class Level : int { Signal = 0, Decoy = 1, Vacuum = 2 };

inline constexpr std::array<Level, 3> kLevels = {Level::Signal, Level::Decoy,
                                                 Level::Vacuum};

inline const char* level_name(Level l) {
  switch (l) {
    case Level::Signal: return "mu";
    case Level::Decoy:  return "nu";
    default:            return "o";
  }
}

// How the shorter arm compensates (or not) for channel asymmetry.
enum class Strategy { Symmetric, AsymmetricIntensity, ExtraAttenuation };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Symmetric:           return "symmetric";
    case Strategy::AsymmetricIntensity: return "asymmetric_intensity";
    default:                            return "extra_attenuation";
  }
}

inline Strategy strategy_from_name(const std::string& s) {
  if (s == "symmetric") return Strategy::Symmetric;
  if (s == "asymmetric_intensity") return Strategy::AsymmetricIntensity;
  if (s == "extra_attenuation") return Strategy::ExtraAttenuation;
  throw std::invalid_argument("unknown strategy: '" + s +
                              "' (expected symmetric, asymmetric_intensity or "
                              "extra_attenuation)");
}

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

// Fiber arms from Alice and Bob to the measurement node, plus detector
// imperfections shared by both single-photon detectors.
struct ChannelConfig {
  double length_a_km = 100.0;  // shorter arm by convention
  double length_b_km = 100.0;
  double alpha_db_per_km = 0.2;
  double eta_d = 0.75;  // detector efficiency
  double p_d = 1e-8;    // dark-count probability per pulse per detector
  Strategy strategy = Strategy::Symmetric;

  void validate() const {
    detail::require(length_a_km >= 0.0, "ChannelConfig: length_a_km must be >= 0");
    detail::require(length_b_km >= length_a_km,
                    "ChannelConfig: length_b_km must be >= length_a_km");
    detail::require(alpha_db_per_km > 0.0, "ChannelConfig: alpha_db_per_km must be > 0");
    detail::require(eta_d > 0.0 && eta_d <= 1.0, "ChannelConfig: eta_d must be in (0,1]");
    detail::require(p_d >= 0.0 && p_d < 1.0, "ChannelConfig: p_d must be in [0,1)");
  }
};

struct Transmittances {
  double eta_a = 1.0;
  double eta_b = 1.0;
};

// Failure probabilities of the composable security statement and of the two
// concentration steps. Exposed individually; nothing is re-budgeted silently.
struct SecurityBudget {
  double eps_cor = 1e-10;
  double eps_sec = 1e-10;
  double eps_cb = 1e-10;  // Chernoff bound failure probability
  double xi_ee = 1e-10;   // random-sampling failure probability

  void validate() const {
    detail::require(eps_cor > 0.0 && eps_cor < 1.0, "SecurityBudget: eps_cor must be in (0,1)");
    detail::require(eps_sec > 0.0 && eps_sec < 1.0, "SecurityBudget: eps_sec must be in (0,1)");
    detail::require(eps_cb > 0.0 && eps_cb <= 1.0, "SecurityBudget: eps_cb must be in (0,1]");
    detail::require(xi_ee > 0.0 && xi_ee <= 1.0, "SecurityBudget: xi_ee must be in (0,1]");
  }
};

struct ProtocolConfig {
  double total_pulses = 1e13;     // N
  std::int64_t pairing_interval = 2000;  // maximum round separation l
  int num_slices = 16;            // discrete phase slices per 2*pi
  double delta_phase = std::numbers::pi / 16.0;  // phase-sifting half-width
  double e_d_x = 0.1;             // misalignment error, X-pairs
  double e_d_z = 1e-6;            // misalignment error, Z-pairs
  double f_ec = 1.1;              // error-correction efficiency
  SecurityBudget budget;

  void validate() const {
    detail::require(total_pulses >= 1.0, "ProtocolConfig: total_pulses must be >= 1");
    detail::require(pairing_interval >= 1, "ProtocolConfig: pairing_interval must be >= 1");
    detail::require(num_slices >= 2 && num_slices % 2 == 0,
                    "ProtocolConfig: num_slices must be an even integer >= 2");
    detail::require(delta_phase > 0.0 && delta_phase <= std::numbers::pi / 2.0,
                    "ProtocolConfig: delta_phase must be in (0, pi/2]");
    detail::require(e_d_x >= 0.0 && e_d_x <= 0.5, "ProtocolConfig: e_d_x must be in [0,0.5]");
    detail::require(e_d_z >= 0.0 && e_d_z <= 0.5, "ProtocolConfig: e_d_z must be in [0,0.5]");
    detail::require(f_ec >= 1.0, "ProtocolConfig: f_ec must be >= 1");
    budget.validate();
  }
};

// The twelve source parameters: three intensities and their send
// probabilities per party. The vacuum intensity is identically zero and the
// probabilities of each party sum to one.
struct ParameterVector {
  double mu_a = 0.4, nu_a = 0.02, o_a = 0.0;
  double p_mu_a = 0.25, p_nu_a = 0.18, p_o_a = 0.57;
  double mu_b = 0.4, nu_b = 0.02, o_b = 0.0;
  double p_mu_b = 0.25, p_nu_b = 0.18, p_o_b = 0.57;

  static ParameterVector symmetric(double mu, double nu, double p_mu, double p_nu) {
    ParameterVector g;
    g.mu_a = g.mu_b = mu;
    g.nu_a = g.nu_b = nu;
    g.p_mu_a = g.p_mu_b = p_mu;
    g.p_nu_a = g.p_nu_b = p_nu;
    g.p_o_a = g.p_o_b = 1.0 - p_mu - p_nu;
    return g;
  }

  double intensity_a(Level l) const {
    return l == Level::Signal ? mu_a : (l == Level::Decoy ? nu_a : o_a);
  }
  double intensity_b(Level l) const {
    return l == Level::Signal ? mu_b : (l == Level::Decoy ? nu_b : o_b);
  }
  double prob_a(Level l) const {
    return l == Level::Signal ? p_mu_a : (l == Level::Decoy ? p_nu_a : p_o_a);
  }
  double prob_b(Level l) const {
    return l == Level::Signal ? p_mu_b : (l == Level::Decoy ? p_nu_b : p_o_b);
  }

  void validate() const {
    auto party = [](const char* who, double mu, double nu, double o, double pm,
                    double pn, double po) {
      const std::string w(who);
      detail::require(o == 0.0, "ParameterVector: o_" + w + " must be exactly 0");
      detail::require(nu > 0.0, "ParameterVector: nu_" + w + " must be > 0");
      detail::require(nu < mu, "ParameterVector: nu_" + w + " must be < mu_" + w);
      detail::require(mu < 1.0, "ParameterVector: mu_" + w + " must be < 1");
      detail::require(pm >= 0.0 && pm <= 1.0, "ParameterVector: p_mu_" + w + " must be in [0,1]");
      detail::require(pn >= 0.0 && pn <= 1.0, "ParameterVector: p_nu_" + w + " must be in [0,1]");
      detail::require(po >= 0.0 && po <= 1.0, "ParameterVector: p_o_" + w + " must be in [0,1]");
      detail::require(std::abs(pm + pn + po - 1.0) <= 1e-9,
                      "ParameterVector: send probabilities of party " + w + " must sum to 1");
    };
    party("a", mu_a, nu_a, o_a, p_mu_a, p_nu_a, p_o_a);
    party("b", mu_b, nu_b, o_b, p_mu_b, p_nu_b, p_o_b);
  }
};

// Per-combination tally: effective detections n, error detections t, and the
// pair-number normalizer used by the decoy estimators (detection factors
// removed, so n/pairs is a detection-conditioned gain).
struct PairTally {
  double n = 0.0;
  double t = 0.0;
  double pairs = 0.0;
};

// Counts for every aggregated intensity combination, Z-pairs and X-pairs.
// Indices are Level values per party; for X entries Signal/Decoy stand for
// the doubled intensities 2*mu and 2*nu. The both-vacuum combination appears
// in both tables (it feeds both estimator chains).
struct ObservedStats {
  std::array<std::array<PairTally, 3>, 3> z{};
  std::array<std::array<PairTally, 3>, 3> x{};
  double avg_response_prob = 0.0;  // per-round effective-detection probability
  double pair_rate = 0.0;          // pairs formed per emitted round

  PairTally& z_at(Level a, Level b) { return z[static_cast<int>(a)][static_cast<int>(b)]; }
  PairTally& x_at(Level a, Level b) { return x[static_cast<int>(a)][static_cast<int>(b)]; }
  const PairTally& z_at(Level a, Level b) const {
    return z[static_cast<int>(a)][static_cast<int>(b)];
  }
  const PairTally& x_at(Level a, Level b) const {
    return x[static_cast<int>(a)][static_cast<int>(b)];
  }
};

}  // namespace mpqkd

#endif  // MPQKD_TYPES_HPP
