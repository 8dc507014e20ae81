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

#ifndef MPQKD_SECURITY_HPP
#define MPQKD_SECURITY_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "mpqkd/channel.hpp"
#include "mpqkd/math.hpp"
#include "mpqkd/stats.hpp"
#include "mpqkd/types.hpp"

// Finite-key decoy-state estimator chain: single-photon yield, bit and phase
// error bounds, secure key length and rate. All clamps are conservative; they
// can only shrink the claimed key.

namespace mpqkd {

enum class RateStatus {
  Ok,
  DegenerateChannel,     // average response probability underflowed
  EstimatorDegenerate,   // a normalizer vanished or the yield bound collapsed
  PhysicalityViolation,  // a count, gain or error rate left its physical range
  BitErrorAbort,         // X-basis single-photon bit error reached 1/2
  PhaseErrorAbort,       // phase error bound reached 1/2
};

inline const char* rate_status_name(RateStatus s) {
  switch (s) {
    case RateStatus::Ok:                   return "ok";
    case RateStatus::DegenerateChannel:    return "degenerate_channel";
    case RateStatus::EstimatorDegenerate:  return "estimator_degenerate";
    case RateStatus::PhysicalityViolation: return "physicality_violation";
    case RateStatus::BitErrorAbort:        return "bit_error_abort";
    default:                               return "phase_error_abort";
  }
}

struct KeyRateBreakdown {
  double y11_z = 0.0;      // Z-basis single-photon pair yield, lower bound
  double m11_z = 0.0;      // single-photon pair count, Z
  double m11_x = 0.0;      // single-photon pair count, X
  double e11_x_bit = 0.0;  // X-basis single-photon bit error, upper bound
  double e11_z_ph = 0.0;   // Z-basis single-photon phase error, upper bound
  double m_mumu = 0.0;     // signal-signal Z-pair count
  double e_mumu = 0.0;     // its bit error rate
  double lambda_ec = 0.0;  // error-correction leakage, bits
  double key_length = 0.0; // secure key length, bits
  double rate = 0.0;       // bits per emitted pulse, 2 * key_length / N
  RateStatus status = RateStatus::Ok;

  const char* reason() const { return rate_status_name(status); }
};

// Lower bound on the yield of Z-pairs where both parties contributed exactly
// one photon, from the three-intensity decoy combination of detection gains
// with Chernoff-bounded counts. Returns the result clamped to [0,1]; a
// non-positive value means the estimate collapsed. Throws only if the
// decoy-ordering denominator is not positive, which valid parameter vectors
// rule out.
inline double estimate_y11(const ObservedStats& s, const SecurityBudget& budget,
                           const ParameterVector& g) {
  constexpr Level kSig = Level::Signal, kDec = Level::Decoy, kVac = Level::Vacuum;
  const double a0_nu = poisson_coeff(0, g.nu_a), a1_nu = poisson_coeff(1, g.nu_a);
  const double a0_mu = poisson_coeff(0, g.mu_a), a1_mu = poisson_coeff(1, g.mu_a);
  const double b0_nu = poisson_coeff(0, g.nu_b), b1_nu = poisson_coeff(1, g.nu_b);
  const double b0_mu = poisson_coeff(0, g.mu_b), b1_mu = poisson_coeff(1, g.mu_b);
  const double b2_nu = poisson_coeff(2, g.nu_b), b2_mu = poisson_coeff(2, g.mu_b);

  const double denom = a1_nu * a1_mu * (b1_nu * b2_mu - b1_mu * b2_nu);
  if (!(denom > 0.0))
    throw std::domain_error("estimate_y11: decoy denominator not positive");

  auto gain_lo = [&](const PairTally& e) {
    return chernoff_lower(e.n, budget.eps_cb) / e.pairs;
  };
  auto gain_hi = [&](const PairTally& e) {
    return chernoff_upper(e.n, budget.eps_cb) / e.pairs;
  };

  const double f_lower =
      a1_mu * b2_mu * gain_lo(s.z_at(kDec, kDec)) +
      a1_nu * b2_nu * a0_mu * gain_lo(s.z_at(kVac, kSig)) +
      a1_nu * b2_nu * b0_mu * gain_lo(s.z_at(kSig, kVac)) +
      (a1_mu * b2_mu * a0_nu * b0_nu - a1_nu * b2_nu * a0_mu * b0_mu) *
          gain_lo(s.z_at(kVac, kVac));
  const double f_upper =
      a1_nu * b2_nu * gain_hi(s.z_at(kSig, kSig)) +
      a1_mu * b2_mu * a0_nu * gain_hi(s.z_at(kVac, kDec)) +
      a1_mu * b2_mu * b0_nu * gain_hi(s.z_at(kDec, kVac));

  return std::clamp((f_lower - f_upper) / denom, 0.0, 1.0);
}

// Single-photon pair count among signal-signal Z-pairs.
inline double compute_m11_z(double y11, const ObservedStats& s, const ParameterVector& g) {
  return s.z_at(Level::Signal, Level::Signal).pairs * g.mu_a * g.mu_b *
         std::exp(-g.mu_a - g.mu_b) * y11;
}

// Mirror construction on the decoy-decoy X-pairs, reusing the Z-basis yield.
inline double compute_m11_x(double y11, const ObservedStats& s, const ParameterVector& g) {
  return s.x_at(Level::Decoy, Level::Decoy).pairs * poisson_coeff(1, 2.0 * g.nu_a) *
         poisson_coeff(1, 2.0 * g.nu_b) * y11;
}

// Upper bound on the X-basis single-photon bit error rate. Returns the value
// clamped to [0, 1/2]; the unclamped value is reported through *pre_clamp so
// the caller can distinguish a genuine abort.
inline double estimate_e11_bit(const ObservedStats& s, double y11,
                               const SecurityBudget& budget, const ParameterVector& g,
                               double* pre_clamp = nullptr) {
  constexpr Level kDec = Level::Decoy, kVac = Level::Vacuum;
  if (!(y11 > 0.0)) throw std::domain_error("estimate_e11_bit: y11 must be > 0");
  const double a0 = poisson_coeff(0, 2.0 * g.nu_a), a1 = poisson_coeff(1, 2.0 * g.nu_a);
  const double b0 = poisson_coeff(0, 2.0 * g.nu_b), b1 = poisson_coeff(1, 2.0 * g.nu_b);

  const double t_upper =
      chernoff_upper(s.x_at(kDec, kDec).t, budget.eps_cb) / s.x_at(kDec, kDec).pairs +
      a0 * b0 * chernoff_upper(s.x_at(kVac, kVac).t, budget.eps_cb) / s.x_at(kVac, kVac).pairs;
  const double t_lower =
      a0 * chernoff_lower(s.x_at(kVac, kDec).t, budget.eps_cb) / s.x_at(kVac, kDec).pairs +
      b0 * chernoff_lower(s.x_at(kDec, kVac).t, budget.eps_cb) / s.x_at(kDec, kVac).pairs;

  const double raw = (t_upper - t_lower) / (a1 * b1 * y11);
  if (pre_clamp) *pre_clamp = raw;
  return std::clamp(raw, 0.0, 0.5);
}

// Phase error bound for Z-basis single-photon pairs: the X-basis bit error
// plus the finite-sample correction, capped at 1/2.
inline double phase_error_rate(double e11_bit, double m11_x, double m11_z, double xi) {
  if (!(m11_x > 0.0 && m11_z > 0.0))
    throw std::domain_error("phase_error_rate: single-photon counts must be > 0");
  if (!(e11_bit >= 0.0 && e11_bit <= 0.5))
    throw std::domain_error("phase_error_rate: e11_bit must be in [0,0.5]");
  return std::min(e11_bit + gamma_sampling(xi, e11_bit, m11_x, m11_z), 0.5);
}

// Secure key length: the single-photon entropy term minus error-correction
// leakage and the composable-security constants, floored at zero.
inline double key_length(double m11_z, double e11_ph, double m_mumu, double e_mumu,
                         const ProtocolConfig& proto) {
  const double lambda_ec = proto.f_ec * m_mumu * binary_entropy(e_mumu);
  const double l = m11_z * (1.0 - binary_entropy(e11_ph)) - lambda_ec -
                   std::log2(2.0 / proto.budget.eps_cor) -
                   2.0 * std::log2(1.0 / proto.budget.eps_sec);
  return std::max(l, 0.0);
}

// Full chain from source parameters to the secure key rate R = 2L/N. Any
// degenerate or aborting sub-step, and any intermediate quantity outside its
// physical range (counts positive, gains in (0,1), error rates in (0,1/2)),
// yields rate zero with the reason recorded. An invalid ParameterVector is a
// caller error and throws instead.
inline KeyRateBreakdown secure_key_rate(const ParameterVector& g, const ChannelConfig& cfg,
                                        const ProtocolConfig& proto) {
  g.validate();
  cfg.validate();
  proto.validate();

  KeyRateBreakdown out;
  const Transmittances t = transmittance(cfg);
  const double p = avg_response_prob(g, t, cfg.p_d);
  if (!(p > 0.0)) {
    out.status = RateStatus::DegenerateChannel;
    return out;
  }
  const ObservedStats s = expected_statistics(g, cfg, proto);

  for (const auto& table : {&s.z, &s.x}) {
    for (const auto& row : *table) {
      for (const PairTally& e : row) {
        if (!(e.pairs > 0.0)) {
          out.status = RateStatus::EstimatorDegenerate;
          return out;
        }
        const double gain = e.n / e.pairs;
        if (!(e.n > 0.0 && e.t > 0.0 && gain > 0.0 && gain < 1.0)) {
          out.status = RateStatus::PhysicalityViolation;
          return out;
        }
      }
    }
  }

  out.m_mumu = s.z_at(Level::Signal, Level::Signal).n;
  out.e_mumu = s.z_at(Level::Signal, Level::Signal).t / out.m_mumu;
  if (!(out.e_mumu > 0.0 && out.e_mumu < 0.5)) {
    out.status = RateStatus::PhysicalityViolation;
    return out;
  }

  out.y11_z = estimate_y11(s, proto.budget, g);
  if (!(out.y11_z > 0.0)) {
    out.status = RateStatus::EstimatorDegenerate;
    return out;
  }
  out.m11_z = compute_m11_z(out.y11_z, s, g);
  out.m11_x = compute_m11_x(out.y11_z, s, g);

  double e11_raw = 0.0;
  out.e11_x_bit = estimate_e11_bit(s, out.y11_z, proto.budget, g, &e11_raw);
  if (e11_raw > 0.5) {
    out.status = RateStatus::BitErrorAbort;
    return out;
  }
  if (!(out.e11_x_bit > 0.0)) {
    out.status = RateStatus::PhysicalityViolation;
    return out;
  }

  out.e11_z_ph = phase_error_rate(out.e11_x_bit, out.m11_x, out.m11_z, proto.budget.xi_ee);
  if (out.e11_z_ph >= 0.5) {
    out.status = RateStatus::PhaseErrorAbort;
    return out;
  }

  out.lambda_ec = proto.f_ec * out.m_mumu * binary_entropy(out.e_mumu);
  out.key_length = key_length(out.m11_z, out.e11_z_ph, out.m_mumu, out.e_mumu, proto);
  out.rate = 2.0 * out.key_length / proto.total_pulses;
  return out;
}

}  // namespace mpqkd

#endif  // MPQKD_SECURITY_HPP
