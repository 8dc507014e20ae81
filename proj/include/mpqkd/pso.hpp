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

#ifndef MPQKD_PSO_HPP
#define MPQKD_PSO_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/security.hpp"
#include "mpqkd/types.hpp"

// Particle swarm maximizer over the feasible source-parameter region. The
// swarm anneals its inertia weight and both learning factors linearly, and a
// fixed leading fraction of the particles re-randomizes every iteration to
// keep exploring after the rest has contracted.

namespace mpqkd {

struct PsoConfig {
  int n_particles = 200;
  int max_iters = 400;
  double w_init = 0.9, w_final = 0.4;
  double c1_min = 0.5, c1_max = 2.5;
  double c2_min = 0.5, c2_max = 2.5;
  double h = 0.1;          // exploration ratio
  double zeta = 1e-4;      // relative improvement threshold
  int patience = 50;       // consecutive stalled iterations before stopping
  double v_max_frac = 0.2; // velocity clamp as fraction of each dimension's range
  std::uint64_t seed = 1;

  void validate() const {
    detail::require(n_particles >= 2, "PsoConfig: n_particles must be >= 2");
    detail::require(max_iters >= 1, "PsoConfig: max_iters must be >= 1");
    detail::require(w_init >= w_final && w_final > 0.0,
                    "PsoConfig: inertia weights must satisfy w_init >= w_final > 0");
    detail::require(c1_max >= c1_min && c1_min > 0.0,
                    "PsoConfig: c1 range must satisfy c1_max >= c1_min > 0");
    detail::require(c2_max >= c2_min && c2_min > 0.0,
                    "PsoConfig: c2 range must satisfy c2_max >= c2_min > 0");
    detail::require(h >= 0.0 && h < 1.0, "PsoConfig: h must be in [0,1)");
    detail::require(zeta >= 0.0, "PsoConfig: zeta must be >= 0");
    detail::require(patience >= 1, "PsoConfig: patience must be >= 1");
    detail::require(v_max_frac > 0.0, "PsoConfig: v_max_frac must be > 0");
  }
};

// Free search space: the two vacuum intensities are pinned at zero and the
// vacuum probabilities follow from the per-party simplex, leaving eight
// dimensions, all boxed to [1e-6, 1 - 1e-6].
inline constexpr int kFreeDims = 8;
using FreeVector = std::array<double, kFreeDims>;
inline constexpr double kBoxLo = 1e-6;
inline constexpr double kBoxHi = 1.0 - 1e-6;

inline FreeVector to_free(const ParameterVector& g) {
  return {g.mu_a, g.nu_a, g.p_mu_a, g.p_nu_a, g.mu_b, g.nu_b, g.p_mu_b, g.p_nu_b};
}

// Projects arbitrary finite coordinates onto the feasible region: intensities
// boxed with the decoy forced strictly below the signal, send probabilities
// boxed, rescaled onto the open simplex and floored.
inline FreeVector repair_free(FreeVector v) {
  auto clip = [](double x) { return std::clamp(x, kBoxLo, kBoxHi); };
  for (int base : {0, 4}) {
    double& mu = v[base];
    double& nu = v[base + 1];
    mu = clip(mu);
    nu = clip(nu);
    if (nu >= mu) nu = mu * (1.0 - 1e-3);
    double& pm = v[base + 2];
    double& pn = v[base + 3];
    pm = clip(pm);
    pn = clip(pn);
    const double sum = pm + pn;
    if (sum >= 1.0) {
      pm *= (1.0 - 1e-6) / sum;
      pn *= (1.0 - 1e-6) / sum;
    }
    pm = std::max(pm, kBoxLo);
    pn = std::max(pn, kBoxLo);
  }
  return v;
}

// Assumes feasible free coordinates; derives the vacuum probabilities.
inline ParameterVector params_from_free(const FreeVector& v) {
  ParameterVector g;
  g.mu_a = v[0]; g.nu_a = v[1]; g.o_a = 0.0;
  g.p_mu_a = v[2]; g.p_nu_a = v[3]; g.p_o_a = 1.0 - v[2] - v[3];
  g.mu_b = v[4]; g.nu_b = v[5]; g.o_b = 0.0;
  g.p_mu_b = v[6]; g.p_nu_b = v[7]; g.p_o_b = 1.0 - v[6] - v[7];
  return g;
}

inline ParameterVector repair(const FreeVector& raw) {
  return params_from_free(repair_free(raw));
}

// Linear inertia descent from w_init at t = 0 to w_final at t = max_iters.
inline double schedule_inertia(int t, const PsoConfig& cfg) {
  return cfg.w_init - (cfg.w_init - cfg.w_final) / cfg.max_iters * t;
}

// Learning factors decay from c_max at t = 1 toward c_min.
inline double schedule_learning(int t, double c_min, double c_max, int total_iters) {
  return c_min + (c_max - c_min) * (1.0 - static_cast<double>(t - 1) / total_iters);
}

inline int exploration_count(int n_particles, double h) {
  return static_cast<int>(n_particles * h);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
  return splitmix64(s);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace detail

struct SwarmView {
  int iteration;
  std::span<const FreeVector> positions;
  std::span<const FreeVector> velocities;
  double best_fitness;
};

struct PsoResult {
  ParameterVector best;
  KeyRateBreakdown breakdown;  // filled by optimize(); zero otherwise
  double best_fitness = 0.0;
  int iterations = 0;
  std::string termination;              // "converged" or "max_iterations"
  std::vector<double> best_history;     // global best after each iteration
};

// Core swarm loop over an arbitrary fitness. Each particle owns an RNG stream
// derived from the master seed, so the result is deterministic regardless of
// how fitness evaluations would be scheduled.
template <class Fitness, class Observer>
PsoResult optimize_with(Fitness&& fitness, const PsoConfig& cfg, Observer&& observe) {
  cfg.validate();
  const int n = cfg.n_particles;
  const double v_max = cfg.v_max_frac * (kBoxHi - kBoxLo);

  std::vector<std::mt19937_64> rng;
  rng.reserve(n);
  for (int i = 0; i < n; ++i) rng.emplace_back(detail::derive_seed(cfg.seed, i));

  std::vector<FreeVector> pos(n), vel(n), pbest(n);
  std::vector<double> pfit(n);
  FreeVector gbest{};
  double gfit = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < kFreeDims; ++d) {
      pos[i][d] = detail::uniform(rng[i], kBoxLo, kBoxHi);
      vel[i][d] = detail::uniform(rng[i], -v_max, v_max);
    }
    pos[i] = repair_free(pos[i]);
    pfit[i] = fitness(params_from_free(pos[i]));
    pbest[i] = pos[i];
    if (pfit[i] > gfit) {
      gfit = pfit[i];
      gbest = pos[i];
    }
  }

  PsoResult res;
  const int n_explore = exploration_count(n, cfg.h);
  int stall = 0;
  int t = 0;
  for (t = 1; t <= cfg.max_iters; ++t) {
    const double w = schedule_inertia(t, cfg);
    const double c1 = schedule_learning(t, cfg.c1_min, cfg.c1_max, cfg.max_iters);
    const double c2 = schedule_learning(t, cfg.c2_min, cfg.c2_max, cfg.max_iters);

    for (int i = 0; i < n; ++i) {
      if (i < n_explore) {
        for (int d = 0; d < kFreeDims; ++d) {
          pos[i][d] = detail::uniform(rng[i], kBoxLo, kBoxHi);
          vel[i][d] = detail::uniform(rng[i], -v_max, v_max);
        }
        pos[i] = repair_free(pos[i]);
      } else {
        for (int d = 0; d < kFreeDims; ++d) {
          const double r1 = detail::uniform01(rng[i]);
          const double r2 = detail::uniform01(rng[i]);
          double v = w * vel[i][d] + c1 * r1 * (pbest[i][d] - pos[i][d]) +
                     c2 * r2 * (gbest[d] - pos[i][d]);
          vel[i][d] = std::clamp(v, -v_max, v_max);
          pos[i][d] += vel[i][d];
        }
        pos[i] = repair_free(pos[i]);
      }
    }

    const double gfit_prev = gfit;
    for (int i = 0; i < n; ++i) {
      const double f = fitness(params_from_free(pos[i]));
      if (f > pfit[i]) {
        pfit[i] = f;
        pbest[i] = pos[i];
      }
      if (f > gfit) {
        gfit = f;
        gbest = pos[i];
      }
    }

    res.best_history.push_back(gfit);
    observe(SwarmView{t, pos, vel, gfit});

    const bool improved =
        gfit_prev > 0.0 ? gfit > gfit_prev * (1.0 + cfg.zeta) : gfit > gfit_prev;
    stall = improved ? 0 : stall + 1;
    if (stall >= cfg.patience) {
      res.termination = "converged";
      break;
    }
  }
  if (res.termination.empty()) res.termination = "max_iterations";

  res.best = params_from_free(gbest);
  res.best_fitness = gfit;
  res.iterations = std::min(t, cfg.max_iters);
  return res;
}

template <class Fitness>
PsoResult optimize_with(Fitness&& fitness, const PsoConfig& cfg) {
  return optimize_with(std::forward<Fitness>(fitness), cfg, [](const SwarmView&) {});
}

// Production entry point: maximizes the secure key rate. Infeasible
// intermediate regimes score zero, so the swarm keeps its momentum near the
// feasibility boundary instead of being resampled.
inline PsoResult optimize(const ChannelConfig& cfg, const ProtocolConfig& proto,
                          const PsoConfig& pso) {
  cfg.validate();
  proto.validate();
  auto fitness = [&](const ParameterVector& g) { return secure_key_rate(g, cfg, proto).rate; };
  PsoResult res = optimize_with(fitness, pso);
  res.breakdown = secure_key_rate(res.best, cfg, proto);
  return res;
}

}  // namespace mpqkd

#endif  // MPQKD_PSO_HPP
