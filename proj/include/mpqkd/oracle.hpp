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

#ifndef MPQKD_ORACLE_HPP
#define MPQKD_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mpqkd/channel.hpp"
#include "mpqkd/pso.hpp"
#include "mpqkd/types.hpp"

// Round-level Monte Carlo of the mode-pairing experiment, independent of the
// analytic model: threshold detectors on interfering coherent pulses with
// independent dark counts, neighbor pairing within the maximum interval, and
// the full basis/pair sifting logic. Used to cross-validate the expected
// statistics empirically.

namespace mpqkd {

struct RoundDraw {
  Level level_a = Level::Vacuum;
  Level level_b = Level::Vacuum;
  int theta_a = 0;  // modulated phase slice indices
  int theta_b = 0;
  double delta = 0.0;  // relative interference phase beyond the modulation
  bool click_left = false;
  bool click_right = false;

  bool effective() const { return click_left != click_right; }
};

namespace detail {

inline Level draw_level(double u, double p_signal, double p_decoy) {
  if (u < p_signal) return Level::Signal;
  if (u < p_signal + p_decoy) return Level::Decoy;
  return Level::Vacuum;
}

}  // namespace detail

// One emission round: intensities and phase slices drawn from the source
// configuration, the relative phase uniform, and each detector firing
// independently from its mean photon load (or a dark count).
inline RoundDraw simulate_round(const ParameterVector& g, const Transmittances& t,
                                double p_d, int num_slices, std::mt19937_64& rng) {
  RoundDraw r;
  r.level_a = detail::draw_level(detail::uniform01(rng), g.p_mu_a, g.p_nu_a);
  r.level_b = detail::draw_level(detail::uniform01(rng), g.p_mu_b, g.p_nu_b);
  r.theta_a = static_cast<int>(detail::uniform01(rng) * num_slices);
  r.theta_b = static_cast<int>(detail::uniform01(rng) * num_slices);
  r.delta = detail::uniform01(rng) * 2.0 * std::numbers::pi;

  const double ka = g.intensity_a(r.level_a);
  const double kb = g.intensity_b(r.level_b);
  const double slice = 2.0 * std::numbers::pi / num_slices;
  const double phase = r.delta + (r.theta_a - r.theta_b) * slice;
  const double half_sum = (ka * t.eta_a + kb * t.eta_b) / 2.0;
  const double beat = std::sqrt(t.eta_a * ka * t.eta_b * kb) * std::cos(phase);
  r.click_left = detail::uniform01(rng) < 1.0 - (1.0 - p_d) * std::exp(-(half_sum + beat));
  r.click_right = detail::uniform01(rng) < 1.0 - (1.0 - p_d) * std::exp(-(half_sum - beat));
  return r;
}

// How the un-modulated part of the interference phase evolves. The analytic
// X-pair formulas hold when that phase is stable across a pairing window, so
// the default freezes it per shard (the slow-drift limit); a per-round phase
// destroys X-basis correlations and is kept only as a falsification knob.
enum class PhaseModel { FrozenPerShard, FrozenValue, PerRound };

struct OracleOptions {
  int shards = 16;
  PhaseModel phase_model = PhaseModel::FrozenPerShard;
  double frozen_delta = 0.0;  // used with PhaseModel::FrozenValue
};

struct OracleRun {
  // Empirical n and t tallies; the pair-number normalizers are model-side
  // bookkeeping and stay zero here.
  ObservedStats stats;
  double rounds = 0.0;
  double effective_detections = 0.0;
  double total_pairs = 0.0;  // pairs formed, before sifting and classification
};

namespace detail {

struct ClickRecord {
  std::int64_t index = 0;
  int level_a = 0, level_b = 0;
  int theta_a = 0, theta_b = 0;
  bool right = false;
};

struct PartyBasis {
  enum Kind { Z, X, Zero, Discard } kind;
  int aggregate;  // non-vacuum level for Z, repeated level for X
};

inline PartyBasis classify_party(int level_i, int level_j) {
  const int vac = static_cast<int>(Level::Vacuum);
  if (level_i == vac && level_j == vac) return {PartyBasis::Zero, vac};
  if (level_j == vac) return {PartyBasis::Z, level_i};
  if (level_i == vac) return {PartyBasis::Z, level_j};
  if (level_i == level_j) return {PartyBasis::X, level_i};
  return {PartyBasis::Discard, -1};
}

class PairTallier {
 public:
  PairTallier(ObservedStats& stats, const ProtocolConfig& proto, std::mt19937_64& rng)
      : stats_(stats), proto_(proto), rng_(rng) {}

  void operator()(const ClickRecord& a, const ClickRecord& b) {
    const PartyBasis pa = classify_party(a.level_a, b.level_a);
    const PartyBasis pb = classify_party(a.level_b, b.level_b);
    if (pa.kind == PartyBasis::Discard || pb.kind == PartyBasis::Discard) return;
    const bool a_x = pa.kind == PartyBasis::X;
    const bool b_x = pb.kind == PartyBasis::X;
    const bool a_z = pa.kind == PartyBasis::Z;
    const bool b_z = pb.kind == PartyBasis::Z;
    if ((a_x && b_z) || (a_z && b_x)) return;

    if (pa.kind == PartyBasis::Zero && pb.kind == PartyBasis::Zero) {
      // Both-vacuum pairs carry no bit at all; they are booked in both tables
      // with coin-flip errors.
      tally(stats_.z_at(Level::Vacuum, Level::Vacuum), coin());
      tally(stats_.x_at(Level::Vacuum, Level::Vacuum), coin());
      return;
    }

    if (!a_x && !b_x) {
      // Z-pair. A party's bit says which slot held its vacuum pulse; the two
      // conventions are mirrored so that alternating emissions agree.
      const int vac = static_cast<int>(Level::Vacuum);
      const bool bit_a = a_z ? (a.level_a == vac) : coin();
      const bool bit_b = b_z ? (b.level_b == vac) : coin();
      const bool err = (bit_a != bit_b) != bernoulli(proto_.e_d_z);
      tally(z_entry(pa, pb), err);
      return;
    }

    if (a_x && b_x) {
      const int slices = proto_.num_slices;
      const int half = slices / 2;
      const int da = ((a.theta_a - b.theta_a) % slices + slices) % slices;
      const int db = ((a.theta_b - b.theta_b) % slices + slices) % slices;
      const bool bit_a = da >= half;
      const bool bit_b = db >= half;
      const double slice = 2.0 * std::numbers::pi / slices;
      const double align_gap = std::abs((da % half) * slice - (db % half) * slice);
      bool flip = false;
      if (align_gap <= proto_.delta_phase + 1e-12) {
        flip = false;
      } else if (align_gap >= std::numbers::pi - proto_.delta_phase - 1e-12) {
        flip = true;
      } else {
        return;  // sifted out
      }
      // Clicks on different detectors signal a pi relative phase.
      const bool pattern = a.right != b.right;
      const bool err = (bit_a != (bit_b != flip != pattern)) != bernoulli(proto_.e_d_x);
      tally(stats_.x_at(static_cast<Level>(pa.aggregate), static_cast<Level>(pb.aggregate)), err);
      return;
    }

    // X-pair with one vacuum party: kept without sifting, bit undefined.
    const Level la = a_x ? static_cast<Level>(pa.aggregate) : Level::Vacuum;
    const Level lb = b_x ? static_cast<Level>(pb.aggregate) : Level::Vacuum;
    tally(stats_.x_at(la, lb), coin());
  }

 private:
  PairTally& z_entry(const PartyBasis& pa, const PartyBasis& pb) {
    const Level la = pa.kind == PartyBasis::Z ? static_cast<Level>(pa.aggregate) : Level::Vacuum;
    const Level lb = pb.kind == PartyBasis::Z ? static_cast<Level>(pb.aggregate) : Level::Vacuum;
    return stats_.z_at(la, lb);
  }
  bool coin() { return uniform01(rng_) < 0.5; }
  bool bernoulli(double p) { return uniform01(rng_) < p; }
  void tally(PairTally& e, bool err) {
    e.n += 1.0;
    if (err) e.t += 1.0;
  }

  ObservedStats& stats_;
  const ProtocolConfig& proto_;
  std::mt19937_64& rng_;
};

}  // namespace detail

// Streams n_rounds emission rounds through the click model, pairs effective
// detections with their next neighbor within the maximum interval (a click
// whose window closes empty is dropped and the scan restarts at the next
// click), applies the sifting tables and tallies counts. Rounds are split
// into shards, each with its own derived RNG stream and its own frozen phase;
// results are deterministic for a fixed (seed, shard count).
inline OracleRun simulate_experiment(const ParameterVector& g, const ChannelConfig& cfg,
                                     const ProtocolConfig& proto, double n_rounds,
                                     std::uint64_t seed, const OracleOptions& opt = {}) {
  g.validate();
  cfg.validate();
  proto.validate();
  if (!(n_rounds >= 1.0))
    throw std::invalid_argument("simulate_experiment: n_rounds must be >= 1");
  if (opt.shards < 1) throw std::invalid_argument("simulate_experiment: shards must be >= 1");

  const Transmittances t = transmittance(cfg);
  const int slices = proto.num_slices;
  const double slice = 2.0 * std::numbers::pi / slices;
  const std::int64_t total_rounds = static_cast<std::int64_t>(n_rounds);
  const std::int64_t per_shard = total_rounds / opt.shards;

  OracleRun run;
  run.rounds = static_cast<double>(total_rounds);

  const double p_sig_a = g.p_mu_a, p_dec_a = g.p_nu_a;
  const double p_sig_b = g.p_mu_b, p_dec_b = g.p_nu_b;

  for (int shard = 0; shard < opt.shards; ++shard) {
    std::mt19937_64 rng(detail::derive_seed(seed, static_cast<std::uint64_t>(shard)));
    const std::int64_t rounds =
        shard == opt.shards - 1 ? total_rounds - per_shard * shard : per_shard;

    double delta = 0.0;
    if (opt.phase_model == PhaseModel::FrozenPerShard)
      delta = detail::uniform01(rng) * 2.0 * std::numbers::pi;
    else if (opt.phase_model == PhaseModel::FrozenValue)
      delta = opt.frozen_delta;

    // Click probabilities per (intensity pair, phase-slice difference).
    std::vector<double> prob_left(9 * slices), prob_right(9 * slices);
    const bool frozen = opt.phase_model != PhaseModel::PerRound;
    if (frozen) {
      for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
          const double ka = g.intensity_a(static_cast<Level>(ia));
          const double kb = g.intensity_b(static_cast<Level>(ib));
          const double half_sum = (ka * t.eta_a + kb * t.eta_b) / 2.0;
          const double amp = std::sqrt(t.eta_a * ka * t.eta_b * kb);
          for (int d = 0; d < slices; ++d) {
            const double beat = amp * std::cos(delta + d * slice);
            prob_left[(ia * 3 + ib) * slices + d] =
                1.0 - (1.0 - cfg.p_d) * std::exp(-(half_sum + beat));
            prob_right[(ia * 3 + ib) * slices + d] =
                1.0 - (1.0 - cfg.p_d) * std::exp(-(half_sum - beat));
          }
        }
      }
    }

    detail::PairTallier tally(run.stats, proto, rng);
    detail::ClickRecord pending;
    bool have_pending = false;

    for (std::int64_t i = 0; i < rounds; ++i) {
      const int ia = static_cast<int>(detail::draw_level(detail::uniform01(rng), p_sig_a, p_dec_a));
      const int ib = static_cast<int>(detail::draw_level(detail::uniform01(rng), p_sig_b, p_dec_b));
      const int tha = static_cast<int>(detail::uniform01(rng) * slices);
      const int thb = static_cast<int>(detail::uniform01(rng) * slices);
      const int dth = ((tha - thb) % slices + slices) % slices;

      double pl, pr;
      if (frozen) {
        pl = prob_left[(ia * 3 + ib) * slices + dth];
        pr = prob_right[(ia * 3 + ib) * slices + dth];
      } else {
        const double ka = g.intensity_a(static_cast<Level>(ia));
        const double kb = g.intensity_b(static_cast<Level>(ib));
        const double half_sum = (ka * t.eta_a + kb * t.eta_b) / 2.0;
        const double phase = detail::uniform01(rng) * 2.0 * std::numbers::pi + dth * slice;
        const double beat = std::sqrt(t.eta_a * ka * t.eta_b * kb) * std::cos(phase);
        pl = 1.0 - (1.0 - cfg.p_d) * std::exp(-(half_sum + beat));
        pr = 1.0 - (1.0 - cfg.p_d) * std::exp(-(half_sum - beat));
      }

      const bool cl = detail::uniform01(rng) < pl;
      const bool cr = detail::uniform01(rng) < pr;
      if (cl == cr) continue;  // no click, or a double click: not effective
      run.effective_detections += 1.0;

      detail::ClickRecord rec{i, ia, ib, tha, thb, cr};
      if (have_pending && i - pending.index <= proto.pairing_interval) {
        run.total_pairs += 1.0;
        tally(pending, rec);
        have_pending = false;
      } else {
        pending = rec;  // replaces a click whose window closed empty
        have_pending = true;
      }
    }
  }

  run.stats.avg_response_prob = run.effective_detections / run.rounds;
  run.stats.pair_rate = run.total_pairs / run.rounds;
  return run;
}

// ---------------------------------------------------------------------------
// Empirical-vs-analytic comparison

namespace detail {

// Acklam's rational approximation of the standard normal quantile.
inline double inv_norm_cdf(double p) {
  static const double a1 = -39.69683028665376, a2 = 220.9460984245205,
                      a3 = -275.9285104469687, a4 = 138.3577518672690,
                      a5 = -30.66479806614716, a6 = 2.506628277459239;
  static const double b1 = -54.47609879822406, b2 = 161.5858368580409,
                      b3 = -155.6989798598866, b4 = 66.80131188771972,
                      b5 = -13.28068155288572;
  static const double c1 = -7.784894002430293e-03, c2 = -3.223964580411365e-01,
                      c3 = -2.400758277161838, c4 = -2.549732539343734,
                      c5 = 4.374664141464968, c6 = 2.938163982698783;
  static const double d1 = 7.784695709041462e-03, d2 = 3.224671290700398e-01,
                      d3 = 2.445134137142996, d4 = 3.754408661907416;
  const double plow = 0.02425, phigh = 1.0 - plow;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c1 * q + c2) * q + c3) * q + c4) * q + c5) * q + c6) /
           (((((d1 * q + d2) * q + d3) * q + d4) * q) + 1.0);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c1 * q + c2) * q + c3) * q + c4) * q + c5) * q + c6) /
           (((((d1 * q + d2) * q + d3) * q + d4) * q) + 1.0);
  }
  const double q = p - 0.5, r = q * q;
  return (((((a1 * r + a2) * r + a3) * r + a4) * r + a5) * r + a6) * q /
         (((((b1 * r + b2) * r + b3) * r + b4) * r + b5) * r + 1.0);
}

// Normal-equivalent z of a Poisson observation via the mid-P value; exact
// enough for the small means where the normal approximation breaks down.
inline double poisson_midp_z(double observed, double mean) {
  const std::int64_t k_obs = static_cast<std::int64_t>(std::llround(observed));
  double pmf = std::exp(-mean);
  double cdf_below = 0.0;
  for (std::int64_t k = 0; k < k_obs; ++k) {
    cdf_below += pmf;
    pmf *= mean / static_cast<double>(k + 1);
    if (k > 4 * (mean + 50.0)) return 8.0;  // far beyond any plausible tail
  }
  const double midp = std::clamp(cdf_below + 0.5 * pmf, 1e-15, 1.0 - 1e-15);
  return std::clamp(inv_norm_cdf(midp), -8.0, 8.0);
}

}  // namespace detail

// Variance of the number of pairs formed in `rounds` rounds, from the renewal
// structure of the pairing scan (geometric waits, truncated windows).
inline double pair_count_variance(double p, std::int64_t l, double rounds) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("pair_count_variance: p must be in (0,1]");
  const double hit = -std::expm1(static_cast<double>(l) * std::log1p(-p));
  const double mean_g = 1.0 / p;
  const double mean_g2 = (2.0 - p) / (p * p);
  const double var_g = (1.0 - p) / (p * p);
  const double mean_w = 1.0 / (p * hit);
  const double tail = std::exp(static_cast<double>(l) * std::log1p(-p)) *
                      (1.0 + static_cast<double>(l) * p) / p;  // E[G; G > l]
  const double mean_w2 = (mean_g2 + 2.0 * tail * mean_w) / hit;
  const double var_w = mean_w2 - mean_w * mean_w;
  const double cycle_mean = mean_g + mean_w;
  const double cycle_var = var_g + var_w;
  return rounds * cycle_var / (cycle_mean * cycle_mean * cycle_mean);
}

struct ComparisonRow {
  std::string entry;
  double observed = 0.0;
  double expected = 0.0;
  double z = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double max_abs_z = 0.0;

  bool pass(double z_max = 4.0) const { return max_abs_z <= z_max; }
};

// Scores every observed tally against the analytic expectation at the same
// round count. Small means use an exact Poisson mid-P z; large means a normal
// z with the multinomial shrinkage and the pair-count variance folded in.
inline ComparisonReport compare_to_model(const OracleRun& run, const ParameterVector& g,
                                         const ChannelConfig& cfg,
                                         const ProtocolConfig& proto) {
  ProtocolConfig scaled = proto;
  scaled.total_pulses = run.rounds;
  const ObservedStats model = expected_statistics(g, cfg, scaled);
  const double expected_pairs = run.rounds * model.pair_rate;
  const double pair_var = pair_count_variance(model.avg_response_prob,
                                              proto.pairing_interval, run.rounds);

  ComparisonReport report;
  auto z_of = [&](double obs, double mean) {
    if (mean <= 0.0) return obs > 0.0 ? 8.0 : 0.0;
    if (mean < 25.0) return detail::poisson_midp_z(obs, mean);
    const double share = std::min(mean / expected_pairs, 1.0);
    const double var = mean * (1.0 - share) + share * share * pair_var;
    return (obs - mean) / std::sqrt(var);
  };
  auto add = [&](const std::string& name, double obs, double mean, double z) {
    report.rows.push_back({name, obs, mean, z});
    report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
  };

  for (Level a : kLevels) {
    for (Level b : kLevels) {
      const std::string combo =
          std::string(level_name(a)) + "," + level_name(b);
      add("Z(" + combo + ") n", run.stats.z_at(a, b).n, model.z_at(a, b).n,
          z_of(run.stats.z_at(a, b).n, model.z_at(a, b).n));
      add("Z(" + combo + ") t", run.stats.z_at(a, b).t, model.z_at(a, b).t,
          z_of(run.stats.z_at(a, b).t, model.z_at(a, b).t));
    }
  }
  for (Level a : kLevels) {
    for (Level b : kLevels) {
      const std::string combo =
          std::string(level_name(a)) + "," + level_name(b);
      add("X(" + combo + ") n", run.stats.x_at(a, b).n, model.x_at(a, b).n,
          z_of(run.stats.x_at(a, b).n, model.x_at(a, b).n));
      add("X(" + combo + ") t", run.stats.x_at(a, b).t, model.x_at(a, b).t,
          z_of(run.stats.x_at(a, b).t, model.x_at(a, b).t));
    }
  }
  add("total_pairs", run.total_pairs, expected_pairs,
      (run.total_pairs - expected_pairs) / std::sqrt(pair_var));
  return report;
}

}  // namespace mpqkd

#endif  // MPQKD_ORACLE_HPP
