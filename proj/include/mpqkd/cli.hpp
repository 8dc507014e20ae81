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

#ifndef MPQKD_CLI_HPP
#define MPQKD_CLI_HPP

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpqkd/io.hpp"
#include "mpqkd/oracle.hpp"
#include "mpqkd/pso.hpp"
#include "mpqkd/security.hpp"

// Command implementations behind the CLI front end, kept as plain functions
// so the test suites drive the exact same code paths.

namespace mpqkd {

inline json breakdown_to_json(const KeyRateBreakdown& b) {
  return json{{"y11_z", b.y11_z},
              {"m11_z", b.m11_z},
              {"m11_x", b.m11_x},
              {"e11_x_bit", b.e11_x_bit},
              {"e11_z_ph", b.e11_z_ph},
              {"m_mumu", b.m_mumu},
              {"e_mumu", b.e_mumu},
              {"lambda_ec", b.lambda_ec},
              {"key_length", b.key_length},
              {"rate", b.rate},
              {"reason", b.reason()}};
}

inline std::string breakdown_to_text(const KeyRateBreakdown& b) {
  std::ostringstream os;
  os << "y11_z      = " << format_sci(b.y11_z) << "\n"
     << "m11_z      = " << format_sci(b.m11_z) << "\n"
     << "m11_x      = " << format_sci(b.m11_x) << "\n"
     << "e11_x_bit  = " << format_sci(b.e11_x_bit) << "\n"
     << "e11_z_ph   = " << format_sci(b.e11_z_ph) << "\n"
     << "m_mumu     = " << format_sci(b.m_mumu) << "\n"
     << "e_mumu     = " << format_sci(b.e_mumu) << "\n"
     << "lambda_ec  = " << format_sci(b.lambda_ec) << "\n"
     << "key_length = " << format_sci(b.key_length) << "\n"
     << "rate       = " << format_sci(b.rate) << "\n"
     << "reason     = " << b.reason() << "\n";
  return os.str();
}

// evaluate: key-rate breakdown at the configured source parameters. The
// emitted JSON doubles as a loadable config.
inline json cmd_evaluate(const FullConfig& cfg) {
  if (!cfg.params)
    throw std::invalid_argument("evaluate: config has no [params] section");
  cfg.params->validate();
  const KeyRateBreakdown b = secure_key_rate(*cfg.params, cfg.channel, cfg.protocol);
  json out = config_to_json(cfg);
  out.erase("pso");
  out["breakdown"] = breakdown_to_json(b);
  return out;
}

// optimize: swarm search for the best source parameters.
inline json cmd_optimize(const FullConfig& cfg) {
  const PsoResult res = optimize(cfg.channel, cfg.protocol, cfg.pso);
  FullConfig best = cfg;
  best.params = res.best;
  json out = config_to_json(best);
  out["optimizer"] = json{{"iterations", res.iterations},
                          {"termination", res.termination},
                          {"seed", cfg.pso.seed}};
  out["breakdown"] = breakdown_to_json(res.breakdown);
  return out;
}

inline std::string optimize_to_text(const json& out) {
  std::ostringstream os;
  os << "best parameters:\n";
  for (const auto& [k, v] : out.at("params").items())
    os << "  " << k << " = " << format_sci(v.get<double>()) << "\n";
  os << "iterations = " << out.at("optimizer").at("iterations").get<int>() << "\n"
     << "termination = " << out.at("optimizer").at("termination").get<std::string>() << "\n"
     << "rate = " << format_sci(out.at("breakdown").at("rate").get<double>()) << "\n"
     << "reason = " << out.at("breakdown").at("reason").get<std::string>() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Sweep over total distance

enum class SweepFormat { Csv, Json };

struct SweepSpec {
  std::vector<double> totals_km;  // total distances to evaluate
  double delta_l_km = 0.0;
  Strategy strategy = Strategy::Symmetric;
  bool run_optimizer = true;
  std::uint64_t seed = 1;
  SweepFormat format = SweepFormat::Csv;

  void validate() const {
    detail::require(!totals_km.empty(), "SweepSpec: no distances given");
    detail::require(delta_l_km >= 0.0, "SweepSpec: delta_l_km must be >= 0");
    for (double d : totals_km)
      detail::require(d >= delta_l_km,
                      "SweepSpec: total distance must be >= delta_l_km");
  }

  static std::vector<double> range(double start, double stop, double step) {
    detail::require(step > 0.0, "SweepSpec: step must be > 0");
    detail::require(stop >= start, "SweepSpec: stop must be >= start");
    std::vector<double> out;
    for (double d = start; d <= stop + 1e-9; d += step) out.push_back(d);
    return out;
  }
};

struct SweepRow {
  double total_km = 0.0;
  double delta_l_km = 0.0;
  Strategy strategy = Strategy::Symmetric;
  double rate = 0.0;
  double plob = 0.0;  // repeaterless bound at the end-to-end transmittance
  ParameterVector params;
  double ratio_signal = 0.0;  // eta_a*mu_a / (eta_b*mu_b)
  double ratio_decoy = 0.0;   // eta_a*nu_a / (eta_b*nu_b)
  std::string note = "ok";
};

inline constexpr const char* kSweepFormatVersion = "mpqkd-sweep-v1";

// One point per total distance: arm lengths split around the configured
// length difference, optionally optimized with a seed derived from the sweep
// seed and the point index (so rows are reproducible independent of
// evaluation order). A failure at one point records a zero rate and the sweep
// continues.
inline std::vector<SweepRow> run_sweep(const FullConfig& base, const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  rows.reserve(spec.totals_km.size());
  for (std::size_t i = 0; i < spec.totals_km.size(); ++i) {
    const double total = spec.totals_km[i];
    SweepRow row;
    row.total_km = total;
    row.delta_l_km = spec.delta_l_km;
    row.strategy = spec.strategy;

    ChannelConfig ch = base.channel;
    ch.length_a_km = (total - spec.delta_l_km) / 2.0;
    ch.length_b_km = (total + spec.delta_l_km) / 2.0;
    ch.strategy = spec.strategy;

    try {
      ch.validate();
      const Transmittances t = transmittance(ch);
      row.plob = plob_bound(t.eta_a * t.eta_b);
      if (spec.run_optimizer) {
        PsoConfig pso = base.pso;
        pso.seed = detail::derive_seed(spec.seed, i);
        const PsoResult res = optimize(ch, base.protocol, pso);
        row.params = res.best;
        row.rate = res.breakdown.rate;
        if (res.breakdown.status != RateStatus::Ok) row.note = res.breakdown.reason();
      } else {
        if (!base.params)
          throw std::invalid_argument("sweep: optimizer disabled and no [params] section");
        const KeyRateBreakdown b = secure_key_rate(*base.params, ch, base.protocol);
        row.params = *base.params;
        row.rate = b.rate;
        if (b.status != RateStatus::Ok) row.note = b.reason();
      }
      row.ratio_signal = t.eta_a * row.params.mu_a / (t.eta_b * row.params.mu_b);
      row.ratio_decoy = t.eta_a * row.params.nu_a / (t.eta_b * row.params.nu_b);
    } catch (const std::exception& e) {
      row.rate = 0.0;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "# " << kSweepFormatVersion << "\n";
  os << "total_km,delta_l_km,strategy,rate,plob,mu_a,nu_a,p_mu_a,p_nu_a,p_o_a,"
        "mu_b,nu_b,p_mu_b,p_nu_b,p_o_b,ratio_signal,ratio_decoy,note\n";
  for (const SweepRow& r : rows) {
    const ParameterVector& g = r.params;
    os << format_sci(r.total_km) << ',' << format_sci(r.delta_l_km) << ','
       << strategy_name(r.strategy) << ',' << format_sci(r.rate) << ','
       << format_sci(r.plob) << ',' << format_sci(g.mu_a) << ',' << format_sci(g.nu_a)
       << ',' << format_sci(g.p_mu_a) << ',' << format_sci(g.p_nu_a) << ','
       << format_sci(g.p_o_a) << ',' << format_sci(g.mu_b) << ',' << format_sci(g.nu_b)
       << ',' << format_sci(g.p_mu_b) << ',' << format_sci(g.p_nu_b) << ','
       << format_sci(g.p_o_b) << ',' << format_sci(r.ratio_signal) << ','
       << format_sci(r.ratio_decoy) << ',' << r.note << '\n';
  }
}

inline json sweep_to_json(const std::vector<SweepRow>& rows) {
  json out{{"format", kSweepFormatVersion}, {"rows", json::array()}};
  for (const SweepRow& r : rows) {
    out["rows"].push_back(json{{"total_km", r.total_km},
                               {"delta_l_km", r.delta_l_km},
                               {"strategy", strategy_name(r.strategy)},
                               {"rate", r.rate},
                               {"plob", r.plob},
                               {"params", params_to_json(r.params)},
                               {"ratio_signal", r.ratio_signal},
                               {"ratio_decoy", r.ratio_decoy},
                               {"note", r.note}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle comparison

struct OracleOutcome {
  ComparisonReport report;
  OracleRun run;
  bool pass = false;
};

inline OracleOutcome cmd_oracle(const FullConfig& cfg, double n_rounds, std::uint64_t seed,
                                const OracleOptions& opt = {}) {
  if (!cfg.params)
    throw std::invalid_argument("oracle: config has no [params] section");
  cfg.params->validate();
  OracleOutcome out;
  out.run = simulate_experiment(*cfg.params, cfg.channel, cfg.protocol, n_rounds, seed, opt);
  out.report = compare_to_model(out.run, *cfg.params, cfg.channel, cfg.protocol);
  out.pass = out.report.pass(4.0);
  return out;
}

inline std::string oracle_report_text(const OracleOutcome& o) {
  std::ostringstream os;
  os << "entry            observed        expected        z\n";
  for (const ComparisonRow& r : o.report.rows) {
    os << r.entry;
    for (std::size_t i = r.entry.size(); i < 17; ++i) os << ' ';
    os << format_sci(r.observed) << "  " << format_sci(r.expected) << "  ";
    char zb[16];
    std::snprintf(zb, sizeof(zb), "%+6.2f", r.z);
    os << zb << "\n";
  }
  os << "max |z| = " << format_sci(o.report.max_abs_z) << " over " << o.report.rows.size()
     << " entries: " << (o.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace mpqkd

#endif  // MPQKD_CLI_HPP
