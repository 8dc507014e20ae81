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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mpqkd/cli.hpp"

// Exit codes: 0 success, 1 a check command found a discrepancy, 2 usage or
// configuration error.

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "text";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_format) {
  args.format = default_format;
  cmd->add_option("--config", args.config_path, "JSON configuration file")->required();
  cmd->add_option("--out", args.out_path, "write output to this path instead of stdout");
  cmd->add_option("--format", args.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--seed", args.seed, "master RNG seed");
}

void emit(const CommonArgs& args, const std::string& payload) {
  if (args.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output path: " + args.out_path);
  out << payload;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-key rate toolkit for asymmetric mode-pairing QKD"};
  app.require_subcommand(1);

  CommonArgs ev_args, opt_args, sweep_args, oracle_args;

  auto* evaluate = app.add_subcommand("evaluate", "key-rate breakdown at fixed parameters");
  add_common(evaluate, ev_args, "text");
  std::optional<double> ev_pulses;
  std::optional<std::int64_t> ev_interval;
  evaluate->add_option("--total-pulses", ev_pulses, "override protocol.total_pulses");
  evaluate->add_option("--pairing-interval", ev_interval, "override protocol.pairing_interval");

  auto* optimize = app.add_subcommand("optimize", "swarm-optimize the source parameters");
  add_common(optimize, opt_args, "text");
  std::optional<int> opt_particles, opt_iters;
  optimize->add_option("--particles", opt_particles, "override pso.n_particles");
  optimize->add_option("--iters", opt_iters, "override pso.max_iters");

  auto* sweep = app.add_subcommand("sweep", "rate versus total distance");
  add_common(sweep, sweep_args, "csv");
  double sw_start = 0.0, sw_stop = 0.0, sw_step = 10.0, sw_delta = 0.0;
  std::vector<double> sw_points;
  std::string sw_strategy = "symmetric";
  bool sw_no_opt = false;
  sweep->add_option("--start", sw_start, "first total distance, km");
  sweep->add_option("--stop", sw_stop, "last total distance, km");
  sweep->add_option("--step", sw_step, "distance step, km");
  sweep->add_option("--distances", sw_points, "explicit list of total distances, km");
  sweep->add_option("--delta-km", sw_delta, "arm length difference, km");
  sweep->add_option("--strategy", sw_strategy, "asymmetry strategy")
      ->check(CLI::IsMember({"symmetric", "asymmetric_intensity", "extra_attenuation"}));
  sweep->add_flag("--no-optimize", sw_no_opt, "evaluate config params instead of optimizing");

  auto* oracle = app.add_subcommand("oracle", "Monte Carlo cross-check of the analytic model");
  add_common(oracle, oracle_args, "text");
  double orc_rounds = 0.0;
  int orc_shards = 16;
  oracle->add_option("--nsim", orc_rounds, "number of simulated rounds")->required();
  oracle->add_option("--shards", orc_shards, "independent simulation shards");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (evaluate->parsed()) {
      mpqkd::FullConfig cfg = mpqkd::load_config(ev_args.config_path);
      if (ev_pulses) cfg.protocol.total_pulses = *ev_pulses;
      if (ev_interval) cfg.protocol.pairing_interval = *ev_interval;
      const mpqkd::json out = mpqkd::cmd_evaluate(cfg);
      emit(ev_args, ev_args.format == "json"
                        ? out.dump(2) + "\n"
                        : mpqkd::breakdown_to_text(
                              mpqkd::secure_key_rate(*cfg.params, cfg.channel, cfg.protocol)));
      return 0;
    }
    if (optimize->parsed()) {
      mpqkd::FullConfig cfg = mpqkd::load_config(opt_args.config_path);
      if (opt_args.seed) cfg.pso.seed = *opt_args.seed;
      if (opt_particles) cfg.pso.n_particles = *opt_particles;
      if (opt_iters) cfg.pso.max_iters = *opt_iters;
      const mpqkd::json out = mpqkd::cmd_optimize(cfg);
      emit(opt_args, opt_args.format == "json" ? out.dump(2) + "\n"
                                               : mpqkd::optimize_to_text(out));
      return 0;
    }
    if (sweep->parsed()) {
      mpqkd::FullConfig cfg = mpqkd::load_config(sweep_args.config_path);
      mpqkd::SweepSpec spec;
      spec.totals_km = sw_points.empty() ? mpqkd::SweepSpec::range(sw_start, sw_stop, sw_step)
                                         : sw_points;
      spec.delta_l_km = sw_delta;
      spec.strategy = mpqkd::strategy_from_name(sw_strategy);
      spec.run_optimizer = !sw_no_opt;
      spec.seed = sweep_args.seed.value_or(cfg.pso.seed);
      spec.format = sweep_args.format == "json" ? mpqkd::SweepFormat::Json
                                                : mpqkd::SweepFormat::Csv;
      const auto rows = mpqkd::run_sweep(cfg, spec);
      if (spec.format == mpqkd::SweepFormat::Json) {
        emit(sweep_args, mpqkd::sweep_to_json(rows).dump(2) + "\n");
      } else {
        std::ostringstream os;
        mpqkd::write_sweep_csv(os, rows);
        emit(sweep_args, os.str());
      }
      return 0;
    }
    if (oracle->parsed()) {
      if (!(orc_rounds >= 1.0)) {
        std::cerr << "oracle: --nsim must be >= 1\n";
        return 2;
      }
      mpqkd::FullConfig cfg = mpqkd::load_config(oracle_args.config_path);
      mpqkd::OracleOptions opt;
      opt.shards = orc_shards;
      const mpqkd::OracleOutcome out =
          mpqkd::cmd_oracle(cfg, orc_rounds, oracle_args.seed.value_or(1), opt);
      emit(oracle_args, mpqkd::oracle_report_text(out));
      return out.pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
