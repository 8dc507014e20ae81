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

#ifndef MPQKD_IO_HPP
#define MPQKD_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mpqkd/pso.hpp"
#include "mpqkd/types.hpp"

// JSON configuration with sections mirroring the channel, protocol, source
// parameters and optimizer settings. Absent keys fall back to the standard
// simulation defaults; emitted documents parse back to the same
// configuration.

namespace mpqkd {

using json = nlohmann::ordered_json;

struct FullConfig {
  ChannelConfig channel;
  ProtocolConfig protocol;
  PsoConfig pso;
  std::optional<ParameterVector> params;
};

namespace detail {

inline void read_if(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}
inline void read_if(const json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}
inline void read_if(const json& j, const char* key, std::int64_t& out) {
  if (j.contains(key)) out = j.at(key).get<std::int64_t>();
}
inline void read_if(const json& j, const char* key, std::uint64_t& out) {
  if (j.contains(key)) out = j.at(key).get<std::uint64_t>();
}

}  // namespace detail

inline ChannelConfig channel_from_json(const json& j) {
  ChannelConfig c;
  detail::read_if(j, "length_a_km", c.length_a_km);
  detail::read_if(j, "length_b_km", c.length_b_km);
  detail::read_if(j, "alpha_db_per_km", c.alpha_db_per_km);
  detail::read_if(j, "eta_d", c.eta_d);
  detail::read_if(j, "p_d", c.p_d);
  if (j.contains("strategy")) c.strategy = strategy_from_name(j.at("strategy").get<std::string>());
  return c;
}

inline json channel_to_json(const ChannelConfig& c) {
  return json{{"length_a_km", c.length_a_km},
              {"length_b_km", c.length_b_km},
              {"alpha_db_per_km", c.alpha_db_per_km},
              {"eta_d", c.eta_d},
              {"p_d", c.p_d},
              {"strategy", strategy_name(c.strategy)}};
}

inline ProtocolConfig protocol_from_json(const json& j) {
  ProtocolConfig p;
  detail::read_if(j, "total_pulses", p.total_pulses);
  detail::read_if(j, "pairing_interval", p.pairing_interval);
  bool slices_given = j.contains("num_slices");
  detail::read_if(j, "num_slices", p.num_slices);
  if (slices_given) p.delta_phase = std::numbers::pi / p.num_slices;
  detail::read_if(j, "delta_phase", p.delta_phase);
  detail::read_if(j, "e_d_x", p.e_d_x);
  detail::read_if(j, "e_d_z", p.e_d_z);
  detail::read_if(j, "f_ec", p.f_ec);
  if (j.contains("budget")) {
    const json& b = j.at("budget");
    detail::read_if(b, "eps_cor", p.budget.eps_cor);
    detail::read_if(b, "eps_sec", p.budget.eps_sec);
    detail::read_if(b, "eps_cb", p.budget.eps_cb);
    detail::read_if(b, "xi_ee", p.budget.xi_ee);
  }
  return p;
}

inline json protocol_to_json(const ProtocolConfig& p) {
  return json{{"total_pulses", p.total_pulses},
              {"pairing_interval", p.pairing_interval},
              {"num_slices", p.num_slices},
              {"delta_phase", p.delta_phase},
              {"e_d_x", p.e_d_x},
              {"e_d_z", p.e_d_z},
              {"f_ec", p.f_ec},
              {"budget",
               json{{"eps_cor", p.budget.eps_cor},
                    {"eps_sec", p.budget.eps_sec},
                    {"eps_cb", p.budget.eps_cb},
                    {"xi_ee", p.budget.xi_ee}}}};
}

inline ParameterVector params_from_json(const json& j) {
  ParameterVector g;
  detail::read_if(j, "mu_a", g.mu_a);
  detail::read_if(j, "nu_a", g.nu_a);
  detail::read_if(j, "p_mu_a", g.p_mu_a);
  detail::read_if(j, "p_nu_a", g.p_nu_a);
  detail::read_if(j, "mu_b", g.mu_b);
  detail::read_if(j, "nu_b", g.nu_b);
  detail::read_if(j, "p_mu_b", g.p_mu_b);
  detail::read_if(j, "p_nu_b", g.p_nu_b);
  g.o_a = g.o_b = 0.0;
  detail::read_if(j, "o_a", g.o_a);
  detail::read_if(j, "o_b", g.o_b);
  g.p_o_a = 1.0 - g.p_mu_a - g.p_nu_a;
  g.p_o_b = 1.0 - g.p_mu_b - g.p_nu_b;
  if (j.contains("p_o_a") &&
      std::abs(j.at("p_o_a").get<double>() - g.p_o_a) > 1e-9)
    throw std::invalid_argument("params: p_o_a inconsistent with 1 - p_mu_a - p_nu_a");
  if (j.contains("p_o_b") &&
      std::abs(j.at("p_o_b").get<double>() - g.p_o_b) > 1e-9)
    throw std::invalid_argument("params: p_o_b inconsistent with 1 - p_mu_b - p_nu_b");
  return g;
}

inline json params_to_json(const ParameterVector& g) {
  return json{{"mu_a", g.mu_a},     {"nu_a", g.nu_a},     {"p_mu_a", g.p_mu_a},
              {"p_nu_a", g.p_nu_a}, {"p_o_a", g.p_o_a},   {"mu_b", g.mu_b},
              {"nu_b", g.nu_b},     {"p_mu_b", g.p_mu_b}, {"p_nu_b", g.p_nu_b},
              {"p_o_b", g.p_o_b}};
}

inline PsoConfig pso_from_json(const json& j) {
  PsoConfig p;
  detail::read_if(j, "n_particles", p.n_particles);
  detail::read_if(j, "max_iters", p.max_iters);
  detail::read_if(j, "w_init", p.w_init);
  detail::read_if(j, "w_final", p.w_final);
  detail::read_if(j, "c1_min", p.c1_min);
  detail::read_if(j, "c1_max", p.c1_max);
  detail::read_if(j, "c2_min", p.c2_min);
  detail::read_if(j, "c2_max", p.c2_max);
  detail::read_if(j, "h", p.h);
  detail::read_if(j, "zeta", p.zeta);
  detail::read_if(j, "patience", p.patience);
  detail::read_if(j, "v_max_frac", p.v_max_frac);
  detail::read_if(j, "seed", p.seed);
  return p;
}

inline json pso_to_json(const PsoConfig& p) {
  return json{{"n_particles", p.n_particles},
              {"max_iters", p.max_iters},
              {"w_init", p.w_init},
              {"w_final", p.w_final},
              {"c1_min", p.c1_min},
              {"c1_max", p.c1_max},
              {"c2_min", p.c2_min},
              {"c2_max", p.c2_max},
              {"h", p.h},
              {"zeta", p.zeta},
              {"patience", p.patience},
              {"v_max_frac", p.v_max_frac},
              {"seed", p.seed}};
}

inline FullConfig config_from_json(const json& j) {
  FullConfig c;
  if (j.contains("channel")) c.channel = channel_from_json(j.at("channel"));
  if (j.contains("protocol")) c.protocol = protocol_from_json(j.at("protocol"));
  if (j.contains("pso")) c.pso = pso_from_json(j.at("pso"));
  if (j.contains("params")) c.params = params_from_json(j.at("params"));
  return c;
}

inline json config_to_json(const FullConfig& c) {
  json j{{"channel", channel_to_json(c.channel)},
         {"protocol", protocol_to_json(c.protocol)},
         {"pso", pso_to_json(c.pso)}};
  if (c.params) j["params"] = params_to_json(*c.params);
  return j;
}

inline FullConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Fixed-width scientific notation with nine significant digits, so that
// regression fixtures diff cleanly.
inline std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

}  // namespace mpqkd

#endif  // MPQKD_IO_HPP
