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

#ifndef MPQKD_STATS_HPP
#define MPQKD_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mpqkd {

// Chernoff upper bound on the expectation behind an observed count chi, with
// failure probability eps.
inline double chernoff_upper(double chi, double eps) {
  if (!(chi >= 0.0)) throw std::domain_error("chernoff_upper: chi must be >= 0");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("chernoff_upper: eps must be in (0,1]");
  const double beta = std::log(1.0 / eps);
  return chi + beta + std::sqrt(2.0 * beta * chi + beta * beta);
}

// Matching lower bound, floored at zero.
inline double chernoff_lower(double chi, double eps) {
  if (!(chi >= 0.0)) throw std::domain_error("chernoff_lower: chi must be >= 0");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("chernoff_lower: eps must be in (0,1]");
  const double beta = std::log(1.0 / eps);
  return std::max(chi - beta / 2.0 - std::sqrt(2.0 * beta * chi + beta * beta / 4.0), 0.0);
}

// Correction term of random sampling without replacement: failure probability
// a, sampled error rate b, sample sizes c and d. Vanishes in the b -> 0 and
// b -> 1 limits; a non-positive logarithm means the bound is vacuous and the
// correction is clamped to zero (the caller caps the error rate downstream).
inline double gamma_sampling(double a, double b, double c, double d) {
  if (!(c > 0.0 && d > 0.0))
    throw std::domain_error("gamma_sampling: sample sizes must be > 0");
  if (!(a > 0.0 && a <= 1.0))
    throw std::domain_error("gamma_sampling: failure probability must be in (0,1]");
  if (!(b >= 0.0 && b <= 1.0))
    throw std::domain_error("gamma_sampling: error rate must be in [0,1]");
  if (b == 0.0 || b == 1.0) return 0.0;
  const double v = (1.0 - b) * b;
  const double arg = (c + d) / (2.0 * std::numbers::pi * c * d * v * a * a);
  if (arg <= 1.0) return 0.0;
  return std::sqrt((c + d) * v / (c * d) * std::log(arg));
}

}  // namespace mpqkd

#endif  // MPQKD_STATS_HPP
