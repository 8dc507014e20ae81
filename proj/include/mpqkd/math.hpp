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

#ifndef MPQKD_MATH_HPP
#define MPQKD_MATH_HPP

#include <cmath>
#include <stdexcept>

namespace mpqkd {

// Binary entropy h(x) in bits, continuously extended to h(0) = h(1) = 0.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("binary_entropy: argument must be in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Poisson photon-number weight k^m e^{-k} / m!.
inline double poisson_coeff(int m, double k) {
  if (m < 0) throw std::domain_error("poisson_coeff: m must be a non-negative integer");
  if (!(k >= 0.0)) throw std::domain_error("poisson_coeff: k must be >= 0");
  if (k == 0.0) return m == 0 ? 1.0 : 0.0;
  if (m == 0) return std::exp(-k);
  if (m == 1) return k * std::exp(-k);
  return std::exp(m * std::log(k) - k - std::lgamma(m + 1.0));
}

// Repeaterless point-to-point key-rate bound -log2(1 - eta), bits per pulse.
inline double plob_bound(double eta) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw std::domain_error("plob_bound: eta must be in [0,1)");
  return -std::log2(1.0 - eta);
}

// Modified Bessel function of the first kind, order zero, by power series.
// Terms are added until the next one drops below 1e-16 of the partial sum,
// which keeps the relative error under 1e-12 on the argument range used here
// (x well below 10, since the interference amplitudes are < 2).
inline double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1;; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum) return sum;
  }
}

// I0(x) - 1 without the unit term, full relative precision for small x. The
// pair-response formulas subtract near-unit quantities; keeping the small
// part separate avoids that cancellation.
inline double bessel_i0_minus_one(double x) {
  const double q = 0.25 * x * x;
  double term = q;
  double sum = q;
  for (int k = 2;; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-16 * sum || sum == 0.0) return sum;
  }
}

}  // namespace mpqkd

#endif  // MPQKD_MATH_HPP
