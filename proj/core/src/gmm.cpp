// Copyright 2026 The trajgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajgraph/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace trajgraph
{

namespace
{
constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)
}

void GmmStep::validate() const
{
  if (log_weights.empty()) throw DimensionError("gmm: no components");
  if (means.size() != log_weights.size() || log_scales.size() != log_weights.size()) {
    throw DimensionError("gmm: weights, means and scales disagree on component count");
  }
}

double gmm_log_density(const GmmStep & p, const CourtAction & u)
{
  p.validate();
  const double x[2] = {u.dl, u.dw};
  std::vector<double> terms(p.components());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.components(); ++k) {
    double t = p.log_weights[k] - kLog2Pi;
    for (std::size_t d = 0; d < 2; ++d) {
      const double z = (x[d] - p.means[k][d]) * std::exp(-p.log_scales[k][d]);
      t += -0.5 * z * z - p.log_scales[k][d];
    }
    terms[k] = t;
    m = std::max(m, t);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

CourtAction gmm_sample(const GmmStep & p, std::mt19937_64 & rng)
{
  p.validate();
  std::vector<double> w(p.components());
  const double m = *std::max_element(p.log_weights.begin(), p.log_weights.end());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(p.log_weights[k] - m);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  const std::size_t k = pick(rng);
  std::normal_distribution<double> n(0.0, 1.0);
  const double dl = p.means[k][0] + std::exp(p.log_scales[k][0]) * n(rng);
  const double dw = p.means[k][1] + std::exp(p.log_scales[k][1]) * n(rng);
  return clamp_speed({dl, dw});
}

GmmStep GmmHead::row(std::size_t r) const
{
  const std::size_t K = log_weights.dim(1);
  GmmStep s;
  const auto lw = log_weights.values();
  const auto mu = means.values();
  const auto ls = log_scales.values();
  for (std::size_t k = 0; k < K; ++k) {
    s.log_weights.push_back(lw[r * K + k]);
    s.means.push_back({mu[(r * K + k) * 2], mu[(r * K + k) * 2 + 1]});
    s.log_scales.push_back({ls[(r * K + k) * 2], ls[(r * K + k) * 2 + 1]});
  }
  return s;
}

Tensor gmm_log_density(const GmmHead & head, const CourtAction & u)
{
  const std::size_t rows = head.log_weights.dim(0);
  const std::size_t K = head.log_weights.dim(1);
  if (head.means.shape() != Shape{rows, K, 2} || head.log_scales.shape() != Shape{rows, K, 2}) {
    throw DimensionError(
      "gmm_log_density: means " + shape_to_string(head.means.shape()) + " / scales " +
      shape_to_string(head.log_scales.shape()) + " inconsistent with weights " +
      shape_to_string(head.log_weights.shape()));
  }
  std::vector<double> target(rows * K * 2);
  for (std::size_t i = 0; i < rows * K; ++i) {
    target[2 * i] = u.dl;
    target[2 * i + 1] = u.dw;
  }
  const Tensor diff = head.means - Tensor::constant({rows, K, 2}, std::move(target));
  const Tensor z = diff * exp(neg(head.log_scales));
  const Tensor quad = sum(square(z), 2);
  const Tensor log_norm = sum(head.log_scales, 2);
  const Tensor comp = add_scalar(neg(scale(quad, 0.5) + log_norm), -kLog2Pi);
  return logsumexp(head.log_weights + comp, 1);
}

}  // namespace trajgraph
