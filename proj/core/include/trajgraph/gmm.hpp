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

#ifndef TRAJGRAPH__GMM_HPP_
#define TRAJGRAPH__GMM_HPP_

#include <array>
#include <random>
#include <vector>

#include "trajgraph/dynamics.hpp"
#include "trajgraph/tensor.hpp"

namespace trajgraph
{

/// Diagonal-covariance mixture over 2-D actions for one horizon step.
struct GmmStep
{
  std::vector<double> log_weights;
  std::vector<std::array<double, 2>> means;
  std::vector<std::array<double, 2>> log_scales;

  std::size_t components() const { return log_weights.size(); }
  void validate() const;
};

/// One GmmStep per horizon step.
using GMMParams = std::vector<GmmStep>;

/// log sum_k w_k N(u; mu_k, diag(sigma_k^2)).
double gmm_log_density(const GmmStep & params, const CourtAction & u);

/// Component from the weights, then the diagonal Gaussian, then speed clamp.
CourtAction gmm_sample(const GmmStep & params, std::mt19937_64 & rng);

/// Batched mixture parameters on the tape: one row per latent assignment or
/// sample. Shapes [rows x K], [rows x K x 2], [rows x K x 2].
struct GmmHead
{
  Tensor log_weights;
  Tensor means;
  Tensor log_scales;

  std::size_t rows() const { return log_weights.dim(0); }
  /// Plain parameters of one row.
  GmmStep row(std::size_t r) const;
};

/// Log density of `u` under every row, shape [rows].
Tensor gmm_log_density(const GmmHead & head, const CourtAction & u);

}  // namespace trajgraph

#endif  // TRAJGRAPH__GMM_HPP_
