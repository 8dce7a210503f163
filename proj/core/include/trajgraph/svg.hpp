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

#ifndef TRAJGRAPH__SVG_HPP_
#define TRAJGRAPH__SVG_HPP_

#include <span>
#include <string>
#include <vector>

#include "trajgraph/cvae.hpp"
#include "trajgraph/dataset.hpp"
#include "trajgraph/dynamics.hpp"

namespace trajgraph
{

/// One court drawing: observed histories, the candidate agent future, and
/// sampled futures coloured by joint latent index.
struct SvgPanel
{
  std::string title;
  TrainingExample example;
  std::vector<NodeSamples> samples;
};

/// Fixed-precision output, so equal inputs give equal bytes. Each sampled
/// future is one <path class="sample"> element.
std::string render_samples_svg(std::span<const SvgPanel> panels, const CourtSpec & court, std::size_t joint_size);

/// Distinct colour for latent index `z` out of `count`.
std::string latent_color(std::size_t z, std::size_t count);

}  // namespace trajgraph

#endif  // TRAJGRAPH__SVG_HPP_
