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

#ifndef TRAJGRAPH__STATS_HPP_
#define TRAJGRAPH__STATS_HPP_

#include <span>
#include <vector>

namespace trajgraph
{

struct LinearFit
{
  double slope{0.0};
  double intercept{0.0};
  /// Coefficient of determination; 1 when y is constant and fitted exactly.
  double r_squared{0.0};
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Middle value (mean of the two middle values for even sizes).
double median(std::vector<double> values);

/// Mean silhouette coefficient of `points` under `labels` (Euclidean).
/// Points in singleton clusters score 0. Needs at least two distinct labels.
double silhouette(const std::vector<std::vector<double>> & points, std::span<const int> labels);

}  // namespace trajgraph

#endif  // TRAJGRAPH__STATS_HPP_
