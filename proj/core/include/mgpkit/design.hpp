/*
 * Copyright 2026 The mgpkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mgpkit {

using Index = Eigen::Index;

/// A named physical input and its operating range. Bounds are always stored
/// with lower < upper.
struct InputSpec {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;

    double range() const { return upper - lower; }
};

void validate_specs(std::span<const InputSpec> specs);

/// n x l design in the unit hypercube.
struct DesignMatrix {
    Eigen::MatrixXd points;

    Index n() const { return points.rows(); }
    Index dims() const { return points.cols(); }
};

enum class StratumPlacement { Uniform, Midpoint };

/// Latin hypercube: each column is a random permutation of the n strata
/// [k/n, (k+1)/n), with the point placed uniformly inside its stratum (or at
/// the stratum midpoint).
DesignMatrix lhs(Index n, Index l, std::uint64_t seed,
                 StratumPlacement placement = StratumPlacement::Uniform);

/// Best of `restarts` LHS draws under the maximin (largest minimum pairwise
/// distance) criterion. Restart 0 reuses `seed` directly, so restarts == 1
/// reproduces lhs(n, l, seed). When exchange_iterations > 0 the winner is
/// further improved by random within-column swaps, which keep the LHS
/// property.
DesignMatrix maximin_lhs(Index n, Index l, std::uint64_t seed, int restarts,
                         int exchange_iterations = 0,
                         StratumPlacement placement = StratumPlacement::Uniform);

double min_pairwise_distance(const DesignMatrix& design);

/// True when every column has exactly one point per stratum.
bool satisfies_lhs(const DesignMatrix& design);

/// x_phys = lower + x_unit * (upper - lower), column-wise.
Eigen::MatrixXd scale_design(const DesignMatrix& design, std::span<const InputSpec> specs);
DesignMatrix unscale_design(const Eigen::MatrixXd& physical, std::span<const InputSpec> specs);

/// One Morris one-at-a-time path through the unit hypercube.
struct MorrisTrajectory {
    Eigen::MatrixXd points;          // (l+1) x l
    std::vector<Index> varied_index; // coordinate changed between rows k and k+1
    std::vector<int> step_sign;      // +1 or -1 per step
    double delta = 0.0;
};

/// r Morris trajectories with step `delta` (fraction of the unit range).
/// Base coordinates come from a `levels`-point grid on [0, 1], restricted so
/// that the single step taken along each coordinate stays inside the cube.
std::vector<MorrisTrajectory> morris_trajectories(int r, Index l, double delta,
                                                  std::uint64_t seed, int levels = 4);

} // namespace mgpkit
