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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/dataset.hpp"
#include "mgpkit/design.hpp"

namespace mgpkit {

// Closed-form stand-in for a three-stage steam turbine train (HPT -> IPT ->
// LPT in series). Steady-state output power in arbitrary consistent units.
//
// Inputs, in order:
//   P   inlet pressure [10, 35] MPa        T   steam temperature [500, 2000] K
//   m   mass flow [2.2, 3] kg/s            f   grid frequency [50, 60] Hz
//   B   number of blades [5, 20]           Tb  boiler temperature [550, 650] K
//
// With blade(B) = 1 - 0.5 exp(-B/5), freq(f) = 1 - 0.04 ((f - 55)/5)^2,
// exhaust pressure Pe = 0.3 P and coupling c in [0, 1]:
//
//   HPT = 2.0 P^0.8 m (T/1000)^0.25 blade(B) freq(f)
//   IPT = 1.6 m blade(B) (Tb/600)^3 (T/1000)^0.1 (c Pe^0.8 + (1-c) 6.75^0.8)
//   LPT = 3.0 m (Tb/600)^4 (1 + 0.4 sin(pi B / 8)) (1 + 0.1 c (P/22.5 - 1))
//
// These coefficients are part of the reproducibility contract; changing them
// changes every dataset and the regression values in the tests.

inline constexpr Index kPlantInputs = 6;
inline constexpr Index kPlantOutputs = 3;

std::vector<InputSpec> plant_input_specs();
std::vector<std::string> plant_output_names();

struct PlantConfig {
    std::vector<InputSpec> specs = plant_input_specs();
    Eigen::Vector3d noise_sd = Eigen::Vector3d::Zero();
    double coupling = 1.0;
    std::uint64_t seed = 0;

    /// noise_sd = fraction * (response at the range midpoint), per output.
    static PlantConfig with_relative_noise(double fraction, double coupling, std::uint64_t seed);

    void validate() const;
};

struct PlantResponse {
    Eigen::Vector3d power;
    bool out_of_range = false;
};

/// `x` holds the six physical inputs. Throws std::invalid_argument on
/// non-finite input; out-of-range input is evaluated and flagged.
PlantResponse plant_response(const Eigen::Ref<const Eigen::VectorXd>& x, const PlantConfig& config);

/// Noise-free response with every input at the middle of its range.
Eigen::Vector3d plant_midpoint_response(double coupling);

/// Evaluates the plant at each scaled design row and adds iid Gaussian noise
/// per replicate and output. Noise for row j comes from its own stream
/// derived from config.seed, so results do not depend on evaluation order.
Dataset generate_dataset(const DesignMatrix& design, const PlantConfig& config, Index reps);

} // namespace mgpkit
