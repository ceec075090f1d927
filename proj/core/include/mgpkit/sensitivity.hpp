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

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/design.hpp"

namespace mgpkit {

struct FittedModel;
struct PlantConfig;

/// Maps a unit-hypercube point to K outputs. Physical scaling, if any,
/// happens inside.
using ResponseFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Elementary-effect statistics, K outputs x l inputs.
struct EEResult {
    std::vector<std::string> output_names;
    std::vector<std::string> input_names;
    Eigen::MatrixXd mu;      // mean effect
    Eigen::MatrixXd mu_star; // mean absolute effect
    Eigen::MatrixXd sigma;   // standard deviation of effects (r - 1 denominator)
    int r = 0;
    double delta = 0.0;

    Index outputs() const { return mu.rows(); }
    Index inputs() const { return mu.cols(); }
};

enum class EffectScale {
    Unit,    // per unit of the normalized input
    Physical // per physical unit (unit effect divided by the input's range)
};

EEResult elementary_effects(const ResponseFunction& f, std::span<const MorrisTrajectory> trajectories,
                            std::span<const InputSpec> specs, std::vector<std::string> output_names,
                            EffectScale scale = EffectScale::Unit);

/// Input indices by descending mu*, then descending sigma, then index.
std::vector<Index> rank_inputs(const EEResult& result, Index output);

ResponseFunction plant_target(const PlantConfig& config);
ResponseFunction model_target(const FittedModel& model);

/// CSV with columns output,input,mu,mu_star,sigma; one row per (output, input).
void write_ee_csv(const EEResult& result, std::ostream& out);
/// Restores names and statistics; r and delta are not part of the CSV.
EEResult parse_ee_csv(std::istream& in);

struct EEReport {
    std::string csv;
    std::string ranking;   // output,rank,input,mu_star,sigma
    std::string plot_data; // whitespace columns for mu* vs sigma scatter plots
};

EEReport ee_report(const EEResult& result);

} // namespace mgpkit
