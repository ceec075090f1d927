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

#include "mgpkit/plantsim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mgpkit/random.hpp"

namespace mgpkit {

std::vector<InputSpec> plant_input_specs() {
    return {
        {"pressure_MPa", 10.0, 35.0},
        {"temperature_K", 500.0, 2000.0},
        {"mass_flow_kg_s", 2.2, 3.0},
        {"grid_frequency_Hz", 50.0, 60.0},
        {"blade_count", 5.0, 20.0},
        {"boiler_temperature_K", 550.0, 650.0},
    };
}

std::vector<std::string> plant_output_names() { return {"HPT", "IPT", "LPT"}; }

void PlantConfig::validate() const {
    if (static_cast<Index>(specs.size()) != kPlantInputs) {
        throw std::invalid_argument("plant: expected 6 input specs");
    }
    validate_specs(specs);
    if (!(noise_sd.array() >= 0.0).all()) throw std::invalid_argument("plant: noise_sd must be >= 0");
    if (!(coupling >= 0.0 && coupling <= 1.0)) throw std::invalid_argument("plant: coupling must lie in [0, 1]");
}

PlantConfig PlantConfig::with_relative_noise(double fraction, double coupling, std::uint64_t seed) {
    if (!(fraction >= 0.0)) throw std::invalid_argument("plant: relative noise must be >= 0");
    PlantConfig c;
    c.coupling = coupling;
    c.seed = seed;
    c.noise_sd = fraction * plant_midpoint_response(coupling);
    return c;
}

PlantResponse plant_response(const Eigen::Ref<const Eigen::VectorXd>& x, const PlantConfig& config) {
    if (x.size() != kPlantInputs) throw std::invalid_argument("plant: expected 6 inputs");
    if (!x.allFinite()) throw std::invalid_argument("plant: non-finite input");

    PlantResponse out;
    for (Index i = 0; i < kPlantInputs; ++i) {
        const auto& s = config.specs[static_cast<std::size_t>(i)];
        if (x(i) < s.lower || x(i) > s.upper) out.out_of_range = true;
    }

    const double pressure = std::max(x(0), 0.0);
    const double temperature = std::max(x(1), 0.0);
    const double mass_flow = std::max(x(2), 0.0);
    const double frequency = x(3);
    const double blades = std::max(x(4), 0.0);
    const double boiler = std::max(x(5), 0.0);
    const double c = config.coupling;

    const double blade_eff = 1.0 - 0.5 * std::exp(-blades / 5.0);
    const double fdev = (frequency - 55.0) / 5.0;
    const double freq_eff = 1.0 - 0.04 * fdev * fdev;
    const double exhaust = 0.3 * pressure;
    const double boiler_ratio = boiler / 600.0;

    out.power(0) = 2.0 * std::pow(pressure, 0.8) * mass_flow * std::pow(temperature / 1000.0, 0.25) * blade_eff *
                   freq_eff;
    out.power(1) = 1.6 * mass_flow * blade_eff * std::pow(boiler_ratio, 3.0) *
                   std::pow(temperature / 1000.0, 0.1) *
                   (c * std::pow(exhaust, 0.8) + (1.0 - c) * std::pow(6.75, 0.8));
    out.power(2) = 3.0 * mass_flow * std::pow(boiler_ratio, 4.0) *
                   (1.0 + 0.4 * std::sin(std::numbers::pi * blades / 8.0)) *
                   (1.0 + 0.1 * c * (pressure / 22.5 - 1.0));
    return out;
}

Eigen::Vector3d plant_midpoint_response(double coupling) {
    PlantConfig c;
    c.coupling = coupling;
    Eigen::VectorXd mid(kPlantInputs);
    for (Index i = 0; i < kPlantInputs; ++i) {
        const auto& s = c.specs[static_cast<std::size_t>(i)];
        mid(i) = 0.5 * (s.lower + s.upper);
    }
    return plant_response(mid, c).power;
}

Dataset generate_dataset(const DesignMatrix& design, const PlantConfig& config, Index reps) {
    config.validate();
    if (reps < 1) throw std::invalid_argument("plant: reps must be >= 1");
    const Eigen::MatrixXd physical = scale_design(design, config.specs);
    const Index n = design.n();

    Dataset d;
    d.specs = config.specs;
    d.output_names = plant_output_names();
    d.reps = reps;
    d.x.assign(kPlantOutputs, design.points);
    d.y.assign(kPlantOutputs, Eigen::VectorXd(n * reps));
    for (Index j = 0; j < n; ++j) {
        const Eigen::Vector3d clean = plant_response(physical.row(j).transpose(), config).power;
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(j)));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index m = 0; m < reps; ++m) {
            for (Index k = 0; k < kPlantOutputs; ++k) {
                const double z = normal(rng);
                d.y[static_cast<std::size_t>(k)](m * n + j) = clean(k) + config.noise_sd(k) * z;
            }
        }
    }
    return d;
}

} // namespace mgpkit
