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


#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mgpkit/covkernel.hpp"
#include "mgpkit/design.hpp"
#include "mgpkit/mgp.hpp"
#include "mgpkit/plantsim.hpp"

namespace {

using namespace mgpkit;

MgpParams plant_params(Index l) {
    MgpParams p;
    p.sigma.sigma = Eigen::Vector3d(1.0, 0.8, 0.5);
    p.phi.phi = Eigen::MatrixXd::Constant(3, l, 2.0);
    p.omega = CrossCorrAngles::independent(3);
    p.omega.angles << 0.7, 1.5, 1.5;
    p.nugget = 1e-3;
    p.beta.assign(3, Eigen::VectorXd::Zero(1));
    return p;
}

void BM_CovMatrix(benchmark::State& state) {
    const Index n = state.range(0);
    const DesignMatrix d = lhs(n, 6, 1);
    const std::vector<Eigen::MatrixXd> xs(3, d.points);
    const MgpParams p = plant_params(6);
    const CrossCorrMatrix t = angles_to_corr(p.omega);
    for (auto _ : state) benchmark::DoNotOptimize(cov_matrix(xs, p.sigma, p.phi, t, p.nugget));
    state.SetComplexityN(n);
}
BENCHMARK(BM_CovMatrix)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_PenalizedLoglik(benchmark::State& state) {
    const Index n = state.range(0);
    const Dataset data = generate_dataset(lhs(n, 6, 2), PlantConfig::with_relative_noise(0.02, 1.0, 3), 5);
    const OutputTransform tr = OutputTransform::standardizing(data);
    const Dataset model_units = tr.apply(data);
    const auto basis = RegressionBasis::uniform(BasisKind::Constant, 3, 6);
    const MgpParams p = plant_params(6);
    for (auto _ : state) benchmark::DoNotOptimize(penalized_loglik(p, model_units, basis));
    state.SetComplexityN(n);
}
BENCHMARK(BM_PenalizedLoglik)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_ObjectiveWithGradient(benchmark::State& state) {
    const Dataset data = generate_dataset(lhs(state.range(0), 6, 4), PlantConfig::with_relative_noise(0.02, 1.0, 5), 5);
    const Dataset model_units = OutputTransform::standardizing(data).apply(data);
    const auto basis = RegressionBasis::uniform(BasisKind::Constant, 3, 6);
    const MgpParams p = plant_params(6);
    CovarianceObjective objective(model_units, basis, p.beta, 0.0);
    const Eigen::VectorXd theta = CovarianceObjective::pack(p);
    Eigen::VectorXd grad;
    for (auto _ : state) benchmark::DoNotOptimize(objective.evaluate(theta, &grad));
}
BENCHMARK(BM_ObjectiveWithGradient)->Arg(25)->Arg(50);

void BM_Predict(benchmark::State& state) {
    const Dataset data = generate_dataset(lhs(50, 6, 6), PlantConfig::with_relative_noise(0.02, 1.0, 7), 5);
    const auto basis = RegressionBasis::uniform(BasisKind::Constant, 3, 6);
    const FittedModel m = condition(data, basis, plant_params(6), OutputTransform::standardizing(data));
    const Eigen::MatrixXd pts = lhs(state.range(0), 6, 8).points;
    for (auto _ : state) benchmark::DoNotOptimize(predict_points(m, pts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Predict)->Arg(10)->Arg(100);

void BM_MaximinLhs(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(maximin_lhs(50, 6, ++seed, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MaximinLhs)->Arg(1)->Arg(20)->Arg(100);

} // namespace

BENCHMARK_MAIN();
