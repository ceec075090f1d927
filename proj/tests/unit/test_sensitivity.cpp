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


#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mgpkit/error.hpp"
#include "mgpkit/plantsim.hpp"
#include "mgpkit/sensitivity.hpp"

namespace mgpkit {
namespace {

std::vector<InputSpec> unit_specs(Index l) {
    std::vector<InputSpec> s;
    for (Index i = 0; i < l; ++i) s.push_back({"x" + std::to_string(i + 1), 0.0, 1.0});
    return s;
}

Index count_rows(const std::string& text) {
    Index n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

TEST(ElementaryEffects, LinearFunctionHasConstantEffects) {
    const auto traj = morris_trajectories(10, 4, 0.3, 1);
    const ResponseFunction f = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, 3.0 * x(0)); };
    const EEResult r = elementary_effects(f, traj, unit_specs(4), {"y"});
    EXPECT_NEAR(r.mu_star(0, 0), 3.0, 1e-10);
    EXPECT_NEAR(r.mu(0, 0), 3.0, 1e-10);
    EXPECT_NEAR(r.sigma(0, 0), 0.0, 1e-10);
    for (Index v = 1; v < 4; ++v) {
        EXPECT_EQ(r.mu_star(0, v), 0.0);
        EXPECT_EQ(r.sigma(0, v), 0.0);
    }
    EXPECT_EQ(rank_inputs(r, 0).front(), 0);
    EXPECT_EQ(r.r, 10);
    EXPECT_DOUBLE_EQ(r.delta, 0.3);
}

TEST(ElementaryEffects, InteractionProducesSpread) {
    const auto traj = morris_trajectories(10, 2, 0.3, 2);
    const ResponseFunction f = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x(0) * x(1)); };
    const EEResult r = elementary_effects(f, traj, unit_specs(2), {"y"});
    EXPECT_GT(r.sigma(0, 0), 1e-3);
    EXPECT_GT(r.sigma(0, 1), 1e-3);
}

TEST(ElementaryEffects, AffineFunctionsRecoverSlopes) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(2, 5);
        for (Index i = 0; i < a.size(); ++i) a.data()[i] = 4.0 * z(rng);
        const Eigen::Vector2d b(z(rng), z(rng));
        const ResponseFunction f = [a, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x + b; };
        const EEResult r = elementary_effects(f, morris_trajectories(6, 5, 0.25, trial), unit_specs(5), {"a", "b"});
        EXPECT_LE((r.mu_star - a.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((r.mu - a).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(r.sigma.maxCoeff(), 1e-10);
    }
}

TEST(ElementaryEffects, StepSignDoesNotMatter) {
    const ResponseFunction f = [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, x(0) * x(0) + 2.0 * x(1));
    };
    auto traj = morris_trajectories(1, 2, 0.5, 4);
    const EEResult fwd = elementary_effects(f, traj, unit_specs(2), {"y"});
    // Walk the same path backwards: every step flips sign, every effect is unchanged.
    MorrisTrajectory rev = traj[0];
    rev.points = traj[0].points.colwise().reverse();
    std::reverse(rev.varied_index.begin(), rev.varied_index.end());
    for (auto& s : rev.step_sign) s = -s;
    std::reverse(rev.step_sign.begin(), rev.step_sign.end());
    const std::vector<MorrisTrajectory> back{rev};
    const EEResult bwd = elementary_effects(f, back, unit_specs(2), {"y"});
    EXPECT_LE((fwd.mu - bwd.mu).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ElementaryEffects, StatisticsInvariants) {
    const auto traj = morris_trajectories(8, 3, 0.3, 5);
    const ResponseFunction f = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(2);
        y << std::sin(6.0 * x(0)) + x(1), (x(0) - 0.5) * (x(2) - 0.5);
        return y;
    };
    const EEResult r = elementary_effects(f, traj, unit_specs(3), {"a", "b"});
    EXPECT_TRUE((r.mu_star.array() >= r.mu.array().abs() - 1e-15).all());
    EXPECT_TRUE((r.sigma.array() >= 0.0).all());
    // x2 enters output a linearly, so every effect is +1 and mu* = |mu|.
    EXPECT_NEAR(r.mu_star(0, 1), std::abs(r.mu(0, 1)), 1e-12);
    const EEResult again = elementary_effects(f, morris_trajectories(8, 3, 0.3, 5), unit_specs(3), {"a", "b"});
    EXPECT_EQ(again.mu, r.mu);
    EXPECT_EQ(again.sigma, r.sigma);
}

TEST(ElementaryEffects, PhysicalScaleDividesByRange) {
    const std::vector<InputSpec> specs{{"p", 10.0, 35.0}, {"q", 0.0, 2.0}};
    const auto traj = morris_trajectories(5, 2, 0.3, 6);
    const ResponseFunction f = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, 5.0 * x(0) + x(1)); };
    const EEResult unit = elementary_effects(f, traj, specs, {"y"});
    const EEResult phys = elementary_effects(f, traj, specs, {"y"}, EffectScale::Physical);
    EXPECT_NEAR(phys.mu(0, 0), unit.mu(0, 0) / 25.0, 1e-12);
    EXPECT_NEAR(phys.mu(0, 1), unit.mu(0, 1) / 2.0, 1e-12);
}

TEST(ElementaryEffects, FailuresCarryContext) {
    const auto traj = morris_trajectories(3, 2, 0.3, 7);
    int calls = 0;
    const ResponseFunction f = [&calls](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        if (++calls == 5) throw NumericalError("boom");
        return x.head(1);
    };
    try {
        elementary_effects(f, traj, unit_specs(2), {"y"});
        FAIL() << "expected an exception";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("trajectory 1"), std::string::npos) << e.what();
    }
}

TEST(ElementaryEffects, PlantScreeningCountsAndRanking) {
    const auto specs = plant_input_specs();
    const auto traj = morris_trajectories(10, kPlantInputs, 0.3, 11);
    int calls = 0;
    const auto plant = plant_target(PlantConfig{});
    const ResponseFunction counted = [&](const Eigen::VectorXd& x) {
        ++calls;
        return plant(x);
    };
    const EEResult r = elementary_effects(counted, traj, specs, plant_output_names());
    EXPECT_EQ(calls, 10 * 7);
    EXPECT_EQ(r.outputs(), 3);
    EXPECT_EQ(r.inputs(), 6);
    EXPECT_EQ(rank_inputs(r, 0).front(), 0);
}

TEST(RankInputs, TiesBrokenBySigmaThenIndex) {
    EEResult r;
    r.output_names = {"y"};
    r.input_names = {"a", "b", "c", "d"};
    r.mu = Eigen::MatrixXd::Zero(1, 4);
    r.mu_star = (Eigen::MatrixXd(1, 4) << 1.0, 2.0, 2.0, 1.0).finished();
    r.sigma = (Eigen::MatrixXd(1, 4) << 0.5, 0.1, 0.3, 0.5).finished();
    EXPECT_EQ(rank_inputs(r, 0), (std::vector<Index>{2, 1, 0, 3}));
    EXPECT_THROW(rank_inputs(r, 1), std::out_of_range);
}

TEST(Report, EmptyResultIsHeaderOnly) {
    EEResult r;
    const EEReport rep = ee_report(r);
    EXPECT_EQ(rep.csv, "output,input,mu,mu_star,sigma\n");
    EXPECT_EQ(rep.ranking, "output,rank,input,mu_star,sigma\n");
}

TEST(Report, PlantReportRowCountsAndRoundTrip) {
    const auto traj = morris_trajectories(10, kPlantInputs, 0.3, 12);
    const EEResult r = elementary_effects(plant_target(PlantConfig{}), traj, plant_input_specs(), plant_output_names());
    const EEReport rep = ee_report(r);
    EXPECT_EQ(count_rows(rep.csv), 1 + 18);
    EXPECT_EQ(count_rows(rep.ranking), 1 + 18);
    EXPECT_EQ(count_rows(rep.plot_data), 1 + 18);
    std::istringstream in(rep.csv);
    const EEResult back = parse_ee_csv(in);
    EXPECT_EQ(back.output_names, r.output_names);
    EXPECT_EQ(back.input_names, r.input_names);
    EXPECT_EQ(back.mu, r.mu);
    EXPECT_EQ(back.mu_star, r.mu_star);
    EXPECT_EQ(back.sigma, r.sigma);
}

TEST(Report, ParseRejectsDamage) {
    std::istringstream bad_header("a,b\n");
    EXPECT_THROW(parse_ee_csv(bad_header), ParseError);
    std::istringstream bad_cell("output,input,mu,mu_star,sigma\ny,x,1,two,3\n");
    EXPECT_THROW(parse_ee_csv(bad_cell), ParseError);
    std::istringstream missing("output,input,mu,mu_star,sigma\ny,a,1,1,0\nz,b,1,1,0\n");
    EXPECT_THROW(parse_ee_csv(missing), ParseError);
}

} // namespace
} // namespace mgpkit
