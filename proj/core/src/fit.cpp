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
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <glog/logging.h>

#include "engine.hpp"
#include "mgpkit/error.hpp"
#include "mgpkit/mgp.hpp"
#include "mgpkit/random.hpp"

namespace mgpkit {

OutputTransform OutputTransform::identity(Index outputs) {
    return {Eigen::VectorXd::Zero(outputs), Eigen::VectorXd::Ones(outputs)};
}

// Centre each output and divide by its sd. With replicates, the scales are
// chosen so every output carries the same within-replicate variance, which
// keeps one shared nugget honest; the common factor is the geometric mean of
// the per-output signal-to-noise ratios so magnitudes stay near unit scale.
OutputTransform OutputTransform::standardizing(const Dataset& data) {
    const Index k_out = data.outputs();
    OutputTransform t = identity(k_out);
    Eigen::VectorXd sd = Eigen::VectorXd::Ones(k_out);
    Eigen::VectorXd noise = Eigen::VectorXd::Zero(k_out);
    for (Index k = 0; k < k_out; ++k) {
        const auto& y = data.y[static_cast<std::size_t>(k)];
        const double mean = y.mean();
        const double var = y.size() > 1 ? (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1) : 0.0;
        t.mean(k) = mean;
        if (var > 0.0) sd(k) = std::sqrt(var);
        if (data.reps > 1) {
            const Index n = data.rows(k);
            const Eigen::VectorXd ybar = data.replicate_means(k);
            double ss = 0.0;
            for (Index m = 0; m < data.reps; ++m) ss += (y.segment(m * n, n) - ybar).squaredNorm();
            noise(k) = std::sqrt(ss / static_cast<double>(n * (data.reps - 1)));
        }
    }
    t.scale = sd;
    if (k_out > 1 && data.reps > 1 && (noise.array() > 0.0).all() && (noise.array() < sd.array()).all()) {
        const double common = std::exp((sd.array() / noise.array()).log().mean());
        t.scale = noise * common;
    }
    return t;
}

Dataset OutputTransform::apply(const Dataset& data) const {
    Dataset out = data;
    for (Index k = 0; k < data.outputs(); ++k) {
        auto& y = out.y[static_cast<std::size_t>(k)];
        y = ((y.array() - mean(k)) / scale(k)).matrix();
    }
    return out;
}

namespace {

class NegatedObjective final : public ceres::FirstOrderFunction {
public:
    NegatedObjective(const CovarianceObjective& objective, int* evaluations)
        : objective_(objective), evaluations_(evaluations) {}

    bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
        ++*evaluations_;
        const Eigen::Map<const Eigen::VectorXd> theta(parameters, objective_.num_parameters());
        Eigen::VectorXd grad;
        const auto value = objective_.evaluate(theta, gradient != nullptr ? &grad : nullptr);
        if (!value) return false;
        *cost = -*value;
        if (gradient != nullptr) {
            Eigen::Map<Eigen::VectorXd>(gradient, objective_.num_parameters()) = -grad;
        }
        return true;
    }

    int NumParameters() const override { return static_cast<int>(objective_.num_parameters()); }

private:
    const CovarianceObjective& objective_;
    int* evaluations_;
};

// Ceres reports benign line-search fallbacks through glog; keep them off the
// caller's stderr for the duration of a solve.
class QuietLogging {
public:
    QuietLogging() : saved_(FLAGS_minloglevel) { FLAGS_minloglevel = std::max(saved_, 2); }
    ~QuietLogging() { FLAGS_minloglevel = saved_; }
    QuietLogging(const QuietLogging&) = delete;
    QuietLogging& operator=(const QuietLogging&) = delete;

private:
    int saved_;
};

struct RunResult {
    bool ok = false;
    double objective = -std::numeric_limits<double>::infinity();
    MgpParams params;
    int outer_iterations = 0;
    int evaluations = 0;
};

std::vector<Eigen::VectorXd> split_beta(const Eigen::VectorXd& stacked, const RegressionBasis& basis) {
    std::vector<Eigen::VectorXd> out;
    for (Index k = 0; k < basis.outputs(); ++k) out.push_back(stacked.segment(basis.offset(k), basis.width(k)));
    return out;
}

// beta-step: penalized GLS at the covariance implied by theta.
std::optional<std::vector<Eigen::VectorXd>> beta_step(const CovarianceObjective& objective,
                                                      const detail::Reduced& reduced,
                                                      const RegressionBasis& basis, const Eigen::VectorXd& theta,
                                                      double lambda) {
    const MgpParams p = objective.unpack(theta);
    const auto factor = detail::factorize(detail::mean_covariance(reduced, p, angles_to_corr(p.omega)), true);
    if (!factor) return std::nullopt;
    try {
        return split_beta(gls_beta_l1(factor->lower, reduced.f, reduced.ybar, lambda), basis);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

RunResult run_from(const Dataset& data, const detail::Reduced& reduced, const RegressionBasis& basis,
                   Eigen::VectorXd theta, double lambda, const FitConfig& config) {
    RunResult out;
    std::vector<Eigen::VectorXd> zero;
    for (Index k = 0; k < basis.outputs(); ++k) zero.push_back(Eigen::VectorXd::Zero(basis.width(k)));
    CovarianceObjective objective(data, basis, zero, lambda);
    if (!objective.in_bounds(theta)) return out;

    ceres::GradientProblemSolver::Options options;
    options.line_search_direction_type = ceres::LBFGS;
    options.max_num_iterations = config.max_inner_iterations;
    options.function_tolerance = 1e-10;
    options.gradient_tolerance = 1e-8;
    options.parameter_tolerance = 1e-10;
    options.logging_type = ceres::SILENT;
    options.minimizer_progress_to_stdout = false;

    double previous = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> beta;
    for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
        auto next_beta = beta_step(objective, reduced, basis, theta, lambda);
        if (!next_beta) return out;
        beta = std::move(*next_beta);
        objective.set_beta(beta);
        if (!objective.evaluate(theta, nullptr)) return out;

        ceres::GradientProblem problem(new NegatedObjective(objective, &out.evaluations));
        ceres::GradientProblemSolver::Summary summary;
        Eigen::VectorXd trial = theta;
        {
            const QuietLogging quiet;
            ceres::Solve(options, problem, trial.data(), &summary);
        }
        const auto value = objective.evaluate(trial, nullptr);
        const auto current = objective.evaluate(theta, nullptr);
        if (value && (!current || *value >= *current)) theta = trial;

        const auto now = objective.evaluate(theta, nullptr);
        if (!now) return out;
        out.outer_iterations = outer + 1;
        if (*now - previous < config.tolerance * (1.0 + std::abs(*now))) break;
        previous = *now;
    }

    auto final_beta = beta_step(objective, reduced, basis, theta, lambda);
    if (final_beta) {
        objective.set_beta(*final_beta);
        beta = std::move(*final_beta);
    } else {
        objective.set_beta(beta);
    }
    const auto value = objective.evaluate(theta, nullptr);
    if (!value) return out;
    out.ok = true;
    out.objective = *value;
    out.params = objective.unpack(theta);
    out.params.beta = beta;
    return out;
}

double initial_nugget(const detail::Reduced& reduced) {
    if (reduced.reps > 1) {
        const double dof = static_cast<double>(reduced.rows * (reduced.reps - 1));
        return std::clamp(reduced.within_ss / dof, 1e-8, 1.0);
    }
    return 1e-3;
}

MgpParams random_start(Index outputs, Index dims, const detail::Reduced& reduced, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_phi(std::log(0.1), std::log(100.0));
    MgpParams p;
    p.sigma.sigma = Eigen::VectorXd::Ones(outputs);
    p.phi.phi.resize(outputs, dims);
    for (Index i = 0; i < outputs; ++i) {
        for (Index d = 0; d < dims; ++d) p.phi.phi(i, d) = std::exp(log_phi(rng));
    }
    p.omega = CrossCorrAngles::independent(outputs);
    p.nugget = initial_nugget(reduced);
    return p;
}

FitDiagnostics fit_fixed(const Dataset& data, const RegressionBasis& basis, double lambda, const FitConfig& config,
                         MgpParams* best_params);

// Start from K separate univariate fits with T = I.
std::optional<MgpParams> warm_start(const Dataset& data, const RegressionBasis& basis, double lambda,
                                    const FitConfig& config) {
    const Index k = data.outputs();
    MgpParams p;
    p.sigma.sigma.resize(k);
    p.phi.phi.resize(k, data.dims());
    p.omega = CrossCorrAngles::independent(k);
    double nugget_sum = 0.0;
    FitConfig sub = config;
    sub.warm_start = false;
    for (Index i = 0; i < k; ++i) {
        const RegressionBasis sub_basis{{basis.kinds[static_cast<std::size_t>(i)]}, basis.dims};
        MgpParams single;
        try {
            fit_fixed(data.output(i), sub_basis, lambda, sub, &single);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
        p.sigma.sigma(i) = single.sigma.sigma(0);
        p.phi.phi.row(i) = single.phi.phi.row(0);
        nugget_sum += single.nugget;
    }
    p.nugget = nugget_sum / static_cast<double>(k);
    return p;
}

FitDiagnostics fit_fixed(const Dataset& data, const RegressionBasis& basis, double lambda, const FitConfig& config,
                         MgpParams* best_params) {
    if (config.restarts < 1) throw std::invalid_argument("fit: restarts must be >= 1");
    const detail::Reduced reduced = detail::reduce(data, basis);
    const Index k = data.outputs();

    FitDiagnostics diag;
    diag.selected_lambda = lambda;
    RunResult best;
    for (int r = 0; r < config.restarts; ++r) {
        const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        std::optional<MgpParams> start;
        if (r == 0 && k > 1 && config.warm_start) start = warm_start(data, basis, lambda, config);
        if (!start) start = random_start(k, data.dims(), reduced, seed);
        start->nugget = std::max(start->nugget, 1e-10);

        RunResult run = run_from(data, reduced, basis, CovarianceObjective::pack(*start), lambda, config);
        diag.objective_evaluations += run.evaluations;
        diag.restart_scores.push_back(run.ok ? run.objective : -std::numeric_limits<double>::infinity());
        if (run.ok && run.objective > best.objective) best = std::move(run);
    }
    if (!best.ok) {
        throw NumericalError("fit: all " + std::to_string(config.restarts) +
                             " restarts failed to factor the covariance matrix");
    }
    diag.objective = best.objective;
    diag.outer_iterations = best.outer_iterations;
    *best_params = best.params;
    return diag;
}

// Holdout rows per output; outputs with equal row counts share one split.
std::optional<std::pair<std::vector<std::vector<Index>>, std::vector<std::vector<Index>>>>
holdout_split(const Dataset& data, double fraction, std::uint64_t seed) {
    std::vector<std::vector<Index>> train, hold;
    std::mt19937_64 rng(derive_seed(seed, 0x401dULL));
    std::vector<Index> shared;
    for (Index k = 0; k < data.outputs(); ++k) {
        const Index n = data.rows(k);
        const auto n_hold = static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
        if (n_hold < 1 || n - n_hold < 3) return std::nullopt;
        std::vector<Index> order(static_cast<std::size_t>(n));
        if (k > 0 && static_cast<Index>(shared.size()) == n) {
            order = shared;
        } else {
            std::iota(order.begin(), order.end(), Index{0});
            std::shuffle(order.begin(), order.end(), rng);
            shared = order;
        }
        std::vector<Index> h(order.begin(), order.begin() + n_hold);
        std::vector<Index> t(order.begin() + n_hold, order.end());
        std::sort(h.begin(), h.end());
        std::sort(t.begin(), t.end());
        hold.push_back(std::move(h));
        train.push_back(std::move(t));
    }
    return std::make_pair(std::move(train), std::move(hold));
}

} // namespace

FittedModel fit(const Dataset& data, const RegressionBasis& basis, const FitConfig& config) {
    data.validate();
    if (basis.outputs() != data.outputs() || basis.dims != data.dims()) {
        throw std::invalid_argument("fit: basis does not match the dataset");
    }
    const OutputTransform transform =
        config.standardize ? OutputTransform::standardizing(data) : OutputTransform::identity(data.outputs());
    const Dataset model_data = transform.apply(data);
    const double n_obs = static_cast<double>(data.total_observations());

    double lambda = 0.0;
    std::vector<double> candidates, scores;
    if (config.lambda) {
        lambda = *config.lambda;
        if (!(lambda >= 0.0)) throw std::invalid_argument("fit: lambda must be >= 0");
    } else {
        const auto split = holdout_split(model_data, config.holdout_fraction, config.seed);
        if (split) {
            const Dataset train = model_data.select_rows(split->first);
            const Dataset hold = model_data.select_rows(split->second);
            for (double g : config.lambda_grid) {
                const double cand = g * n_obs;
                MgpParams p;
                double score = std::numeric_limits<double>::infinity();
                try {
                    fit_fixed(train, basis, cand, config, &p);
                    const FittedModel m = condition(train, basis, p, OutputTransform::identity(data.outputs()));
                    score = rmse(m, hold).mean();
                } catch (const NumericalError&) {
                }
                candidates.push_back(cand);
                scores.push_back(score);
            }
            const double best = *std::min_element(scores.begin(), scores.end());
            if (!std::isfinite(best)) throw NumericalError("fit: every lambda candidate failed on the holdout split");
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (scores[c] <= best * (1.0 + config.lambda_score_margin)) lambda = std::max(lambda, candidates[c]);
            }
        }
    }

    MgpParams params;
    FitDiagnostics diag = fit_fixed(model_data, basis, lambda, config, &params);
    diag.lambda_candidates = std::move(candidates);
    diag.lambda_scores = std::move(scores);

    FittedModel model = condition(data, basis, params, transform);
    model.diagnostics = std::move(diag);
    return model;
}

std::vector<FittedModel> fit_independent(const Dataset& data, const RegressionBasis& basis,
                                         const FitConfig& config) {
    data.validate();
    if (basis.outputs() != data.outputs()) throw std::invalid_argument("fit_independent: basis/output mismatch");
    std::vector<FittedModel> out;
    for (Index k = 0; k < data.outputs(); ++k) {
        const RegressionBasis sub{{basis.kinds[static_cast<std::size_t>(k)]}, basis.dims};
        out.push_back(fit(data.output(k), sub, config));
    }
    return out;
}

} // namespace mgpkit
