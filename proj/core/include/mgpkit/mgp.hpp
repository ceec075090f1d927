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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/covkernel.hpp"
#include "mgpkit/dataset.hpp"

namespace mgpkit {

enum class BasisKind { Constant, Linear, QuadraticDiagonal };

std::string_view basis_name(BasisKind kind);
/// Accepts "const", "linear" and "quad".
BasisKind parse_basis_kind(std::string_view name);

/// Per-output regression functions f_k(x).
///   Constant:          [1]
///   Linear:            [1, x_1, ..., x_l]
///   QuadraticDiagonal: [1, x_1, ..., x_l, x_1^2, ..., x_l^2]
struct RegressionBasis {
    std::vector<BasisKind> kinds;
    Index dims = 0;

    static RegressionBasis uniform(BasisKind kind, Index outputs, Index dims);

    Index outputs() const { return static_cast<Index>(kinds.size()); }
    Index width(Index output) const;
    Index total_width() const;
    /// Column offset of output k's coefficients in the stacked beta.
    Index offset(Index output) const;

    Eigen::RowVectorXd evaluate(Index output, const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Rows f_k(x_j)' for every row of x.
    Eigen::MatrixXd evaluate_rows(Index output, const Eigen::MatrixXd& x) const;
};

/// Everything the likelihood depends on. beta[k] has basis.width(k) entries.
struct MgpParams {
    std::vector<Eigen::VectorXd> beta;
    MarginalSds sigma;
    RoughnessParams phi;
    CrossCorrAngles omega;
    double nugget = 0.0;
    double lambda = 0.0;

    Index outputs() const { return sigma.sigma.size(); }
    Eigen::VectorXd stacked_beta() const;
    double beta_l1() const;
    void validate() const;
};

/// blkdiag(f_1, ..., f_K) over the given per-output designs.
Eigen::MatrixXd build_f_matrix(const std::vector<Eigen::MatrixXd>& xs, const RegressionBasis& basis);

/// blkdiag(f_1, ..., f_K) over every observation of the dataset, replicates
/// included, in the same order as the stacked y.
Eigen::MatrixXd build_f_matrix(const Dataset& data, const RegressionBasis& basis);

/// -1/2 (log|R| + (y - F beta)' R^-1 (y - F beta)) - lambda |beta|_1
///     - (N/2) log(2 pi)
/// where R is the covariance of all N stacked observations. Replicates are
/// reduced exactly to replicate means plus a within-replicate term, so the
/// dense matrix that gets factored is only (sum n_k) square. Throws
/// NumericalError when R is not positive definite.
double penalized_loglik(const MgpParams& params, const Dataset& data, const RegressionBasis& basis);

/// Largest |F~' y~| over the columns of the whitened system L^-1 F, L^-1 y.
/// Any lambda at or above it yields beta = 0.
double lambda_max(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& f, const Eigen::VectorXd& y);

/// argmin_beta 1/2 (y - F beta)' R^-1 (y - F beta) + lambda |beta|_1 with
/// R = L L'. lambda == 0 solves the GLS normal equations directly; otherwise
/// cyclic coordinate descent with soft-thresholding on the whitened system.
/// Throws NumericalError for a rank-deficient basis at lambda == 0.
Eigen::VectorXd gls_beta_l1(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& f,
                            const Eigen::VectorXd& y, double lambda);

struct FitConfig {
    /// Fixed penalty. When empty, lambda is chosen from lambda_grid (scaled by
    /// the number of observations) by RMSE on a holdout split.
    std::optional<double> lambda;
    std::vector<double> lambda_grid{0.0, 0.01, 0.1, 1.0, 10.0};
    double holdout_fraction = 0.2;
    /// Largest grid lambda whose holdout score is within this relative margin
    /// of the best score wins.
    double lambda_score_margin = 0.02;

    int restarts = 5;
    /// For K > 1, restart 0 starts from per-output univariate fits with T = I.
    bool warm_start = true;
    int max_outer_iterations = 20;
    int max_inner_iterations = 200;
    double tolerance = 1e-7;
    std::uint64_t seed = 0;
    bool standardize = true;
};

/// y_original = mean + scale * y_model, per output.
struct OutputTransform {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static OutputTransform identity(Index outputs);
    static OutputTransform standardizing(const Dataset& data);
    Dataset apply(const Dataset& data) const;
};

struct FitDiagnostics {
    double objective = 0.0; // penalized log-likelihood, model units
    int outer_iterations = 0;
    int objective_evaluations = 0;
    std::vector<double> restart_scores;
    double selected_lambda = 0.0;
    std::vector<double> lambda_candidates;
    std::vector<double> lambda_scores;
};

/// A conditioned model. Parameters are in model (standardized) units; the
/// transform maps predictions back. Immutable after construction.
struct FittedModel {
    MgpParams params;
    RegressionBasis basis;
    Dataset data; // original units
    OutputTransform transform;
    Eigen::MatrixXd chol;  // lower factor of the replicate-mean covariance
    Eigen::VectorXd alpha; // that covariance's inverse applied to (ybar - F beta)
    double jitter = 0.0;
    FitDiagnostics diagnostics;

    Index outputs() const { return params.outputs(); }
    CrossCorrMatrix correlation() const;
    /// Coefficients mapped to original output units.
    std::vector<Eigen::VectorXd> beta_original() const;
};

/// Builds the cached factorization for fixed parameters.
FittedModel condition(const Dataset& data, const RegressionBasis& basis, const MgpParams& params,
                      const OutputTransform& transform);

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    bool extrapolated = false;

    Eigen::VectorXd lower() const { return mean - 2.0 * sd; }
    Eigen::VectorXd upper() const { return mean + 2.0 * sd; }
};

/// Kriging mean f(x0)' beta + r(x0)' R^-1 (y - F beta) and simple-kriging
/// standard deviation sqrt(sigma_k^2 + nugget - r' R^-1 r), per output.
Prediction predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x0);
std::vector<Prediction> predict_points(const FittedModel& model, const Eigen::MatrixXd& points);

FittedModel fit(const Dataset& data, const RegressionBasis& basis, const FitConfig& config);

/// One K = 1 fit per output.
std::vector<FittedModel> fit_independent(const Dataset& data, const RegressionBasis& basis,
                                         const FitConfig& config);

/// Per-output RMSE of the predicted mean against every test observation.
Eigen::VectorXd rmse(const FittedModel& model, const Dataset& test);
Eigen::VectorXd rmse(const std::vector<FittedModel>& models, const Dataset& test);

/// The covariance step's objective in unconstrained coordinates. With
/// dims l and K outputs the layout is
///   [log sigma (K) | log phi (K*l, row-major) | angle logits (K(K-1)/2) | log nugget]
/// where angle = pi * logistic(logit), clamped to [1e-6, pi - 1e-6].
/// beta and lambda are held fixed.
class CovarianceObjective {
public:
    CovarianceObjective(const Dataset& data, const RegressionBasis& basis,
                        std::vector<Eigen::VectorXd> beta, double lambda);
    ~CovarianceObjective();
    CovarianceObjective(CovarianceObjective&&) noexcept;
    CovarianceObjective& operator=(CovarianceObjective&&) noexcept;

    Index num_parameters() const;

    static Eigen::VectorXd pack(const MgpParams& params);
    MgpParams unpack(const Eigen::VectorXd& theta) const;

    /// True when theta lies inside the box the optimizer is allowed to visit.
    bool in_bounds(const Eigen::VectorXd& theta) const;

    /// Penalized log-likelihood and, optionally, its analytic gradient with
    /// respect to theta. Empty when the covariance cannot be factored even
    /// after jitter.
    std::optional<double> evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* gradient) const;

    void set_beta(std::vector<Eigen::VectorXd> beta);

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace mgpkit
