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

// Internal helpers shared by likelihood, fit and prediction code.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/mgp.hpp"

namespace mgpkit::detail {

// A dataset reduced to replicate means. For M replicates of every design row
// with iid noise variance v, the stacked likelihood factors exactly into
//   N(ybar; F_u beta, C + (v/M) I)
//   x (within-replicate chi-square term with sum n_k (M - 1) dof)
//   x M^(-sum n_k / 2)
// which is what the evaluation below uses.
struct Reduced {
    std::vector<Eigen::MatrixXd> x;
    std::vector<Index> offsets;
    Eigen::VectorXd ybar;
    Eigen::MatrixXd f;
    double within_ss = 0.0;
    Index reps = 1;
    Index rows = 0;
    Index observations = 0;
};

Reduced reduce(const Dataset& data, const RegressionBasis& basis);

struct Factor {
    Eigen::MatrixXd lower;
    double logdet = 0.0;
    double jitter = 0.0;
};

// Cholesky factorization. With allow_jitter, failures are retried with
// 1e-10, 1e-9, ..., 1e-6 times the mean diagonal added.
std::optional<Factor> factorize(const Eigen::MatrixXd& cov, bool allow_jitter);

// Covariance of the replicate means.
Eigen::MatrixXd mean_covariance(const Reduced& r, const MgpParams& params, const CrossCorrMatrix& t);

// Log-likelihood without the penalty, given the factor and the whitened
// residual L^-1 (ybar - F beta).
double gaussian_loglik(const Reduced& r, const Factor& factor, const Eigen::VectorXd& whitened,
                       double nugget);

} // namespace mgpkit::detail
