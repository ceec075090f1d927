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

#include <vector>

#include <Eigen/Core>

#include "mgpkit/design.hpp"

namespace mgpkit {

/// Hypersphere angles parameterizing a K x K correlation matrix. Stored in
/// row-major lower-triangle order: (2,1), (3,1), (3,2), (4,1), ... with
/// 1-based (row, column). Every angle lies strictly inside (0, pi).
struct CrossCorrAngles {
    Index outputs = 1;
    Eigen::VectorXd angles;

    static Index count_for(Index outputs) { return outputs * (outputs - 1) / 2; }
    /// All angles at pi/2, which gives T = I.
    static CrossCorrAngles independent(Index outputs);

    /// Position of angle (row, col), 0-based with col < row.
    static Index offset(Index row, Index col) { return row * (row - 1) / 2 + col; }

    void validate() const;
};

/// Positive definite with unit diagonal.
struct CrossCorrMatrix {
    Eigen::MatrixXd t;

    Index outputs() const { return t.rows(); }
};

/// K x l matrix; row i holds the diagonal of Phi_i. Entries act as
/// precisions: the within-output correlation is exp(-sum_k phi_ik d_k^2).
struct RoughnessParams {
    Eigen::MatrixXd phi;

    void validate() const;
};

struct MarginalSds {
    Eigen::VectorXd sigma;

    void validate() const;
};

/// Lower-triangular factor E with unit-norm rows, built from the angles.
Eigen::MatrixXd hypersphere_factor(const CrossCorrAngles& omega);

/// T = E E'.
CrossCorrMatrix angles_to_corr(const CrossCorrAngles& omega);

/// Inverse of angles_to_corr. Throws NumericalError if t is not positive
/// definite and std::invalid_argument if it lacks a unit diagonal.
CrossCorrAngles corr_to_angles(const CrossCorrMatrix& t);

/// Symmetric, unit diagonal, off-diagonals in [-1, 1], Cholesky succeeds.
bool is_valid_correlation(const Eigen::MatrixXd& t, double tol = 1e-10);

/// Per-coordinate precision of the cross term: (1/(2a) + 1/(2b))^-1.
inline double pair_precision(double a, double b) { return 2.0 * a * b / (a + b); }

/// Per-coordinate normalizer [((a+b)/2) ((1/a+1/b)/2)]^(-1/4). Equals 1 when
/// a == b and is <= 1 otherwise.
double pair_normalizer(double a, double b);

/// Nonseparable cross-covariance between output i at xi and output j at xj:
///
///   sigma_i sigma_j T_ij exp(-d' (Phi_i^-1/2 + Phi_j^-1/2)^-1 d)
///       / |(Phi_i/2 + Phi_j/2)(Phi_i^-1/2 + Phi_j^-1/2)|^(1/4)
///
/// with d = xi - xj and diagonal Phi.
double cross_cov(const Eigen::Ref<const Eigen::VectorXd>& xi,
                 const Eigen::Ref<const Eigen::VectorXd>& xj, Index i, Index j,
                 const MarginalSds& sigma, const RoughnessParams& phi,
                 const CrossCorrMatrix& t);

/// Block of cross_cov values between the rows of xa (output i) and the rows
/// of xb (output j).
Eigen::MatrixXd cross_cov_block(const Eigen::MatrixXd& xa, Index i,
                                const Eigen::MatrixXd& xb, Index j,
                                const MarginalSds& sigma, const RoughnessParams& phi,
                                const CrossCorrMatrix& t);

/// Full covariance over the stacked per-output designs (output-block order)
/// plus nugget * I.
Eigen::MatrixXd cov_matrix(const std::vector<Eigen::MatrixXd>& xs,
                           const MarginalSds& sigma, const RoughnessParams& phi,
                           const CrossCorrMatrix& t, double nugget);

} // namespace mgpkit
