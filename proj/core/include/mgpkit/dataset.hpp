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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/design.hpp"

namespace mgpkit {

/// Replicated multi-output observations.
///
/// Output k is observed at the n_k rows of x[k] (unit hypercube), each row
/// `reps` times. y[k] has length n_k * reps and is replicate-major: replicate
/// m of row j sits at y[k](m * n_k + j).
struct Dataset {
    std::vector<InputSpec> specs;
    std::vector<std::string> output_names;
    std::vector<Eigen::MatrixXd> x;
    std::vector<Eigen::VectorXd> y;
    Index reps = 1;

    Index outputs() const { return static_cast<Index>(x.size()); }
    Index dims() const { return x.empty() ? 0 : x.front().cols(); }
    Index rows(Index k) const { return x[static_cast<std::size_t>(k)].rows(); }
    /// Sum of n_k (distinct design rows across outputs).
    Index total_rows() const;
    /// Sum of n_k * reps.
    Index total_observations() const;

    /// Throws std::invalid_argument on shape mismatches or non-finite values.
    void validate() const;

    Eigen::VectorXd replicate_means(Index k) const;
    /// Sum over outputs and rows of squared deviations from the replicate mean.
    double within_sum_of_squares() const;

    /// Single-output view with output k's data only.
    Dataset output(Index k) const;
    /// Keeps, for each output k, the design rows listed in rows[k].
    Dataset select_rows(const std::vector<std::vector<Index>>& rows) const;
};

} // namespace mgpkit
