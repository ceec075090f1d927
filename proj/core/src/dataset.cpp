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

#include "mgpkit/dataset.hpp"

#include <stdexcept>
#include <string>

namespace mgpkit {

Index Dataset::total_rows() const {
    Index n = 0;
    for (const auto& xk : x) n += xk.rows();
    return n;
}

Index Dataset::total_observations() const { return total_rows() * reps; }

void Dataset::validate() const {
    if (x.empty()) throw std::invalid_argument("dataset: no outputs");
    if (y.size() != x.size()) throw std::invalid_argument("dataset: x and y disagree on the output count");
    if (!output_names.empty() && output_names.size() != x.size()) {
        throw std::invalid_argument("dataset: output name count does not match the output count");
    }
    if (reps < 1) throw std::invalid_argument("dataset: reps must be >= 1");
    const Index l = dims();
    if (!specs.empty() && static_cast<Index>(specs.size()) != l) {
        throw std::invalid_argument("dataset: spec count does not match the input dimension");
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k].cols() != l) throw std::invalid_argument("dataset: outputs disagree on input dimension");
        if (x[k].rows() < 1) throw std::invalid_argument("dataset: output " + std::to_string(k) + " has no rows");
        if (y[k].size() != x[k].rows() * reps) {
            throw std::invalid_argument("dataset: output " + std::to_string(k) + " expects " +
                                        std::to_string(x[k].rows() * reps) + " observations, has " +
                                        std::to_string(y[k].size()));
        }
        if (!x[k].allFinite() || !y[k].allFinite()) {
            throw std::invalid_argument("dataset: output " + std::to_string(k) + " contains non-finite values");
        }
    }
}

Eigen::VectorXd Dataset::replicate_means(Index k) const {
    const Index n = rows(k);
    const auto& yk = y[static_cast<std::size_t>(k)];
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (Index m = 0; m < reps; ++m) mean += yk.segment(m * n, n);
    return mean / static_cast<double>(reps);
}

double Dataset::within_sum_of_squares() const {
    if (reps == 1) return 0.0;
    double ss = 0.0;
    for (Index k = 0; k < outputs(); ++k) {
        const Index n = rows(k);
        const Eigen::VectorXd mean = replicate_means(k);
        const auto& yk = y[static_cast<std::size_t>(k)];
        for (Index m = 0; m < reps; ++m) ss += (yk.segment(m * n, n) - mean).squaredNorm();
    }
    return ss;
}

Dataset Dataset::output(Index k) const {
    if (k < 0 || k >= outputs()) throw std::out_of_range("dataset: output index out of range");
    Dataset d;
    d.specs = specs;
    if (!output_names.empty()) d.output_names = {output_names[static_cast<std::size_t>(k)]};
    d.x = {x[static_cast<std::size_t>(k)]};
    d.y = {y[static_cast<std::size_t>(k)]};
    d.reps = reps;
    return d;
}

Dataset Dataset::select_rows(const std::vector<std::vector<Index>>& rows_per_output) const {
    if (static_cast<Index>(rows_per_output.size()) != outputs()) {
        throw std::invalid_argument("dataset: row selection needs one list per output");
    }
    Dataset d;
    d.specs = specs;
    d.output_names = output_names;
    d.reps = reps;
    for (Index k = 0; k < outputs(); ++k) {
        const auto& sel = rows_per_output[static_cast<std::size_t>(k)];
        const Index n = rows(k);
        const auto count = static_cast<Index>(sel.size());
        Eigen::MatrixXd xk(count, dims());
        Eigen::VectorXd yk(count * reps);
        for (Index r = 0; r < count; ++r) {
            const Index src = sel[static_cast<std::size_t>(r)];
            if (src < 0 || src >= n) throw std::out_of_range("dataset: selected row out of range");
            xk.row(r) = x[static_cast<std::size_t>(k)].row(src);
            for (Index m = 0; m < reps; ++m) yk(m * count + r) = y[static_cast<std::size_t>(k)](m * n + src);
        }
        d.x.push_back(std::move(xk));
        d.y.push_back(std::move(yk));
    }
    return d;
}

} // namespace mgpkit
