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

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "engine.hpp"
#include "mgpkit/error.hpp"
#include "mgpkit/mgp.hpp"

namespace mgpkit {

CrossCorrMatrix FittedModel::correlation() const { return angles_to_corr(params.omega); }

std::vector<Eigen::VectorXd> FittedModel::beta_original() const {
    std::vector<Eigen::VectorXd> out;
    for (Index k = 0; k < outputs(); ++k) {
        Eigen::VectorXd b = params.beta[static_cast<std::size_t>(k)] * transform.scale(k);
        b(0) += transform.mean(k);
        out.push_back(std::move(b));
    }
    return out;
}

FittedModel condition(const Dataset& data, const RegressionBasis& basis, const MgpParams& params,
                      const OutputTransform& transform) {
    params.validate();
    if (params.outputs() != data.outputs() || params.phi.phi.cols() != data.dims()) {
        throw std::invalid_argument("condition: parameter shapes do not match the dataset");
    }
    if (transform.mean.size() != data.outputs() || transform.scale.size() != data.outputs()) {
        throw std::invalid_argument("condition: output transform does not match the dataset");
    }
    const detail::Reduced reduced = detail::reduce(transform.apply(data), basis);
    const CrossCorrMatrix t = angles_to_corr(params.omega);
    const auto factor = detail::factorize(detail::mean_covariance(reduced, params, t), true);
    if (!factor) throw NumericalError("condition: covariance is not positive definite even with jitter");

    FittedModel m;
    m.params = params;
    m.basis = basis;
    m.data = data;
    m.transform = transform;
    m.chol = factor->lower;
    m.jitter = factor->jitter;
    const Eigen::VectorXd resid = reduced.ybar - reduced.f * params.stacked_beta();
    m.alpha = m.chol.triangularView<Eigen::Lower>().solve(resid);
    m.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(m.alpha);
    return m;
}

std::vector<Prediction> predict_points(const FittedModel& model, const Eigen::MatrixXd& points) {
    const Index k_out = model.outputs();
    const Index l = model.data.dims();
    if (points.cols() != l) {
        throw std::invalid_argument("predict: points have " + std::to_string(points.cols()) +
                                    " columns, model expects " + std::to_string(l));
    }
    const Index m = points.rows();
    const CrossCorrMatrix t = model.correlation();
    const auto& p = model.params;
    const auto lower = model.chol.triangularView<Eigen::Lower>();

    std::vector<Prediction> out(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        out[static_cast<std::size_t>(i)].mean.resize(k_out);
        out[static_cast<std::size_t>(i)].sd.resize(k_out);
        const auto row = points.row(i).array();
        out[static_cast<std::size_t>(i)].extrapolated = (row < -1e-12).any() || (row > 1.0 + 1e-12).any();
    }

    const Index n = model.chol.rows();
    for (Index k = 0; k < k_out; ++k) {
        Eigen::MatrixXd r0(m, n);
        Index at = 0;
        for (Index j = 0; j < k_out; ++j) {
            const auto& xj = model.data.x[static_cast<std::size_t>(j)];
            r0.middleCols(at, xj.rows()) = cross_cov_block(points, k, xj, j, p.sigma, p.phi, t);
            at += xj.rows();
        }
        const Eigen::VectorXd trend = model.basis.evaluate_rows(k, points) * p.beta[static_cast<std::size_t>(k)];
        const Eigen::VectorXd mean = trend + r0 * model.alpha;
        const Eigen::MatrixXd v = lower.solve(r0.transpose());
        const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
        const double prior = p.sigma.sigma(k) * p.sigma.sigma(k) + p.nugget;
        for (Index i = 0; i < m; ++i) {
            auto& pred = out[static_cast<std::size_t>(i)];
            pred.mean(k) = model.transform.mean(k) + model.transform.scale(k) * mean(i);
            pred.sd(k) = model.transform.scale(k) * std::sqrt(std::max(0.0, prior - reduction(i)));
        }
    }
    return out;
}

Prediction predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x0) {
    Eigen::MatrixXd pts = x0.transpose();
    return predict_points(model, pts).front();
}

Eigen::VectorXd rmse(const FittedModel& model, const Dataset& test) {
    test.validate();
    if (test.outputs() != model.outputs()) throw std::invalid_argument("rmse: output count mismatch");
    Eigen::VectorXd out(test.outputs());
    for (Index k = 0; k < test.outputs(); ++k) {
        const auto preds = predict_points(model, test.x[static_cast<std::size_t>(k)]);
        const Index n = test.rows(k);
        const auto& y = test.y[static_cast<std::size_t>(k)];
        double ss = 0.0;
        for (Index rep = 0; rep < test.reps; ++rep) {
            for (Index j = 0; j < n; ++j) {
                const double e = preds[static_cast<std::size_t>(j)].mean(k) - y(rep * n + j);
                ss += e * e;
            }
        }
        out(k) = std::sqrt(ss / static_cast<double>(n * test.reps));
    }
    return out;
}

Eigen::VectorXd rmse(const std::vector<FittedModel>& models, const Dataset& test) {
    if (static_cast<Index>(models.size()) != test.outputs()) {
        throw std::invalid_argument("rmse: need one model per output");
    }
    Eigen::VectorXd out(test.outputs());
    for (Index k = 0; k < test.outputs(); ++k) {
        if (models[static_cast<std::size_t>(k)].outputs() != 1) {
            throw std::invalid_argument("rmse: independent models must be single-output");
        }
        out(k) = rmse(models[static_cast<std::size_t>(k)], test.output(k))(0);
    }
    return out;
}

} // namespace mgpkit
