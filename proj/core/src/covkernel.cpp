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

#include "mgpkit/covkernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "mgpkit/error.hpp"

namespace mgpkit {

CrossCorrAngles CrossCorrAngles::independent(Index outputs) {
    return {outputs, Eigen::VectorXd::Constant(count_for(outputs), std::numbers::pi / 2.0)};
}

void CrossCorrAngles::validate() const {
    if (outputs < 1) throw std::invalid_argument("angles: need at least one output");
    if (angles.size() != count_for(outputs)) {
        throw std::invalid_argument("angles: expected " + std::to_string(count_for(outputs)) +
                                    " angles for " + std::to_string(outputs) + " outputs, got " +
                                    std::to_string(angles.size()));
    }
    for (Index a = 0; a < angles.size(); ++a) {
        if (!(angles(a) > 0.0 && angles(a) < std::numbers::pi)) {
            throw std::invalid_argument("angles: entry " + std::to_string(a) + " outside (0, pi)");
        }
    }
}

void RoughnessParams::validate() const {
    if (!(phi.array() > 0.0).all() || !phi.allFinite()) {
        throw std::invalid_argument("roughness parameters must be finite and > 0");
    }
}

void MarginalSds::validate() const {
    if (!(sigma.array() > 0.0).all() || !sigma.allFinite()) {
        throw std::invalid_argument("marginal standard deviations must be finite and > 0");
    }
}

Eigen::MatrixXd hypersphere_factor(const CrossCorrAngles& omega) {
    omega.validate();
    const Index k = omega.outputs;
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
    e(0, 0) = 1.0;
    for (Index r = 1; r < k; ++r) {
        double sin_prod = 1.0;
        for (Index s = 0; s < r; ++s) {
            const double w = omega.angles(CrossCorrAngles::offset(r, s));
            e(r, s) = std::cos(w) * sin_prod;
            sin_prod *= std::sin(w);
        }
        e(r, r) = sin_prod;
    }
    return e;
}

CrossCorrMatrix angles_to_corr(const CrossCorrAngles& omega) {
    const Eigen::MatrixXd e = hypersphere_factor(omega);
    CrossCorrMatrix t{e * e.transpose()};
    // rows of E have unit norm; pin the diagonal against rounding
    t.t.diagonal().setOnes();
    return t;
}

CrossCorrAngles corr_to_angles(const CrossCorrMatrix& t) {
    const Index k = t.outputs();
    if (t.t.cols() != k || k < 1) throw std::invalid_argument("corr_to_angles: matrix must be square");
    if (((t.t.diagonal().array() - 1.0).abs() > 1e-10).any()) {
        throw std::invalid_argument("corr_to_angles: matrix needs a unit diagonal");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(t.t);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("corr_to_angles: matrix is not positive definite");
    }
    Eigen::MatrixXd e = llt.matrixL();

    CrossCorrAngles out{k, Eigen::VectorXd(CrossCorrAngles::count_for(k))};
    for (Index r = 1; r < k; ++r) {
        e.row(r) /= e.row(r).norm();
        for (Index s = 0; s < r; ++s) {
            // the norm of the row tail past s is the running product of sines
            const double tail = e.row(r).segment(s + 1, r - s).norm();
            out.angles(CrossCorrAngles::offset(r, s)) = std::atan2(tail, e(r, s));
        }
    }
    return out;
}

bool is_valid_correlation(const Eigen::MatrixXd& t, double tol) {
    if (t.rows() != t.cols()) return false;
    if (!t.allFinite()) return false;
    if ((t - t.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    if (((t.diagonal().array() - 1.0).abs() > tol).any()) return false;
    if ((t.cwiseAbs().array() > 1.0 + tol).any()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(t);
    return llt.info() == Eigen::Success;
}

double pair_normalizer(double a, double b) {
    return std::pow(0.25 * (a + b) * (1.0 / a + 1.0 / b), -0.25);
}

namespace {

void check_dims(Index xi, Index xj, const RoughnessParams& phi) {
    if (xi != xj || xi != phi.phi.cols()) {
        throw std::invalid_argument("cross_cov: point dimension does not match roughness parameters");
    }
}

struct PairTerms {
    Eigen::VectorXd precision;
    double scale = 0.0;
};

// Everything about the (i, j) output pair that does not depend on the points.
PairTerms pair_terms(Index i, Index j, const MarginalSds& sigma, const RoughnessParams& phi,
                     const CrossCorrMatrix& t) {
    const Index l = phi.phi.cols();
    PairTerms p{Eigen::VectorXd(l), sigma.sigma(i) * sigma.sigma(j) * t.t(i, j)};
    for (Index d = 0; d < l; ++d) {
        const double a = phi.phi(i, d);
        const double b = phi.phi(j, d);
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("cross_cov: roughness must be > 0");
        p.precision(d) = pair_precision(a, b);
        if (i != j) p.scale *= pair_normalizer(a, b);
    }
    return p;
}

} // namespace

double cross_cov(const Eigen::Ref<const Eigen::VectorXd>& xi, const Eigen::Ref<const Eigen::VectorXd>& xj,
                 Index i, Index j, const MarginalSds& sigma, const RoughnessParams& phi,
                 const CrossCorrMatrix& t) {
    check_dims(xi.size(), xj.size(), phi);
    const PairTerms p = pair_terms(i, j, sigma, phi, t);
    const double q = ((xi - xj).array().square() * p.precision.array()).sum();
    return p.scale * std::exp(-q);
}

Eigen::MatrixXd cross_cov_block(const Eigen::MatrixXd& xa, Index i, const Eigen::MatrixXd& xb, Index j,
                                const MarginalSds& sigma, const RoughnessParams& phi,
                                const CrossCorrMatrix& t) {
    check_dims(xa.cols(), xb.cols(), phi);
    const PairTerms p = pair_terms(i, j, sigma, phi, t);
    const Index l = xa.cols();
    Eigen::MatrixXd out(xa.rows(), xb.rows());
    for (Index q = 0; q < xb.rows(); ++q) {
        for (Index pr = 0; pr < xa.rows(); ++pr) {
            double s = 0.0;
            for (Index d = 0; d < l; ++d) {
                const double diff = xa(pr, d) - xb(q, d);
                s += p.precision(d) * diff * diff;
            }
            out(pr, q) = p.scale * std::exp(-s);
        }
    }
    return out;
}

Eigen::MatrixXd cov_matrix(const std::vector<Eigen::MatrixXd>& xs, const MarginalSds& sigma,
                           const RoughnessParams& phi, const CrossCorrMatrix& t, double nugget) {
    if (!(nugget >= 0.0)) throw std::invalid_argument("cov_matrix: nugget must be >= 0");
    const auto k = static_cast<Index>(xs.size());
    if (sigma.sigma.size() != k || phi.phi.rows() != k || t.outputs() != k) {
        throw std::invalid_argument("cov_matrix: parameter shapes do not match the output count");
    }
    Index total = 0;
    std::vector<Index> offset(xs.size());
    for (std::size_t b = 0; b < xs.size(); ++b) {
        offset[b] = total;
        total += xs[b].rows();
    }
    Eigen::MatrixXd c(total, total);
    for (Index i = 0; i < k; ++i) {
        const auto& xi = xs[static_cast<std::size_t>(i)];
        for (Index j = i; j < k; ++j) {
            const auto& xj = xs[static_cast<std::size_t>(j)];
            Eigen::MatrixXd block = cross_cov_block(xi, i, xj, j, sigma, phi, t);
            c.block(offset[static_cast<std::size_t>(i)], offset[static_cast<std::size_t>(j)], xi.rows(), xj.rows()) = block;
            if (i != j) {
                c.block(offset[static_cast<std::size_t>(j)], offset[static_cast<std::size_t>(i)], xj.rows(), xi.rows()) =
                    block.transpose();
            }
        }
    }
    c.diagonal().array() += nugget;
    return c;
}

} // namespace mgpkit
