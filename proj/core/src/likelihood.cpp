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
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "engine.hpp"
#include "mgpkit/error.hpp"
#include "mgpkit/mgp.hpp"

namespace mgpkit {

// ---------------------------------------------------------------------------
// Regression basis

std::string_view basis_name(BasisKind kind) {
    switch (kind) {
    case BasisKind::Constant: return "const";
    case BasisKind::Linear: return "linear";
    case BasisKind::QuadraticDiagonal: return "quad";
    }
    return "const";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "const" || name == "constant") return BasisKind::Constant;
    if (name == "linear") return BasisKind::Linear;
    if (name == "quad" || name == "quadratic") return BasisKind::QuadraticDiagonal;
    throw std::invalid_argument("unknown basis '" + std::string(name) + "' (expected const, linear or quad)");
}

RegressionBasis RegressionBasis::uniform(BasisKind kind, Index outputs, Index dims) {
    return {std::vector<BasisKind>(static_cast<std::size_t>(outputs), kind), dims};
}

Index RegressionBasis::width(Index output) const {
    switch (kinds.at(static_cast<std::size_t>(output))) {
    case BasisKind::Constant: return 1;
    case BasisKind::Linear: return 1 + dims;
    case BasisKind::QuadraticDiagonal: return 1 + 2 * dims;
    }
    return 1;
}

Index RegressionBasis::total_width() const {
    Index q = 0;
    for (Index k = 0; k < outputs(); ++k) q += width(k);
    return q;
}

Index RegressionBasis::offset(Index output) const {
    Index q = 0;
    for (Index k = 0; k < output; ++k) q += width(k);
    return q;
}

Eigen::RowVectorXd RegressionBasis::evaluate(Index output, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != dims) throw std::invalid_argument("basis: point dimension mismatch");
    Eigen::RowVectorXd f(width(output));
    f(0) = 1.0;
    const BasisKind kind = kinds.at(static_cast<std::size_t>(output));
    if (kind != BasisKind::Constant) f.segment(1, dims) = x.transpose();
    if (kind == BasisKind::QuadraticDiagonal) f.segment(1 + dims, dims) = x.array().square().matrix().transpose();
    return f;
}

Eigen::MatrixXd RegressionBasis::evaluate_rows(Index output, const Eigen::MatrixXd& x) const {
    if (x.cols() != dims) throw std::invalid_argument("basis: design dimension mismatch");
    Eigen::MatrixXd f(x.rows(), width(output));
    f.col(0).setOnes();
    const BasisKind kind = kinds.at(static_cast<std::size_t>(output));
    if (kind != BasisKind::Constant) f.middleCols(1, dims) = x;
    if (kind == BasisKind::QuadraticDiagonal) f.middleCols(1 + dims, dims) = x.array().square().matrix();
    return f;
}

// ---------------------------------------------------------------------------
// Parameters

Eigen::VectorXd MgpParams::stacked_beta() const {
    Index q = 0;
    for (const auto& b : beta) q += b.size();
    Eigen::VectorXd out(q);
    Index at = 0;
    for (const auto& b : beta) {
        out.segment(at, b.size()) = b;
        at += b.size();
    }
    return out;
}

double MgpParams::beta_l1() const {
    double s = 0.0;
    for (const auto& b : beta) s += b.cwiseAbs().sum();
    return s;
}

void MgpParams::validate() const {
    const Index k = outputs();
    if (k < 1) throw std::invalid_argument("params: need at least one output");
    sigma.validate();
    phi.validate();
    if (phi.phi.rows() != k) throw std::invalid_argument("params: roughness rows must equal output count");
    if (omega.outputs != k) throw std::invalid_argument("params: angle output count mismatch");
    omega.validate();
    if (static_cast<Index>(beta.size()) != k) throw std::invalid_argument("params: need one beta per output");
    if (!(nugget >= 0.0) || !std::isfinite(nugget)) throw std::invalid_argument("params: nugget must be >= 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("params: lambda must be >= 0");
}

// ---------------------------------------------------------------------------
// F matrices

Eigen::MatrixXd build_f_matrix(const std::vector<Eigen::MatrixXd>& xs, const RegressionBasis& basis) {
    if (static_cast<Index>(xs.size()) != basis.outputs()) {
        throw std::invalid_argument("build_f_matrix: basis defines " + std::to_string(basis.outputs()) +
                                    " outputs, data has " + std::to_string(xs.size()));
    }
    Index rows = 0;
    for (const auto& x : xs) rows += x.rows();
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(rows, basis.total_width());
    Index r0 = 0;
    for (Index k = 0; k < basis.outputs(); ++k) {
        const auto& x = xs[static_cast<std::size_t>(k)];
        f.block(r0, basis.offset(k), x.rows(), basis.width(k)) = basis.evaluate_rows(k, x);
        r0 += x.rows();
    }
    return f;
}

Eigen::MatrixXd build_f_matrix(const Dataset& data, const RegressionBasis& basis) {
    std::vector<Eigen::MatrixXd> expanded;
    for (Index k = 0; k < data.outputs(); ++k) {
        expanded.push_back(data.x[static_cast<std::size_t>(k)].replicate(data.reps, 1));
    }
    return build_f_matrix(expanded, basis);
}

// ---------------------------------------------------------------------------
// Shared evaluation pieces

namespace detail {

Reduced reduce(const Dataset& data, const RegressionBasis& basis) {
    data.validate();
    if (basis.outputs() != data.outputs() || basis.dims != data.dims()) {
        throw std::invalid_argument("basis does not match the dataset's outputs/dimension");
    }
    Reduced r;
    r.x = data.x;
    r.reps = data.reps;
    r.rows = data.total_rows();
    r.observations = data.total_observations();
    r.within_ss = data.within_sum_of_squares();
    r.ybar.resize(r.rows);
    Index at = 0;
    for (Index k = 0; k < data.outputs(); ++k) {
        r.offsets.push_back(at);
        r.ybar.segment(at, data.rows(k)) = data.replicate_means(k);
        at += data.rows(k);
    }
    r.f = build_f_matrix(r.x, basis);
    return r;
}

std::optional<Factor> factorize(const Eigen::MatrixXd& cov, bool allow_jitter) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    double jitter = 0.0;
    if (llt.info() != Eigen::Success) {
        if (!allow_jitter) return std::nullopt;
        const double mean_diag = cov.diagonal().mean();
        bool ok = false;
        for (double rel = 1e-10; rel <= 1e-6 * 1.0001; rel *= 10.0) {
            jitter = rel * mean_diag;
            Eigen::MatrixXd jittered = cov;
            jittered.diagonal().array() += jitter;
            llt.compute(jittered);
            if (llt.info() == Eigen::Success) {
                ok = true;
                break;
            }
        }
        if (!ok) return std::nullopt;
    }
    Factor out;
    out.lower = llt.matrixL();
    out.logdet = 2.0 * out.lower.diagonal().array().log().sum();
    out.jitter = jitter;
    if (!std::isfinite(out.logdet)) return std::nullopt;
    return out;
}

Eigen::MatrixXd mean_covariance(const Reduced& r, const MgpParams& params, const CrossCorrMatrix& t) {
    return cov_matrix(r.x, params.sigma, params.phi, t, params.nugget / static_cast<double>(r.reps));
}

double gaussian_loglik(const Reduced& r, const Factor& factor, const Eigen::VectorXd& whitened,
                       double nugget) {
    double twice_neg = factor.logdet + whitened.squaredNorm();
    if (r.reps > 1) {
        if (!(nugget > 0.0)) {
            throw NumericalError("replicated observations need a positive nugget");
        }
        const double dof = static_cast<double>(r.rows * (r.reps - 1));
        twice_neg += static_cast<double>(r.rows) * std::log(static_cast<double>(r.reps)) +
                     dof * std::log(nugget) + r.within_ss / nugget;
    }
    return -0.5 * twice_neg - 0.5 * static_cast<double>(r.observations) * std::log(2.0 * std::numbers::pi);
}

} // namespace detail

double penalized_loglik(const MgpParams& params, const Dataset& data, const RegressionBasis& basis) {
    params.validate();
    const detail::Reduced r = detail::reduce(data, basis);
    if (params.outputs() != data.outputs() || params.phi.phi.cols() != data.dims()) {
        throw std::invalid_argument("penalized_loglik: parameter shapes do not match the dataset");
    }
    for (Index k = 0; k < params.outputs(); ++k) {
        if (params.beta[static_cast<std::size_t>(k)].size() != basis.width(k)) {
            throw std::invalid_argument("penalized_loglik: beta size does not match the basis");
        }
    }
    const CrossCorrMatrix t = angles_to_corr(params.omega);
    const auto factor = detail::factorize(detail::mean_covariance(r, params, t), false);
    if (!factor) throw NumericalError("penalized_loglik: covariance is not positive definite");
    const Eigen::VectorXd resid = r.ybar - r.f * params.stacked_beta();
    const Eigen::VectorXd whitened = factor->lower.triangularView<Eigen::Lower>().solve(resid);
    return detail::gaussian_loglik(r, *factor, whitened, params.nugget) - params.lambda * params.beta_l1();
}

// ---------------------------------------------------------------------------
// Penalized GLS

double lambda_max(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& f, const Eigen::VectorXd& y) {
    const auto l = chol_lower.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd fw = l.solve(f);
    const Eigen::VectorXd yw = l.solve(y);
    return (fw.transpose() * yw).cwiseAbs().maxCoeff();
}

Eigen::VectorXd gls_beta_l1(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& f,
                            const Eigen::VectorXd& y, double lambda) {
    if (chol_lower.rows() != f.rows() || f.rows() != y.size()) {
        throw std::invalid_argument("gls_beta_l1: dimension mismatch");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("gls_beta_l1: lambda must be >= 0");
    const auto l = chol_lower.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd fw = l.solve(f);
    const Eigen::VectorXd yw = l.solve(y);
    const Index q = f.cols();

    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fw);
        if (qr.rank() < q) throw NumericalError("gls_beta_l1: regression basis is rank deficient");
        return qr.solve(yw);
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
    // Same arithmetic as lambda_max, so the threshold is exact.
    if (lambda >= (fw.transpose() * yw).cwiseAbs().maxCoeff()) return beta;

    const Eigen::VectorXd col_sq = fw.colwise().squaredNorm().transpose();
    Eigen::VectorXd resid = yw;
    const double scale = std::max(1.0, yw.norm());
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double max_move = 0.0;
        for (Index j = 0; j < q; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double rho = fw.col(j).dot(resid) + col_sq(j) * beta(j);
            const double shrunk = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / col_sq(j);
            const double move = shrunk - beta(j);
            if (move != 0.0) {
                resid -= move * fw.col(j);
                beta(j) = shrunk;
                max_move = std::max(max_move, std::abs(move) * std::sqrt(col_sq(j)));
            }
        }
        if (max_move <= 1e-13 * scale) break;
    }
    return beta;
}

// ---------------------------------------------------------------------------
// Covariance-step objective

namespace {

constexpr double kAngleFloor = 1e-6;
constexpr double kLogSigmaMin = -9.3, kLogSigmaMax = 9.3;    // ~[1e-4, 1e4]
constexpr double kLogPhiMin = -9.3, kLogPhiMax = 11.6;       // ~[1e-4, 1e5]
constexpr double kLogitMax = 30.0;
constexpr double kLogNuggetMin = -27.7, kLogNuggetMax = 4.7; // ~[1e-12, 1e2]

double logit_to_angle(double u, bool* clamped) {
    double w = std::numbers::pi / (1.0 + std::exp(-u));
    *clamped = false;
    if (w < kAngleFloor) {
        w = kAngleFloor;
        *clamped = true;
    } else if (w > std::numbers::pi - kAngleFloor) {
        w = std::numbers::pi - kAngleFloor;
        *clamped = true;
    }
    return w;
}

} // namespace

struct CovarianceObjective::State {
    detail::Reduced reduced;
    Index outputs = 0;
    Index dims = 0;
    std::vector<Eigen::VectorXd> beta;
    double lambda = 0.0;
    Eigen::VectorXd residual; // ybar - F beta
};

CovarianceObjective::CovarianceObjective(const Dataset& data, const RegressionBasis& basis,
                                         std::vector<Eigen::VectorXd> beta, double lambda)
    : state_(std::make_unique<State>()) {
    state_->reduced = detail::reduce(data, basis);
    state_->outputs = data.outputs();
    state_->dims = data.dims();
    state_->lambda = lambda;
    set_beta(std::move(beta));
}

CovarianceObjective::~CovarianceObjective() = default;
CovarianceObjective::CovarianceObjective(CovarianceObjective&&) noexcept = default;
CovarianceObjective& CovarianceObjective::operator=(CovarianceObjective&&) noexcept = default;

void CovarianceObjective::set_beta(std::vector<Eigen::VectorXd> beta) {
    state_->beta = std::move(beta);
    MgpParams tmp;
    tmp.beta = state_->beta;
    const Eigen::VectorXd stacked = tmp.stacked_beta();
    if (stacked.size() != state_->reduced.f.cols()) {
        throw std::invalid_argument("CovarianceObjective: beta does not match the basis width");
    }
    state_->residual = state_->reduced.ybar - state_->reduced.f * stacked;
}

Index CovarianceObjective::num_parameters() const {
    const Index k = state_->outputs;
    return k + k * state_->dims + CrossCorrAngles::count_for(k) + 1;
}

Eigen::VectorXd CovarianceObjective::pack(const MgpParams& params) {
    const Index k = params.outputs();
    const Index l = params.phi.phi.cols();
    const Index na = CrossCorrAngles::count_for(k);
    Eigen::VectorXd theta(k + k * l + na + 1);
    theta.head(k) = params.sigma.sigma.array().log().matrix();
    for (Index i = 0; i < k; ++i) {
        for (Index d = 0; d < l; ++d) theta(k + i * l + d) = std::log(params.phi.phi(i, d));
    }
    for (Index a = 0; a < na; ++a) {
        const double w = params.omega.angles(a);
        theta(k + k * l + a) = std::log(w / (std::numbers::pi - w));
    }
    theta(k + k * l + na) = std::log(params.nugget);
    return theta;
}

MgpParams CovarianceObjective::unpack(const Eigen::VectorXd& theta) const {
    const Index k = state_->outputs;
    const Index l = state_->dims;
    const Index na = CrossCorrAngles::count_for(k);
    if (theta.size() != num_parameters()) throw std::invalid_argument("CovarianceObjective: wrong parameter count");
    MgpParams p;
    p.beta = state_->beta;
    p.lambda = state_->lambda;
    p.sigma.sigma = theta.head(k).array().exp().matrix();
    p.phi.phi.resize(k, l);
    for (Index i = 0; i < k; ++i) {
        for (Index d = 0; d < l; ++d) p.phi.phi(i, d) = std::exp(theta(k + i * l + d));
    }
    p.omega = {k, Eigen::VectorXd(na)};
    for (Index a = 0; a < na; ++a) {
        bool clamped = false;
        p.omega.angles(a) = logit_to_angle(theta(k + k * l + a), &clamped);
    }
    p.nugget = std::exp(theta(k + k * l + na));
    return p;
}

bool CovarianceObjective::in_bounds(const Eigen::VectorXd& theta) const {
    const Index k = state_->outputs;
    const Index l = state_->dims;
    const Index na = CrossCorrAngles::count_for(k);
    if (theta.size() != num_parameters() || !theta.allFinite()) return false;
    for (Index i = 0; i < k; ++i) {
        if (theta(i) < kLogSigmaMin || theta(i) > kLogSigmaMax) return false;
    }
    for (Index i = k; i < k + k * l; ++i) {
        if (theta(i) < kLogPhiMin || theta(i) > kLogPhiMax) return false;
    }
    for (Index i = k + k * l; i < k + k * l + na; ++i) {
        if (std::abs(theta(i)) > kLogitMax) return false;
    }
    const double ln = theta(k + k * l + na);
    return ln >= kLogNuggetMin && ln <= kLogNuggetMax;
}

std::optional<double> CovarianceObjective::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* gradient) const {
    if (!in_bounds(theta)) return std::nullopt;
    const auto& r = state_->reduced;
    const Index k = state_->outputs;
    const Index l = state_->dims;
    const Index na = CrossCorrAngles::count_for(k);
    const MgpParams p = unpack(theta);
    const Eigen::MatrixXd e = hypersphere_factor(p.omega);
    CrossCorrMatrix t{e * e.transpose()};
    t.t.diagonal().setOnes();

    const auto factor = detail::factorize(detail::mean_covariance(r, p, t), true);
    if (!factor) return std::nullopt;
    const auto lower = factor->lower.triangularView<Eigen::Lower>();
    const Eigen::VectorXd whitened = lower.solve(state_->residual);
    const double value = detail::gaussian_loglik(r, *factor, whitened, p.nugget) - p.lambda * p.beta_l1();
    if (!std::isfinite(value)) return std::nullopt;
    if (gradient == nullptr) return value;

    // dL = sum_pq G_pq dSigma_pq with G = (alpha alpha' - Sigma^-1) / 2.
    const Index n = r.rows;
    const Eigen::VectorXd alpha = lower.transpose().solve(whitened);
    const Eigen::MatrixXd linv = lower.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd g = alpha * alpha.transpose() - linv.transpose() * linv;
    g *= 0.5;

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(num_parameters());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k); // sum of G * (C / T_ij) per output pair

    Eigen::VectorXd h(l), dlogn_a(l), dh_a(l), dlogn_b(l), dh_b(l), diff2(l);
    for (Index i = 0; i < k; ++i) {
        const auto& xi = r.x[static_cast<std::size_t>(i)];
        const Index oi = r.offsets[static_cast<std::size_t>(i)];
        for (Index j = 0; j < k; ++j) {
            const auto& xj = r.x[static_cast<std::size_t>(j)];
            const Index oj = r.offsets[static_cast<std::size_t>(j)];
            double norm = 1.0;
            for (Index d = 0; d < l; ++d) {
                const double a = p.phi.phi(i, d);
                const double b = p.phi.phi(j, d);
                const double sum = a + b;
                h(d) = 2.0 * a * b / sum;
                dlogn_a(d) = (b - a) / (4.0 * sum);
                dlogn_b(d) = (a - b) / (4.0 * sum);
                dh_a(d) = 2.0 * a * b * b / (sum * sum);
                dh_b(d) = 2.0 * a * a * b / (sum * sum);
                if (i != j) norm *= pair_normalizer(a, b);
            }
            const double base = p.sigma.sigma(i) * p.sigma.sigma(j) * norm;
            const double tij = t.t(i, j);
            double s_ij = 0.0, w_sigma = 0.0;
            Eigen::VectorXd gphi_i = Eigen::VectorXd::Zero(l), gphi_j = Eigen::VectorXd::Zero(l);
            for (Index q = 0; q < xj.rows(); ++q) {
                for (Index pr = 0; pr < xi.rows(); ++pr) {
                    double expo = 0.0;
                    for (Index d = 0; d < l; ++d) {
                        const double dd = xi(pr, d) - xj(q, d);
                        diff2(d) = dd * dd;
                        expo += h(d) * diff2(d);
                    }
                    const double k0 = base * std::exp(-expo);
                    const double w = g(oi + pr, oj + q) * k0;
                    s_ij += w;
                    const double wc = w * tij;
                    w_sigma += wc;
                    for (Index d = 0; d < l; ++d) {
                        gphi_i(d) += wc * (dlogn_a(d) - dh_a(d) * diff2(d));
                        gphi_j(d) += wc * (dlogn_b(d) - dh_b(d) * diff2(d));
                    }
                }
            }
            s(i, j) = s_ij;
            grad(i) += w_sigma;
            grad(j) += w_sigma;
            grad.segment(k + i * l, l) += gphi_i;
            grad.segment(k + j * l, l) += gphi_j;
        }
    }

    // Angles: dT/dw_rs = D E' + E D' with D nonzero only in row r.
    for (Index row = 1; row < k; ++row) {
        for (Index col = 0; col < row; ++col) {
            const Index a = CrossCorrAngles::offset(row, col);
            const double w = p.omega.angles(a);
            const double u = theta(k + k * l + a);
            const double logistic = 1.0 / (1.0 + std::exp(-u));
            const double dw_du = std::numbers::pi * logistic * (1.0 - logistic);
            if (w <= kAngleFloor || w >= std::numbers::pi - kAngleFloor) continue;
            Eigen::RowVectorXd drow = Eigen::RowVectorXd::Zero(k);
            double sin_prod = 1.0;
            for (Index q = 0; q < col; ++q) sin_prod *= std::sin(p.omega.angles(CrossCorrAngles::offset(row, q)));
            drow(col) = -std::sin(w) * sin_prod;
            const double cot = std::cos(w) / std::sin(w);
            for (Index c = col + 1; c <= row; ++c) drow(c) = e(row, c) * cot;
            double dl = 0.0;
            for (Index j = 0; j < k; ++j) dl += 2.0 * s(row, j) * drow.dot(e.row(j));
            grad(k + k * l + a) = dl * dw_du;
        }
    }

    const double m = static_cast<double>(r.reps);
    double dnugget = g.trace() / m;
    if (r.reps > 1) {
        const double dof = static_cast<double>(r.rows) * (m - 1.0);
        dnugget += -0.5 * (dof / p.nugget - r.within_ss / (p.nugget * p.nugget));
    }
    grad(k + k * l + na) = dnugget * p.nugget;

    *gradient = grad;
    return value;
}

} // namespace mgpkit
