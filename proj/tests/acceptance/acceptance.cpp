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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mgpkit/cli.hpp"
#include "mgpkit/covkernel.hpp"
#include "mgpkit/design.hpp"
#include "mgpkit/io.hpp"
#include "mgpkit/mgp.hpp"
#include "mgpkit/plantsim.hpp"
#include "mgpkit/random.hpp"
#include "mgpkit/sensitivity.hpp"
#include "oracles.hpp"

namespace {

using namespace mgpkit;
namespace fs = std::filesystem;

struct Verdict {
    bool pass = true;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

Dataset unit_dataset(Index l, const std::vector<std::string>& outputs) {
    Dataset d;
    for (Index j = 0; j < l; ++j) d.specs.push_back({"x" + std::to_string(j + 1), 0.0, 1.0});
    d.output_names = outputs;
    return d;
}

// 1. Fitted T recovers a strong-pair, two-weak-pair structure from prior draws.
Verdict cross_correlation_recovery() {
    Eigen::Matrix3d truth;
    truth << 1.0, 0.76, 0.06, 0.76, 1.0, 0.05, 0.06, 0.05, 1.0;
    std::vector<double> t12, t13, t23;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(derive_seed(seed, 7));
        const Eigen::MatrixXd x = maximin_lhs(40, 2, seed, 20).points;
        Dataset d = unit_dataset(2, {"y1", "y2", "y3"});
        d.x.assign(3, x);
        d.y.assign(3, Eigen::VectorXd::Zero(40));
        const Eigen::VectorXd draw = oracle::gaussian_draw(
            oracle::stacked_covariance(d, Eigen::Vector3d::Ones(), Eigen::MatrixXd::Constant(3, 2, 5.0), truth, 1e-4),
            rng);
        for (int k = 0; k < 3; ++k) d.y[k] = draw.segment(40 * k, 40);
        FitConfig config;
        config.lambda = 0.0;
        config.seed = seed;
        const FittedModel m = fit(d, RegressionBasis::uniform(BasisKind::Constant, 3, 2), config);
        const Eigen::MatrixXd t = m.correlation().t;
        t12.push_back(t(0, 1));
        t13.push_back(t(0, 2));
        t23.push_back(t(1, 2));
    }
    const double m12 = median(t12), m13 = median(t13), m23 = median(t23);
    const bool ok = std::abs(m12 - 0.76) <= 0.15 && std::abs(m13 - 0.06) <= 0.15 && std::abs(m23 - 0.05) <= 0.15;
    return {ok, "median T12=" + fmt(m12) + " T13=" + fmt(m13) + " T23=" + fmt(m23) + " (tol 0.15)"};
}

// 2. Joint model beats independent GPs on HPT and IPT.
Verdict mgp_versus_independent() {
    int hpt_wins = 0, ipt_wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PlantConfig train_cfg = PlantConfig::with_relative_noise(0.02, 1.0, seed + 1000);
        const PlantConfig test_cfg = PlantConfig::with_relative_noise(0.02, 1.0, seed + 2000);
        const Dataset train = generate_dataset(maximin_lhs(50, kPlantInputs, seed, 50), train_cfg, 5);
        const Dataset test = generate_dataset(maximin_lhs(50, kPlantInputs, seed + 500, 50), test_cfg, 5);
        FitConfig config;
        config.lambda = 0.0;
        config.seed = seed;
        const auto basis = RegressionBasis::uniform(BasisKind::Constant, 3, kPlantInputs);
        const Eigen::VectorXd joint = rmse(fit(train, basis, config), test);
        const Eigen::VectorXd indep = rmse(fit_independent(train, basis, config), test);
        hpt_wins += joint(0) <= indep(0);
        ipt_wins += joint(1) <= indep(1);
    }
    return {hpt_wins >= 8 && ipt_wins >= 8,
            "seeds with MGP <= independent: HPT " + std::to_string(hpt_wins) + "/10, IPT " +
                std::to_string(ipt_wins) + "/10 (need 8)"};
}

// 3. Hypersphere map: valid correlations and an exact inverse.
Verdict hypersphere_suite() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-3, std::numbers::pi - 1e-3);
    int invalid = 0;
    double worst = 0.0;
    for (Index k : {2, 3, 5}) {
        for (int draw = 0; draw < 1000; ++draw) {
            CrossCorrAngles a = CrossCorrAngles::independent(k);
            for (Index i = 0; i < a.angles.size(); ++i) a.angles(i) = u(rng);
            const Eigen::MatrixXd t = angles_to_corr(a).t;
            const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues().minCoeff();
            if (!is_valid_correlation(t) || !(min_eig > 0.0)) {
                ++invalid;
                continue;
            }
            worst = std::max(worst, (angles_to_corr(corr_to_angles({t})).t - t).cwiseAbs().maxCoeff());
        }
    }
    return {invalid == 0 && worst < 1e-10,
            std::to_string(invalid) + " invalid of 3000, worst round-trip error " + fmt(worst)};
}

// 4. Covariance matrices are PSD and the normalizer matches the alternative form.
Verdict covariance_validity() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_eig = 0.0, worst_norm = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index k = 1 + static_cast<Index>(rng() % 3), l = 1 + static_cast<Index>(rng() % 4);
        std::vector<Eigen::MatrixXd> xs;
        for (Index i = 0; i < k; ++i) {
            const Index n = 1 + static_cast<Index>(rng() % (30 / k));
            xs.push_back(oracle::uniform_points(n, l, rng));
        }
        MarginalSds s{Eigen::VectorXd(k)};
        RoughnessParams phi{Eigen::MatrixXd(k, l)};
        for (Index i = 0; i < k; ++i) s.sigma(i) = std::exp(2.0 * u(rng) - 1.0);
        for (Index i = 0; i < phi.phi.size(); ++i) phi.phi.data()[i] = std::exp(6.0 * u(rng) - 2.0);
        const Eigen::MatrixXd c = cov_matrix(xs, s, phi, {oracle::random_correlation(static_cast<int>(k), rng)}, 0.0);
        const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues();
        const double spectral = eig.cwiseAbs().maxCoeff();
        worst_eig = std::min(worst_eig, eig.minCoeff() / spectral);
        for (Index i = 0; i < k; ++i) {
            for (Index j = 0; j < k; ++j) {
                double factored = 1.0;
                for (Index d = 0; d < l; ++d) factored *= pair_normalizer(phi.phi(i, d), phi.phi(j, d));
                const double other = oracle::determinant_normalizer(phi.phi.row(i).transpose(), phi.phi.row(j).transpose());
                worst_norm = std::max(worst_norm, std::abs(factored - other));
            }
        }
    }
    return {worst_eig >= -1e-8 && worst_norm <= 1e-12,
            "min eigenvalue/spectral norm " + fmt(worst_eig) + ", normalizer gap " + fmt(worst_norm)};
}

// 5. Interpolation, likelihood and block-diagonal equivalence.
Verdict kriging_correctness() {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_params = [&](Index k, Index l, double phi_center, double nugget) {
        MgpParams p;
        for (Index i = 0; i < k; ++i) p.beta.push_back(Eigen::VectorXd::Constant(1, z(rng)));
        p.sigma.sigma = (Eigen::VectorXd::Random(k).array() * 0.3 + 1.0).matrix();
        p.phi.phi = ((Eigen::MatrixXd::Random(k, l).array() * 0.5 + 1.0) * phi_center).matrix();
        p.omega = CrossCorrAngles::independent(k);
        for (Index a = 0; a < p.omega.angles.size(); ++a) p.omega.angles(a) = 0.6 + 1.8 * u(rng);
        p.nugget = nugget;
        return p;
    };
    auto random_data = [&](Index k, Index n, Index l) {
        Dataset d = unit_dataset(l, {});
        for (Index i = 0; i < k; ++i) {
            d.output_names.push_back("y" + std::to_string(i));
            d.x.push_back(maximin_lhs(n, l, rng(), 10).points);
            Eigen::VectorXd y(n);
            for (Index j = 0; j < n; ++j) y(j) = z(rng);
            d.y.push_back(y);
        }
        return d;
    };

    double interp = 0.0;
    int jittered = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Index k = 1 + trial % 3;
        const Dataset d = random_data(k, 4 + trial % 12, 1 + trial % 3);
        const auto basis = RegressionBasis::uniform(BasisKind::Constant, k, d.dims());
        const FittedModel m = condition(d, basis, random_params(k, d.dims(), 30.0, 0.0), OutputTransform::identity(k));
        jittered += m.jitter > 0.0;
        for (Index i = 0; i < k; ++i) {
            const auto preds = predict_points(m, d.x[i]);
            for (Index j = 0; j < d.rows(i); ++j) {
                interp = std::max(interp, std::abs(preds[j].mean(i) - d.y[i](j)) / std::max(1.0, std::abs(d.y[i](j))));
            }
        }
    }

    double loglik = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = random_data(1, 5, 2);
        const auto basis = RegressionBasis::uniform(BasisKind::Constant, 1, 2);
        const MgpParams p = random_params(1, 2, 3.0, 0.05);
        const Eigen::MatrixXd c = oracle::stacked_covariance(d, p.sigma.sigma, p.phi.phi, Eigen::MatrixXd::Ones(1, 1),
                                                             p.nugget);
        const double expected = oracle::gaussian_logpdf(c, d.y[0] - Eigen::VectorXd::Constant(5, p.beta[0](0)));
        loglik = std::max(loglik, std::abs(penalized_loglik(p, d, basis) - expected));
    }

    double block = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = random_data(3, 8, 2);
        MgpParams p = random_params(3, 2, 3.0, 0.03);
        p.omega = CrossCorrAngles::independent(3);
        const auto basis = RegressionBasis::uniform(BasisKind::Constant, 3, 2);
        const Eigen::MatrixXd pts = oracle::uniform_points(10, 2, rng);
        const auto jp = predict_points(condition(d, basis, p, OutputTransform::identity(3)), pts);
        for (Index k = 0; k < 3; ++k) {
            MgpParams one;
            one.beta = {p.beta[k]};
            one.sigma.sigma = Eigen::VectorXd::Constant(1, p.sigma.sigma(k));
            one.phi.phi = p.phi.phi.row(k);
            one.omega = CrossCorrAngles::independent(1);
            one.nugget = p.nugget;
            const auto up = predict_points(
                condition(d.output(k), RegressionBasis::uniform(BasisKind::Constant, 1, 2), one,
                          OutputTransform::identity(1)),
                pts);
            for (Index i = 0; i < pts.rows(); ++i) block = std::max(block, std::abs(jp[i].mean(k) - up[i].mean(0)));
        }
    }
    return {interp <= 1e-6 && loglik <= 1e-8 && block <= 1e-8,
            "interpolation " + fmt(interp) + " (" + std::to_string(jittered) + "/30 jittered), loglik gap " + fmt(loglik) + ", block-diagonal gap " + fmt(block)};
}

// 6. L1 screening on a sparse linear trend.
Verdict l1_screening() {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(derive_seed(seed, 11));
        const Eigen::MatrixXd x = maximin_lhs(50, 3, seed, 20).points;
        Dataset d = unit_dataset(3, {"y"});
        d.x = {x};
        d.y = {Eigen::VectorXd::Zero(50)};
        const Eigen::VectorXd resid = oracle::gaussian_draw(
            oracle::stacked_covariance(d, Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 3, 5.0),
                                       Eigen::MatrixXd::Ones(1, 1), 0.01),
            rng);
        d.y[0] = (resid.array() + 5.0 + 3.0 * x.col(0).array()).matrix();
        FitConfig config;
        config.seed = seed;
        const FittedModel m = fit(d, RegressionBasis::uniform(BasisKind::Linear, 1, 3), config);
        const Eigen::VectorXd b = m.beta_original()[0];
        const bool zeros = m.params.beta[0](2) == 0.0 && m.params.beta[0](3) == 0.0;
        const bool close = std::abs(b(0) - 5.0) <= 1.0 && std::abs(b(1) - 3.0) <= 0.6;
        recovered += zeros && close;
    }

    // Threshold check on random whitened systems.
    std::mt19937_64 rng(6);
    bool threshold = true;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Random(12, 12);
        const Eigen::MatrixXd cov = a * a.transpose() + Eigen::MatrixXd::Identity(12, 12);
        const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
        const Eigen::MatrixXd f = Eigen::MatrixXd::Random(12, 4);
        const Eigen::VectorXd y = Eigen::VectorXd::Random(12) * 5.0;
        const double lmax = lambda_max(l, f, y);
        threshold = threshold && gls_beta_l1(l, f, y, lmax).isZero(0.0) && gls_beta_l1(l, f, y, 2.0 * lmax).isZero(0.0);
    }
    return {recovered >= 8 && threshold, "zero pattern recovered in " + std::to_string(recovered) +
                                             "/10 seeds (need 8); beta = 0 at lambda >= lambda_max: " +
                                             (threshold ? "yes" : "no")};
}

// 7. Morris screening: exact on affine targets, pressure first on the plant.
Verdict morris_screening() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    double worst_sigma = 0.0, worst_mu = 0.0;
    std::vector<InputSpec> unit;
    for (int i = 0; i < 6; ++i) unit.push_back({"x" + std::to_string(i + 1), 0.0, 1.0});
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(3, 6);
        for (Index i = 0; i < a.size(); ++i) a.data()[i] = 5.0 * z(rng);
        const ResponseFunction f = [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; };
        const EEResult r =
            elementary_effects(f, morris_trajectories(10, 6, 0.3, trial), unit, {"a", "b", "c"});
        worst_sigma = std::max(worst_sigma, r.sigma.maxCoeff());
        worst_mu = std::max(worst_mu, (r.mu_star - a.cwiseAbs()).cwiseAbs().maxCoeff());
    }
    int pressure_first = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const EEResult r = elementary_effects(plant_target(PlantConfig{}), morris_trajectories(10, kPlantInputs, 0.3, seed),
                                              plant_input_specs(), plant_output_names());
        pressure_first += rank_inputs(r, 0).front() == 0;
    }
    return {worst_sigma < 1e-10 && worst_mu < 1e-10 && pressure_first == 10,
            "affine sigma " + fmt(worst_sigma) + ", mu* error " + fmt(worst_mu) + ", pressure first for HPT in " +
                std::to_string(pressure_first) + "/10 seeds"};
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 8. Every CLI command is byte-for-byte reproducible.
Verdict cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "mgpkit_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };
    const std::vector<std::vector<std::string>> commands{
        {"design", "--n", "20", "--seed", "1", "--out", p("d.csv")},
        {"design", "--n", "10", "--seed", "2", "--out", p("t.csv")},
        {"simulate", "--design", p("d.csv"), "--reps", "3", "--seed", "5", "--out", p("train.csv"), "--test-design",
         p("t.csv"), "--test-out", p("test.csv")},
        {"fit", "--data", p("train.csv"), "--restarts", "2", "--out", p("m.json"), "--report", p("fit.txt")},
        {"fit", "--data", p("train.csv"), "--mode", "independent", "--lambda", "0", "--restarts", "2", "--out",
         p("ind.json"), "--report", p("ind.txt")},
        {"predict", "--model", p("m.json"), "--points", p("t.csv"), "--out", p("pred.csv")},
        {"compare", "--train", p("train.csv"), "--test", p("test.csv"), "--lambda", "0", "--restarts", "2", "--out",
         p("cmp.csv"), "--model-out", p("cmp.json")},
        {"sensitivity", "--target", "plant", "--seed", "3", "--out", p("ee.csv")},
        {"sensitivity", "--target", p("m.json"), "--seed", "3", "--out", p("eem.csv")},
    };
    std::vector<std::vector<std::pair<std::string, std::uint64_t>>> runs;
    for (int run = 0; run < 3; ++run) {
        for (const auto& args : commands) {
            std::ostringstream out, err;
            if (cli::run(args, out, err) != 0) {
                return {false, "command '" + args[0] + "' failed: " + err.str()};
            }
        }
        std::vector<std::pair<std::string, std::uint64_t>> hashes;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) hashes.emplace_back(f.filename().string(), fnv1a(slurp(f)));
        runs.push_back(std::move(hashes));
    }
    fs::remove_all(dir);
    const bool same = runs[0] == runs[1] && runs[1] == runs[2];
    return {same, std::to_string(runs[0].size()) + " files hashed over 3 runs, " +
                      (same ? "all identical" : "hashes differ")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"cross-correlation recovery", cross_correlation_recovery},
        {"MGP vs independent GP", mgp_versus_independent},
        {"hypersphere suite", hypersphere_suite},
        {"covariance validity", covariance_validity},
        {"kriging correctness", kriging_correctness},
        {"L1 screening", l1_screening},
        {"Morris elementary effects", morris_screening},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << v.detail << " [" << fmt(secs) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
