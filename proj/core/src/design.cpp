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

#include "mgpkit/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "mgpkit/random.hpp"

namespace mgpkit {

void validate_specs(std::span<const InputSpec> specs) {
    for (const auto& s : specs) {
        if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower < s.upper)) {
            throw std::invalid_argument("input '" + s.name + "' needs finite bounds with lower < upper");
        }
    }
}

DesignMatrix lhs(Index n, Index l, std::uint64_t seed, StratumPlacement placement) {
    if (n < 2) throw std::invalid_argument("lhs: need at least 2 points");
    if (l < 1) throw std::invalid_argument("lhs: need at least 1 dimension");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Index> strata(static_cast<std::size_t>(n));

    DesignMatrix d{Eigen::MatrixXd(n, l)};
    const double width = 1.0 / static_cast<double>(n);
    for (Index c = 0; c < l; ++c) {
        std::iota(strata.begin(), strata.end(), Index{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (Index i = 0; i < n; ++i) {
            const double offset = placement == StratumPlacement::Midpoint ? 0.5 : unif(rng);
            double v = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + offset) * width;
            // keep the point inside its half-open stratum
            const double top = static_cast<double>(strata[static_cast<std::size_t>(i)] + 1) * width;
            if (v >= top) v = std::nextafter(top, 0.0);
            d.points(i, c) = v;
        }
    }
    return d;
}

double min_pairwise_distance(const DesignMatrix& design) {
    const Index n = design.n();
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            best = std::min(best, (design.points.row(i) - design.points.row(j)).squaredNorm());
        }
    }
    return std::sqrt(best);
}

bool satisfies_lhs(const DesignMatrix& design) {
    const Index n = design.n();
    for (Index c = 0; c < design.dims(); ++c) {
        std::vector<bool> hit(static_cast<std::size_t>(n), false);
        for (Index i = 0; i < n; ++i) {
            const double v = design.points(i, c);
            if (!(v >= 0.0 && v <= 1.0)) return false;
            auto k = static_cast<Index>(std::floor(v * static_cast<double>(n)));
            if (k == n) k = n - 1;
            if (hit[static_cast<std::size_t>(k)]) return false;
            hit[static_cast<std::size_t>(k)] = true;
        }
    }
    return true;
}

DesignMatrix maximin_lhs(Index n, Index l, std::uint64_t seed, int restarts, int exchange_iterations,
                         StratumPlacement placement) {
    if (restarts < 1) throw std::invalid_argument("maximin_lhs: restarts must be >= 1");

    DesignMatrix best = lhs(n, l, seed, placement);
    double best_score = min_pairwise_distance(best);
    for (int r = 1; r < restarts; ++r) {
        DesignMatrix candidate = lhs(n, l, derive_seed(seed, static_cast<std::uint64_t>(r)), placement);
        const double score = min_pairwise_distance(candidate);
        if (score > best_score) {
            best = std::move(candidate);
            best_score = score;
        }
    }

    if (exchange_iterations > 0) {
        std::mt19937_64 rng(derive_seed(seed, 0xe8c4a11dULL));
        std::uniform_int_distribution<Index> pick_row(0, n - 1);
        std::uniform_int_distribution<Index> pick_col(0, l - 1);
        for (int it = 0; it < exchange_iterations; ++it) {
            const Index c = pick_col(rng);
            const Index a = pick_row(rng);
            const Index b = pick_row(rng);
            if (a == b) continue;
            std::swap(best.points(a, c), best.points(b, c));
            const double score = min_pairwise_distance(best);
            if (score >= best_score) {
                best_score = score;
            } else {
                std::swap(best.points(a, c), best.points(b, c));
            }
        }
    }
    return best;
}

Eigen::MatrixXd scale_design(const DesignMatrix& design, std::span<const InputSpec> specs) {
    if (static_cast<Index>(specs.size()) != design.dims()) {
        throw std::invalid_argument("scale_design: " + std::to_string(specs.size()) + " specs for " +
                                    std::to_string(design.dims()) + " columns");
    }
    Eigen::MatrixXd out(design.n(), design.dims());
    for (Index c = 0; c < design.dims(); ++c) {
        const auto& s = specs[static_cast<std::size_t>(c)];
        out.col(c) = (s.lower + design.points.col(c).array() * s.range()).matrix();
    }
    return out;
}

DesignMatrix unscale_design(const Eigen::MatrixXd& physical, std::span<const InputSpec> specs) {
    if (static_cast<Index>(specs.size()) != physical.cols()) {
        throw std::invalid_argument("unscale_design: " + std::to_string(specs.size()) + " specs for " +
                                    std::to_string(physical.cols()) + " columns");
    }
    DesignMatrix d{Eigen::MatrixXd(physical.rows(), physical.cols())};
    for (Index c = 0; c < physical.cols(); ++c) {
        const auto& s = specs[static_cast<std::size_t>(c)];
        d.points.col(c) = ((physical.col(c).array() - s.lower) / s.range()).matrix();
    }
    return d;
}

std::vector<MorrisTrajectory> morris_trajectories(int r, Index l, double delta, std::uint64_t seed,
                                                  int levels) {
    if (r < 1) throw std::invalid_argument("morris_trajectories: r must be >= 1");
    if (l < 1) throw std::invalid_argument("morris_trajectories: need at least 1 dimension");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("morris_trajectories: delta must lie in (0, 1)");
    }
    if (levels < 2) throw std::invalid_argument("morris_trajectories: need at least 2 grid levels");

    std::vector<double> grid(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(k) / (levels - 1);

    // Grid values from which a +delta (resp. -delta) step stays in [0, 1].
    // 0 and 1 are always on the grid, so neither list is empty.
    std::vector<double> up, down;
    for (double g : grid) {
        if (g + delta <= 1.0) up.push_back(g);
        if (g - delta >= 0.0) down.push_back(g);
    }

    std::vector<MorrisTrajectory> out;
    out.reserve(static_cast<std::size_t>(r));
    for (int t = 0; t < r; ++t) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        MorrisTrajectory traj;
        traj.delta = delta;
        traj.points.resize(l + 1, l);
        traj.varied_index.resize(static_cast<std::size_t>(l));
        traj.step_sign.resize(static_cast<std::size_t>(l));

        std::vector<int> sign(static_cast<std::size_t>(l));
        Eigen::RowVectorXd x(l);
        for (Index c = 0; c < l; ++c) {
            const bool positive = std::bernoulli_distribution(0.5)(rng);
            const auto& pool = positive ? up : down;
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            x(c) = pool[pick(rng)];
            sign[static_cast<std::size_t>(c)] = positive ? 1 : -1;
        }
        std::iota(traj.varied_index.begin(), traj.varied_index.end(), Index{0});
        std::shuffle(traj.varied_index.begin(), traj.varied_index.end(), rng);

        traj.points.row(0) = x;
        for (Index k = 0; k < l; ++k) {
            const Index c = traj.varied_index[static_cast<std::size_t>(k)];
            const int s = sign[static_cast<std::size_t>(c)];
            x(c) += s * delta;
            traj.step_sign[static_cast<std::size_t>(k)] = s;
            traj.points.row(k + 1) = x;
        }
        out.push_back(std::move(traj));
    }
    return out;
}

} // namespace mgpkit
