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

#include "mgpkit/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mgpkit/error.hpp"
#include "mgpkit/io.hpp"
#include "mgpkit/mgp.hpp"
#include "mgpkit/plantsim.hpp"

namespace mgpkit {

namespace {

Eigen::VectorXd evaluate_with_context(const ResponseFunction& f, const Eigen::VectorXd& x, std::size_t trajectory,
                                      Index point) {
    const std::string where =
        " (trajectory " + std::to_string(trajectory) + ", point " + std::to_string(point) + ")";
    try {
        return f(x);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + where);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what()) + where);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + where);
    }
}

} // namespace

EEResult elementary_effects(const ResponseFunction& f, std::span<const MorrisTrajectory> trajectories,
                            std::span<const InputSpec> specs, std::vector<std::string> output_names,
                            EffectScale scale) {
    const auto l = static_cast<Index>(specs.size());
    const auto k = static_cast<Index>(output_names.size());
    EEResult res;
    res.output_names = std::move(output_names);
    for (const auto& s : specs) res.input_names.push_back(s.name);
    res.r = static_cast<int>(trajectories.size());
    res.delta = trajectories.empty() ? 0.0 : trajectories.front().delta;
    res.mu = Eigen::MatrixXd::Zero(k, l);
    res.mu_star = Eigen::MatrixXd::Zero(k, l);
    res.sigma = Eigen::MatrixXd::Zero(k, l);
    if (trajectories.empty() || k == 0) return res;

    // effects[v] holds one K-vector per trajectory
    std::vector<std::vector<Eigen::VectorXd>> effects(static_cast<std::size_t>(l));
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        const auto& traj = trajectories[t];
        if (traj.points.cols() != l || traj.points.rows() != l + 1) {
            throw std::invalid_argument("elementary_effects: trajectory " + std::to_string(t) +
                                        " does not match the input dimension");
        }
        Eigen::VectorXd before = evaluate_with_context(f, traj.points.row(0).transpose(), t, 0);
        if (before.size() != k) throw std::invalid_argument("elementary_effects: response size mismatch");
        for (Index step = 0; step < l; ++step) {
            Eigen::VectorXd after = evaluate_with_context(f, traj.points.row(step + 1).transpose(), t, step + 1);
            const Index v = traj.varied_index[static_cast<std::size_t>(step)];
            double signed_delta = traj.points(step + 1, v) - traj.points(step, v);
            if (scale == EffectScale::Physical) signed_delta *= specs[static_cast<std::size_t>(v)].range();
            effects[static_cast<std::size_t>(v)].push_back((after - before) / signed_delta);
            before = std::move(after);
        }
    }

    for (Index v = 0; v < l; ++v) {
        const auto& ev = effects[static_cast<std::size_t>(v)];
        const auto r = static_cast<double>(ev.size());
        for (Index o = 0; o < k; ++o) {
            double sum = 0.0, abs_sum = 0.0;
            for (const auto& e : ev) {
                sum += e(o);
                abs_sum += std::abs(e(o));
            }
            const double mean = sum / r;
            double ss = 0.0;
            for (const auto& e : ev) ss += (e(o) - mean) * (e(o) - mean);
            res.mu(o, v) = mean;
            res.mu_star(o, v) = abs_sum / r;
            res.sigma(o, v) = ev.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
        }
    }
    return res;
}

std::vector<Index> rank_inputs(const EEResult& result, Index output) {
    if (output < 0 || output >= result.outputs()) throw std::out_of_range("rank_inputs: output out of range");
    std::vector<Index> order(static_cast<std::size_t>(result.inputs()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ma = result.mu_star(output, a), mb = result.mu_star(output, b);
        if (ma != mb) return ma > mb;
        const double sa = result.sigma(output, a), sb = result.sigma(output, b);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return order;
}

ResponseFunction plant_target(const PlantConfig& config) {
    config.validate();
    return [config](const Eigen::VectorXd& unit) -> Eigen::VectorXd {
        Eigen::VectorXd phys(unit.size());
        for (Index i = 0; i < unit.size(); ++i) {
            const auto& s = config.specs[static_cast<std::size_t>(i)];
            phys(i) = s.lower + unit(i) * s.range();
        }
        return plant_response(phys, config).power;
    };
}

ResponseFunction model_target(const FittedModel& model) {
    return [&model](const Eigen::VectorXd& unit) -> Eigen::VectorXd { return predict(model, unit).mean; };
}

void write_ee_csv(const EEResult& result, std::ostream& out) {
    out << "output,input,mu,mu_star,sigma\n";
    for (Index o = 0; o < result.outputs(); ++o) {
        for (Index v = 0; v < result.inputs(); ++v) {
            out << result.output_names[static_cast<std::size_t>(o)] << ','
                << result.input_names[static_cast<std::size_t>(v)] << ',' << format_double(result.mu(o, v)) << ','
                << format_double(result.mu_star(o, v)) << ',' << format_double(result.sigma(o, v)) << '\n';
        }
    }
}

EEResult parse_ee_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "output,input,mu,mu_star,sigma") {
        throw ParseError("ee csv: line 1: unexpected header");
    }
    struct Row {
        std::string output, input;
        double mu, mu_star, sigma;
    };
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) {
            throw ParseError("ee csv: line " + std::to_string(line_no) + ": expected 5 columns");
        }
        Row r{cells[0], cells[1], 0, 0, 0};
        double* dst[3] = {&r.mu, &r.mu_star, &r.sigma};
        for (int c = 0; c < 3; ++c) {
            std::size_t used = 0;
            try {
                *dst[c] = std::stod(cells[static_cast<std::size_t>(c + 2)], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[static_cast<std::size_t>(c + 2)].size()) {
                throw ParseError("ee csv: line " + std::to_string(line_no) + ", column " + std::to_string(c + 3) +
                                 ": not a number");
            }
        }
        rows.push_back(std::move(r));
    }

    EEResult res;
    for (const auto& r : rows) {
        if (std::find(res.output_names.begin(), res.output_names.end(), r.output) == res.output_names.end()) {
            res.output_names.push_back(r.output);
        }
        if (std::find(res.input_names.begin(), res.input_names.end(), r.input) == res.input_names.end()) {
            res.input_names.push_back(r.input);
        }
    }
    const auto k = static_cast<Index>(res.output_names.size());
    const auto l = static_cast<Index>(res.input_names.size());
    if (static_cast<Index>(rows.size()) != k * l) throw ParseError("ee csv: incomplete output x input grid");
    res.mu.resize(k, l);
    res.mu_star.resize(k, l);
    res.sigma.resize(k, l);
    for (const auto& r : rows) {
        const auto o = std::find(res.output_names.begin(), res.output_names.end(), r.output) - res.output_names.begin();
        const auto v = std::find(res.input_names.begin(), res.input_names.end(), r.input) - res.input_names.begin();
        res.mu(o, v) = r.mu;
        res.mu_star(o, v) = r.mu_star;
        res.sigma(o, v) = r.sigma;
    }
    return res;
}

EEReport ee_report(const EEResult& result) {
    EEReport rep;
    std::ostringstream csv, ranking, plot;
    write_ee_csv(result, csv);

    ranking << "output,rank,input,mu_star,sigma\n";
    plot << "# columns: output input_index input mu mu_star sigma\n";
    for (Index o = 0; o < result.outputs(); ++o) {
        const auto order = rank_inputs(result, o);
        for (std::size_t r = 0; r < order.size(); ++r) {
            const Index v = order[r];
            ranking << result.output_names[static_cast<std::size_t>(o)] << ',' << r + 1 << ','
                    << result.input_names[static_cast<std::size_t>(v)] << ','
                    << format_double(result.mu_star(o, v)) << ',' << format_double(result.sigma(o, v)) << '\n';
        }
        for (Index v = 0; v < result.inputs(); ++v) {
            plot << result.output_names[static_cast<std::size_t>(o)] << ' ' << v + 1 << ' '
                 << result.input_names[static_cast<std::size_t>(v)] << ' ' << format_double(result.mu(o, v)) << ' '
                 << format_double(result.mu_star(o, v)) << ' ' << format_double(result.sigma(o, v)) << '\n';
        }
    }
    rep.csv = csv.str();
    rep.ranking = ranking.str();
    rep.plot_data = plot.str();
    return rep;
}

} // namespace mgpkit
