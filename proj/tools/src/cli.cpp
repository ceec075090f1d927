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


#include "mgpkit/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "mgpkit/design.hpp"
#include "mgpkit/error.hpp"
#include "mgpkit/io.hpp"
#include "mgpkit/mgp.hpp"
#include "mgpkit/plantsim.hpp"
#include "mgpkit/random.hpp"
#include "mgpkit/sensitivity.hpp"

namespace mgpkit::cli {
namespace {

// Missing or unwritable files; reported like malformed data.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path + "' for reading");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw FileError("failed while writing '" + path + "'");
}

// "a/b.csv" + ".unit" -> "a/b.unit.csv"
std::string with_suffix(const std::string& path, std::string_view suffix) {
    std::filesystem::path p(path);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + std::string(suffix) + (ext.empty() ? ".csv" : ext);
}

using Fields = std::initializer_list<std::pair<std::string_view, std::string>>;

void log_line(std::ostream& err, std::string_view command, Fields fields) {
    err << "mgpkit cmd=" << command;
    for (const auto& [key, value] : fields) err << ' ' << key << '=' << value;
    err << '\n';
}

std::string elapsed_ms(std::chrono::steady_clock::time_point start) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return std::to_string(ms.count());
}

std::string join(const std::vector<std::string>& items, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += items[i];
    }
    return out;
}

std::vector<InputSpec> load_specs(const std::string& path) {
    if (path.empty()) return plant_input_specs();
    std::istringstream in(read_file(path));
    return read_specs_csv(in, path);
}

std::vector<InputSpec> unit_specs(Index dims) {
    std::vector<InputSpec> specs;
    for (Index d = 0; d < dims; ++d) specs.push_back({"x" + std::to_string(d + 1), 0.0, 1.0});
    return specs;
}

Dataset load_dataset(const std::string& path, const std::vector<InputSpec>& specs) {
    std::istringstream in(read_file(path));
    return read_dataset_csv(in, specs, path);
}

std::optional<double> parse_lambda(const std::string& text) {
    if (text == "auto") return std::nullopt;
    return std::stod(text);
}

std::string lambda_check(const std::string& text) {
    if (text == "auto") return {};
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v) || v < 0.0) return "expected 'auto' or a number >= 0";
    } catch (const std::exception&) {
        return "expected 'auto' or a number >= 0";
    }
    return {};
}

std::vector<std::string> term_names(BasisKind kind, const std::vector<InputSpec>& specs) {
    std::vector<std::string> names{"1"};
    if (kind == BasisKind::Constant) return names;
    for (const auto& s : specs) names.push_back(s.name);
    if (kind == BasisKind::QuadraticDiagonal) {
        for (const auto& s : specs) names.push_back(s.name + "^2");
    }
    return names;
}

// Penalized log-likelihood in original output units: the standardizing map
// contributes -log(scale_k) per observation.
double original_units_objective(const FittedModel& m) {
    double value = m.diagnostics.objective;
    for (Index k = 0; k < m.outputs(); ++k) {
        value -= static_cast<double>(m.data.rows(k) * m.data.reps) * std::log(m.transform.scale(k));
    }
    return value;
}

void write_correlation(std::ostream& out, const std::vector<std::string>& names, const Eigen::MatrixXd& t) {
    out << "correlation";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Index i = 0; i < t.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Index j = 0; j < t.cols(); ++j) out << ',' << format_double(t(i, j));
        out << '\n';
    }
}

void write_fit_section(std::ostream& out, const FittedModel& m) {
    out << "outputs=" << join(m.data.output_names) << '\n';
    out << "loglik=" << format_double(original_units_objective(m)) << '\n';
    out << "loglik_model_units=" << format_double(m.diagnostics.objective) << '\n';
    out << "lambda=" << format_double(m.diagnostics.selected_lambda) << '\n';
    out << "nugget=" << format_double(m.params.nugget) << '\n';
    out << "outer_iterations=" << m.diagnostics.outer_iterations << '\n';
    std::vector<std::string> scores;
    for (double s : m.diagnostics.restart_scores) scores.push_back(format_double(s));
    out << "restart_scores=" << join(scores) << "\n\n";
    write_correlation(out, m.data.output_names, m.correlation().t);
    // beta is the penalized coefficient vector (standardized outputs);
    // beta_original maps it back to data units.
    out << "\noutput,term,beta,beta_original,nonzero\n";
    const auto beta = m.beta_original();
    for (Index k = 0; k < m.outputs(); ++k) {
        const auto terms = term_names(m.basis.kinds[static_cast<std::size_t>(k)], m.data.specs);
        const auto& model_beta = m.params.beta[static_cast<std::size_t>(k)];
        for (Index c = 0; c < beta[static_cast<std::size_t>(k)].size(); ++c) {
            out << m.data.output_names[static_cast<std::size_t>(k)] << ',' << terms[static_cast<std::size_t>(c)] << ','
                << format_double(model_beta(c)) << ',' << format_double(beta[static_cast<std::size_t>(k)](c)) << ','
                << (model_beta(c) != 0.0 ? 1 : 0) << '\n';
        }
    }
}

struct FitOptions {
    std::string basis = "const";
    std::string lambda = "auto";
    int restarts = 5;
    std::uint64_t seed = 0;
    std::string specs_file;

    FitConfig config() const {
        FitConfig c;
        c.lambda = parse_lambda(lambda);
        c.restarts = restarts;
        c.seed = seed;
        return c;
    }
};

void add_fit_options(CLI::App* cmd, FitOptions& o) {
    cmd->add_option("--basis", o.basis, "Regression basis")
        ->check(CLI::IsMember({"const", "linear", "quad"}))
        ->capture_default_str();
    cmd->add_option("--lambda", o.lambda, "L1 penalty: 'auto' (holdout grid) or a value >= 0")
        ->check(CLI::Validator(lambda_check, "auto|VALUE"))
        ->capture_default_str();
    cmd->add_option("--restarts", o.restarts, "Optimizer multi-starts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--specs-file", o.specs_file, "CSV of name,lower,upper (default: plant inputs)");
}

// ---- design ---------------------------------------------------------------

struct DesignOptions {
    Index n = 0;
    Index dims = 0;
    std::uint64_t seed = 0;
    int restarts = 20;
    int exchange = 0;
    std::string placement = "uniform";
    std::string specs_file;
    std::string out;
    std::string unit_out;
};

int cmd_design(const DesignOptions& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<InputSpec> specs;
    if (!o.specs_file.empty()) {
        specs = load_specs(o.specs_file);
        if (o.dims != 0 && o.dims != static_cast<Index>(specs.size())) {
            throw CLI::ValidationError("--dims", "does not match the number of specs in " + o.specs_file);
        }
    } else if (o.dims == 0 || o.dims == kPlantInputs) {
        specs = plant_input_specs();
    } else {
        specs = unit_specs(o.dims);
    }
    const auto placement = o.placement == "midpoint" ? StratumPlacement::Midpoint : StratumPlacement::Uniform;
    const DesignMatrix d =
        maximin_lhs(o.n, static_cast<Index>(specs.size()), o.seed, o.restarts, o.exchange, placement);

    std::ostringstream phys, unit;
    write_design_csv(d, specs, phys);
    write_unit_design_csv(d, specs, unit);
    const std::string unit_path = o.unit_out.empty() ? with_suffix(o.out, ".unit") : o.unit_out;
    write_file(o.out, phys.str());
    write_file(unit_path, unit.str());

    const double min_dist = min_pairwise_distance(d);
    out << "wrote " << o.out << " and " << unit_path << " (" << d.n() << " x " << d.dims()
        << ", min distance " << format_double(min_dist) << ")\n";
    log_line(err, "design", {{"status", "ok"}, {"seed", std::to_string(o.seed)}, {"n", std::to_string(d.n())},
                             {"dims", std::to_string(d.dims())}, {"restarts", std::to_string(o.restarts)},
                             {"min_distance", format_double(min_dist)}, {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
    std::string design;
    std::string test_design;
    Index reps = 30;
    double noise = 0.02;
    double coupling = 1.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string test_out;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    if (o.test_design.empty() != o.test_out.empty()) {
        throw CLI::ValidationError("--test-design", "--test-design and --test-out must be given together");
    }
    PlantConfig config = PlantConfig::with_relative_noise(o.noise, o.coupling, o.seed);
    config.validate();

    auto simulate = [&](const std::string& design_path, const std::string& out_path, std::uint64_t seed) {
        std::istringstream in(read_file(design_path));
        const DesignMatrix d = read_design_csv(in, config.specs, design_path);
        PlantConfig c = config;
        c.seed = seed;
        const Dataset data = generate_dataset(d, c, o.reps);
        std::ostringstream text;
        write_dataset_csv(data, text);
        write_file(out_path, text.str());
        out << "wrote " << out_path << " (" << d.n() << " points x " << o.reps << " replicates)\n";
        return d.n();
    };
    const Index n_train = simulate(o.design, o.out, o.seed);
    Index n_test = 0;
    if (!o.test_design.empty()) n_test = simulate(o.test_design, o.test_out, derive_seed(o.seed, 1));

    log_line(err, "simulate",
             {{"status", "ok"}, {"seed", std::to_string(o.seed)}, {"reps", std::to_string(o.reps)},
              {"noise", format_double(o.noise)}, {"coupling", format_double(o.coupling)},
              {"train_points", std::to_string(n_train)}, {"test_points", std::to_string(n_test)},
              {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

// ---- fit ------------------------------------------------------------------

struct FitCommand {
    FitOptions fit;
    std::string data;
    std::string mode = "mgp";
    std::string out;
    std::string report;
};

int cmd_fit(const FitCommand& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const Dataset data = load_dataset(o.data, load_specs(o.fit.specs_file));
    const auto basis = RegressionBasis::uniform(parse_basis_kind(o.fit.basis), data.outputs(), data.dims());
    const FitConfig config = o.fit.config();

    std::ostringstream report;
    report << "mode=" << o.mode << '\n' << "seed=" << o.fit.seed << '\n' << "basis=" << o.fit.basis << '\n';
    std::string objective;
    if (o.mode == "mgp") {
        const FittedModel m = fit(data, basis, config);
        write_file(o.out, model_to_json(m, "mgp"));
        write_fit_section(report, m);
        objective = format_double(original_units_objective(m));
        out << "wrote " << o.out << '\n';
    } else {
        const auto models = fit_independent(data, basis, config);
        double total = 0.0;
        for (std::size_t k = 0; k < models.size(); ++k) {
            const std::string path = with_suffix(o.out, "." + data.output_names[k]);
            write_file(path, model_to_json(models[k], "independent"));
            report << '\n' << "[" << data.output_names[k] << "]\n";
            write_fit_section(report, models[k]);
            total += original_units_objective(models[k]);
            out << "wrote " << path << '\n';
        }
        objective = format_double(total);
    }
    if (o.report.empty()) {
        out << report.str();
    } else {
        write_file(o.report, report.str());
    }
    log_line(err, "fit",
             {{"status", "ok"}, {"seed", std::to_string(o.fit.seed)}, {"mode", o.mode}, {"basis", o.fit.basis},
              {"lambda", o.fit.lambda}, {"restarts", std::to_string(o.fit.restarts)},
              {"outputs", std::to_string(data.outputs())}, {"loglik", objective}, {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

// ---- predict --------------------------------------------------------------

struct PredictOptions {
    std::string model;
    std::string points;
    std::string out;
};

int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const FittedModel m = model_from_json(read_file(o.model), o.model);
    std::istringstream in(read_file(o.points));
    const DesignMatrix d = read_design_csv(in, m.data.specs, o.points);
    const auto preds = predict_points(m, d.points);
    const Eigen::MatrixXd phys = scale_design(d, m.data.specs);

    std::ostringstream text;
    std::vector<std::string> header;
    for (const auto& s : m.data.specs) header.push_back(s.name);
    for (const auto& name : m.data.output_names) {
        for (const char* suffix : {"_mean", "_sd", "_lower", "_upper"}) header.push_back(name + suffix);
    }
    header.emplace_back("extrapolated");
    text << join(header) << '\n';
    Index flagged = 0;
    for (Index i = 0; i < d.n(); ++i) {
        const Prediction& p = preds[static_cast<std::size_t>(i)];
        for (Index c = 0; c < phys.cols(); ++c) text << format_double(phys(i, c)) << ',';
        const Eigen::VectorXd lo = p.lower(), hi = p.upper();
        for (Index k = 0; k < m.outputs(); ++k) {
            text << format_double(p.mean(k)) << ',' << format_double(p.sd(k)) << ',' << format_double(lo(k)) << ','
                 << format_double(hi(k)) << ',';
        }
        text << (p.extrapolated ? 1 : 0) << '\n';
        flagged += p.extrapolated ? 1 : 0;
    }
    write_file(o.out, text.str());
    out << "wrote " << o.out << " (" << d.n() << " points)\n";
    log_line(err, "predict", {{"status", "ok"}, {"points", std::to_string(d.n())},
                              {"outputs", std::to_string(m.outputs())}, {"extrapolated", std::to_string(flagged)},
                              {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

// ---- compare --------------------------------------------------------------

struct CompareOptions {
    FitOptions fit;
    std::string train;
    std::string test;
    std::string out;
    std::string model_out;
};

int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const auto specs = load_specs(o.fit.specs_file);
    const Dataset train = load_dataset(o.train, specs);
    const Dataset test = load_dataset(o.test, specs);
    if (test.output_names != train.output_names) {
        throw std::invalid_argument("compare: training and test outputs differ");
    }
    const auto basis = RegressionBasis::uniform(parse_basis_kind(o.fit.basis), train.outputs(), train.dims());
    const FitConfig config = o.fit.config();

    const FittedModel joint = fit(train, basis, config);
    const auto independent = fit_independent(train, basis, config);
    const Eigen::VectorXd r_joint = rmse(joint, test);
    const Eigen::VectorXd r_ind = rmse(independent, test);

    std::ostringstream text;
    text << "output,rmse_mgp,rmse_independent\n";
    for (Index k = 0; k < train.outputs(); ++k) {
        text << train.output_names[static_cast<std::size_t>(k)] << ',' << format_double(r_joint(k)) << ','
             << format_double(r_ind(k)) << '\n';
    }
    text << '\n';
    write_correlation(text, train.output_names, joint.correlation().t);
    write_file(o.out, text.str());
    if (!o.model_out.empty()) write_file(o.model_out, model_to_json(joint, "mgp"));
    out << text.str();

    Index wins = 0;
    for (Index k = 0; k < r_joint.size(); ++k) wins += r_joint(k) <= r_ind(k) ? 1 : 0;
    log_line(err, "compare",
             {{"status", "ok"}, {"seed", std::to_string(o.fit.seed)}, {"basis", o.fit.basis},
              {"lambda", o.fit.lambda}, {"restarts", std::to_string(o.fit.restarts)},
              {"mgp_wins", std::to_string(wins)}, {"outputs", std::to_string(train.outputs())},
              {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

// ---- sensitivity ----------------------------------------------------------

struct SensitivityOptions {
    std::string target = "plant";
    int r = 10;
    double delta = 0.3;
    int levels = 4;
    std::uint64_t seed = 0;
    double coupling = 1.0;
    std::string scale = "unit";
    std::string out;
    std::string ranking_out;
    std::string plot_out;
};

int cmd_sensitivity(const SensitivityOptions& o, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    const auto scale = o.scale == "physical" ? EffectScale::Physical : EffectScale::Unit;
    EEResult result;
    if (o.target == "plant") {
        PlantConfig config;
        config.coupling = o.coupling;
        config.validate();
        const auto paths = morris_trajectories(o.r, kPlantInputs, o.delta, o.seed, o.levels);
        result = elementary_effects(plant_target(config), paths, config.specs, plant_output_names(), scale);
    } else {
        const FittedModel m = model_from_json(read_file(o.target), o.target);
        const auto paths = morris_trajectories(o.r, m.data.dims(), o.delta, o.seed, o.levels);
        result = elementary_effects(model_target(m), paths, m.data.specs, m.data.output_names, scale);
    }
    const EEReport report = ee_report(result);
    write_file(o.out, report.csv);
    write_file(o.ranking_out.empty() ? with_suffix(o.out, ".ranking") : o.ranking_out, report.ranking);
    write_file(o.plot_out.empty() ? with_suffix(o.out, ".plot") : o.plot_out, report.plot_data);
    out << report.ranking;

    std::vector<std::string> top;
    for (Index k = 0; k < result.outputs(); ++k) {
        top.push_back(result.input_names[static_cast<std::size_t>(rank_inputs(result, k).front())]);
    }
    log_line(err, "sensitivity",
             {{"status", "ok"}, {"seed", std::to_string(o.seed)}, {"target", o.target}, {"r", std::to_string(o.r)},
              {"delta", format_double(o.delta)}, {"top_inputs", join(top)}, {"elapsed_ms", elapsed_ms(start)}});
    return kOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-output Gaussian process surrogate modeling toolkit", "mgpkit"};
    app.set_version_flag("--version", std::string(kModelFormat));
    app.set_config("--config", "", "Read options from a key=value file ([command] sections); flags win");
    app.fallthrough();
    app.require_subcommand(1);

    DesignOptions design;
    auto* c_design = app.add_subcommand("design", "Maximin Latin hypercube design")->configurable();
    c_design->add_option("--n", design.n, "Number of points")->required()->check(CLI::Range(Index{2}, Index{1} << 30));
    c_design->add_option("--dims", design.dims, "Input dimension (default: from specs, else 6)")
        ->check(CLI::PositiveNumber);
    c_design->add_option("--seed", design.seed, "Seed")->capture_default_str();
    c_design->add_option("--restarts", design.restarts, "LHS candidates to compare")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_design->add_option("--exchange", design.exchange, "Column-swap improvement steps")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_design->add_option("--placement", design.placement, "Point placement inside strata")
        ->check(CLI::IsMember({"uniform", "midpoint"}))
        ->capture_default_str();
    c_design->add_option("--specs-file", design.specs_file, "CSV of name,lower,upper");
    c_design->add_option("--out", design.out, "Physical-units design CSV")->required();
    c_design->add_option("--unit-out", design.unit_out, "Unit-cube design CSV (default: <out>.unit.csv)");

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "Run the virtual plant on a design")->configurable();
    c_sim->add_option("--design", sim.design, "Training design CSV")->required();
    c_sim->add_option("--reps", sim.reps, "Replicates per point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--noise", sim.noise, "Noise sd as a fraction of each output's midpoint response")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_sim->add_option("--coupling", sim.coupling, "Series coupling in [0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
    c_sim->add_option("--out", sim.out, "Training dataset CSV")->required();
    c_sim->add_option("--test-design", sim.test_design, "Optional test design CSV");
    c_sim->add_option("--test-out", sim.test_out, "Test dataset CSV");

    FitCommand fitc;
    auto* c_fit = app.add_subcommand("fit", "Fit a multi-output or independent GP")->configurable();
    c_fit->add_option("--data", fitc.data, "Training dataset CSV")->required();
    add_fit_options(c_fit, fitc.fit);
    c_fit->add_option("--mode", fitc.mode, "Joint model or one model per output")
        ->check(CLI::IsMember({"mgp", "independent"}))
        ->capture_default_str();
    c_fit->add_option("--out", fitc.out, "Model JSON (independent mode adds .<output>)")->required();
    c_fit->add_option("--report", fitc.report, "Fit report file (default: stdout)");

    PredictOptions pred;
    auto* c_pred = app.add_subcommand("predict", "Predict at new points")->configurable();
    c_pred->add_option("--model", pred.model, "Model JSON")->required();
    c_pred->add_option("--points", pred.points, "Design CSV (physical or u_ columns)")->required();
    c_pred->add_option("--out", pred.out, "Predictions CSV")->required();

    CompareOptions cmp;
    auto* c_cmp = app.add_subcommand("compare", "Test RMSE of joint versus independent GPs")->configurable();
    c_cmp->add_option("--train", cmp.train, "Training dataset CSV")->required();
    c_cmp->add_option("--test", cmp.test, "Test dataset CSV")->required();
    add_fit_options(c_cmp, cmp.fit);
    c_cmp->add_option("--out", cmp.out, "Report file")->required();
    c_cmp->add_option("--model-out", cmp.model_out, "Also save the joint model JSON");

    SensitivityOptions sens;
    auto* c_sens = app.add_subcommand("sensitivity", "Morris elementary-effects screening")->configurable();
    c_sens->add_option("--target", sens.target, "'plant' or a model JSON")->capture_default_str();
    c_sens->add_option("--r", sens.r, "Number of trajectories")->check(CLI::PositiveNumber)->capture_default_str();
    c_sens->add_option("--delta", sens.delta, "Step as a fraction of each range")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_sens->add_option("--levels", sens.levels, "Grid levels for base points")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    c_sens->add_option("--seed", sens.seed, "Seed")->capture_default_str();
    c_sens->add_option("--coupling", sens.coupling, "Plant coupling (plant target only)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_sens->add_option("--scale", sens.scale, "Effects per unit-cube or physical unit")
        ->check(CLI::IsMember({"unit", "physical"}))
        ->capture_default_str();
    c_sens->add_option("--out", sens.out, "EE statistics CSV")->required();
    c_sens->add_option("--ranking-out", sens.ranking_out, "Ranking CSV (default: <out>.ranking.csv)");
    c_sens->add_option("--plot-out", sens.plot_out, "Plot data (default: <out>.plot.csv)");

    std::string command = "mgpkit";
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (c_design->parsed()) {
            command = "design";
            return cmd_design(design, out, err);
        }
        if (c_sim->parsed()) {
            command = "simulate";
            return cmd_simulate(sim, out, err);
        }
        if (c_fit->parsed()) {
            command = "fit";
            return cmd_fit(fitc, out, err);
        }
        if (c_pred->parsed()) {
            command = "predict";
            return cmd_predict(pred, out, err);
        }
        if (c_cmp->parsed()) {
            command = "compare";
            return cmd_compare(cmp, out, err);
        }
        if (c_sens->parsed()) {
            command = "sensitivity";
            return cmd_sensitivity(sens, out, err);
        }
        return kUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        log_line(err, command, {{"status", "numerical_error"}});
        return kNumerical;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        log_line(err, command, {{"status", "data_error"}});
        return kData;
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        log_line(err, command, {{"status", "data_error"}});
        return kData;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        log_line(err, command, {{"status", "data_error"}});
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        log_line(err, command, {{"status", "internal_error"}});
        return kInternal;
    }
}

} // namespace mgpkit::cli
