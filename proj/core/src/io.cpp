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

#include "mgpkit/io.hpp"

#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mgpkit/error.hpp"
#include "mgpkit/mgp.hpp"

namespace mgpkit {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string location(std::string_view source, std::size_t line, std::size_t column) {
    return std::string(source) + ": line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& cell, std::string_view source, std::size_t line, std::size_t column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
        throw ParseError(location(source, line, column) + ": '" + cell + "' is not a number");
    }
    return v;
}

} // namespace

CsvTable read_csv_table(std::istream& in, std::string_view source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(std::string(source) + ": empty file");
    table.header = split(line);
    const std::size_t cols = table.header.size();

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != cols) {
            throw ParseError(location(source, line_no, std::min(cells.size(), cols) + 1) + ": expected " +
                             std::to_string(cols) + " columns, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cols);
        for (std::size_t c = 0; c < cols; ++c) row[c] = parse_number(cells[c], source, line_no, c + 1);
        rows.push_back(std::move(row));
    }
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
    return table;
}

void write_csv_table(const CsvTable& table, std::ostream& out) {
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (Index r = 0; r < table.values.rows(); ++r) {
        for (Index c = 0; c < table.values.cols(); ++c) out << (c ? "," : "") << format_double(table.values(r, c));
        out << '\n';
    }
}

std::vector<InputSpec> read_specs_csv(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<InputSpec> specs;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() != 3 || cells[0] != "name" || cells[1] != "lower" || cells[2] != "upper") {
                throw ParseError(location(source, line_no, 1) + ": expected header name,lower,upper");
            }
            continue;
        }
        if (cells.size() != 3) throw ParseError(location(source, line_no, 1) + ": expected 3 columns");
        InputSpec s{cells[0], parse_number(cells[1], source, line_no, 2), parse_number(cells[2], source, line_no, 3)};
        if (s.lower > s.upper) std::swap(s.lower, s.upper);
        if (!(s.lower < s.upper)) throw ParseError(location(source, line_no, 2) + ": empty range");
        specs.push_back(std::move(s));
    }
    if (specs.empty()) throw ParseError(std::string(source) + ": no input specs");
    return specs;
}

void write_design_csv(const DesignMatrix& design, std::span<const InputSpec> specs, std::ostream& out) {
    CsvTable t;
    for (const auto& s : specs) t.header.push_back(s.name);
    t.values = scale_design(design, specs);
    write_csv_table(t, out);
}

void write_unit_design_csv(const DesignMatrix& design, std::span<const InputSpec> specs, std::ostream& out) {
    if (static_cast<Index>(specs.size()) != design.dims()) throw std::invalid_argument("design/spec mismatch");
    CsvTable t;
    for (const auto& s : specs) t.header.push_back("u_" + s.name);
    t.values = design.points;
    write_csv_table(t, out);
}

DesignMatrix read_design_csv(std::istream& in, std::span<const InputSpec> specs, std::string_view source) {
    CsvTable t = read_csv_table(in, source);
    if (t.header.size() != specs.size()) {
        throw ParseError(std::string(source) + ": line 1: expected " + std::to_string(specs.size()) + " columns");
    }
    bool unit = true, physical = true;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        unit = unit && t.header[c] == "u_" + specs[c].name;
        physical = physical && t.header[c] == specs[c].name;
    }
    if (!unit && !physical) {
        throw ParseError(std::string(source) + ": line 1: header does not match the input specs");
    }
    if (t.values.rows() < 1) throw ParseError(std::string(source) + ": no design rows");
    return unit ? DesignMatrix{t.values} : unscale_design(t.values, specs);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    data.validate();
    const Index n = data.rows(0);
    for (Index k = 1; k < data.outputs(); ++k) {
        if (data.x[static_cast<std::size_t>(k)] != data.x[0]) {
            throw std::invalid_argument("dataset csv: all outputs must share one design");
        }
    }
    CsvTable t;
    for (const auto& s : data.specs) t.header.push_back(s.name);
    t.header.push_back("rep");
    for (Index k = 0; k < data.outputs(); ++k) {
        t.header.push_back(data.output_names.empty() ? "y" + std::to_string(k + 1)
                                                     : data.output_names[static_cast<std::size_t>(k)]);
    }
    const Index l = data.dims();
    const Eigen::MatrixXd phys = scale_design(DesignMatrix{data.x[0]}, data.specs);
    t.values.resize(n * data.reps, l + 1 + data.outputs());
    for (Index m = 0; m < data.reps; ++m) {
        for (Index j = 0; j < n; ++j) {
            const Index row = m * n + j;
            t.values.row(row).head(l) = phys.row(j);
            t.values(row, l) = static_cast<double>(m);
            for (Index k = 0; k < data.outputs(); ++k) {
                t.values(row, l + 1 + k) = data.y[static_cast<std::size_t>(k)](row);
            }
        }
    }
    write_csv_table(t, out);
}

Dataset read_dataset_csv(std::istream& in, std::span<const InputSpec> specs, std::string_view source) {
    CsvTable t = read_csv_table(in, source);
    const auto l = static_cast<Index>(specs.size());
    const auto cols = static_cast<Index>(t.header.size());
    if (cols < l + 2) throw ParseError(std::string(source) + ": line 1: too few columns");
    for (Index c = 0; c < l; ++c) {
        if (t.header[static_cast<std::size_t>(c)] != specs[static_cast<std::size_t>(c)].name) {
            throw ParseError(location(source, 1, static_cast<std::size_t>(c + 1)) + ": expected input '" +
                             specs[static_cast<std::size_t>(c)].name + "'");
        }
    }
    if (t.header[static_cast<std::size_t>(l)] != "rep") {
        throw ParseError(location(source, 1, static_cast<std::size_t>(l + 1)) + ": expected 'rep'");
    }
    const Index rows = t.values.rows();
    if (rows < 1) throw ParseError(std::string(source) + ": no observations");

    Index reps = 0;
    for (Index r = 0; r < rows; ++r) {
        const double rep = t.values(r, l);
        if (rep < 0 || rep != std::floor(rep)) {
            throw ParseError(location(source, static_cast<std::size_t>(r + 2), static_cast<std::size_t>(l + 1)) +
                             ": replicate index must be a non-negative integer");
        }
        reps = std::max(reps, static_cast<Index>(rep) + 1);
    }
    if (rows % reps != 0) throw ParseError(std::string(source) + ": unequal replicate counts");
    const Index n = rows / reps;
    for (Index r = 0; r < rows; ++r) {
        const std::size_t line = static_cast<std::size_t>(r + 2);
        if (static_cast<Index>(t.values(r, l)) != r / n) {
            throw ParseError(location(source, line, static_cast<std::size_t>(l + 1)) +
                             ": rows must be grouped by replicate (rep 0 block first)");
        }
        for (Index c = 0; c < l; ++c) {
            if (t.values(r, c) != t.values(r % n, c)) {
                throw ParseError(location(source, line, static_cast<std::size_t>(c + 1)) +
                                 ": replicate does not repeat the design point of row " +
                                 std::to_string(r % n + 2));
            }
        }
    }

    Dataset d;
    d.specs.assign(specs.begin(), specs.end());
    d.reps = reps;
    const DesignMatrix unit = unscale_design(t.values.topLeftCorner(n, l), specs);
    for (Index k = l + 1; k < cols; ++k) {
        d.output_names.push_back(t.header[static_cast<std::size_t>(k)]);
        d.x.push_back(unit.points);
        d.y.push_back(t.values.col(k));
    }
    d.validate();
    return d;
}

std::uint64_t fingerprint(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::int64_t reps = data.reps;
    feed(&reps, sizeof(reps));
    for (Index k = 0; k < data.outputs(); ++k) {
        const auto& x = data.x[static_cast<std::size_t>(k)];
        const auto& y = data.y[static_cast<std::size_t>(k)];
        const std::int64_t shape[2] = {x.rows(), x.cols()};
        feed(shape, sizeof(shape));
        feed(x.data(), sizeof(double) * static_cast<std::size_t>(x.size()));
        feed(y.data(), sizeof(double) * static_cast<std::size_t>(y.size()));
    }
    return h;
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd json_vector(const json& j) {
    Eigen::VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j.at(i).get<double>();
    return v;
}

Eigen::MatrixXd json_matrix(const json& j, Index cols) {
    Eigen::MatrixXd m(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (static_cast<Index>(j.at(r).size()) != cols) throw ParseError("ragged matrix");
        for (Index c = 0; c < cols; ++c) m(static_cast<Index>(r), c) = j.at(r).at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::string model_to_json(const FittedModel& model, std::string_view mode) {
    json j;
    j["format"] = std::string(kModelFormat);
    j["mode"] = std::string(mode);
    j["outputs"] = model.data.output_names;
    json specs = json::array();
    for (const auto& s : model.data.specs) specs.push_back({{"name", s.name}, {"lower", s.lower}, {"upper", s.upper}});
    j["specs"] = specs;

    json kinds = json::array();
    for (auto k : model.basis.kinds) kinds.push_back(std::string(basis_name(k)));
    j["basis"] = {{"kinds", kinds}, {"dims", model.basis.dims}};

    const auto& p = model.params;
    json beta = json::array();
    for (const auto& b : p.beta) beta.push_back(vector_json(b));
    json beta_orig = json::array();
    for (const auto& b : model.beta_original()) beta_orig.push_back(vector_json(b));
    j["params"] = {
        {"beta", beta},
        {"sigma", vector_json(p.sigma.sigma)},
        {"phi", matrix_rows(p.phi.phi)},
        {"omega", vector_json(p.omega.angles)},
        {"T", matrix_rows(model.correlation().t)},
        {"nugget", p.nugget},
        {"lambda", p.lambda},
    };
    j["beta_original"] = beta_orig;
    j["standardization"] = {{"mean", vector_json(model.transform.mean)}, {"scale", vector_json(model.transform.scale)}};

    json xs = json::array(), ys = json::array();
    for (Index k = 0; k < model.data.outputs(); ++k) {
        xs.push_back(matrix_rows(model.data.x[static_cast<std::size_t>(k)]));
        ys.push_back(vector_json(model.data.y[static_cast<std::size_t>(k)]));
    }
    j["training"] = {{"reps", model.data.reps}, {"x", xs}, {"y", ys}};
    j["fingerprint"] = {{"rows", model.data.total_observations()}, {"hash", hex64(fingerprint(model.data))}};

    const auto& d = model.diagnostics;
    j["diagnostics"] = {
        {"objective", d.objective},
        {"outer_iterations", d.outer_iterations},
        {"objective_evaluations", d.objective_evaluations},
        {"restart_scores", d.restart_scores},
        {"selected_lambda", d.selected_lambda},
        {"lambda_candidates", d.lambda_candidates},
        {"lambda_scores", d.lambda_scores},
    };
    return j.dump(2) + "\n";
}

FittedModel model_from_json(std::string_view text, std::string_view source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source) + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw ParseError(std::string(source) + ": unsupported model format '" +
                             j.at("format").get<std::string>() + "'");
        }
        Dataset data;
        for (const auto& s : j.at("specs")) {
            data.specs.push_back({s.at("name").get<std::string>(), s.at("lower").get<double>(), s.at("upper").get<double>()});
        }
        data.output_names = j.at("outputs").get<std::vector<std::string>>();
        const auto& tr = j.at("training");
        data.reps = tr.at("reps").get<Index>();
        const auto l = static_cast<Index>(data.specs.size());
        for (std::size_t k = 0; k < tr.at("x").size(); ++k) {
            data.x.push_back(json_matrix(tr.at("x").at(k), l));
            data.y.push_back(json_vector(tr.at("y").at(k)));
        }
        data.validate();

        const auto& fp = j.at("fingerprint");
        if (fp.at("hash").get<std::string>() != hex64(fingerprint(data)) ||
            fp.at("rows").get<Index>() != data.total_observations()) {
            throw ParseError(std::string(source) + ": training data does not match its fingerprint");
        }

        RegressionBasis basis;
        basis.dims = j.at("basis").at("dims").get<Index>();
        for (const auto& k : j.at("basis").at("kinds")) basis.kinds.push_back(parse_basis_kind(k.get<std::string>()));

        const auto& pj = j.at("params");
        MgpParams p;
        for (const auto& b : pj.at("beta")) p.beta.push_back(json_vector(b));
        p.sigma.sigma = json_vector(pj.at("sigma"));
        p.phi.phi = json_matrix(pj.at("phi"), l);
        p.omega = {p.sigma.sigma.size(), json_vector(pj.at("omega"))};
        p.nugget = pj.at("nugget").get<double>();
        p.lambda = pj.at("lambda").get<double>();

        OutputTransform t{json_vector(j.at("standardization").at("mean")),
                          json_vector(j.at("standardization").at("scale"))};
        FittedModel m = condition(data, basis, p, t);

        const auto& dj = j.at("diagnostics");
        m.diagnostics.objective = dj.at("objective").get<double>();
        m.diagnostics.outer_iterations = dj.at("outer_iterations").get<int>();
        m.diagnostics.objective_evaluations = dj.at("objective_evaluations").get<int>();
        m.diagnostics.restart_scores = dj.at("restart_scores").get<std::vector<double>>();
        m.diagnostics.selected_lambda = dj.at("selected_lambda").get<double>();
        m.diagnostics.lambda_candidates = dj.at("lambda_candidates").get<std::vector<double>>();
        m.diagnostics.lambda_scores = dj.at("lambda_scores").get<std::vector<double>>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string(source) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(source) + ": " + e.what());
    }
}

} // namespace mgpkit
