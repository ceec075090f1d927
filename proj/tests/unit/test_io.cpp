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
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mgpkit/error.hpp"
#include "mgpkit/io.hpp"
#include "mgpkit/mgp.hpp"
#include "oracles.hpp"

namespace mgpkit {
namespace {

std::vector<InputSpec> two_specs() { return {{"P", 10.0, 35.0}, {"T", 500.0, 2000.0}}; }

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

Dataset small_dataset(std::mt19937_64& rng, Index reps) {
    std::normal_distribution<double> z;
    Dataset d;
    d.specs = two_specs();
    d.output_names = {"A", "B"};
    d.reps = reps;
    const Eigen::MatrixXd x = oracle::uniform_points(5, 2, rng);
    for (int k = 0; k < 2; ++k) {
        d.x.push_back(x);
        Eigen::VectorXd y(5 * reps);
        for (Index j = 0; j < y.size(); ++j) y(j) = 100.0 * z(rng);
        d.y.push_back(y);
    }
    return d;
}

TEST(FormatDouble, RoundTripsExactly) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(3.0), "3");
}

TEST(Csv, TableRoundTrip) {
    CsvTable t;
    t.header = {"a", "b", "c"};
    t.values = (Eigen::MatrixXd(2, 3) << 1.0, -2.5, 1e-300, 0.1, 3e10, -0.0).finished();
    std::stringstream ss;
    write_csv_table(t, ss);
    const CsvTable back = read_csv_table(ss);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.values, t.values);
}

TEST(Csv, BadCellNamesLineAndColumn) {
    std::istringstream in("a,b\n1,2\n3,x4\n");
    EXPECT_EQ(error_of([&] { read_csv_table(in, "data.csv"); }), "data.csv: line 3, column 2: 'x4' is not a number");
}

TEST(Csv, RaggedRowIsReported) {
    std::istringstream in("a,b,c\n1,2,3\n4,5\n");
    const std::string msg = error_of([&] { read_csv_table(in, "r.csv"); });
    EXPECT_NE(msg.find("r.csv: line 3"), std::string::npos);
    EXPECT_NE(msg.find("expected 3 columns, found 2"), std::string::npos);
}

TEST(Csv, EmptyFileIsAnError) {
    std::istringstream in("\n\n");
    EXPECT_THROW(read_csv_table(in), ParseError);
}

TEST(Specs, ReadsAndNormalizesReversedBounds) {
    std::istringstream in("name,lower,upper\nP,35,10\nm,2.2,3\n");
    const auto specs = read_specs_csv(in);
    ASSERT_EQ(specs.size(), 2u);
    EXPECT_EQ(specs[0].name, "P");
    EXPECT_EQ(specs[0].lower, 10.0);
    EXPECT_EQ(specs[0].upper, 35.0);
    std::istringstream bad("name,lower,upper\nP,1,1\n");
    EXPECT_THROW(read_specs_csv(bad), ParseError);
    std::istringstream nohead("P,1,2\n");
    EXPECT_THROW(read_specs_csv(nohead), ParseError);
}

TEST(Design, PhysicalAndUnitRoundTrip) {
    const auto specs = two_specs();
    const DesignMatrix d = lhs(7, 2, 3);
    std::stringstream phys, unit;
    write_design_csv(d, specs, phys);
    write_unit_design_csv(d, specs, unit);
    EXPECT_EQ(phys.str().substr(0, 4), "P,T\n");
    EXPECT_EQ(unit.str().substr(0, 8), "u_P,u_T\n");
    EXPECT_LE((read_design_csv(phys, specs).points - d.points).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(read_design_csv(unit, specs).points, d.points);
}

TEST(Design, HeaderMustMatchSpecs) {
    std::istringstream in("P,Q\n1,2\n");
    EXPECT_THROW(read_design_csv(in, two_specs()), ParseError);
}

TEST(DatasetCsv, RoundTripWithReplicates) {
    std::mt19937_64 rng(2);
    const Dataset d = small_dataset(rng, 3);
    std::stringstream ss;
    write_dataset_csv(d, ss);
    const Dataset back = read_dataset_csv(ss, two_specs());
    EXPECT_EQ(back.reps, 3);
    EXPECT_EQ(back.output_names, d.output_names);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(back.y[k], d.y[k]);
        EXPECT_LE((back.x[k] - d.x[k]).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(DatasetCsv, CorruptedCellIsLocated) {
    std::mt19937_64 rng(3);
    const Dataset d = small_dataset(rng, 2);
    std::stringstream ss;
    write_dataset_csv(d, ss);
    std::string text = ss.str();
    // Replace the last cell of the fourth line (third data row).
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) pos = text.find('\n', pos) + 1;
    const std::size_t end = text.find('\n', pos);
    const std::size_t comma = text.rfind(',', end);
    text.replace(comma + 1, end - comma - 1, "oops");
    std::istringstream in(text);
    EXPECT_EQ(error_of([&] { read_dataset_csv(in, two_specs(), "plant.csv"); }),
              "plant.csv: line 4, column 5: 'oops' is not a number");
}

TEST(DatasetCsv, ReplicatesMustRepeatTheDesign) {
    std::istringstream in("P,T,rep,A\n10,500,0,1\n20,600,0,2\n10,500,1,3\n20,700,1,4\n");
    const std::string msg = error_of([&] { read_dataset_csv(in, two_specs(), "d.csv"); });
    EXPECT_NE(msg.find("d.csv: line 5, column 2"), std::string::npos) << msg;
}

TEST(DatasetCsv, RejectsMissingRepColumn) {
    std::istringstream in("P,T,A\n10,500,1\n");
    EXPECT_THROW(read_dataset_csv(in, two_specs()), ParseError);
}

TEST(Fingerprint, SensitiveToEveryValue) {
    std::mt19937_64 rng(4);
    Dataset d = small_dataset(rng, 2);
    const auto f0 = fingerprint(d);
    EXPECT_EQ(fingerprint(d), f0);
    d.y[1](7) = std::nextafter(d.y[1](7), 1e300);
    EXPECT_NE(fingerprint(d), f0);
}

FittedModel small_model(std::mt19937_64& rng) {
    const Dataset d = small_dataset(rng, 2);
    FitConfig c;
    c.lambda = 0.0;
    c.restarts = 1;
    return fit(d, RegressionBasis::uniform(BasisKind::Linear, 2, 2), c);
}

TEST(ModelJson, RoundTripPreservesPredictions) {
    std::mt19937_64 rng(5);
    const FittedModel m = small_model(rng);
    const std::string text = model_to_json(m);
    EXPECT_NE(text.find("\"mgpkit-model-v1\""), std::string::npos);
    const FittedModel back = model_from_json(text);
    EXPECT_EQ(back.params.stacked_beta(), m.params.stacked_beta());
    EXPECT_EQ(back.params.phi.phi, m.params.phi.phi);
    EXPECT_EQ(back.params.omega.angles, m.params.omega.angles);
    EXPECT_EQ(back.params.nugget, m.params.nugget);
    EXPECT_EQ(back.diagnostics.objective, m.diagnostics.objective);
    const Eigen::MatrixXd pts = oracle::uniform_points(6, 2, rng);
    const auto a = predict_points(m, pts), b = predict_points(back, pts);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].mean, b[i].mean);
        EXPECT_EQ(a[i].sd, b[i].sd);
    }
    EXPECT_EQ(model_to_json(back), text);
}

TEST(ModelJson, WrongFormatIsRejected) {
    std::mt19937_64 rng(6);
    std::string text = model_to_json(small_model(rng));
    text.replace(text.find("mgpkit-model-v1"), 15, "mgpkit-model-v0");
    EXPECT_NE(error_of([&] { model_from_json(text, "m.json"); }).find("unsupported model format"), std::string::npos);
}

TEST(ModelJson, TamperedTrainingDataFailsFingerprint) {
    std::mt19937_64 rng(7);
    const FittedModel m = small_model(rng);
    std::string text = model_to_json(m);
    const std::string needle = format_double(m.data.y[0](0));
    const auto pos = text.find(needle, text.find("\"training\""));
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, needle.size(), format_double(m.data.y[0](0) + 1.0));
    EXPECT_NE(error_of([&] { model_from_json(text, "m.json"); }).find("fingerprint"), std::string::npos);
}

TEST(ModelJson, MalformedJsonIsAParseError) {
    EXPECT_THROW(model_from_json("{\"format\": ", "m.json"), ParseError);
    EXPECT_THROW(model_from_json("{\"format\": \"mgpkit-model-v1\"}", "m.json"), ParseError);
}

} // namespace
} // namespace mgpkit
