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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mgpkit/dataset.hpp"
#include "mgpkit/design.hpp"

namespace mgpkit {

struct FittedModel;

inline constexpr std::string_view kModelFormat = "mgpkit-model-v1";

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// A header row plus a numeric body.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

/// Parses a numeric CSV. ParseError messages name the source, 1-based line
/// and column.
CsvTable read_csv_table(std::istream& in, std::string_view source = "<csv>");
void write_csv_table(const CsvTable& table, std::ostream& out);

/// name,lower,upper rows. Reversed bounds are normalized.
std::vector<InputSpec> read_specs_csv(std::istream& in, std::string_view source = "<specs>");

/// Physical units, one column per spec name.
void write_design_csv(const DesignMatrix& design, std::span<const InputSpec> specs, std::ostream& out);
/// Unit hypercube, columns prefixed "u_".
void write_unit_design_csv(const DesignMatrix& design, std::span<const InputSpec> specs, std::ostream& out);
/// Reads either variant; header names must match the specs.
DesignMatrix read_design_csv(std::istream& in, std::span<const InputSpec> specs,
                             std::string_view source = "<design>");

/// Columns: physical inputs, "rep", one column per output. Rows are
/// replicate-major; all outputs share one design.
void write_dataset_csv(const Dataset& data, std::ostream& out);
Dataset read_dataset_csv(std::istream& in, std::span<const InputSpec> specs,
                         std::string_view source = "<dataset>");

/// FNV-1a over the design and observation bytes.
std::uint64_t fingerprint(const Dataset& data);

/// Single JSON document with specs, basis, parameters (angles and the
/// implied T), output transform, training data and its fingerprint.
std::string model_to_json(const FittedModel& model, std::string_view mode = "mgp");
/// Re-conditions the stored parameters on the stored training data.
FittedModel model_from_json(std::string_view text, std::string_view source = "<model>");

} // namespace mgpkit
