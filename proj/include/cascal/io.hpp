/*
 * Copyright 2026 The cascal Authors
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

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cascal/cascade.hpp"
#include "cascal/dataset.hpp"
#include "cascal/gp.hpp"
#include "cascal/lut.hpp"
#include "cascal/montecarlo.hpp"
#include "cascal/sim.hpp"

namespace cascal {

using Json = nlohmann::ordered_json;

// JSON documents. Every from_* throws ParseError on a schema mismatch.

Json to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const Json& j);

Json to_json(const PriorMean& m);
PriorMean prior_mean_from_json(const Json& j);

/// {hyperparameters, prior_mean, train_inputs, train_targets, target_cov}.
/// The factor is not stored; loading refits.
Json to_json(const GPPosterior& p);
GPPosterior posterior_from_json(const Json& j);

Json to_json(const CascadeConfig& c);
CascadeConfig cascade_config_from_json(const Json& j);

Json to_json(const LookupTable& t);
LookupTable lookup_table_from_json(const Json& j);

Json to_json(const SensorTruth& t);
SensorTruth sensor_truth_from_json(const Json& j);

Json to_json(const TruthPair& p);
TruthPair truth_pair_from_json(const Json& j);

Json to_json(const CampaignSummary& s);

/// Any fitted calibration map the command line can store.
using CalibrationModel = std::variant<CascadeModel, LutCascade>;

/// {method_tag, stage_one, stage_two, config} for cascades,
/// {method_tag: "lut", bed_to_reference, unit_to_reference, config} for tables.
Json to_json(const CalibrationModel& m);
CalibrationModel model_from_json(const Json& j);

Vector model_apply(const CalibrationModel& m, const Vector& y1);
std::string method_tag(const CalibrationModel& m);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

// CSV files: UTF-8, header row, '.' decimal separator.

/// Header must name columns x and y. Row numbers in errors count data rows
/// from 1, excluding the header.
CalibrationDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const CalibrationDataset& d);

/// One numeric column, selected by header name.
Vector read_column_csv(const std::filesystem::path& path, const std::string& column);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results);
std::string trials_csv(const std::vector<TrialResult>& results);

/// Reads seed, costs and flag back; other TrialResult fields stay default.
std::vector<TrialResult> read_trials_csv(const std::filesystem::path& path);

} // namespace cascal
