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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cascal/io.hpp"
#include "cascal/montecarlo.hpp"

namespace cascal {

/// Every setting of a command-line run. Defaults reproduce the simulation
/// study; a flat JSON config file may override them and command-line flags
/// override the file.
struct RunConfig {
    SimConfig sim;
    int max_iterations = 400;
    double rel_tolerance = 1e-9;
    bool strict_paper_mode = false;
    Extrapolation extrapolation = Extrapolation::Slope;
    int n_bins = kDefaultBins;
    std::uint64_t seed = 1;
    int trials = 200;
    int parallel = 1;

    /// Throws ConfigError.
    void validate() const;

    TrialConfig trial_config() const;
    CascadeConfig cascade_config() const;
};

inline constexpr int kFullScaleTrials = 12000;

/// Overwrite fields present in a flat JSON object. Unknown keys and
/// mistyped values throw ConfigError.
void apply_config_json(RunConfig& cfg, const Json& j);

Json to_json(const RunConfig& cfg);

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
};

/// Entry point of the cascal tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cascal
