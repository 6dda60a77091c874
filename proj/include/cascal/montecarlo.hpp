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
#include <string>
#include <vector>

#include "cascal/cascade.hpp"
#include "cascal/lut.hpp"
#include "cascal/sim.hpp"

namespace cascal {

struct TrialConfig {
    SimConfig sim;
    CascadeConfig cascade;
    Extrapolation extrapolation = Extrapolation::Slope;
};

/// Everything one trial consumes, derived from its seed alone.
struct TrialData {
    TruthPair pair;
    int rejected_draws = 0;
    CalibrationDataset d1;
    CalibrationDataset d2;

    std::uint64_t checksum() const;
};

TrialData generate_trial_data(std::uint64_t seed, const SimConfig& cfg);

struct TrialResult {
    std::uint64_t seed = 0;
    double j_bayes = 0.0;
    double j_alt1 = 0.0;
    double j_alt2 = 0.0;
    /// Stage-two (unit) and stage-one (test bed) hyperparameters of the
    /// Bayesian run.
    Hyperparameters hp1;
    Hyperparameters hp2;
    int rejected_draws = 0;
    double wall_ms_bayes = 0.0;
    double wall_ms_alt1 = 0.0;
    double wall_ms_alt2 = 0.0;
    std::uint64_t dataset_checksum = 0;
    /// Empty when every method succeeded; otherwise the first failure.
    std::string flag;

    bool flagged() const { return !flag.empty(); }
};

/// Draw a truth pair and datasets from seed, then run the covariance-
/// propagating cascade, the diagonal-covariance variant and the
/// lookup-table cascade on the same data. A failure in any method flags
/// the whole trial.
TrialResult run_trial(std::uint64_t seed, const TrialConfig& cfg);

/// Trials for seeds base_seed .. base_seed + n_trials - 1, returned in seed
/// order regardless of max_parallel.
std::vector<TrialResult> run_campaign(int n_trials, std::uint64_t base_seed,
                                      const TrialConfig& cfg, int max_parallel = 1);

struct MethodSummary {
    std::string name;
    std::size_t count = 0;
    double median = 0.0;
    double mean = 0.0;
    double q05 = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
    /// win_rate[k]: fraction of trials where this method beats method k.
    std::vector<double> win_rate;
    /// Histogram heights over CampaignSummary::bin_edges, unit area.
    std::vector<double> density;
    /// Empirical CDF as sorted values with cumulative probabilities.
    std::vector<double> cdf_x;
    std::vector<double> cdf_p;
};

struct CampaignSummary {
    std::size_t n_trials = 0;
    std::size_t n_flagged = 0;
    std::vector<double> bin_edges;
    std::vector<MethodSummary> methods;

    const MethodSummary& method(const std::string& name) const;
    double win_rate(const std::string& a, const std::string& b) const;
};

inline constexpr int kDefaultBins = 50;

/// Summary over the unflagged trials. Throws EmptyCampaign if none remain.
CampaignSummary summarize(const std::vector<TrialResult>& results, int n_bins = kDefaultBins);

/// Summary of paired samples (samples[m][t] is method m on trial t). Bins
/// span [0, 99.5th percentile of the pooled values]; values beyond the top
/// edge are left out of the histogram.
CampaignSummary summarize_samples(const std::vector<std::string>& names,
                                  const std::vector<std::vector<double>>& samples, int n_bins,
                                  std::size_t n_flagged = 0);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

} // namespace cascal
