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

#include "cascal/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "cascal/errors.hpp"
#include "cascal/random.hpp"

namespace cascal {

namespace {

// Dataset noise streams sit far above the truth-redraw streams.
constexpr std::uint64_t kD2Stream = 1ULL << 40;
constexpr std::uint64_t kD1Stream = (1ULL << 40) + 1;

constexpr double kTopPercentile = 0.995;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

std::uint64_t TrialData::checksum() const {
    return d1.checksum() ^ (d2.checksum() * 0x9e3779b97f4a7c15ULL);
}

TrialData generate_trial_data(std::uint64_t seed, const SimConfig& cfg) {
    TrialData data;
    TruthDraw draw = sample_truth_pair(seed, cfg);
    data.pair = std::move(draw.pair);
    data.rejected_draws = draw.rejected_draws;
    Rng d2_rng = make_rng(seed, kD2Stream);
    data.d2 = generate_d2(data.pair, cfg.n_grid, cfg.edge_remove, cfg.center_remove, d2_rng);
    Rng d1_rng = make_rng(seed, kD1Stream);
    data.d1 = generate_d1(data.pair, cfg.n1, d1_rng);
    return data;
}

TrialResult run_trial(std::uint64_t seed, const TrialConfig& cfg) {
    TrialResult r;
    r.seed = seed;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.j_bayes = r.j_alt1 = r.j_alt2 = nan;

    TrialData data;
    try {
        data = generate_trial_data(seed, cfg.sim);
    } catch (const std::exception& e) {
        r.flag = std::string("truth: ") + e.what();
        return r;
    }
    r.rejected_draws = data.rejected_draws;
    r.dataset_checksum = data.checksum();

    const int n_quad = cfg.sim.n_quad;
    const char* stage = "stage_one";
    try {
        auto start = Clock::now();
        const GPPosterior stage_one = calibrate_stage_one(data.d2, cfg.cascade);
        const double stage_one_ms = elapsed_ms(start);
        r.hp2 = stage_one.hp;

        stage = "bayesian";
        start = Clock::now();
        const CascadeModel bayes = calibrate_cascaded(data.d1, stage_one, cfg.cascade);
        r.wall_ms_bayes = stage_one_ms + elapsed_ms(start);
        r.hp1 = bayes.stage_two.hp;
        r.j_bayes = cost_j([&](const Vector& y) { return bayes.apply(y); }, data.pair, n_quad);

        stage = "alt1";
        start = Clock::now();
        const CascadeModel alt1 = calibrate_alternative1(data.d1, stage_one, cfg.cascade);
        r.wall_ms_alt1 = stage_one_ms + elapsed_ms(start);
        r.j_alt1 = cost_j([&](const Vector& y) { return alt1.apply(y); }, data.pair, n_quad);

        stage = "alt2";
        start = Clock::now();
        const LutCascade lut = calibrate_lut_cascade(data.d1, data.d2, cfg.extrapolation);
        r.wall_ms_alt2 = elapsed_ms(start);
        r.j_alt2 = cost_j([&](const Vector& y) { return lut.apply(y); }, data.pair, n_quad);
    } catch (const std::exception& e) {
        r.flag = std::string(stage) + ": " + e.what();
        return r;
    }
    for (const double j : {r.j_bayes, r.j_alt1, r.j_alt2}) {
        if (!std::isfinite(j) || j < 0.0) {
            r.flag = "non-finite cost";
        }
    }
    return r;
}

std::vector<TrialResult> run_campaign(int n_trials, std::uint64_t base_seed,
                                      const TrialConfig& cfg, int max_parallel) {
    if (n_trials < 1) {
        throw ConfigError("n_trials must be >= 1");
    }
    cfg.sim.validate();
    std::vector<TrialResult> results(static_cast<std::size_t>(n_trials));
    const int workers = std::clamp(max_parallel, 1, n_trials);
    std::atomic<int> next{0};
    const auto work = [&] {
        for (int k = next.fetch_add(1); k < n_trials; k = next.fetch_add(1)) {
            results[static_cast<std::size_t>(k)] =
                run_trial(base_seed + static_cast<std::uint64_t>(k), cfg);
        }
    };
    if (workers == 1) {
        work();
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    pool.clear();
    return results;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        throw EmptyCampaign("quantile of an empty sample");
    }
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

const MethodSummary& CampaignSummary::method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.name == name) return m;
    }
    throw InvalidArgument("no method named '" + name + "' in summary");
}

double CampaignSummary::win_rate(const std::string& a, const std::string& b) const {
    for (std::size_t k = 0; k < methods.size(); ++k) {
        if (methods[k].name == b) {
            return method(a).win_rate[k];
        }
    }
    throw InvalidArgument("no method named '" + b + "' in summary");
}

CampaignSummary summarize_samples(const std::vector<std::string>& names,
                                  const std::vector<std::vector<double>>& samples, int n_bins,
                                  std::size_t n_flagged) {
    if (names.size() != samples.size()) {
        throw DimensionMismatch("summarize: one name per method required");
    }
    if (samples.empty() || samples.front().empty()) {
        throw EmptyCampaign("no unflagged trials to summarize");
    }
    if (n_bins < 1) {
        throw ConfigError("n_bins must be >= 1");
    }
    const std::size_t n = samples.front().size();
    for (const auto& s : samples) {
        if (s.size() != n) {
            throw DimensionMismatch("summarize: methods have different trial counts");
        }
    }

    CampaignSummary out;
    out.n_trials = n;
    out.n_flagged = n_flagged;

    std::vector<double> pooled;
    for (const auto& s : samples) pooled.insert(pooled.end(), s.begin(), s.end());
    std::sort(pooled.begin(), pooled.end());
    double top = quantile_sorted(pooled, kTopPercentile);
    int bins = n_bins;
    if (pooled.front() == pooled.back()) {
        // All values equal: one bin ending at that value.
        bins = 1;
        top = pooled.back();
    }
    if (!(top > 0.0)) {
        top = 1.0;
    }
    out.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) {
        out.bin_edges[static_cast<std::size_t>(b)] = top * b / bins;
    }
    const double width = top / bins;

    for (std::size_t m = 0; m < samples.size(); ++m) {
        MethodSummary s;
        s.name = names[m];
        s.count = n;
        std::vector<double> sorted = samples[m];
        std::sort(sorted.begin(), sorted.end());
        s.median = quantile_sorted(sorted, 0.5);
        s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
        s.q05 = quantile_sorted(sorted, 0.05);
        s.q25 = quantile_sorted(sorted, 0.25);
        s.q75 = quantile_sorted(sorted, 0.75);
        s.q95 = quantile_sorted(sorted, 0.95);

        for (std::size_t o = 0; o < samples.size(); ++o) {
            std::size_t wins = 0;
            for (std::size_t t = 0; t < n; ++t) {
                if (samples[m][t] < samples[o][t]) ++wins;
            }
            s.win_rate.push_back(static_cast<double>(wins) / static_cast<double>(n));
        }

        std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
        std::size_t in_range = 0;
        for (const double v : sorted) {
            if (v < 0.0 || v > top) continue;
            const auto b = std::min(static_cast<std::size_t>(v / width),
                                    static_cast<std::size_t>(bins) - 1);
            counts[b] += 1.0;
            ++in_range;
        }
        s.density.resize(counts.size(), 0.0);
        if (in_range > 0) {
            for (std::size_t b = 0; b < counts.size(); ++b) {
                s.density[b] = counts[b] / (static_cast<double>(in_range) * width);
            }
        }

        s.cdf_x = sorted;
        s.cdf_p.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.cdf_p[i] = static_cast<double>(i + 1) / static_cast<double>(n);
        }
        out.methods.push_back(std::move(s));
    }
    return out;
}

CampaignSummary summarize(const std::vector<TrialResult>& results, int n_bins) {
    std::vector<std::vector<double>> samples(3);
    std::size_t flagged = 0;
    for (const auto& r : results) {
        if (r.flagged()) {
            ++flagged;
            continue;
        }
        samples[0].push_back(r.j_bayes);
        samples[1].push_back(r.j_alt1);
        samples[2].push_back(r.j_alt2);
    }
    if (samples[0].empty()) {
        throw EmptyCampaign("campaign has no unflagged trials (" + std::to_string(flagged) +
                            " flagged)");
    }
    return summarize_samples({"bayes", "alt1", "alt2"}, samples, n_bins, flagged);
}

} // namespace cascal
