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

#include "cascal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascal/errors.hpp"

namespace cascal {

namespace {

constexpr double kPadFraction = 0.1;
constexpr int kMaxBisections = 200;

// Substream tags within one trial seed.
constexpr std::uint64_t kSensor2Stream = 0;
constexpr std::uint64_t kSensor1Stream = 1;
constexpr std::uint64_t kStreamsPerDraw = 2;

Vector linspace(double lo, double hi, int n) {
    if (n == 1) {
        return Vector::Constant(1, lo);
    }
    return Vector::LinSpaced(n, lo, hi);
}

double gaussian(Rng& rng, double variance) {
    if (variance <= 0.0) {
        return 0.0;
    }
    std::normal_distribution<double> dist(0.0, std::sqrt(variance));
    return dist(rng);
}

} // namespace

void SensorTruth::validate() const {
    if (sin_coeffs.size() != cos_coeffs.size() || sin_coeffs.size() != freqs.size()) {
        throw DimensionMismatch("sensor truth: coefficient and frequency vectors differ in length");
    }
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
        throw InvalidArgument("sensor truth: noise variance must be non-negative");
    }
    if (!sin_coeffs.allFinite() || !cos_coeffs.allFinite() || !freqs.allFinite()) {
        throw InvalidArgument("sensor truth: non-finite coefficients");
    }
}

double SensorTruth::noiseless(double y_star) const {
    double out = y_star;
    for (Eigen::Index k = 0; k < freqs.size(); ++k) {
        const double phase = freqs[k] * y_star;
        out += sin_coeffs[k] * std::sin(phase) + cos_coeffs[k] * std::cos(phase);
    }
    return out;
}

SensorTruth SensorTruth::identity(double noise_variance) {
    return SensorTruth{Vector(0), Vector(0), Vector(0), noise_variance};
}

void TruthPair::validate() const {
    sensor1.validate();
    sensor2.validate();
    if (!(range_min < range_max)) {
        throw InvalidArgument("truth pair: range must satisfy min < max");
    }
    if (!(reference_noise_variance >= 0.0)) {
        throw InvalidArgument("truth pair: reference noise variance must be non-negative");
    }
}

std::pair<double, double> TruthPair::padded_range() const {
    const double pad = kPadFraction * (range_max - range_min);
    return {range_min - pad, range_max + pad};
}

void SimConfig::validate() const {
    if (n_s < 0) throw ConfigError("n_s must be >= 0");
    if (coeff_var < 0.0 || freq_var < 0.0 || noise_var < 0.0) {
        throw ConfigError("variances must be >= 0");
    }
    if (n1 < 2) throw ConfigError("n1 must be >= 2");
    if (n_quad < 2) throw ConfigError("n_quad must be >= 2");
    if (!(range_min < range_max)) throw ConfigError("range_min must be < range_max");
    if (max_redraws < 0) throw ConfigError("max_redraws must be >= 0");
    d2_kept_indices(n_grid, edge_remove, center_remove);
}

SensorTruth sample_truth(std::uint64_t seed, int n_s, double coeff_var, double freq_var,
                         double noise_variance) {
    if (n_s < 0 || coeff_var < 0.0 || freq_var < 0.0 || noise_variance < 0.0) {
        throw InvalidArgument("sample_truth: counts and variances must be non-negative");
    }
    Rng rng(seed);
    SensorTruth t;
    t.sin_coeffs.resize(n_s);
    t.cos_coeffs.resize(n_s);
    t.freqs.resize(n_s);
    for (int k = 0; k < n_s; ++k) t.sin_coeffs[k] = gaussian(rng, coeff_var);
    for (int k = 0; k < n_s; ++k) t.cos_coeffs[k] = gaussian(rng, coeff_var);
    for (int k = 0; k < n_s; ++k) t.freqs[k] = gaussian(rng, freq_var);
    t.noise_variance = noise_variance;
    return t;
}

double sensor_read(const SensorTruth& t, double y_star, Rng& rng) {
    return t.noiseless(y_star) + gaussian(rng, t.noise_variance);
}

bool is_monotone(const SensorTruth& t, double lo, double hi) {
    const Vector grid = linspace(lo, hi, kMonotoneGridPoints);
    double prev = t.noiseless(grid[0]);
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
        const double cur = t.noiseless(grid[i]);
        if (!(cur > prev)) {
            return false;
        }
        prev = cur;
    }
    return true;
}

SensorInverse::SensorInverse(const SensorTruth& t, double lo, double hi) : truth_(t) {
    const Vector grid = linspace(lo, hi, kMonotoneGridPoints);
    grid_.assign(grid.data(), grid.data() + grid.size());
    readings_.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        readings_.push_back(truth_.noiseless(grid_[i]));
        if (i > 0 && !(readings_[i] > readings_[i - 1])) {
            throw NonMonotonic("sensor reading is not strictly increasing near y* = " +
                               std::to_string(grid_[i]) +
                               "; the calibration map is not invertible");
        }
    }
}

double SensorInverse::operator()(double y_obs, double tol) const {
    if (!(y_obs >= readings_.front() && y_obs <= readings_.back())) {
        throw InvalidArgument("reading " + std::to_string(y_obs) +
                              " is outside the invertible range [" +
                              std::to_string(readings_.front()) + ", " +
                              std::to_string(readings_.back()) + "]");
    }
    const auto it = std::lower_bound(readings_.begin(), readings_.end(), y_obs);
    const auto hi_idx = static_cast<std::size_t>(it - readings_.begin());
    if (readings_[hi_idx] == y_obs) {
        return grid_[hi_idx];
    }
    double lo = grid_[hi_idx - 1];
    double hi = grid_[hi_idx];
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < kMaxBisections; ++i) {
        mid = 0.5 * (lo + hi);
        const double r = truth_.noiseless(mid) - y_obs;
        if (std::abs(r) <= tol || mid == lo || mid == hi) {
            break;
        }
        (r < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

double invert_sensor(const SensorTruth& t, double y_obs, double tol) {
    const TruthPair unit;
    const auto [lo, hi] = unit.padded_range();
    return SensorInverse(t, lo, hi)(y_obs, tol);
}

TruthDraw sample_truth_pair(std::uint64_t seed, const SimConfig& cfg) {
    cfg.validate();
    TruthDraw out;
    out.pair.range_min = cfg.range_min;
    out.pair.range_max = cfg.range_max;
    out.pair.reference_noise_variance = cfg.noise_var;
    const auto [lo, hi] = out.pair.padded_range();
    for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
        const std::uint64_t base = static_cast<std::uint64_t>(attempt) * kStreamsPerDraw;
        out.pair.sensor2 = sample_truth(derive_seed(seed, base + kSensor2Stream), cfg.n_s,
                                        cfg.coeff_var, cfg.freq_var, cfg.noise_var);
        out.pair.sensor1 = sample_truth(derive_seed(seed, base + kSensor1Stream), cfg.n_s,
                                        cfg.coeff_var, cfg.freq_var, cfg.noise_var);
        if (is_monotone(out.pair.sensor2, lo, hi) && is_monotone(out.pair.sensor1, lo, hi)) {
            out.rejected_draws = attempt;
            return out;
        }
    }
    throw NonMonotonic("no monotone truth pair found for seed " + std::to_string(seed) +
                       " after " + std::to_string(cfg.max_redraws) + " redraws");
}

std::vector<int> d2_kept_indices(int n_grid, int edge_remove, int center_remove) {
    if (n_grid < 4) {
        throw ConfigError("n_grid must be >= 4, got " + std::to_string(n_grid));
    }
    if (edge_remove < 0 || center_remove < 0) {
        throw ConfigError("removal counts must be >= 0");
    }
    const int center_start = (n_grid - center_remove) / 2;
    const int center_end = center_start + center_remove;
    if (center_remove > 0 &&
        (center_start < edge_remove || center_end > n_grid - edge_remove)) {
        throw ConfigError("removal overlap: edge_remove=" + std::to_string(edge_remove) +
                          " and center_remove=" + std::to_string(center_remove) +
                          " do not fit in n_grid=" + std::to_string(n_grid));
    }
    const int kept = n_grid - 2 * edge_remove - center_remove;
    if (kept < 2) {
        throw ConfigError("removals leave " + std::to_string(kept) +
                          " points of n_grid=" + std::to_string(n_grid) + "; need >= 2");
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(kept));
    for (int i = edge_remove; i < n_grid - edge_remove; ++i) {
        if (i < center_start || i >= center_end) {
            out.push_back(i);
        }
    }
    return out;
}

CalibrationDataset generate_d2(const TruthPair& pair, int n_grid, int edge_remove,
                               int center_remove, Rng& rng) {
    pair.validate();
    const std::vector<int> kept = d2_kept_indices(n_grid, edge_remove, center_remove);
    const Vector grid = linspace(pair.range_min, pair.range_max, n_grid);
    CalibrationDataset d;
    d.x.resize(static_cast<Eigen::Index>(kept.size()));
    d.y.resize(static_cast<Eigen::Index>(kept.size()));
    // Every grid point is read so the noise stream does not depend on
    // which points are removed.
    Eigen::Index k = 0;
    std::size_t next = 0;
    for (int i = 0; i < n_grid; ++i) {
        const double y_star = grid[i];
        const double reference = y_star + gaussian(rng, pair.reference_noise_variance);
        const double bed = sensor_read(pair.sensor2, y_star, rng);
        if (next < kept.size() && kept[next] == i) {
            d.x[k] = bed;
            d.y[k] = reference;
            ++k;
            ++next;
        }
    }
    return d;
}

std::pair<double, double> sensor1_reading_range(const TruthPair& pair) {
    return {pair.sensor1.noiseless(pair.range_min), pair.sensor1.noiseless(pair.range_max)};
}

CalibrationDataset generate_d1(const TruthPair& pair, int n1, Rng& rng) {
    pair.validate();
    if (n1 < 2) {
        throw ConfigError("n1 must be >= 2");
    }
    const auto [lo, hi] = pair.padded_range();
    const SensorInverse inverse(pair.sensor1, lo, hi);
    const auto [r_lo, r_hi] = sensor1_reading_range(pair);
    const Vector targets = linspace(r_lo, r_hi, n1);
    CalibrationDataset d;
    d.x.resize(n1);
    d.y.resize(n1);
    for (int k = 0; k < n1; ++k) {
        const double y_star = inverse(targets[k]);
        d.y[k] = sensor_read(pair.sensor2, y_star, rng);
        d.x[k] = targets[k] + gaussian(rng, pair.sensor1.noise_variance);
    }
    return d;
}

double true_f13(const TruthPair& pair, double y1) {
    const auto [lo, hi] = pair.padded_range();
    return SensorInverse(pair.sensor1, lo, hi)(y1);
}

std::pair<Vector, Vector> error_profile(const ModelApply& model_apply, const TruthPair& pair,
                                        int n_quad) {
    if (n_quad < 2) {
        throw InvalidArgument("n_quad must be >= 2");
    }
    pair.validate();
    const auto [lo, hi] = pair.padded_range();
    const SensorInverse inverse(pair.sensor1, lo, hi);
    const auto [r_lo, r_hi] = sensor1_reading_range(pair);
    const Vector y1 = linspace(r_lo, r_hi, n_quad);
    const Vector predicted = model_apply(y1);
    if (predicted.size() != y1.size()) {
        throw DimensionMismatch("model returned " + std::to_string(predicted.size()) +
                                " values for " + std::to_string(y1.size()) + " inputs");
    }
    Vector err(n_quad);
    for (int i = 0; i < n_quad; ++i) {
        err[i] = predicted[i] - inverse(y1[i]);
    }
    return {y1, err};
}

double cost_j(const ModelApply& model_apply, const TruthPair& pair, int n_quad) {
    const auto [y1, err] = error_profile(model_apply, pair, n_quad);
    const double width = y1[y1.size() - 1] - y1[0];
    const double h = width / static_cast<double>(n_quad - 1);
    const Vector sq = err.array().square();
    const double integral = h * (sq.sum() - 0.5 * (sq[0] + sq[sq.size() - 1]));
    return std::sqrt(integral / width);
}

} // namespace cascal
