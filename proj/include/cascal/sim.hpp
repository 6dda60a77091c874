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
#include <functional>
#include <vector>

#include "cascal/dataset.hpp"
#include "cascal/numerics.hpp"
#include "cascal/random.hpp"

namespace cascal {

/// Synthetic position sensor: reading(y*) = y* + sum_k s_k sin(w_k y*) +
/// c_k cos(w_k y*) + eps, eps ~ N(0, noise_variance).
struct SensorTruth {
    Vector sin_coeffs;
    Vector cos_coeffs;
    Vector freqs;
    double noise_variance = 0.0;

    void validate() const;

    /// Reading without measurement noise.
    double noiseless(double y_star) const;

    static SensorTruth identity(double noise_variance = 0.0);

    bool operator==(const SensorTruth& o) const {
        return sin_coeffs == o.sin_coeffs && cos_coeffs == o.cos_coeffs && freqs == o.freqs &&
               noise_variance == o.noise_variance;
    }
};

/// Ground truth for one Monte Carlo draw. sensor2 is the test bed, sensor1
/// the unit being calibrated; the reference instrument reads y* plus noise
/// of reference_noise_variance.
struct TruthPair {
    SensorTruth sensor1;
    SensorTruth sensor2;
    double range_min = 0.0;
    double range_max = 1.0;
    double reference_noise_variance = 1e-8;

    void validate() const;

    /// The true-position range widened by 10% on each side; monotonicity
    /// is required on this interval.
    std::pair<double, double> padded_range() const;
};

struct SimConfig {
    int n_s = 10;
    double coeff_var = 1e-4;
    double freq_var = 6.0;
    double noise_var = 1e-8;
    int n_grid = 100;
    int edge_remove = 8;
    int center_remove = 20;
    int n1 = 100;
    int n_quad = 2001;
    double range_min = 0.0;
    double range_max = 1.0;
    /// Give up on a seed after this many non-monotone truth draws.
    int max_redraws = 1000;

    /// Throws ConfigError for impossible settings.
    void validate() const;
};

SensorTruth sample_truth(std::uint64_t seed, int n_s, double coeff_var, double freq_var,
                         double noise_variance);

double sensor_read(const SensorTruth& t, double y_star, Rng& rng);

inline constexpr int kMonotoneGridPoints = 4001;
inline constexpr double kInversionTolerance = 1e-10;

/// Strictly increasing noiseless reading on a 4001-point grid over [lo, hi].
bool is_monotone(const SensorTruth& t, double lo, double hi);

/// Inverse of a sensor's noiseless reading on [lo, hi]. The constructor
/// checks monotonicity once (throws NonMonotonic); each call then brackets
/// on the cached grid and bisects.
class SensorInverse {
public:
    SensorInverse(const SensorTruth& t, double lo, double hi);

    /// y* with |noiseless(y*) - y_obs| <= tol. Throws InvalidArgument when
    /// y_obs lies outside the image of [lo, hi].
    double operator()(double y_obs, double tol = kInversionTolerance) const;

private:
    SensorTruth truth_;
    std::vector<double> grid_;
    std::vector<double> readings_;
};

/// Inversion over the default padded range [-0.1, 1.1].
double invert_sensor(const SensorTruth& t, double y_obs, double tol = kInversionTolerance);

struct TruthDraw {
    TruthPair pair;
    int rejected_draws = 0;
};

/// Draws sensor2 and sensor1 from substreams of seed, redrawing from the
/// next substream while either is non-monotone on the padded range.
TruthDraw sample_truth_pair(std::uint64_t seed, const SimConfig& cfg);

/// Grid indices kept after removing edge_remove points at each end and
/// center_remove consecutive points starting at (n_grid - center_remove)/2.
std::vector<int> d2_kept_indices(int n_grid, int edge_remove, int center_remove);

/// Test-bed vs reference data: x = sensor2 reading, y = reference reading.
CalibrationDataset generate_d2(const TruthPair& pair, int n_grid, int edge_remove,
                               int center_remove, Rng& rng);

/// Unit vs test-bed data on an equally spaced grid of sensor1 readings:
/// x = sensor1 reading, y = sensor2 reading.
CalibrationDataset generate_d1(const TruthPair& pair, int n1, Rng& rng);

/// Noiseless ground-truth map from a sensor1 reading to the true position.
double true_f13(const TruthPair& pair, double y1);

/// Image of [range_min, range_max] under sensor1's noiseless reading.
std::pair<double, double> sensor1_reading_range(const TruthPair& pair);

using ModelApply = std::function<Vector(const Vector&)>;

/// Normalized root-integrated-squared error of model_apply against
/// true_f13 over sensor1_reading_range, by composite trapezoid on n_quad
/// points.
double cost_j(const ModelApply& model_apply, const TruthPair& pair, int n_quad = 2001);

/// Per-point error profile used by cost_j: (y1 grid, model - truth).
std::pair<Vector, Vector> error_profile(const ModelApply& model_apply, const TruthPair& pair,
                                        int n_quad = 2001);

} // namespace cascal
