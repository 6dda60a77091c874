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

#include <string>

#include "cascal/numerics.hpp"

namespace cascal {

/// Squared-exponential kernel hyperparameters. Units follow the data:
/// length_scale in meters, variances in meters^2.
struct Hyperparameters {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.0;

    /// Throws InvalidArgument unless length_scale > 0, signal_variance > 0,
    /// noise_variance >= 0 and all are finite.
    void validate() const;

    bool operator==(const Hyperparameters&) const = default;
};

/// Prior mean m(y) of a calibration map.
struct PriorMean {
    enum class Kind { Identity, Zero, Affine };

    Kind kind = Kind::Identity;
    double slope = 1.0;
    double intercept = 0.0;

    static PriorMean identity() { return {}; }
    static PriorMean zero() { return {Kind::Zero, 0.0, 0.0}; }
    static PriorMean affine(double slope, double intercept) {
        return {Kind::Affine, slope, intercept};
    }

    double operator()(double y) const;

    bool operator==(const PriorMean&) const = default;
};

std::string to_string(PriorMean::Kind kind);
PriorMean::Kind prior_mean_kind_from_string(const std::string& name);

/// sigma_f^2 exp(-(a - b)^2 / (2 l^2))
double se_kernel(double a, double b, const Hyperparameters& hp);

/// Gram matrix with entries se_kernel(ya[p], yb[q]). The noise variance is
/// not added here.
Matrix kernel_matrix(const Vector& ya, const Vector& yb, const Hyperparameters& hp);

Vector eval_prior_mean(const PriorMean& m, const Vector& y);

} // namespace cascal
