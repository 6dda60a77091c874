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

#include <vector>

#include "cascal/kernels.hpp"
#include "cascal/numerics.hpp"

namespace cascal {

/// Regression data with a full observation covariance. Stage one of a
/// cascade uses a zero covariance; stage two receives the propagated
/// posterior covariance of stage one.
struct TrainingSet {
    Vector inputs;
    Vector targets;
    Matrix target_cov;

    Eigen::Index size() const { return inputs.size(); }

    /// Throws DimensionMismatch / InvalidArgument on inconsistent shapes,
    /// non-finite entries or an asymmetric covariance.
    void validate() const;

    static TrainingSet with_zero_cov(Vector inputs, Vector targets);
};

/// A fitted GP. Immutable after fit(); weights and gram_factor are derived
/// from the other fields.
struct GPPosterior {
    Hyperparameters hp;
    PriorMean mean;
    Vector train_inputs;
    Vector train_targets;
    Matrix target_cov;
    /// Factor of K(X, X) + target_cov + noise_variance * I.
    PsdFactor gram_factor;
    /// [K + Sigma]^{-1} (targets - m(inputs))
    Vector weights;
};

/// K(X, X) + target_cov + noise_variance * I for the given set.
Matrix observation_gram(const TrainingSet& ts, const Hyperparameters& hp);

/// Cholesky of observation_gram with the library's jitter ceiling.
PsdFactor factor_gram(const Matrix& gram);

GPPosterior fit(const TrainingSet& ts, const Hyperparameters& hp,
                const PriorMean& mean = PriorMean::identity());

/// m(Y*) + K(Y*, X) weights
Vector predict_mean(const GPPosterior& p, const Vector& ystar);

/// Posterior covariance at Y*. Symmetrized, with the diagonal clamped at 0.
Matrix predict_cov(const GPPosterior& p, const Vector& ystar);

/// Diagonal of predict_cov without forming the full matrix.
Vector predict_variance(const GPPosterior& p, const Vector& ystar);

/// Log evidence of the mean-centred targets under K + target_cov + sigma_n^2 I.
double log_marginal_likelihood(const TrainingSet& ts, const Hyperparameters& hp,
                               const PriorMean& mean = PriorMean::identity());

struct OptimizerConfig {
    int max_iterations = 400;
    /// Stop a start once the simplex's spread of -LML values falls below
    /// this fraction of |LML|.
    double rel_tolerance = 1e-9;
    /// Offsets added to every log-parameter of hp0 to seed each start.
    std::vector<double> start_offsets{-2.0, -1.0, 0.0, 1.0, 2.0};
    double log_lower = -20.0;
    double log_upper = 5.0;
    /// When false, noise_variance stays at hp0's value.
    bool learn_noise = true;
};

/// Data-driven starting point: 10% of the input range for the length
/// scale, residual variance for the signal, 1e-8 for the noise.
Hyperparameters default_initial_hyperparameters(const TrainingSet& ts,
                                                const PriorMean& mean = PriorMean::identity());

/// Empirical Bayes: maximize log_marginal_likelihood over the log
/// hyperparameters with a multi-start Nelder-Mead search inside the box
/// [log_lower, log_upper]. The result never has lower evidence than hp0.
/// Throws OptimizationFailed if no start yields a finite evidence.
Hyperparameters optimize_hyperparameters(const TrainingSet& ts, const Hyperparameters& hp0,
                                         const OptimizerConfig& cfg = {},
                                         const PriorMean& mean = PriorMean::identity());

} // namespace cascal
