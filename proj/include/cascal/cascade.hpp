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

#include "cascal/dataset.hpp"
#include "cascal/gp.hpp"

namespace cascal {

enum class CascadeMethod {
    Bayesian, ///< stage two sees the full propagated covariance
    Alt1,     ///< stage two sees stage one's noise variance times I
};

std::string to_string(CascadeMethod m);
CascadeMethod cascade_method_from_string(const std::string& name);

struct CascadeConfig {
    OptimizerConfig optimizer;
    /// Learn an extra diagonal noise in stage two on top of the propagated
    /// covariance. Off in strict mode.
    bool stage_two_noise = true;
    PriorMean stage_one_mean = PriorMean::identity();
    PriorMean stage_two_mean = PriorMean::identity();

    bool operator==(const CascadeConfig& o) const {
        return stage_two_noise == o.stage_two_noise && stage_one_mean == o.stage_one_mean &&
               stage_two_mean == o.stage_two_mean &&
               optimizer.max_iterations == o.optimizer.max_iterations &&
               optimizer.rel_tolerance == o.optimizer.rel_tolerance &&
               optimizer.start_offsets == o.optimizer.start_offsets &&
               optimizer.log_lower == o.optimizer.log_lower &&
               optimizer.log_upper == o.optimizer.log_upper &&
               optimizer.learn_noise == o.optimizer.learn_noise;
    }
};

/// A two-stage calibration: stage_one maps test-bed readings to reference
/// positions, stage_two maps unit readings to reference positions.
struct CascadeModel {
    GPPosterior stage_one;
    GPPosterior stage_two;
    CascadeMethod method = CascadeMethod::Bayesian;
    CascadeConfig config;

    Vector apply(const Vector& y1) const { return predict_mean(stage_two, y1); }
    Vector variance(const Vector& y1) const { return predict_variance(stage_two, y1); }
};

/// Fit the test-bed model on D2 with evidence-optimized hyperparameters.
GPPosterior calibrate_stage_one(const CalibrationDataset& d2, const CascadeConfig& cfg = {});

/// D1' with the stage-one posterior mean as targets and its full joint
/// covariance at d1.y as target covariance.
TrainingSet propagate(const CalibrationDataset& d1, const GPPosterior& stage_one);

/// D1' as above but with stage one's noise variance times I as target
/// covariance.
TrainingSet propagate_diagonal(const CalibrationDataset& d1, const GPPosterior& stage_one);

/// Optimize and fit a stage-two model on a propagated training set.
GPPosterior fit_stage_two(const TrainingSet& ts, const CascadeConfig& cfg);

CascadeModel calibrate_cascaded(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                const CascadeConfig& cfg = {});
CascadeModel calibrate_cascaded(const CalibrationDataset& d1, const GPPosterior& stage_one,
                                const CascadeConfig& cfg = {});

CascadeModel calibrate_alternative1(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                    const CascadeConfig& cfg = {});
CascadeModel calibrate_alternative1(const CalibrationDataset& d1, const GPPosterior& stage_one,
                                    const CascadeConfig& cfg = {});

inline Vector apply(const CascadeModel& model, const Vector& y1) {
    return model.apply(y1);
}

} // namespace cascal
