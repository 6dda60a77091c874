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

#include "cascal/cascade.hpp"

#include "cascal/errors.hpp"

namespace cascal {

namespace {

void require_min_size(const CalibrationDataset& d, const char* name) {
    d.validate();
    if (d.size() < 2) {
        throw InvalidArgument(std::string(name) + " needs at least 2 pairs");
    }
}

CascadeModel finish(const CalibrationDataset& d1, const GPPosterior& stage_one,
                    const CascadeConfig& cfg, CascadeMethod method) {
    require_min_size(d1, "d1");
    const TrainingSet ts = method == CascadeMethod::Bayesian
                               ? propagate(d1, stage_one)
                               : propagate_diagonal(d1, stage_one);
    CascadeModel m;
    m.stage_one = stage_one;
    m.stage_two = fit_stage_two(ts, cfg);
    m.method = method;
    m.config = cfg;
    return m;
}

} // namespace

std::string to_string(CascadeMethod m) {
    return m == CascadeMethod::Bayesian ? "bayesian" : "alt1";
}

CascadeMethod cascade_method_from_string(const std::string& name) {
    if (name == "bayesian") return CascadeMethod::Bayesian;
    if (name == "alt1") return CascadeMethod::Alt1;
    throw InvalidArgument("unknown cascade method '" + name + "'");
}

GPPosterior calibrate_stage_one(const CalibrationDataset& d2, const CascadeConfig& cfg) {
    require_min_size(d2, "d2");
    const TrainingSet ts = TrainingSet::with_zero_cov(d2.x, d2.y);
    OptimizerConfig opt = cfg.optimizer;
    // Stage one has no propagated covariance, so its noise is always learned.
    opt.learn_noise = true;
    const Hyperparameters hp0 = default_initial_hyperparameters(ts, cfg.stage_one_mean);
    const Hyperparameters hp = optimize_hyperparameters(ts, hp0, opt, cfg.stage_one_mean);
    return fit(ts, hp, cfg.stage_one_mean);
}

TrainingSet propagate(const CalibrationDataset& d1, const GPPosterior& stage_one) {
    d1.validate();
    return TrainingSet{d1.x, predict_mean(stage_one, d1.y), predict_cov(stage_one, d1.y)};
}

TrainingSet propagate_diagonal(const CalibrationDataset& d1, const GPPosterior& stage_one) {
    d1.validate();
    const Eigen::Index n = d1.size();
    return TrainingSet{d1.x, predict_mean(stage_one, d1.y),
                       stage_one.hp.noise_variance * Matrix::Identity(n, n)};
}

GPPosterior fit_stage_two(const TrainingSet& ts, const CascadeConfig& cfg) {
    OptimizerConfig opt = cfg.optimizer;
    Hyperparameters hp0 = default_initial_hyperparameters(ts, cfg.stage_two_mean);
    opt.learn_noise = cfg.stage_two_noise;
    if (!cfg.stage_two_noise) {
        hp0.noise_variance = 0.0;
    }
    const Hyperparameters hp = optimize_hyperparameters(ts, hp0, opt, cfg.stage_two_mean);
    return fit(ts, hp, cfg.stage_two_mean);
}

CascadeModel calibrate_cascaded(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                const CascadeConfig& cfg) {
    require_min_size(d1, "d1");
    return calibrate_cascaded(d1, calibrate_stage_one(d2, cfg), cfg);
}

CascadeModel calibrate_cascaded(const CalibrationDataset& d1, const GPPosterior& stage_one,
                                const CascadeConfig& cfg) {
    return finish(d1, stage_one, cfg, CascadeMethod::Bayesian);
}

CascadeModel calibrate_alternative1(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                    const CascadeConfig& cfg) {
    require_min_size(d1, "d1");
    return calibrate_alternative1(d1, calibrate_stage_one(d2, cfg), cfg);
}

CascadeModel calibrate_alternative1(const CalibrationDataset& d1, const GPPosterior& stage_one,
                                    const CascadeConfig& cfg) {
    return finish(d1, stage_one, cfg, CascadeMethod::Alt1);
}

} // namespace cascal
