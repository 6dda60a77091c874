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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cascal/cascade.hpp"
#include "cascal/errors.hpp"
#include "cascal/sim.hpp"
#include "oracles.hpp"

namespace cascal {
namespace {

TruthPair identity_pair() {
    TruthPair p;
    p.sensor1 = SensorTruth::identity(1e-8);
    p.sensor2 = SensorTruth::identity(1e-8);
    return p;
}

struct Data {
    TruthPair pair;
    CalibrationDataset d1;
    CalibrationDataset d2;
};

Data make_data(const TruthPair& pair, int n_grid = 100, int edge = 8, int center = 20,
               int n1 = 100, std::uint64_t seed = 1) {
    Rng rng(seed);
    Data d{pair, {}, {}};
    d.d2 = generate_d2(pair, n_grid, edge, center, rng);
    d.d1 = generate_d1(pair, n1, rng);
    return d;
}

oracle::Params to_params(const Hyperparameters& hp) {
    return {hp.length_scale, hp.signal_variance, hp.noise_variance};
}

TEST(StageOne, IdentitySensorGivesIdentityMap) {
    const Data d = make_data(identity_pair());
    const GPPosterior s1 = calibrate_stage_one(d.d2);
    const Vector grid = Vector::LinSpaced(51, 0.0, 1.0);
    EXPECT_LE((predict_mean(s1, grid) - grid).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(StageOne, GapVarianceExceedsRetainedVariance) {
    const Data d = make_data(sample_truth_pair(3, SimConfig{}).pair);
    const GPPosterior s1 = calibrate_stage_one(d.d2);
    // Kept points 31 and 32 straddle the removed centre block.
    const double gap_mid = 0.5 * (d.d2.x[31] + d.d2.x[32]);
    const double gap_var = predict_variance(s1, Vector::Constant(1, gap_mid))[0];
    const double retained_max = predict_variance(s1, d.d2.x).maxCoeff();
    EXPECT_GT(gap_var, retained_max);
}

TEST(StageOne, TwoPointMinimum) {
    CalibrationDataset d2;
    d2.x = (Vector(2) << 0.1, 0.9).finished();
    d2.y = (Vector(2) << 0.11, 0.88).finished();
    const GPPosterior s1 = calibrate_stage_one(d2);
    EXPECT_TRUE(std::isfinite(log_marginal_likelihood(
        TrainingSet::with_zero_cov(d2.x, d2.y), s1.hp)));
    CalibrationDataset one;
    one.x = Vector::Zero(1);
    one.y = Vector::Zero(1);
    EXPECT_THROW(calibrate_stage_one(one), InvalidArgument);
}

TEST(Propagate, NoDataStageOneRecoversPrior) {
    const Hyperparameters hp{0.3, 0.02, 1e-4};
    const GPPosterior s1 = fit(TrainingSet::with_zero_cov(Vector(0), Vector(0)), hp);
    CalibrationDataset d1;
    d1.x = Vector::LinSpaced(4, 0.0, 1.0);
    d1.y = (Vector(4) << 0.05, 0.3, 0.7, 0.95).finished();
    const TrainingSet ts = propagate(d1, s1);
    EXPECT_EQ(ts.inputs, d1.x);
    EXPECT_EQ(ts.targets, d1.y);
    EXPECT_LE((ts.target_cov - kernel_matrix(d1.y, d1.y, hp)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Propagate, DenseIdentityStageOnePinsTargets) {
    const Vector x = Vector::LinSpaced(200, -0.1, 1.1);
    const GPPosterior s1 = fit(TrainingSet::with_zero_cov(x, x), {0.2, 1e-2, 1e-10});
    CalibrationDataset d1;
    d1.x = Vector::LinSpaced(10, 0.0, 1.0);
    d1.y = Vector::LinSpaced(10, 0.02, 0.97);
    const TrainingSet ts = propagate(d1, s1);
    EXPECT_LE((ts.targets - d1.y).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(ts.target_cov.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Propagate, ThreeAgainstTwoMatchesOracle) {
    Vector x2(2), y2(2);
    x2 << 0.2, 0.8;
    y2 << 0.25, 0.78;
    const oracle::Params op{0.4, 0.05, 1e-3};
    const GPPosterior s1 =
        fit(TrainingSet::with_zero_cov(x2, y2), {op.length_scale, op.signal_variance, op.noise_variance});
    CalibrationDataset d1;
    d1.x = (Vector(3) << 0.0, 0.5, 1.0).finished();
    d1.y = (Vector(3) << 0.1, 0.5, 0.9).finished();
    const TrainingSet ts = propagate(d1, s1);
    const oracle::DenseGP o{x2, y2, Matrix::Zero(2, 2), op};
    EXPECT_LE(oracle::max_rel_error(ts.target_cov, o.covariance(d1.y)), 1e-10);
    EXPECT_LE(oracle::max_rel_error(ts.targets, o.mean(d1.y)), 1e-10);
}

TEST(Propagate, CovarianceSymmetricPsd) {
    const Data d = make_data(sample_truth_pair(5, SimConfig{}).pair);
    const TrainingSet ts = propagate(d.d1, calibrate_stage_one(d.d2));
    ASSERT_EQ(ts.target_cov.rows(), 100);
    EXPECT_EQ(ts.target_cov, ts.target_cov.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(ts.target_cov).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-9 * std::max(1.0, ev.maxCoeff()));
}

TEST(Propagate, DiagonalVariantUsesStageOneNoise) {
    const Data d = make_data(sample_truth_pair(5, SimConfig{}).pair);
    const GPPosterior s1 = calibrate_stage_one(d.d2);
    const TrainingSet full = propagate(d.d1, s1);
    const TrainingSet diag = propagate_diagonal(d.d1, s1);
    EXPECT_EQ(full.inputs, diag.inputs);
    EXPECT_EQ(full.targets, diag.targets);
    EXPECT_EQ(diag.target_cov, s1.hp.noise_variance * Matrix::Identity(100, 100));
}

TEST(Propagate, PerfectStageOnePassesTargetsThrough) {
    // d1 shares d2's x grid; stage one interpolates d2 exactly.
    CalibrationDataset d2;
    d2.x = Vector::LinSpaced(15, 0.0, 1.0);
    d2.y = (d2.x.array() + 0.01 * (5.0 * d2.x.array()).sin()).matrix();
    const GPPosterior s1 = fit(TrainingSet::with_zero_cov(d2.x, d2.y), {0.3, 1e-3, 0.0});
    CalibrationDataset d1;
    d1.x = d2.x;
    d1.y = d2.x;
    EXPECT_LE((propagate(d1, s1).targets - d2.y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Alternative1, WhiteNoiseLimitMatchesBayesian) {
    // With a vanishing length scale the stage-one posterior covariance away
    // from its training inputs is sf2 I, which equals sn2 I when sf2 = sn2.
    Vector x2(3), y2(3);
    x2 << 0.0, 0.5, 1.0;
    y2 = x2;
    const Hyperparameters hp1{1e-6, 1e-4, 1e-4};
    const GPPosterior s1 = fit(TrainingSet::with_zero_cov(x2, y2), hp1);
    CalibrationDataset d1;
    d1.x = Vector::LinSpaced(6, 0.05, 0.95);
    d1.y = Vector::LinSpaced(6, 0.07, 0.93);
    const TrainingSet a = propagate(d1, s1);
    const TrainingSet b = propagate_diagonal(d1, s1);
    EXPECT_EQ(a.targets, b.targets);
    const Hyperparameters hp2{0.3, 0.01, 1e-6};
    EXPECT_LE((observation_gram(a, hp2) - observation_gram(b, hp2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Alternative1, DenseStageOneCloseToBayesian) {
    const TruthPair pair = sample_truth_pair(2, SimConfig{}).pair;
    const Data d = make_data(pair, 200, 0, 0);
    const GPPosterior s1 = calibrate_stage_one(d.d2);
    const CascadeModel bayes = calibrate_cascaded(d.d1, s1);
    const CascadeModel alt1 = calibrate_alternative1(d.d1, s1);
    const double jb = cost_j([&](const Vector& v) { return bayes.apply(v); }, pair);
    const double ja = cost_j([&](const Vector& v) { return alt1.apply(v); }, pair);
    EXPECT_LE(std::abs(jb - ja), 0.1 * jb) << "J bayes " << jb << ", J alt1 " << ja;
}

TEST(Alternative1, SharesStageOneBitForBit) {
    const Data d = make_data(sample_truth_pair(7, SimConfig{}).pair);
    const CascadeModel bayes = calibrate_cascaded(d.d1, d.d2);
    const CascadeModel alt1 = calibrate_alternative1(d.d1, d.d2);
    EXPECT_EQ(bayes.stage_one.hp, alt1.stage_one.hp);
    EXPECT_EQ(bayes.stage_one.weights, alt1.stage_one.weights);
    EXPECT_EQ(bayes.stage_two.train_targets, alt1.stage_two.train_targets);
    EXPECT_EQ(bayes.method, CascadeMethod::Bayesian);
    EXPECT_EQ(alt1.method, CascadeMethod::Alt1);
}

TEST(Cascade, IdentitySensorsGiveSmallCost) {
    const Data d = make_data(identity_pair());
    const CascadeModel m = calibrate_cascaded(d.d1, d.d2);
    EXPECT_LE(cost_j([&](const Vector& v) { return m.apply(v); }, d.pair), 1e-3);
    EXPECT_NEAR(apply(m, Vector::Constant(1, 0.5))[0], 0.5, 1e-3);
}

TEST(Cascade, ModelInvariants) {
    const Data d = make_data(sample_truth_pair(4, SimConfig{}).pair);
    const CascadeModel m = calibrate_cascaded(d.d1, d.d2);
    EXPECT_EQ(m.stage_two.train_inputs, d.d1.x);
    EXPECT_EQ(m.stage_two.train_targets, predict_mean(m.stage_one, d.d1.y));
}

TEST(Cascade, StrictModeMatchesDenseFormula) {
    const Data d = make_data(sample_truth_pair(6, SimConfig{}).pair, 100, 8, 20, 30);
    CascadeConfig cfg;
    cfg.stage_two_noise = false;
    const CascadeModel m = calibrate_cascaded(d.d1, d.d2, cfg);
    EXPECT_EQ(m.stage_two.hp.noise_variance, 0.0);
    const oracle::DenseGP o{m.stage_two.train_inputs, m.stage_two.train_targets,
                            m.stage_two.target_cov, to_params(m.stage_two.hp)};
    const Vector ys = Vector::LinSpaced(25, d.d1.x.minCoeff(), d.d1.x.maxCoeff());
    EXPECT_LE(oracle::max_rel_error(m.apply(ys), o.mean(ys)), 1e-9);
}

TEST(Cascade, ApplyIsDeterministicAndVectorized) {
    const Data d = make_data(sample_truth_pair(9, SimConfig{}).pair);
    const CascadeModel m = calibrate_cascaded(d.d1, d.d2);
    const Vector ys = Vector::LinSpaced(1000, 0.0, 1.0);
    const Vector a = m.apply(ys);
    ASSERT_EQ(a.size(), 1000);
    EXPECT_EQ(a, m.apply(ys));
    EXPECT_EQ(m.apply(ys.segment(10, 1))[0], a[10]);
}

TEST(Cascade, TrainingInputWithTightCovarianceInterpolates) {
    const Data d = make_data(identity_pair());
    const CascadeModel m = calibrate_cascaded(d.d1, d.d2);
    const Vector at = m.apply(d.d1.x);
    EXPECT_LE((at - m.stage_two.train_targets).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Cascade, MethodNames) {
    for (auto k : {CascadeMethod::Bayesian, CascadeMethod::Alt1})
        EXPECT_EQ(cascade_method_from_string(to_string(k)), k);
    EXPECT_THROW(cascade_method_from_string("lut2"), InvalidArgument);
}

} // namespace
} // namespace cascal
