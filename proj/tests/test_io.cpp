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
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "cascal/errors.hpp"
#include "cascal/io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace cascal {
namespace {

using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

CalibrationDataset sample_dataset(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CalibrationDataset d;
    d.x.resize(n);
    d.y.resize(n);
    for (int i = 0; i < n; ++i) {
        d.x[i] = u(rng);
        d.y[i] = d.x[i] + 1e-3 * u(rng);
    }
    return d;
}

TEST(Json, HyperparametersRoundTrip) {
    const Hyperparameters hp{0.123456789, 1.5e-7, 3.25e-9};
    EXPECT_EQ(hyperparameters_from_json(to_json(hp)), hp);
    EXPECT_THROW(hyperparameters_from_json(Json::object()), ParseError);
}

TEST(Json, PosteriorRoundTripPredictsIdentically) {
    std::mt19937_64 rng(3);
    const oracle::Problem pr = oracle::random_problem(rng);
    const GPPosterior p = fit(TrainingSet{pr.x, pr.y, pr.cov},
                              {pr.p.length_scale, pr.p.signal_variance, pr.p.noise_variance},
                              PriorMean::affine(0.9, 0.05));
    const GPPosterior q = posterior_from_json(Json::parse(to_json(p).dump()));
    EXPECT_EQ(q.hp, p.hp);
    EXPECT_EQ(q.mean, p.mean);
    const Vector ys = Vector::LinSpaced(50, -0.2, 1.2);
    EXPECT_LE((predict_mean(q, ys) - predict_mean(p, ys)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((predict_cov(q, ys) - predict_cov(p, ys)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Json, CascadeModelRoundTrip) {
    const TrialData data = generate_trial_data(2, SimConfig{});
    CascadeConfig cfg;
    cfg.stage_two_noise = false;
    const CalibrationModel m = calibrate_cascaded(data.d1, data.d2, cfg);
    const Json j = to_json(m);
    EXPECT_EQ(j.at("method_tag"), "bayesian");
    const CalibrationModel back = model_from_json(Json::parse(j.dump()));
    EXPECT_EQ(method_tag(back), "bayesian");
    EXPECT_EQ(std::get<CascadeModel>(back).config, cfg);
    const Vector ys = Vector::LinSpaced(100, 0.0, 1.0);
    EXPECT_LE((model_apply(back, ys) - model_apply(m, ys)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Json, LutModelRoundTrip) {
    const CalibrationDataset d = sample_dataset(20, 1);
    const CalibrationModel m = calibrate_lut_cascade(d, d, Extrapolation::Clamp);
    const CalibrationModel back = model_from_json(Json::parse(to_json(m).dump()));
    EXPECT_EQ(method_tag(back), "lut");
    const auto& t = std::get<LutCascade>(back).unit_to_reference;
    EXPECT_EQ(t.extrapolation, Extrapolation::Clamp);
    const Vector ys = Vector::LinSpaced(30, -0.5, 1.5);
    EXPECT_EQ(model_apply(back, ys), model_apply(m, ys));
}

TEST(Json, TruthPairRoundTrip) {
    const TruthPair p = sample_truth_pair(6, SimConfig{}).pair;
    const TruthPair q = truth_pair_from_json(Json::parse(to_json(p).dump()));
    EXPECT_EQ(q.sensor1, p.sensor1);
    EXPECT_EQ(q.sensor2, p.sensor2);
    EXPECT_EQ(q.range_min, p.range_min);
    EXPECT_EQ(q.range_max, p.range_max);
    EXPECT_EQ(q.reference_noise_variance, p.reference_noise_variance);
}

TEST(Json, MalformedModelsAreParseErrors) {
    EXPECT_THROW(model_from_json(Json::parse(R"({"method_tag": "quantum"})")), ParseError);
    EXPECT_THROW(model_from_json(Json::parse(R"({"method_tag": "lut"})")), ParseError);
    EXPECT_THROW(lookup_table_from_json(Json::parse(R"({"breakpoints": [0, 1], "values": ["a", 1]})")),
                 ParseError);
}

TEST(Json, SummaryDocumentShape) {
    std::vector<TrialResult> rs(3);
    for (int i = 0; i < 3; ++i) {
        rs[i].j_bayes = 0.1 * (i + 1);
        rs[i].j_alt1 = 0.2 * (i + 1);
        rs[i].j_alt2 = 0.3 * (i + 1);
    }
    const Json j = to_json(summarize(rs));
    EXPECT_EQ(j.at("n_trials"), 3);
    EXPECT_DOUBLE_EQ(j.at("per_method").at("bayes").at("median").get<double>(), 0.2);
    EXPECT_EQ(j.at("per_method").at("bayes").at("win_rate").at("alt2"), 1.0);
    EXPECT_EQ(j.at("histogram").at("bin_edges").size(), static_cast<std::size_t>(kDefaultBins) + 1);
    EXPECT_EQ(j.at("cdf").at("alt1").at("p").size(), 3u);
}

TEST(Csv, DatasetRoundTripIsExact) {
    TempDir dir;
    const CalibrationDataset d = sample_dataset(50, 8);
    write_dataset_csv(dir / "d.csv", d);
    EXPECT_EQ(read_dataset_csv(dir / "d.csv"), d);
}

TEST(Csv, ColumnsByHeaderName) {
    TempDir dir;
    write_text(dir / "d.csv", "y,x,note\n1.5,0.5,a\n2.5,1.5,b\n");
    const CalibrationDataset d = read_dataset_csv(dir / "d.csv");
    EXPECT_EQ(d.x, (Vector(2) << 0.5, 1.5).finished());
    EXPECT_EQ(d.y, (Vector(2) << 1.5, 2.5).finished());
    EXPECT_EQ(read_column_csv(dir / "d.csv", "y"), d.y);
}

TEST(Csv, BadCellNamesItsRow) {
    TempDir dir;
    std::string text = "x,y\n";
    for (int row = 1; row <= 20; ++row) {
        text += row == 17 ? "0.5,abc\n" : std::to_string(row * 0.01) + ",0.1\n";
    }
    write_text(dir / "bad.csv", text);
    try {
        read_dataset_csv(dir / "bad.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("row 17"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos) << e.what();
    }
}

TEST(Csv, StructuralProblems) {
    TempDir dir;
    write_text(dir / "empty.csv", "");
    EXPECT_THROW(read_dataset_csv(dir / "empty.csv"), ParseError);
    write_text(dir / "nocol.csv", "a,b\n1,2\n");
    EXPECT_THROW(read_dataset_csv(dir / "nocol.csv"), ParseError);
    write_text(dir / "short.csv", "x,y\n1\n");
    EXPECT_THROW(read_dataset_csv(dir / "short.csv"), ParseError);
    write_text(dir / "inf.csv", "x,y\n1,inf\n");
    EXPECT_THROW(read_dataset_csv(dir / "inf.csv"), ParseError);
    EXPECT_THROW(read_dataset_csv(dir / "missing.csv"), ParseError);
}

TEST(Csv, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 9.053328e-05}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, TrialsRoundTrip) {
    TempDir dir;
    std::vector<TrialResult> rs(3);
    for (int i = 0; i < 3; ++i) {
        rs[i].seed = 10 + i;
        rs[i].j_bayes = 1e-4 * (i + 1) / 3.0;
        rs[i].j_alt1 = 2e-4 * (i + 1) / 7.0;
        rs[i].j_alt2 = 5e-4 * (i + 1);
    }
    rs[1].flag = "stage one: not positive definite, even with jitter";
    rs[1].j_bayes = rs[1].j_alt1 = rs[1].j_alt2 = std::numeric_limits<double>::quiet_NaN();
    write_trials_csv(dir / "t.csv", rs);
    const auto back = read_trials_csv(dir / "t.csv");
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].j_bayes, rs[0].j_bayes);
    EXPECT_EQ(back[2].j_alt1, rs[2].j_alt1);
    EXPECT_TRUE(back[1].flagged());
    EXPECT_TRUE(std::isnan(back[1].j_alt2));
    EXPECT_FALSE(back[0].flagged());
    EXPECT_EQ(trials_csv(back), trials_csv(rs));
}

} // namespace
} // namespace cascal
