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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cascal/errors.hpp"
#include "cascal/lut.hpp"
#include "cascal/sim.hpp"

namespace cascal {
namespace {

CalibrationDataset pairs(std::initializer_list<double> x, std::initializer_list<double> y) {
    CalibrationDataset d;
    d.x = Eigen::Map<const Vector>(x.begin(), static_cast<Eigen::Index>(x.size()));
    d.y = Eigen::Map<const Vector>(y.begin(), static_cast<Eigen::Index>(y.size()));
    return d;
}

TEST(Lut, IdentityTable) {
    const LookupTable t = build_lut(pairs({0, 1, 2}, {0, 1, 2}));
    EXPECT_EQ(t(0.5), 0.5);
    EXPECT_EQ(t(1.5), 1.5);
}

TEST(Lut, UnsortedInputIsSorted) {
    const LookupTable t = build_lut(pairs({2, 0, 1}, {4, 0, 1}));
    EXPECT_EQ(t.breakpoints, (Vector(3) << 0, 1, 2).finished());
    EXPECT_EQ(t.values, (Vector(3) << 0, 1, 4).finished());
    EXPECT_DOUBLE_EQ(t(1.5), 2.5);
}

TEST(Lut, DuplicateBreakpointsAveraged) {
    const LookupTable t = build_lut(pairs({0, 1, 1, 2}, {0, 1, 3, 2}));
    EXPECT_EQ(t.breakpoints.size(), 3);
    EXPECT_EQ(t(1.0), 2.0);
}

TEST(Lut, MidpointOfSegment) {
    EXPECT_EQ(build_lut(pairs({0, 2}, {0, 2}))(1.0), 1.0);
}

TEST(Lut, SlopeExtrapolation) {
    const LookupTable t = build_lut(pairs({0, 1, 2}, {0, 1, 2}));
    EXPECT_DOUBLE_EQ(t(3.0), 3.0);
    EXPECT_DOUBLE_EQ(t(-1.0), -1.0);
}

TEST(Lut, ClampExtrapolation) {
    const LookupTable t = build_lut(pairs({0, 1, 2}, {0, 1, 2}), Extrapolation::Clamp);
    EXPECT_EQ(t(3.0), 2.0);
    EXPECT_EQ(t(-1.0), 0.0);
}

TEST(Lut, ExactAtBreakpoints) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CalibrationDataset d;
    d.x.resize(40);
    d.y.resize(40);
    for (int i = 0; i < 40; ++i) {
        d.x[i] = u(rng);
        d.y[i] = u(rng);
    }
    const LookupTable t = build_lut(d);
    for (int i = 0; i < 40; ++i) EXPECT_EQ(t(d.x[i]), d.y[i]);
}

TEST(Lut, LinearBetweenBreakpoints) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CalibrationDataset d;
    d.x = Vector::LinSpaced(20, 0.0, 1.0);
    d.y.resize(20);
    for (int i = 0; i < 20; ++i) d.y[i] = u(rng);
    const LookupTable t = build_lut(d);
    for (int i = 0; i + 1 < 20; ++i) {
        const double mid = 0.5 * (d.x[i] + d.x[i + 1]);
        EXPECT_NEAR(t(mid), 0.5 * (d.y[i] + d.y[i + 1]), 1e-12);
    }
}

TEST(Lut, PermutationInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
        x[i] = u(rng);
        y[i] = u(rng);
    }
    CalibrationDataset a;
    a.x = Eigen::Map<Vector>(x.data(), 30);
    a.y = Eigen::Map<Vector>(y.data(), 30);
    std::vector<int> order(30);
    for (int i = 0; i < 30; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    CalibrationDataset b;
    b.x.resize(30);
    b.y.resize(30);
    for (int i = 0; i < 30; ++i) {
        b.x[i] = x[order[i]];
        b.y[i] = y[order[i]];
    }
    const LookupTable ta = build_lut(a), tb = build_lut(b);
    const Vector q = Vector::LinSpaced(101, -0.2, 1.2);
    EXPECT_EQ(ta(q), tb(q));
}

TEST(Lut, ReproducesPiecewiseLinearFunction) {
    auto f = [](double v) { return v < 0.5 ? 2.0 * v : 1.0 + 0.5 * (v - 0.5); };
    CalibrationDataset d;
    d.x = Vector::LinSpaced(11, 0.0, 1.0);
    d.y = d.x.unaryExpr(f);
    const LookupTable t = build_lut(d);
    for (double v = 0.0; v <= 1.0; v += 0.01) EXPECT_NEAR(t(v), f(v), 1e-12);
}

TEST(Lut, DegenerateTables) {
    EXPECT_THROW(build_lut(pairs({1}, {1})), DegenerateTable);
    EXPECT_THROW(build_lut(pairs({1, 1}, {0, 2})), DegenerateTable);
    EXPECT_THROW(build_lut(pairs({}, {})), DegenerateTable);
    LookupTable bad;
    bad.breakpoints = (Vector(2) << 1, 0).finished();
    bad.values = (Vector(2) << 0, 1).finished();
    EXPECT_THROW(bad.validate(), DegenerateTable);
}

TEST(Lut, ExtrapolationNames) {
    for (auto e : {Extrapolation::Slope, Extrapolation::Clamp})
        EXPECT_EQ(extrapolation_from_string(to_string(e)), e);
    EXPECT_THROW(extrapolation_from_string("cubic"), InvalidArgument);
}

TEST(LutCascade, IdentitySensorsGiveIdentityMap) {
    CalibrationDataset d2;
    d2.x = Vector::LinSpaced(21, 0.0, 1.0);
    d2.y = d2.x;
    CalibrationDataset d1;
    d1.x = Vector::LinSpaced(11, 0.0, 1.0);
    d1.y = d1.x;
    const LutCascade c = calibrate_lut_cascade(d1, d2);
    const Vector q = Vector::LinSpaced(7, 0.0, 1.0);
    EXPECT_LE((c.apply(q) - q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LutCascade, ChainsTheTwoTables) {
    // bed reading b -> position 2b; unit reading u -> bed reading u + 0.1.
    CalibrationDataset d2;
    d2.x = Vector::LinSpaced(11, 0.0, 1.0);
    d2.y = 2.0 * d2.x;
    CalibrationDataset d1;
    d1.x = Vector::LinSpaced(5, 0.0, 0.8);
    d1.y = (d1.x.array() + 0.1).matrix();
    const LutCascade c = calibrate_lut_cascade(d1, d2);
    EXPECT_NEAR(c.apply(Vector::Constant(1, 0.3))[0], 0.8, 1e-12);
}

TEST(LutCascade, CostIsSmallOnIdentityTruth) {
    TruthPair pair;
    pair.sensor1 = SensorTruth::identity();
    pair.sensor2 = SensorTruth::identity();
    CalibrationDataset d;
    d.x = Vector::LinSpaced(5, 0.0, 1.0);
    d.y = d.x;
    const LutCascade c = calibrate_lut_cascade(d, d);
    EXPECT_LE(cost_j([&](const Vector& v) { return c.apply(v); }, pair), 1e-9);
}

} // namespace
} // namespace cascal
