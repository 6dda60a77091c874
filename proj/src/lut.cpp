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

#include "cascal/lut.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "cascal/errors.hpp"

namespace cascal {

std::string to_string(Extrapolation e) {
    return e == Extrapolation::Clamp ? "clamp" : "slope";
}

Extrapolation extrapolation_from_string(const std::string& name) {
    if (name == "slope") return Extrapolation::Slope;
    if (name == "clamp") return Extrapolation::Clamp;
    throw InvalidArgument("unknown extrapolation '" + name + "' (expected slope or clamp)");
}

void LookupTable::validate() const {
    if (breakpoints.size() != values.size()) {
        throw DegenerateTable("lookup table: breakpoints and values differ in length");
    }
    if (breakpoints.size() < 2) {
        throw DegenerateTable("lookup table needs at least 2 distinct breakpoints");
    }
    for (Eigen::Index i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1])) {
            throw DegenerateTable("lookup table breakpoints are not strictly increasing");
        }
    }
}

double LookupTable::operator()(double y) const {
    const Eigen::Index n = breakpoints.size();
    const double* begin = breakpoints.data();
    const double* end = begin + n;
    Eigen::Index seg;
    if (y <= breakpoints[0]) {
        if (extrapolation == Extrapolation::Clamp) return values[0];
        seg = 0;
    } else if (y >= breakpoints[n - 1]) {
        if (extrapolation == Extrapolation::Clamp || y == breakpoints[n - 1]) {
            return values[n - 1];
        }
        seg = n - 2;
    } else {
        seg = static_cast<Eigen::Index>(std::upper_bound(begin, end, y) - begin) - 1;
    }
    const double x0 = breakpoints[seg];
    const double x1 = breakpoints[seg + 1];
    if (y == x0) {
        return values[seg];
    }
    const double t = (y - x0) / (x1 - x0);
    return values[seg] + t * (values[seg + 1] - values[seg]);
}

Vector LookupTable::operator()(const Vector& y) const {
    Vector out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        out[i] = (*this)(y[i]);
    }
    return out;
}

LookupTable build_lut(const CalibrationDataset& pairs, Extrapolation extrapolation) {
    pairs.validate();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pairs.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Ties broken by y so the averaged sums do not depend on input order.
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (pairs.x[a] != pairs.x[b]) return pairs.x[a] < pairs.x[b];
        return pairs.y[a] < pairs.y[b];
    });

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < order.size();) {
        const double x = pairs.x[order[i]];
        double sum = 0.0;
        std::size_t j = i;
        for (; j < order.size() && pairs.x[order[j]] == x; ++j) {
            sum += pairs.y[order[j]];
        }
        xs.push_back(x);
        ys.push_back(sum / static_cast<double>(j - i));
        i = j;
    }

    LookupTable t;
    t.breakpoints = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    t.values = Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    t.extrapolation = extrapolation;
    t.validate();
    return t;
}

double lut_eval(const LookupTable& t, double y) {
    return t(y);
}

LutCascade calibrate_lut_cascade(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                 Extrapolation extrapolation) {
    LutCascade c;
    c.bed_to_reference = build_lut(d2, extrapolation);
    const CalibrationDataset propagated{d1.x, c.bed_to_reference(d1.y)};
    c.unit_to_reference = build_lut(propagated, extrapolation);
    return c;
}

} // namespace cascal
