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
#include "cascal/numerics.hpp"

namespace cascal {

/// Behavior of a lookup table outside its breakpoint range.
enum class Extrapolation {
    Slope, ///< extend the first/last segment
    Clamp, ///< hold the first/last value
};

std::string to_string(Extrapolation e);
Extrapolation extrapolation_from_string(const std::string& name);

/// Piecewise-linear map through (breakpoints[i], values[i]).
struct LookupTable {
    Vector breakpoints;
    Vector values;
    Extrapolation extrapolation = Extrapolation::Slope;

    /// Throws DegenerateTable unless breakpoints are strictly increasing,
    /// the lengths match, and there are at least two entries.
    void validate() const;

    double operator()(double y) const;
    Vector operator()(const Vector& y) const;
};

/// Sort pairs by x, averaging y over exactly repeated x values.
LookupTable build_lut(const CalibrationDataset& pairs,
                      Extrapolation extrapolation = Extrapolation::Slope);

double lut_eval(const LookupTable& t, double y);

/// Two chained tables: the test bed's table maps D1 readings to reference
/// positions, and the unit's table is built from the result.
struct LutCascade {
    LookupTable bed_to_reference;
    LookupTable unit_to_reference;

    Vector apply(const Vector& y1) const { return unit_to_reference(y1); }
};

LutCascade calibrate_lut_cascade(const CalibrationDataset& d1, const CalibrationDataset& d2,
                                 Extrapolation extrapolation = Extrapolation::Slope);

} // namespace cascal
