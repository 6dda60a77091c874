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

#include "cascal/numerics.hpp"

namespace cascal {

/// Paired readings: x from the sensor being calibrated, y from the more
/// accurate one it is compared against.
struct CalibrationDataset {
    Vector x;
    Vector y;

    Eigen::Index size() const { return x.size(); }

    /// Throws DimensionMismatch on unequal lengths, InvalidArgument on
    /// non-finite values.
    void validate() const;

    /// FNV-1a over the raw bytes of x then y.
    std::uint64_t checksum() const;

    bool operator==(const CalibrationDataset& o) const { return x == o.x && y == o.y; }
};

} // namespace cascal
