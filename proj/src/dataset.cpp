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

#include "cascal/dataset.hpp"

#include <cstring>
#include <string>

#include "cascal/errors.hpp"

namespace cascal {

void CalibrationDataset::validate() const {
    if (x.size() != y.size()) {
        throw DimensionMismatch("dataset has " + std::to_string(x.size()) + " x values and " +
                                std::to_string(y.size()) + " y values");
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw InvalidArgument("dataset contains non-finite values");
    }
}

std::uint64_t CalibrationDataset::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](const Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v[i], sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    };
    feed(x);
    feed(y);
    return h;
}

} // namespace cascal
