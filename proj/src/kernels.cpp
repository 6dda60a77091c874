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

#include "cascal/kernels.hpp"

#include <cmath>

#include "cascal/errors.hpp"

namespace cascal {

void Hyperparameters::validate() const {
    if (!std::isfinite(length_scale) || !(length_scale > 0.0)) {
        throw InvalidArgument("length_scale must be positive and finite");
    }
    if (!std::isfinite(signal_variance) || !(signal_variance > 0.0)) {
        throw InvalidArgument("signal_variance must be positive and finite");
    }
    if (!std::isfinite(noise_variance) || noise_variance < 0.0) {
        throw InvalidArgument("noise_variance must be non-negative and finite");
    }
}

double PriorMean::operator()(double y) const {
    switch (kind) {
    case Kind::Identity:
        return y;
    case Kind::Zero:
        return 0.0;
    case Kind::Affine:
        return slope * y + intercept;
    }
    return y;
}

std::string to_string(PriorMean::Kind kind) {
    switch (kind) {
    case PriorMean::Kind::Identity:
        return "identity";
    case PriorMean::Kind::Zero:
        return "zero";
    case PriorMean::Kind::Affine:
        return "affine";
    }
    return "identity";
}

PriorMean::Kind prior_mean_kind_from_string(const std::string& name) {
    if (name == "identity") return PriorMean::Kind::Identity;
    if (name == "zero") return PriorMean::Kind::Zero;
    if (name == "affine") return PriorMean::Kind::Affine;
    throw InvalidArgument("unknown prior mean '" + name + "'");
}

double se_kernel(double a, double b, const Hyperparameters& hp) {
    const double d = a - b;
    return hp.signal_variance * std::exp(-0.5 * d * d / (hp.length_scale * hp.length_scale));
}

Matrix kernel_matrix(const Vector& ya, const Vector& yb, const Hyperparameters& hp) {
    Matrix k(ya.size(), yb.size());
    for (Eigen::Index q = 0; q < yb.size(); ++q) {
        for (Eigen::Index p = 0; p < ya.size(); ++p) {
            k(p, q) = se_kernel(ya[p], yb[q], hp);
        }
    }
    return k;
}

Vector eval_prior_mean(const PriorMean& m, const Vector& y) {
    Vector out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        out[i] = m(y[i]);
    }
    return out;
}

} // namespace cascal
