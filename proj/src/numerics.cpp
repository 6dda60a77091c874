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

#include "cascal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascal/errors.hpp"

namespace cascal {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kInitialJitterScale = 1e-12;
constexpr double kJitterGrowth = 10.0;
constexpr int kMaxJitterRetries = 8;

bool try_factor(const Matrix& a, double jitter, Matrix& lower) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    lower = llt.matrixL();
    // LLT accepts tiny positive pivots that underflow to zero in the factor.
    return (lower.diagonal().array() > 0.0).all() && lower.allFinite();
}

} // namespace

Matrix symmetrized(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

PsdFactor factor_psd(const Matrix& a, double max_jitter) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("factor_psd: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
    }
    PsdFactor out;
    if (a.size() == 0) {
        out.lower = Matrix(0, 0);
        return out;
    }
    if (!a.allFinite()) {
        throw NotPositiveDefinite("factor_psd: matrix has non-finite entries");
    }
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
        throw DimensionMismatch("factor_psd: matrix is not symmetric");
    }
    const Matrix sym = symmetrized(a);

    if (try_factor(sym, 0.0, out.lower)) {
        out.jitter_used = 0.0;
        return out;
    }

    double max_diag = sym.diagonal().maxCoeff();
    if (!(max_diag > 0.0)) {
        max_diag = 1.0;
    }
    double jitter = kInitialJitterScale * max_diag;
    for (int retry = 0; retry < kMaxJitterRetries; ++retry) {
        const bool last = jitter >= max_jitter;
        jitter = std::min(jitter, max_jitter);
        if (jitter > 0.0 && try_factor(sym, jitter, out.lower)) {
            out.jitter_used = jitter;
            return out;
        }
        if (last) {
            break;
        }
        jitter *= kJitterGrowth;
    }
    throw NotPositiveDefinite("factor_psd: factorization failed with jitter up to " +
                              std::to_string(std::min(jitter, max_jitter)));
}

Matrix solve_lower(const PsdFactor& f, const Matrix& b) {
    if (b.rows() != f.size()) {
        throw DimensionMismatch("solve_lower: factor is " + std::to_string(f.size()) +
                                " rows, right-hand side has " + std::to_string(b.rows()));
    }
    return f.lower.triangularView<Eigen::Lower>().solve(b);
}

Matrix solve_psd(const PsdFactor& f, const Matrix& b) {
    Matrix y = solve_lower(f, b);
    return f.lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector solve_psd(const PsdFactor& f, const Vector& b) {
    Matrix x = solve_psd(f, Matrix(b));
    return x.col(0);
}

double log_det(const PsdFactor& f) {
    return 2.0 * f.lower.diagonal().array().log().sum();
}

} // namespace cascal
