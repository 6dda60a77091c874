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

#include <Eigen/Dense>

namespace cascal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower Cholesky factor of A + jitter_used * I.
struct PsdFactor {
    Matrix lower;
    double jitter_used = 0.0;

    Eigen::Index size() const { return lower.rows(); }
};

/// Factor a symmetric positive (semi)definite matrix.
///
/// The input is symmetrized as (A + A^T)/2. Factorization is attempted
/// without jitter first; on failure a diagonal jitter starting at
/// 1e-12 * max(diag(A)) is added and grown by a factor 10 per retry, for at
/// most 8 retries, never exceeding max_jitter. Throws NotPositiveDefinite if
/// the matrix still cannot be factored, DimensionMismatch if A is not square
/// or is asymmetric beyond 1e-9 relative.
PsdFactor factor_psd(const Matrix& a, double max_jitter);

/// Solve (A + jitter I) X = B using the stored factor.
Matrix solve_psd(const PsdFactor& f, const Matrix& b);
Vector solve_psd(const PsdFactor& f, const Vector& b);

/// L^{-1} B, the forward half of solve_psd.
Matrix solve_lower(const PsdFactor& f, const Matrix& b);

/// log|A + jitter I| = 2 sum log diag(L).
double log_det(const PsdFactor& f);

/// (A + A^T)/2
Matrix symmetrized(const Matrix& a);

} // namespace cascal
