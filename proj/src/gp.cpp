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

#include "cascal/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "cascal/errors.hpp"

namespace cascal {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kMaxJitterRelative = 1e-5;
constexpr double kDefaultNoiseVariance = 1e-8;
constexpr double kSignalVarianceFloor = 1e-12;

// Nelder-Mead coefficients.
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kInitialStep = 1.0;

using Objective = std::function<double(const Vector&)>;

struct SimplexResult {
    Vector best;
    double value = std::numeric_limits<double>::infinity();
};

Vector clamp_box(Vector x, double lo, double hi) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lo, hi);
    }
    return x;
}

// Minimizes f inside a box. Infeasible or failing evaluations come back as
// +inf and are simply never accepted.
SimplexResult nelder_mead(const Objective& f, const Vector& start, const OptimizerConfig& cfg) {
    const Eigen::Index dim = start.size();
    const double lo = cfg.log_lower;
    const double hi = cfg.log_upper;

    std::vector<Vector> pts;
    std::vector<double> vals;
    pts.push_back(clamp_box(start, lo, hi));
    for (Eigen::Index i = 0; i < dim; ++i) {
        Vector p = pts.front();
        p[i] += (p[i] + kInitialStep <= hi) ? kInitialStep : -kInitialStep;
        pts.push_back(clamp_box(p, lo, hi));
    }
    for (const auto& p : pts) {
        vals.push_back(f(p));
    }

    std::vector<std::size_t> order(pts.size());
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        const double spread = vals[worst] - vals[best];
        if (std::isfinite(spread) &&
            spread <= cfg.rel_tolerance * std::max(std::abs(vals[best]), 1e-12)) {
            break;
        }

        Vector centroid = Vector::Zero(dim);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k != worst) {
                centroid += pts[k];
            }
        }
        centroid /= static_cast<double>(dim);

        const Vector reflected =
            clamp_box(centroid + kReflect * (centroid - pts[worst]), lo, hi);
        const double fr = f(reflected);
        if (fr < vals[best]) {
            const Vector expanded =
                clamp_box(centroid + kExpand * (reflected - centroid), lo, hi);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }

        const bool outside = fr < vals[worst];
        const Vector contracted =
            outside ? Vector(centroid + kContract * (reflected - centroid))
                    : Vector(centroid + kContract * (pts[worst] - centroid));
        const double fc = f(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }

        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k == best) {
                continue;
            }
            pts[k] = pts[best] + kShrink * (pts[k] - pts[best]);
            vals[k] = f(pts[k]);
        }
    }

    SimplexResult out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (vals[k] < out.value) {
            out.value = vals[k];
            out.best = pts[k];
        }
    }
    if (out.best.size() == 0) {
        out.best = pts.front();
    }
    return out;
}

} // namespace

void TrainingSet::validate() const {
    const Eigen::Index n = inputs.size();
    if (targets.size() != n) {
        throw DimensionMismatch("training set: " + std::to_string(n) + " inputs but " +
                                std::to_string(targets.size()) + " targets");
    }
    if (target_cov.rows() != n || target_cov.cols() != n) {
        throw DimensionMismatch("training set: target covariance is " +
                                std::to_string(target_cov.rows()) + "x" +
                                std::to_string(target_cov.cols()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(n));
    }
    if (!inputs.allFinite() || !targets.allFinite() || !target_cov.allFinite()) {
        throw InvalidArgument("training set contains non-finite values");
    }
    if (n > 0) {
        const double scale = 1.0 + target_cov.cwiseAbs().maxCoeff();
        if ((target_cov - target_cov.transpose()).cwiseAbs().maxCoeff() >
            kSymmetryTolerance * scale) {
            throw InvalidArgument("training set: target covariance is not symmetric");
        }
    }
}

TrainingSet TrainingSet::with_zero_cov(Vector inputs, Vector targets) {
    const Eigen::Index n = inputs.size();
    return TrainingSet{std::move(inputs), std::move(targets), Matrix::Zero(n, n)};
}

Matrix observation_gram(const TrainingSet& ts, const Hyperparameters& hp) {
    Matrix gram = kernel_matrix(ts.inputs, ts.inputs, hp);
    gram += ts.target_cov;
    gram.diagonal().array() += hp.noise_variance;
    return symmetrized(gram);
}

PsdFactor factor_gram(const Matrix& gram) {
    if (gram.size() == 0) {
        return factor_psd(gram, 0.0);
    }
    const double max_diag = std::max(gram.diagonal().maxCoeff(), 0.0);
    const double ceiling = kMaxJitterRelative * (max_diag > 0.0 ? max_diag : 1.0);
    return factor_psd(gram, ceiling);
}

GPPosterior fit(const TrainingSet& ts, const Hyperparameters& hp, const PriorMean& mean) {
    ts.validate();
    hp.validate();
    GPPosterior p;
    p.hp = hp;
    p.mean = mean;
    p.train_inputs = ts.inputs;
    p.train_targets = ts.targets;
    p.target_cov = ts.target_cov;
    p.gram_factor = factor_gram(observation_gram(ts, hp));
    const Vector residual = ts.targets - eval_prior_mean(mean, ts.inputs);
    p.weights = solve_psd(p.gram_factor, residual);
    return p;
}

Vector predict_mean(const GPPosterior& p, const Vector& ystar) {
    Vector out = eval_prior_mean(p.mean, ystar);
    if (p.train_inputs.size() > 0) {
        out += kernel_matrix(ystar, p.train_inputs, p.hp) * p.weights;
    }
    return out;
}

Matrix predict_cov(const GPPosterior& p, const Vector& ystar) {
    Matrix cov = kernel_matrix(ystar, ystar, p.hp);
    if (p.train_inputs.size() > 0) {
        const Matrix v = solve_lower(p.gram_factor, kernel_matrix(p.train_inputs, ystar, p.hp));
        cov.noalias() -= v.transpose() * v;
        cov = symmetrized(cov);
    }
    cov.diagonal() = cov.diagonal().cwiseMax(0.0);
    return cov;
}

Vector predict_variance(const GPPosterior& p, const Vector& ystar) {
    Vector var = Vector::Constant(ystar.size(), p.hp.signal_variance);
    if (p.train_inputs.size() > 0) {
        const Matrix v = solve_lower(p.gram_factor, kernel_matrix(p.train_inputs, ystar, p.hp));
        var -= v.colwise().squaredNorm().transpose();
    }
    return var.cwiseMax(0.0);
}

double log_marginal_likelihood(const TrainingSet& ts, const Hyperparameters& hp,
                               const PriorMean& mean) {
    ts.validate();
    hp.validate();
    const Eigen::Index n = ts.size();
    if (n == 0) {
        return 0.0;
    }
    const PsdFactor f = factor_gram(observation_gram(ts, hp));
    const Vector r = ts.targets - eval_prior_mean(mean, ts.inputs);
    const Vector alpha = solve_lower(f, Matrix(r)).col(0);
    return -0.5 * alpha.squaredNorm() - 0.5 * log_det(f) -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Hyperparameters default_initial_hyperparameters(const TrainingSet& ts, const PriorMean& mean) {
    Hyperparameters hp;
    hp.noise_variance = kDefaultNoiseVariance;
    if (ts.size() == 0) {
        return hp;
    }
    const double range = ts.inputs.maxCoeff() - ts.inputs.minCoeff();
    hp.length_scale = range > 0.0 ? 0.1 * range : 1.0;
    const Vector r = ts.targets - eval_prior_mean(mean, ts.inputs);
    const double var = ts.size() > 1 ? (r.array() - r.mean()).square().sum() /
                                           static_cast<double>(ts.size() - 1)
                                     : r.squaredNorm();
    hp.signal_variance = std::max(var, kSignalVarianceFloor);
    return hp;
}

Hyperparameters optimize_hyperparameters(const TrainingSet& ts, const Hyperparameters& hp0,
                                         const OptimizerConfig& cfg, const PriorMean& mean) {
    ts.validate();
    hp0.validate();
    if (ts.size() < 2) {
        throw InvalidArgument("optimize_hyperparameters needs at least 2 training points");
    }

    const bool learn_noise = cfg.learn_noise;
    const auto to_hp = [&](const Vector& x) {
        Hyperparameters hp;
        hp.length_scale = std::exp(x[0]);
        hp.signal_variance = std::exp(x[1]);
        hp.noise_variance = learn_noise ? std::exp(x[2]) : hp0.noise_variance;
        return hp;
    };
    const auto evidence = [&](const Hyperparameters& hp) {
        try {
            const double v = log_marginal_likelihood(ts, hp, mean);
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        } catch (const NotPositiveDefinite&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const Objective objective = [&](const Vector& x) { return -evidence(to_hp(x)); };

    Vector base(learn_noise ? 3 : 2);
    base[0] = std::log(hp0.length_scale);
    base[1] = std::log(hp0.signal_variance);
    if (learn_noise) {
        // A zero starting noise has no log; start from the box floor.
        base[2] = hp0.noise_variance > 0.0 ? std::log(hp0.noise_variance) : cfg.log_lower;
    }

    Hyperparameters best_hp = hp0;
    double best_lml = evidence(hp0);
    for (const double offset : cfg.start_offsets) {
        const Vector start = (base.array() + offset).matrix();
        const SimplexResult r = nelder_mead(objective, start, cfg);
        if (std::isfinite(r.value) && -r.value > best_lml) {
            best_lml = -r.value;
            best_hp = to_hp(r.best);
        }
    }
    if (!std::isfinite(best_lml)) {
        throw OptimizationFailed("no hyperparameter start produced a finite log marginal likelihood");
    }
    return best_hp;
}

} // namespace cascal
