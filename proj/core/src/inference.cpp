// SPDX-License-Identifier: Apache-2.0
//
// rispos: RIS-aided RSS positioning simulator and configuration optimizer
// Copyright (C) 2026 The rispos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "rispos/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rispos {

namespace {

void require(bool condition, const char* message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

// Upper bound on Q(d).
inline double tail_bound(double d) {
    if (d >= 0.0) {
        return 0.5 * std::exp(-0.5 * d * d);
    }
    return 1.0 - 0.25 * std::exp(-2.0 * d * d / std::numbers::pi);
}

}  // namespace

BeliefState::BeliefState(std::size_t users, std::size_t blocks)
    : users_(users), blocks_(blocks), values_(users * blocks, 0.0) {}

BeliefState BeliefState::uniform(std::size_t users, std::size_t blocks) {
    require(blocks > 0, "belief state needs at least one block");
    BeliefState state(users, blocks);
    std::fill(state.values_.begin(), state.values_.end(), 1.0 / static_cast<double>(blocks));
    return state;
}

void BeliefState::set_row(std::size_t i, std::span<const double> values) {
    require(i < users_, "belief row index out of range");
    require(values.size() == blocks_, "belief row length mismatch");
    std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(i * blocks_));
}

void floor_and_normalize(std::span<double> row, double floor) {
    const std::size_t n = row.size();
    require(n > 0, "cannot normalize an empty row");
    require(floor >= 0.0 && floor * static_cast<double>(n) < 1.0, "prior floor too large for row");

    double sum = 0.0;
    for (const double p : row) {
        sum += std::max(p, 0.0);
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
        return;
    }
    for (double& p : row) {
        p = std::max(p, 0.0) / sum;
    }

    // Water-fill: pin entries at the floor until the rescaled remainder stays above it.
    std::vector<unsigned char> pinned(n, 0);
    std::size_t num_pinned = 0;
    for (;;) {
        bool changed = false;
        double free_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!pinned[k] && row[k] < floor) {
                pinned[k] = 1;
                ++num_pinned;
                changed = true;
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!pinned[k]) {
                free_sum += row[k];
            }
        }
        const double free_mass = 1.0 - static_cast<double>(num_pinned) * floor;
        const double scale = free_sum > 0.0 ? free_mass / free_sum : 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            row[k] = pinned[k] ? floor : row[k] * scale;
        }
        if (!changed) {
            break;
        }
    }
}

Posterior update_prior(std::span<const double> prior_row, std::span<const double> mean_db, double s,
                       double sigma) {
    require(prior_row.size() == mean_db.size(), "update_prior: length mismatch");
    require(sigma > 0.0, "update_prior: sigma must be positive");
    const std::size_t n = prior_row.size();
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

    std::vector<double> log_weight(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double r = s - mean_db[k];
        log_weight[k] = (prior_row[k] > 0.0 ? std::log(prior_row[k])
                                            : -std::numeric_limits<double>::infinity()) -
                        r * r * inv_two_var;
        best = std::max(best, log_weight[k]);
    }

    Posterior out;
    out.probabilities.resize(n);
    // Every prior-weighted likelihood underflows in linear scale: the measurement is
    // inconsistent with the map.
    if (!(best >= std::log(std::numeric_limits<double>::min()))) {
        std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0 / static_cast<double>(n));
        out.fell_back_to_uniform = true;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        out.probabilities[k] = std::exp(log_weight[k] - best);
    }
    floor_and_normalize(out.probabilities);
    return out;
}

LossParams make_loss_params(const Scene& scene, double alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be non-negative");
    LossParams params;
    params.alpha = alpha;
    params.blocks = scene.num_blocks();
    params.distances.resize(params.blocks * params.blocks);
    const auto& centers = scene.block_centers();
    for (std::size_t n = 0; n < params.blocks; ++n) {
        for (std::size_t k = 0; k < params.blocks; ++k) {
            params.distances[n * params.blocks + k] = (centers[n] - centers[k]).norm();
        }
    }
    return params;
}

std::vector<double> loss_params(std::span<const double> prior_row, std::span<const double> distances,
                                double alpha) {
    const std::size_t n = prior_row.size();
    require(distances.size() == n * n, "loss_params: distance matrix size mismatch");
    std::vector<double> gamma(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            gamma[a * n + b] = distances[a * n + b] * (1.0 + alpha * prior_row[b]);
        }
    }
    return gamma;
}

double confusion_bound(double mu_n, double mu_other, double p_n, double p_other, double sigma) {
    require(sigma > 0.0, "confusion_bound: sigma must be positive");
    require(p_n > 0.0 && p_other > 0.0, "confusion_bound: probabilities must be positive");
    const double delta = std::abs(mu_other - mu_n);
    if (delta < kMeanToleranceDb) {
        // The pairwise region degenerates to the whole line or to nothing.
        return p_other >= p_n ? 1.0 : 0.0;
    }
    const double d = (delta * delta - 2.0 * sigma * sigma * std::log(p_other / p_n)) / (2.0 * sigma * delta);
    return std::clamp(tail_bound(d), 0.0, 1.0);
}

LossEvaluator::LossEvaluator(const BeliefState& beliefs, const LossParams& params, double sigma)
    : users_(beliefs.users()), blocks_(beliefs.blocks()), sigma_(sigma) {
    require(sigma > 0.0, "loss evaluator: sigma must be positive");
    require(params.blocks == blocks_, "loss evaluator: belief and distance sizes differ");
    const std::size_t pairs = blocks_ * (blocks_ - 1) / 2;
    per_user_.resize(users_);
    for (std::size_t i = 0; i < users_; ++i) {
        const auto p = beliefs.row(i);
        for (const double v : p) {
            require(v > 0.0, "loss evaluator: belief entries must be positive (floored)");
        }
        auto& t = per_user_[i];
        t.forward_weight.resize(pairs);
        t.backward_weight.resize(pairs);
        t.forward_scaled.resize(pairs);
        t.backward_scaled.resize(pairs);
        t.scaled_log_ratio.resize(pairs);
        t.other_at_least.resize(pairs);
        t.self_at_least.resize(pairs);
        std::size_t k = 0;
        for (std::size_t n = 0; n < blocks_; ++n) {
            for (std::size_t m = n + 1; m < blocks_; ++m, ++k) {
                const double dist = params.distance(n, m);
                t.forward_weight[k] = p[n] * dist * (1.0 + params.alpha * p[m]);
                t.backward_weight[k] = p[m] * dist * (1.0 + params.alpha * p[n]);
                t.forward_scaled[k] = 0.5 * t.forward_weight[k] * std::sqrt(p[m] / p[n]);
                t.backward_scaled[k] = 0.5 * t.backward_weight[k] * std::sqrt(p[n] / p[m]);
                t.scaled_log_ratio[k] = sigma * std::log(p[m] / p[n]);
                t.other_at_least[k] = p[m] >= p[n];
                t.self_at_least[k] = p[n] >= p[m];
            }
        }
    }
}

double LossEvaluator::operator()(std::span<const double> mean_db) const {
    require(mean_db.size() == blocks_, "loss evaluator: RSS map length mismatch");
    const double inv_two_sigma = 1.0 / (2.0 * sigma_);
    const double* mu = mean_db.data();
    double total = 0.0;
    for (const auto& t : per_user_) {
        const double* fw = t.forward_weight.data();
        const double* bw = t.backward_weight.data();
        const double* fs = t.forward_scaled.data();
        const double* bs = t.backward_scaled.data();
        const double* lr = t.scaled_log_ratio.data();
        std::size_t k = 0;
        for (std::size_t n = 0; n < blocks_; ++n) {
            const double mu_n = mu[n];
            for (std::size_t m = n + 1; m < blocks_; ++m, ++k) {
                const double delta = std::abs(mu[m] - mu_n);
                if (delta < kMeanToleranceDb) {
                    total += (t.other_at_least[k] ? fw[k] : 0.0) + (t.self_at_least[k] ? bw[k] : 0.0);
                    continue;
                }
                const double a = delta * inv_two_sigma;
                const double b = lr[k] / delta;
                if (a >= std::abs(b)) {
                    // Both exponents d = a -+ b are non-negative and
                    // exp(-(a -+ b)^2 / 2) = exp(-(a^2 + b^2) / 2) * exp(+-ab) with exp(ab) = sqrt(p_n' / p_n).
                    const double shared = std::exp(-0.5 * (a * a + b * b));
                    total += (fs[k] + bs[k]) * shared;
                } else {
                    total += fw[k] * tail_bound(a - b) + bw[k] * tail_bound(a + b);
                }
            }
        }
    }
    return total;
}

double positioning_loss(std::span<const double> mean_db, const BeliefState& beliefs,
                        const LossParams& params, double sigma) {
    return LossEvaluator(beliefs, params, sigma)(mean_db);
}

double positioning_loss(const Configuration& config, const BeliefState& beliefs, const GainTable& table,
                        const LossParams& params, double sigma, double tx_power_db) {
    const auto map = mean_rss(table, config, tx_power_db);
    return positioning_loss(map.mean_db, beliefs, params, sigma);
}

double exact_confusion_integral(std::span<const double> mean_db, std::span<const double> prior_row,
                                double sigma, std::size_t n, std::size_t other) {
    const std::size_t size = mean_db.size();
    require(prior_row.size() == size, "exact_confusion_integral: length mismatch");
    require(n < size && other < size, "exact_confusion_integral: index out of range");
    require(sigma > 0.0, "exact_confusion_integral: sigma must be positive");

    // Decision region of `other`: for every k != other,
    //   (s - mu_o)^2 - (s - mu_k)^2 <= 2 sigma^2 ln(p_o / p_k),
    // which is linear in s: 2 (mu_k - mu_o) s <= 2 sigma^2 ln(p_o / p_k) + mu_k^2 - mu_o^2.
    const double mu_o = mean_db[other];
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size; ++k) {
        if (k == other) {
            continue;
        }
        const double mu_k = mean_db[k];
        const double log_ratio = std::log(prior_row[other]) - std::log(prior_row[k]);
        const double slope = 2.0 * (mu_k - mu_o);
        const double rhs = 2.0 * sigma * sigma * log_ratio + mu_k * mu_k - mu_o * mu_o;
        if (std::abs(mu_k - mu_o) < kMeanToleranceDb) {
            if (log_ratio < 0.0) {
                return 0.0;
            }
            continue;
        }
        if (slope > 0.0) {
            hi = std::min(hi, rhs / slope);
        } else {
            lo = std::max(lo, rhs / slope);
        }
    }

    // Beyond 16 sigma the density contributes below 1e-57.
    const double mu = mean_db[n];
    lo = std::max(lo, mu - 16.0 * sigma);
    hi = std::min(hi, mu + 16.0 * sigma);
    if (!(hi > lo)) {
        return 0.0;
    }

    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const auto density = [&](double s) {
        const double z = (s - mu) / sigma;
        return norm * std::exp(-0.5 * z * z);
    };
    // Panels of sigma / 2 keep the peak resolved regardless of where the interval sits.
    const double panel = 0.5 * sigma;
    double total = 0.0;
    for (double a = lo; a < hi; a += panel) {
        const double b = std::min(hi, a + panel);
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(density, a, b, 10, 1e-13);
    }
    return std::clamp(total, 0.0, 1.0);
}

std::size_t map_estimate(std::span<const double> prior_row, std::span<const double> mean_db, double s,
                         double sigma) {
    require(!prior_row.empty() && prior_row.size() == mean_db.size(), "map_estimate: length mismatch");
    require(sigma > 0.0, "map_estimate: sigma must be positive");
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < prior_row.size(); ++k) {
        const double r = s - mean_db[k];
        const double score = (prior_row[k] > 0.0 ? std::log(prior_row[k])
                                                 : -std::numeric_limits<double>::infinity()) -
                             r * r * inv_two_var;
        if (score > best_score) {
            best_score = score;
            best = k;
        }
    }
    return best;
}

double loss_upper_bound(std::size_t users, std::size_t blocks, double alpha, const Vec3& soi_dims) {
    return static_cast<double>(users) * static_cast<double>(blocks) * (1.0 + alpha) * soi_dims.norm();
}

}  // namespace rispos
