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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rispos/channel.hpp"
#include "rispos/scene.hpp"

namespace rispos {

/// Smallest probability a belief entry may hold; keeps log-ratios of priors finite.
inline constexpr double kPriorFloor = 1e-12;
/// Mean-RSS differences below this (dB) are treated as equal means.
inline constexpr double kMeanToleranceDb = 1e-9;

/// Per-user probability rows over the blocks (I x N, row-major).
class BeliefState {
public:
    BeliefState() = default;
    BeliefState(std::size_t users, std::size_t blocks);
    /// Every row equal to 1/N.
    static BeliefState uniform(std::size_t users, std::size_t blocks);

    std::size_t users() const { return users_; }
    std::size_t blocks() const { return blocks_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * blocks_, blocks_};
    }
    std::span<double> row(std::size_t i) { return {values_.data() + i * blocks_, blocks_}; }
    double operator()(std::size_t i, std::size_t n) const { return values_[i * blocks_ + n]; }

    void set_row(std::size_t i, std::span<const double> values);

    friend bool operator==(const BeliefState&, const BeliefState&) = default;

private:
    std::size_t users_ = 0;
    std::size_t blocks_ = 0;
    std::vector<double> values_;
};

/// Clamps entries to `floor` and rescales the rest so the row sums to one while
/// every entry stays >= floor.
void floor_and_normalize(std::span<double> row, double floor = kPriorFloor);

struct Posterior {
    std::vector<double> probabilities;
    /// Set when every prior-weighted likelihood underflowed and the row fell back to uniform.
    bool fell_back_to_uniform = false;
};

/// Bayes update of one user's row with measurement `s` (dB) followed by flooring.
Posterior update_prior(std::span<const double> prior_row, std::span<const double> mean_db,
                       double s, double sigma);

/// Pairwise block-center distances and the belief weight alpha.
struct LossParams {
    double alpha = 1000.0;
    std::size_t blocks = 0;
    std::vector<double> distances;  // N x N, row-major

    double distance(std::size_t n, std::size_t n2) const { return distances[n * blocks + n2]; }
};

LossParams make_loss_params(const Scene& scene, double alpha);

/// gamma[n][n'] = ||r_n - r_n'|| (1 + alpha p_n'), row-major N x N.
std::vector<double> loss_params(std::span<const double> prior_row, std::span<const double> distances,
                                double alpha);

/// Closed-form upper bound on the probability that a user at block n is decided to be at n'
/// (pairwise region, Q-function bound).
double confusion_bound(double mu_n, double mu_other, double p_n, double p_other, double sigma);

/// Hot-path evaluator of the positioning loss for a fixed belief state. Precomputes all
/// belief-dependent pair weights once so each evaluation only depends on the RSS map.
class LossEvaluator {
public:
    LossEvaluator(const BeliefState& beliefs, const LossParams& params, double sigma);

    double operator()(std::span<const double> mean_db) const;

    std::size_t blocks() const { return blocks_; }
    std::size_t users() const { return users_; }

private:
    struct PairTerms {
        // For the unordered pair (n < n'): weight of the (n -> n') term, of the (n' -> n) term,
        // the same weights times sqrt(p_n' / p_n) / 2 and sqrt(p_n / p_n') / 2,
        // sigma * ln(p_n' / p_n), and whether p_n' >= p_n.
        std::vector<double> forward_weight;
        std::vector<double> backward_weight;
        std::vector<double> forward_scaled;
        std::vector<double> backward_scaled;
        std::vector<double> scaled_log_ratio;
        std::vector<unsigned char> other_at_least;
        std::vector<unsigned char> self_at_least;
    };

    std::size_t users_;
    std::size_t blocks_;
    double sigma_;
    std::vector<PairTerms> per_user_;
};

/// Sum over users and ordered block pairs of p * gamma * confusion_bound for the given map.
double positioning_loss(std::span<const double> mean_db, const BeliefState& beliefs,
                        const LossParams& params, double sigma);

double positioning_loss(const Configuration& config, const BeliefState& beliefs,
                        const GainTable& table, const LossParams& params, double sigma,
                        double tx_power_db);

/// Probability mass of block n's RSS density over the exact decision region of block n'
/// (intersection of all pairwise half-lines), integrated by adaptive quadrature.
double exact_confusion_integral(std::span<const double> mean_db, std::span<const double> prior_row,
                                double sigma, std::size_t n, std::size_t other);

/// argmax_n prior[n] * likelihood(s | n); ties go to the lowest index.
std::size_t map_estimate(std::span<const double> prior_row, std::span<const double> mean_db,
                         double s, double sigma);

/// I N (1 + alpha) * diagonal of the SOI.
double loss_upper_bound(std::size_t users, std::size_t blocks, double alpha, const Vec3& soi_dims);

}  // namespace rispos
