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

#include "rispos/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace rispos {

namespace {

int wrap(int value, int modulus) {
    const int r = value % modulus;
    return r < 0 ? r + modulus : r;
}

// min(C^M, cap) without overflow.
std::size_t lattice_size(std::size_t num_elements, int num_states) {
    constexpr std::size_t cap = std::size_t{1} << 62;
    std::size_t size = 1;
    for (std::size_t m = 0; m < num_elements; ++m) {
        if (size > cap / static_cast<std::size_t>(num_states)) {
            return cap;
        }
        size *= static_cast<std::size_t>(num_states);
    }
    return size;
}

}  // namespace

void Objective::evaluate_moves(const Configuration& center, std::span<const Move> moves,
                               std::span<double> losses) const {
    Configuration probe = center;
    for (std::size_t k = 0; k < moves.size(); ++k) {
        const int previous = probe[moves[k].element];
        probe[moves[k].element] = moves[k].state;
        losses[k] = evaluate(probe);
        probe[moves[k].element] = previous;
    }
}

std::vector<Move> unit_moves(const Configuration& c, int num_states) {
    if (num_states < 2) {
        throw std::invalid_argument("unit_moves: need at least two states");
    }
    std::vector<Move> moves;
    moves.reserve(2 * c.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        const int up = wrap(c[m] + 1, num_states);
        const int down = wrap(c[m] - 1, num_states);
        moves.push_back({m, up});
        if (down != up) {
            moves.push_back({m, down});
        }
    }
    return moves;
}

std::vector<Configuration> unit_neighborhood(const Configuration& c, int num_states) {
    std::vector<Configuration> out;
    for (const Move& move : unit_moves(c, num_states)) {
        Configuration n = c;
        n[move.element] = move.state;
        out.push_back(std::move(n));
    }
    return out;
}

void OptimizerSettings::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("optimizer: epsilon must be positive");
    }
    if (z_lower < 1 || z_upper <= z_lower) {
        throw std::invalid_argument("optimizer: need z_upper > z_lower >= 1");
    }
    if (max_lmcs_iterations < 1 || max_restarts < 1) {
        throw std::invalid_argument("optimizer: iteration and restart caps must be positive");
    }
}

LmcsResult lmcs(const Configuration& start, const Objective& objective, int num_states,
                const OptimizerSettings& settings) {
    LmcsResult result;
    result.config = start;
    result.loss = objective.evaluate(start);
    result.evaluations = 1;

    std::vector<double> losses;
    for (std::size_t iteration = 0; iteration < settings.max_lmcs_iterations; ++iteration) {
        const auto moves = unit_moves(result.config, num_states);
        if (moves.empty()) {
            return result;
        }
        losses.resize(moves.size());
        objective.evaluate_moves(result.config, moves, losses);
        result.evaluations += moves.size();

        const auto best = static_cast<std::size_t>(std::min_element(losses.begin(), losses.end()) - losses.begin());
        if (!(losses[best] < result.loss - settings.epsilon)) {
            return result;
        }
        result.config[moves[best].element] = moves[best].state;
        result.loss = losses[best];
        ++result.moves;
    }
    result.truncated = true;
    return result;
}

bool is_local_minimum(const Configuration& c, const Objective& objective, int num_states, double epsilon) {
    const double center = objective.evaluate(c);
    for (const auto& neighbor : unit_neighborhood(c, num_states)) {
        if (center > objective.evaluate(neighbor) + epsilon) {
            return false;
        }
    }
    return true;
}

double descent_ratio(const Configuration& c_f, const Configuration& c, double l_f, double l_c,
                     bool circular, int num_states) {
    if (c_f.size() != c.size()) {
        throw std::invalid_argument("descent_ratio: configuration lengths differ");
    }
    if (circular && num_states < 2) {
        throw std::invalid_argument("descent_ratio: circular distance needs the state count");
    }
    double squared = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        int diff = std::abs(c[m] - c_f[m]);
        if (circular) {
            diff = std::min(diff, num_states - diff);
        }
        squared += static_cast<double>(diff) * diff;
    }
    if (squared == 0.0) {
        throw std::invalid_argument("descent_ratio: configurations are identical");
    }
    return (l_c - l_f) / std::sqrt(squared);
}

bool SortedLocalMinima::contains(const Configuration& c) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.config == c; });
}

bool SortedLocalMinima::insert(Configuration c, double loss) {
    if (contains(c)) {
        return false;
    }
    const auto pos = std::upper_bound(entries_.begin(), entries_.end(), loss,
                                      [](double value, const Entry& e) { return value < e.loss; });
    entries_.insert(pos, Entry{std::move(c), loss});
    return true;
}

Configuration random_configuration(std::size_t num_elements, int num_states, Rng& rng) {
    std::uniform_int_distribution<int> state(0, num_states - 1);
    Configuration c = Configuration::zeros(num_elements);
    for (auto& s : c.states) {
        s = state(rng);
    }
    return c;
}

CoResult co_optimize(const Objective& objective, std::size_t num_elements, int num_states,
                     const OptimizerSettings& settings, Rng& rng) {
    settings.validate();
    if (num_states < 2) {
        throw std::invalid_argument("co_optimize: need at least two states");
    }
    CoResult out;
    const std::size_t space = lattice_size(num_elements, num_states);

    const auto run_lmcs = [&](const Configuration& start) {
        auto r = lmcs(start, objective, num_states, settings);
        out.evaluations += r.evaluations;
        out.lmcs_moves += r.moves;
        out.truncated = out.truncated || r.truncated;
        ++out.lmcs_runs;
        return r;
    };

    // A local minimum not yet in the set, from random starts.
    const auto fresh_minimum = [&]() -> std::optional<LmcsResult> {
        for (std::size_t attempt = 0; attempt < settings.max_restarts; ++attempt) {
            if (out.minima.size() >= space) {
                return std::nullopt;
            }
            auto r = run_lmcs(random_configuration(num_elements, num_states, rng));
            if (!out.minima.contains(r.config)) {
                return r;
            }
            ++out.duplicate_restarts;
        }
        return std::nullopt;
    };

    while (out.minima.size() < settings.z_lower) {
        auto r = fresh_minimum();
        if (!r) {
            out.exhausted = true;
            break;
        }
        out.minima.insert(std::move(r->config), r->loss);
    }

    while (!out.exhausted && out.minima.size() <= settings.z_upper) {
        ++out.global_iterations;
        const auto& entries = out.minima.entries();
        const Configuration c_f = entries.front().config;
        const double l_f = entries.front().loss;

        std::size_t steepest = 1;
        double best_ratio = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < entries.size(); ++k) {
            const double ratio = descent_ratio(c_f, entries[k].config, l_f, entries[k].loss,
                                               settings.circular_distance, num_states);
            if (ratio > best_ratio) {
                best_ratio = ratio;
                steepest = k;
            }
        }

        Configuration direction = Configuration::zeros(num_elements);
        for (std::size_t m = 0; m < num_elements; ++m) {
            direction[m] = wrap(entries[steepest].config[m] - c_f[m], num_states);
        }

        Configuration line_best;
        double line_best_loss = std::numeric_limits<double>::infinity();
        for (int step = 1; step < num_states; ++step) {
            Configuration probe = Configuration::zeros(num_elements);
            for (std::size_t m = 0; m < num_elements; ++m) {
                probe[m] = wrap(c_f[m] + step * direction[m], num_states);
            }
            const double loss = objective.evaluate(probe);
            ++out.evaluations;
            if (loss < line_best_loss || line_best.size() != num_elements) {
                line_best_loss = loss;
                line_best = std::move(probe);
            }
        }

        auto found = run_lmcs(line_best);
        if (!out.minima.contains(found.config)) {
            out.minima.insert(std::move(found.config), found.loss);
            continue;
        }
        ++out.duplicate_restarts;
        auto fresh = fresh_minimum();
        if (!fresh) {
            out.exhausted = true;
            break;
        }
        out.minima.insert(std::move(fresh->config), fresh->loss);
    }

    out.config = out.minima.front().config;
    out.loss = out.minima.front().loss;
    return out;
}

}  // namespace rispos
