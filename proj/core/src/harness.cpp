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

#include "rispos/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace rispos {

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

std::size_t as_count(double value, const char* what, std::size_t minimum) {
    require(std::isfinite(value) && value == std::round(value) && value >= static_cast<double>(minimum),
            std::string(what) + " must be an integer >= " + std::to_string(minimum));
    return static_cast<std::size_t>(value);
}

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format floating-point value");
    }
    return std::string(buffer, end);
}

// Scene, gain table and loss parameters of one sweep point, shared read-only by its trials.
struct PreparedPoint {
    ExperimentSpec spec;
    Scene scene;
    GainTable table;
    LossParams params;

    explicit PreparedPoint(ExperimentSpec s)
        : spec(std::move(s)),
          scene(build_scene(spec.scene)),
          table(scene, ReflectionModel(spec.scene.num_states, spec.scene.reflection)),
          params(make_loss_params(scene, spec.protocol.alpha)) {}
};

TrialReport run_prepared_trial(const PreparedPoint& point, Scheme scheme, std::size_t trial,
                               std::uint64_t master_seed) {
    TrialReport report;
    report.scheme = scheme;
    report.trial = trial;
    report.seed = trial_seed(master_seed, trial);
    report.truth = draw_ground_truth(report.seed, point.spec.protocol.users, point.scene.num_blocks());

    ProtocolConfig cfg = point.spec.protocol;
    cfg.seed = report.seed;

    PositioningRun run;
    switch (scheme) {
        case Scheme::proposed: {
            OptimizedPolicy policy(point.scene, point.table, point.params, cfg.optimizer);
            run = run_positioning(cfg, point.scene, report.truth, policy);
            break;
        }
        case Scheme::random_config: {
            RandomConfigPolicy policy(point.scene, point.table, point.params);
            run = run_positioning(cfg, point.scene, report.truth, policy);
            break;
        }
        case Scheme::no_ris: {
            MultiAntennaPolicy policy(point.scene, point.params, point.spec.no_ris_antennas);
            run = run_positioning(cfg, point.scene, report.truth, policy);
            break;
        }
    }

    report.estimates = run.estimates;
    report.error = positioning_error(run.estimates, report.truth, point.scene);
    report.optimization_seconds = run.total_optimization_seconds();
    report.evaluations = run.total_evaluations();
    report.lmcs_moves = run.total_lmcs_moves();
    for (const auto& record : run.records) {
        report.loss_trace.push_back(record.loss);
    }
    report.records = std::move(run.records);
    return report;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::proposed:
            return "proposed";
        case Scheme::random_config:
            return "random_config";
        case Scheme::no_ris:
            return "no_ris";
    }
    return "unknown";
}

std::string_view to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::sigma:
            return "sigma";
        case SweepParameter::elements:
            return "M";
        case SweepParameter::states:
            return "C";
        case SweepParameter::cycles:
            return "K";
        case SweepParameter::users:
            return "I";
        case SweepParameter::ris_distance:
            return "d_S";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (const auto s : {Scheme::proposed, Scheme::random_config, Scheme::no_ris}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

SweepParameter parse_sweep_parameter(std::string_view name) {
    for (const auto p : {SweepParameter::sigma, SweepParameter::elements, SweepParameter::states,
                         SweepParameter::cycles, SweepParameter::users, SweepParameter::ris_distance}) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
    scene.validate();
    protocol.validate();
    require(no_ris_antennas >= 1, "no-RIS baseline needs at least one antenna");
}

ExperimentSpec apply_parameter(const ExperimentSpec& base, SweepParameter parameter, double value) {
    ExperimentSpec spec = base;
    switch (parameter) {
        case SweepParameter::sigma:
            require(std::isfinite(value) && value > 0.0, "sigma must be positive");
            spec.scene.noise_sigma_db = value;
            break;
        case SweepParameter::elements: {
            const auto m = as_count(value, "M", 1);
            // Most square rows x cols factorization.
            auto rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
            while (m % rows != 0) {
                --rows;
            }
            spec.scene.ris_grid = {static_cast<int>(rows), static_cast<int>(m / rows)};
            break;
        }
        case SweepParameter::states:
            spec.scene.num_states = static_cast<int>(as_count(value, "C", 2));
            break;
        case SweepParameter::cycles:
            spec.protocol.cycles = as_count(value, "K", 1);
            break;
        case SweepParameter::users:
            spec.protocol.users = as_count(value, "I", 1);
            break;
        case SweepParameter::ris_distance:
            require(std::isfinite(value) && value > 0.0, "d_S must be positive (the SOI must not cross the RIS plane)");
            spec.scene.soi_center.x() = spec.scene.ris_center.x() + value + 0.5 * spec.scene.soi_dims.x();
            break;
    }
    spec.validate();
    return spec;
}

RandomConfigPolicy::RandomConfigPolicy(const Scene& scene, const GainTable& table, const LossParams& params)
    : scene_(scene), table_(table), params_(params) {}

PatternDecision RandomConfigPolicy::choose(const BeliefState& beliefs, std::size_t /*cycle*/, Rng& rng) {
    PatternDecision decision;
    decision.config = random_configuration(table_.num_elements(), table_.num_states(), rng);
    decision.mean_db = mean_rss(table_, decision.config, scene_.tx_power_db()).mean_db;
    decision.loss = positioning_loss(decision.mean_db, beliefs, params_, scene_.sigma());
    return decision;
}

MultiAntennaPolicy::MultiAntennaPolicy(const Scene& scene, const LossParams& params, std::size_t antennas)
    : scene_(scene), params_(params), antennas_(antennas) {
    require(antennas >= 1, "no-RIS baseline needs at least one antenna");
    const double lambda = scene.wavelength();
    const auto& g = scene.gains();
    const std::size_t blocks = scene.num_blocks();
    const double amplitude = lambda / (4.0 * std::numbers::pi) * std::sqrt(g.ap_to_block * g.block_to_ap) /
                             std::sqrt(static_cast<double>(antennas));
    antenna_gains_.resize(antennas * blocks);
    for (std::size_t a = 0; a < antennas; ++a) {
        Vec3 position = scene.ap_position();
        position.y() += (static_cast<double>(a) - 0.5 * static_cast<double>(antennas - 1)) * 0.5 * lambda;
        for (std::size_t n = 0; n < blocks; ++n) {
            const double l = (scene.block_center(n) - position).norm();
            require(l >= 1e-9, "no-RIS antenna coincides with a block center");
            antenna_gains_[a * blocks + n] = std::polar(amplitude / l, -2.0 * std::numbers::pi * l / lambda);
        }
    }
}

std::vector<double> MultiAntennaPolicy::mean_rss_for_phases(std::span<const double> phases) const {
    require(phases.size() == antennas_, "one phase per antenna is required");
    const std::size_t blocks = scene_.num_blocks();
    std::vector<Complex> field(blocks);
    for (std::size_t a = 0; a < antennas_; ++a) {
        const Complex rotation = std::polar(1.0, phases[a]);
        for (std::size_t n = 0; n < blocks; ++n) {
            field[n] += antenna_gains_[a * blocks + n] * rotation;
        }
    }
    std::vector<double> mean_db(blocks);
    field_to_mean_rss(field, scene_.tx_power_db(), mean_db);
    return mean_db;
}

PatternDecision MultiAntennaPolicy::choose(const BeliefState& beliefs, std::size_t /*cycle*/, Rng& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(antennas_);
    for (auto& p : phases) {
        p = phase(rng);
    }
    PatternDecision decision;
    decision.mean_db = mean_rss_for_phases(phases);
    decision.loss = positioning_loss(decision.mean_db, beliefs, params_, scene_.sigma());
    return decision;
}

PositioningRun random_config_baseline(const ProtocolConfig& cfg, const Scene& scene, const GainTable& table,
                                      std::span<const std::size_t> true_blocks) {
    const auto params = make_loss_params(scene, cfg.alpha);
    RandomConfigPolicy policy(scene, table, params);
    return run_positioning(cfg, scene, true_blocks, policy);
}

PositioningRun no_ris_baseline(const ProtocolConfig& cfg, const Scene& scene,
                               std::span<const std::size_t> true_blocks, std::size_t antennas) {
    const auto params = make_loss_params(scene, cfg.alpha);
    MultiAntennaPolicy policy(scene, params, antennas);
    return run_positioning(cfg, scene, true_blocks, policy);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(StreamRole::trial), trial});
}

std::vector<std::size_t> draw_ground_truth(std::uint64_t seed, std::size_t users, std::size_t blocks) {
    require(blocks > 0, "cannot draw ground truth without blocks");
    Rng rng = make_stream(seed, {static_cast<std::uint64_t>(StreamRole::ground_truth)});
    std::uniform_int_distribution<std::size_t> block(0, blocks - 1);
    std::vector<std::size_t> truth(users);
    for (auto& b : truth) {
        b = block(rng);
    }
    return truth;
}

TrialReport run_trial(const ExperimentSpec& spec, Scheme scheme, std::size_t trial, std::uint64_t master_seed) {
    spec.validate();
    const PreparedPoint point(spec);
    return run_prepared_trial(point, scheme, trial, master_seed);
}

void SweepSpec::validate() const {
    base.validate();
    require(!values.empty(), "sweep needs at least one parameter value");
    require(trials >= 1, "sweep needs at least one trial per point");
    require(!schemes.empty(), "sweep needs at least one scheme");
    for (std::size_t a = 0; a < schemes.size(); ++a) {
        for (std::size_t b = a + 1; b < schemes.size(); ++b) {
            require(schemes[a] != schemes[b], "sweep lists a scheme twice");
        }
    }
    for (const double v : values) {
        apply_parameter(base, parameter, v);
    }
}

const PointResult& SweepResult::at(Scheme scheme, double value) const {
    for (const auto& row : rows) {
        if (row.scheme == scheme && row.value == value) {
            return row;
        }
    }
    throw std::out_of_range("no sweep row for the requested scheme and value");
}

PointResult aggregate(Scheme scheme, double value, std::span<const TrialReport> reports, bool record_timing) {
    require(!reports.empty(), "cannot aggregate zero trials");
    PointResult row;
    row.scheme = scheme;
    row.value = value;
    const auto n = static_cast<double>(reports.size());
    double seconds = 0.0;
    double evaluations = 0.0;
    for (const auto& r : reports) {
        row.errors.push_back(r.error);
        seconds += r.optimization_seconds;
        evaluations += static_cast<double>(r.evaluations);
    }
    row.mean_error = std::accumulate(row.errors.begin(), row.errors.end(), 0.0) / n;
    if (reports.size() > 1) {
        double ss = 0.0;
        for (const double e : row.errors) {
            ss += (e - row.mean_error) * (e - row.mean_error);
        }
        row.stderr_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    row.mean_opt_seconds = record_timing ? seconds / n : 0.0;
    row.mean_evaluations = evaluations / n;
    return row;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    std::vector<std::unique_ptr<PreparedPoint>> points;
    points.reserve(spec.values.size());
    for (const double v : spec.values) {
        points.push_back(std::make_unique<PreparedPoint>(apply_parameter(spec.base, spec.parameter, v)));
    }

    const std::size_t per_point = spec.trials;
    const std::size_t total = spec.schemes.size() * points.size() * per_point;
    std::vector<TrialReport> reports(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    // Task t -> (scheme, point, trial), scheme-major so rows come out grouped by scheme.
    const auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) {
                return;
            }
            const std::size_t trial = task % per_point;
            const std::size_t point = (task / per_point) % points.size();
            const std::size_t scheme = task / (per_point * points.size());
            try {
                reports[task] = run_prepared_trial(*points[point], spec.schemes[scheme], trial, spec.seed);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(total);
                return;
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    SweepResult result;
    result.parameter = spec.parameter;
    result.trials = spec.trials;
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            const std::size_t offset = (s * points.size() + p) * per_point;
            result.rows.push_back(aggregate(spec.schemes[s], spec.values[p],
                                            std::span<const TrialReport>(reports).subspan(offset, per_point),
                                            spec.record_timing));
        }
    }
    if (spec.write_trials) {
        result.trials_detail = std::move(reports);
        if (!spec.record_timing) {
            for (auto& r : result.trials_detail) {
                r.optimization_seconds = 0.0;
                for (auto& record : r.records) {
                    record.optimization_seconds = 0.0;
                }
            }
        }
    }
    return result;
}

PairedComparison paired_less_test(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "paired test needs equal sample sizes");
    require(a.size() >= 2, "paired test needs at least two pairs");
    PairedComparison out;
    out.n = a.size();
    const auto n = static_cast<double>(out.n);
    std::vector<double> diff(out.n);
    for (std::size_t k = 0; k < out.n; ++k) {
        diff[k] = a[k] - b[k];
    }
    out.mean_difference = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
    double ss = 0.0;
    for (const double d : diff) {
        ss += (d - out.mean_difference) * (d - out.mean_difference);
    }
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    if (se == 0.0) {
        out.t_statistic = out.mean_difference < 0.0   ? -std::numeric_limits<double>::infinity()
                          : out.mean_difference > 0.0 ? std::numeric_limits<double>::infinity()
                                                      : 0.0;
        out.p_value = out.mean_difference < 0.0 ? 0.0 : 1.0;
        return out;
    }
    out.t_statistic = out.mean_difference / se;
    const boost::math::students_t dist(n - 1.0);
    out.p_value = boost::math::cdf(dist, out.t_statistic);
    return out;
}

std::string to_csv(const SweepResult& result) {
    std::string out = "scheme,param,value,mean_error_m,stderr_m,mean_opt_seconds,mean_evals\n";
    for (const auto& row : result.rows) {
        out += to_string(row.scheme);
        out += ',';
        out += to_string(result.parameter);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += format_double(row.mean_error);
        out += ',';
        out += format_double(row.stderr_error);
        out += ',';
        out += format_double(row.mean_opt_seconds);
        out += ',';
        out += format_double(row.mean_evaluations);
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const SweepSpec& spec) {
    const auto& p = spec.base.protocol;
    nlohmann::json schemes = nlohmann::json::array();
    for (const auto s : spec.schemes) {
        schemes.push_back(std::string(to_string(s)));
    }
    return nlohmann::json{
        {"scene", spec.base.scene},
        {"protocol",
         {{"cycles", p.cycles},
          {"users", p.users},
          {"alpha", p.alpha},
          {"epsilon", p.optimizer.epsilon},
          {"z_lower", p.optimizer.z_lower},
          {"z_upper", p.optimizer.z_upper},
          {"max_lmcs_iterations", p.optimizer.max_lmcs_iterations},
          {"max_restarts", p.optimizer.max_restarts},
          {"circular_distance", p.optimizer.circular_distance},
          {"timing_s",
           {{"cycle", p.timing.cycle},
            {"optimization", p.timing.optimization},
            {"broadcast", p.timing.broadcast},
            {"measurement", p.timing.measurement}}}}},
        {"no_ris_antennas", spec.base.no_ris_antennas},
        {"sweep", {{"parameter", std::string(to_string(spec.parameter))}, {"values", spec.values}}},
        {"trials", spec.trials},
        {"schemes", schemes},
        {"seed", spec.seed},
        {"output", spec.output},
        {"timing", spec.record_timing ? "wall" : "none"},
        {"write_trials", spec.write_trials},
    };
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    require(j.is_object(), "sweep spec must be a JSON object");
    SweepSpec spec;
    if (j.contains("profile")) {
        const auto profile = j.at("profile").get<std::string>();
        require(profile == "desk" || profile == "room", "profile must be 'desk' or 'room'");
        spec.base.scene = profile == "room" ? SceneSpec::room_profile() : SceneSpec::desk_profile();
    }
    if (j.contains("scene_file")) {
        spec.base.scene = load_scene_spec(base_dir / j.at("scene_file").get<std::string>());
    }
    if (j.contains("scene")) {
        from_json(j.at("scene"), spec.base.scene);
    }
    if (j.contains("protocol")) {
        const auto& p = j.at("protocol");
        auto& cfg = spec.base.protocol;
        cfg.cycles = p.value("cycles", cfg.cycles);
        cfg.users = p.value("users", cfg.users);
        cfg.alpha = p.value("alpha", cfg.alpha);
        cfg.optimizer.epsilon = p.value("epsilon", cfg.optimizer.epsilon);
        cfg.optimizer.z_lower = p.value("z_lower", cfg.optimizer.z_lower);
        cfg.optimizer.z_upper = p.value("z_upper", cfg.optimizer.z_upper);
        cfg.optimizer.max_lmcs_iterations = p.value("max_lmcs_iterations", cfg.optimizer.max_lmcs_iterations);
        cfg.optimizer.max_restarts = p.value("max_restarts", cfg.optimizer.max_restarts);
        cfg.optimizer.circular_distance = p.value("circular_distance", cfg.optimizer.circular_distance);
        if (p.contains("timing_s")) {
            const auto& t = p.at("timing_s");
            cfg.timing.cycle = t.value("cycle", cfg.timing.cycle);
            cfg.timing.optimization = t.value("optimization", cfg.timing.optimization);
            cfg.timing.broadcast = t.value("broadcast", cfg.timing.broadcast);
            cfg.timing.measurement = t.value("measurement", cfg.timing.measurement);
        }
    }
    spec.base.no_ris_antennas = j.value("no_ris_antennas", spec.base.no_ris_antennas);
    require(j.contains("sweep"), "sweep spec needs a 'sweep' object");
    const auto& sweep = j.at("sweep");
    spec.parameter = parse_sweep_parameter(sweep.at("parameter").get<std::string>());
    spec.values = sweep.at("values").get<std::vector<double>>();
    spec.trials = j.value("trials", spec.trials);
    if (j.contains("schemes")) {
        spec.schemes.clear();
        for (const auto& s : j.at("schemes")) {
            spec.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
    }
    spec.seed = j.value("seed", spec.seed);
    spec.output = j.value("output", spec.output);
    if (j.contains("timing")) {
        const auto timing = j.at("timing").get<std::string>();
        require(timing == "wall" || timing == "none", "timing must be 'wall' or 'none'");
        spec.record_timing = timing == "wall";
    }
    spec.write_trials = j.value("write_trials", spec.write_trials);
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open sweep spec " + path.string());
    }
    const auto j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    return sweep_spec_from_json(j, path.parent_path());
}

nlohmann::json to_json(const TrialReport& report) {
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& r : report.records) {
        std::vector<std::size_t> map_blocks;
        for (std::size_t i = 0; i < r.posterior.users(); ++i) {
            const auto row = r.posterior.row(i);
            map_blocks.push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
        }
        cycles.push_back({{"cycle", r.cycle},
                          {"configuration", r.config.states},
                          {"measurements_db", r.measurements},
                          {"loss", r.loss},
                          {"evaluations", r.evaluations},
                          {"lmcs_moves", r.lmcs_moves},
                          {"optimization_seconds", r.optimization_seconds},
                          {"posterior_argmax", map_blocks},
                          {"fallback_users", r.fallback_users}});
    }
    return nlohmann::json{{"scheme", std::string(to_string(report.scheme))},
                          {"trial", report.trial},
                          {"seed", report.seed},
                          {"truth", report.truth},
                          {"estimates", report.estimates},
                          {"error_m", report.error},
                          {"loss_trace", report.loss_trace},
                          {"optimization_seconds", report.optimization_seconds},
                          {"evaluations", report.evaluations},
                          {"lmcs_moves", report.lmcs_moves},
                          {"cycles", cycles}};
}

ReportFiles emit_report(const SweepResult& result, const SweepSpec& spec, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << text;
        if (!out) {
            throw std::runtime_error("write failed for " + path.string());
        }
    };

    ReportFiles files{dir / "sweep.csv", dir / "manifest.json", {}};
    write(files.csv, to_csv(result));
    write(files.manifest, to_json(spec).dump(2) + "\n");
    if (spec.write_trials) {
        files.trials = dir / "trials.jsonl";
        std::string lines;
        for (const auto& t : result.trials_detail) {
            lines += to_json(t).dump();
            lines += '\n';
        }
        write(files.trials, lines);
    }
    return files;
}

}  // namespace rispos
