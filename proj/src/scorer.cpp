#include "vmad/scorer.hpp"

#include "vmad/errors.hpp"
#include "vmad/integrate.hpp"
#include "vmad/math_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vmad {

AggregatorSpec AggregatorSpec::parse(const std::string& text) {
    AggregatorSpec spec;
    if (text == "min") {
        spec.kind = Kind::min;
        return spec;
    }
    if (text == "avg") {
        spec.kind = Kind::avg;
        return spec;
    }
    if (text.size() >= 2 && text[0] == 'p') {
        char* end = nullptr;
        const double pct = std::strtod(text.c_str() + 1, &end);
        if (end && *end == '\0' && pct > 0.0 && pct <= 100.0) {
            spec.kind = Kind::percentile;
            spec.alpha = pct / 100.0;
            return spec;
        }
    }
    throw std::invalid_argument("aggregator: expected min, avg, or pNN, got '" + text + "'");
}

std::string AggregatorSpec::to_string() const {
    switch (kind) {
    case Kind::min: return "min";
    case Kind::avg: return "avg";
    case Kind::percentile: {
        std::ostringstream os;
        os << "p" << format_double(alpha * 100.0);
        return os.str();
    }
    }
    return "min";
}

void ScoringConfig::validate() const {
    if (paths == 0) throw std::invalid_argument("scoring: paths must be >= 1");
    if (steps == 0) throw std::invalid_argument("scoring: steps must be >= 1");
    if (weight_exponent < 0.0) throw std::invalid_argument("scoring: weight exponent must be >= 0");
    if (!(top_fraction > 0.0) || top_fraction > 1.0)
        throw std::invalid_argument("scoring: top fraction must be in (0, 1]");
    if (aggregator.kind == AggregatorSpec::Kind::percentile &&
        (!(aggregator.alpha > 0.0) || aggregator.alpha > 1.0))
        throw std::invalid_argument("scoring: percentile alpha must be in (0, 1]");
}

nlohmann::json ScoringConfig::to_json() const {
    return nlohmann::json{{"paths", paths},
                          {"steps", steps},
                          {"aggregator", aggregator.to_string()},
                          {"weight_exponent", weight_exponent},
                          {"top_fraction", top_fraction},
                          {"seed", seed}};
}

ScoringConfig ScoringConfig::from_json(const nlohmann::json& j) {
    ScoringConfig c;
    if (j.contains("paths")) c.paths = j.at("paths").get<std::size_t>();
    if (j.contains("steps")) c.steps = j.at("steps").get<std::size_t>();
    if (j.contains("aggregator")) c.aggregator = AggregatorSpec::parse(j.at("aggregator").get<std::string>());
    if (j.contains("weight_exponent")) c.weight_exponent = j.at("weight_exponent").get<double>();
    if (j.contains("top_fraction")) c.top_fraction = j.at("top_fraction").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

void Target::validate() const {
    if (width == 0 || height == 0 || channels == 0)
        throw std::invalid_argument("target: dimensions must be >= 1");
    if (values.size() != flat_size())
        throw std::invalid_argument("target: value count does not match dimensions");
    if (!mask.empty() && mask.size() != elements())
        throw std::invalid_argument("target: mask must have one entry per element");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("target: non-finite value");
    for (auto m : mask)
        if (m > 1) throw std::invalid_argument("target: mask must be binary");
}

Target Target::from_point(const Vec& p) {
    Target t;
    t.width = t.height = 1;
    t.channels = p.size();
    t.values = p;
    return t;
}

nlohmann::json ScoreReport::to_json() const {
    return nlohmann::json{{"score", score},
                          {"heatmap_max", heatmap.values.empty()
                                              ? 0.0
                                              : *std::max_element(heatmap.values.begin(),
                                                                  heatmap.values.end())},
                          {"width", heatmap.width},
                          {"height", heatmap.height},
                          {"field_evaluations", field_evaluations},
                          {"config", config.to_json()}};
}

Vec affine_path_point(const Vec& x0, const Vec& y, double t) {
    if (x0.size() != y.size())
        throw std::invalid_argument("affine_path_point: shape mismatch");
    Vec out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = (1.0 - t) * x0[i] + t * y[i];
    return out;
}

std::vector<double> time_grid(std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("time_grid: steps must be >= 1");
    std::vector<double> times(steps);
    for (std::size_t j = 1; j <= steps; ++j)
        times[j - 1] = static_cast<double>(j) / static_cast<double>(steps + 1);
    return times;
}

std::vector<double> residual_map(const VelocityField& field, const Vec& x0, const Target& y,
                                 double t) {
    if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("residual_map: t must lie in (0, 1)");
    y.validate();
    if (x0.size() != y.flat_size())
        throw std::invalid_argument("residual_map: seed shape mismatch");
    const Vec x_t = affine_path_point(x0, y.values, t);
    const Vec v = field(x_t, t);
    if (v.size() != y.flat_size())
        throw std::invalid_argument("residual_map: field output shape mismatch");
    std::vector<double> z(y.elements(), 0.0);
    for (std::size_t i = 0; i < y.elements(); ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < y.channels; ++c) {
            const std::size_t idx = i * y.channels + c;
            const double vc = v[idx];
            if (!std::isfinite(vc)) {
                std::ostringstream os;
                os << "non-finite field output at t=" << t << ", element i=" << i;
                throw numeric_error(os.str());
            }
            const double diff = vc - (y.values[idx] - x0[idx]);
            acc += diff * diff;
        }
        z[i] = acc;
    }
    return z;
}

std::vector<double> aggregate_paths(std::span<const std::vector<double>> per_path,
                                    const AggregatorSpec& agg) {
    if (per_path.empty()) throw std::invalid_argument("aggregate_paths: need at least one path");
    const std::size_t n = per_path.front().size();
    for (const auto& m : per_path)
        if (m.size() != n) throw std::invalid_argument("aggregate_paths: map size mismatch");
    std::vector<double> out(n, 0.0);
    std::vector<double> column(per_path.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < per_path.size(); ++k) column[k] = per_path[k][i];
        switch (agg.kind) {
        case AggregatorSpec::Kind::min:
            out[i] = *std::min_element(column.begin(), column.end());
            break;
        case AggregatorSpec::Kind::avg:
            out[i] = mean(column);
            break;
        case AggregatorSpec::Kind::percentile:
            out[i] = order_statistic(column, agg.alpha);
            break;
        }
    }
    return out;
}

std::vector<double> build_heatmap(std::span<const std::vector<double>> deltas,
                                  std::span<const double> times, double weight_exponent) {
    if (deltas.size() != times.size())
        throw std::invalid_argument("build_heatmap: need one delta map per time");
    if (deltas.empty()) throw std::invalid_argument("build_heatmap: empty input");
    const std::size_t n = deltas.front().size();
    std::vector<double> h(n, 0.0);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (deltas[j].size() != n)
            throw std::invalid_argument("build_heatmap: delta map size mismatch");
        const double w = std::pow(times[j], weight_exponent);
        for (std::size_t i = 0; i < n; ++i) h[i] += w * deltas[j][i];
    }
    const double inv = 1.0 / static_cast<double>(times.size());
    for (double& v : h) v *= inv;
    return h;
}

double image_score(std::span<const double> heatmap, double top_fraction) {
    if (heatmap.empty()) throw std::invalid_argument("image_score: empty heatmap");
    if (!(top_fraction > 0.0) || top_fraction > 1.0)
        throw std::invalid_argument("image_score: top fraction must be in (0, 1]");
    const std::size_t n = heatmap.size();
    std::size_t top = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(n) - 1e-9));
    top = std::clamp<std::size_t>(top, 1, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return heatmap[a] > heatmap[b]; // stable: ties keep index order
    });
    double tail = 0.0;
    for (std::size_t r = 0; r < top; ++r) tail += heatmap[order[r]];
    return heatmap[order[0]] + tail / static_cast<double>(top);
}

namespace {

void run_over_paths(std::size_t paths, std::size_t workers,
                    const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || paths <= 1) {
        for (std::size_t k = 0; k < paths; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t n_threads = std::min(workers, paths);
    for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = next.fetch_add(1); k < paths; k = next.fetch_add(1)) body(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

ScoreReport score_target(const VelocityField& field, const Target& y,
                         const ScoringConfig& config, MismatchCube* cube_out,
                         std::size_t workers) {
    config.validate();
    y.validate();
    const auto times = time_grid(config.steps);
    const std::size_t n_elems = y.elements();

    MismatchCube cube;
    cube.paths = config.paths;
    cube.steps = config.steps;
    cube.elements = n_elems;
    cube.z.assign(config.paths * config.steps * n_elems, 0.0);

    const RngState master = RngState::seeded(config.seed);
    run_over_paths(config.paths, workers, [&](std::size_t k) {
        // Path k's seed stream depends only on (seed, k), so a K+1 run
        // shares the first K paths.
        RngState path_rng = master.split(k);
        const Vec x0 = sample_standard_normal(y.flat_size(), path_rng);
        for (std::size_t j = 0; j < times.size(); ++j) {
            std::vector<double> z;
            try {
                z = residual_map(field, x0, y, times[j]);
            } catch (const numeric_error& e) {
                std::ostringstream os;
                os << "path k=" << k << ", time j=" << j << ": " << e.what();
                throw numeric_error(os.str());
            }
            std::copy(z.begin(), z.end(), cube.z.begin() + static_cast<std::ptrdiff_t>(
                                              (k * cube.steps + j) * n_elems));
        }
    });

    std::vector<std::vector<double>> deltas(config.steps);
    std::vector<std::vector<double>> per_path(config.paths, std::vector<double>(n_elems));
    for (std::size_t j = 0; j < config.steps; ++j) {
        for (std::size_t k = 0; k < config.paths; ++k)
            for (std::size_t i = 0; i < n_elems; ++i) per_path[k][i] = cube.at(k, j, i);
        deltas[j] = aggregate_paths(per_path, config.aggregator);
    }

    ScoreReport report;
    report.config = config;
    report.heatmap.width = y.width;
    report.heatmap.height = y.height;
    report.heatmap.values = build_heatmap(deltas, times, config.weight_exponent);
    report.score = image_score(report.heatmap.values, config.top_fraction);
    report.field_evaluations = static_cast<std::uint64_t>(config.paths) * config.steps;
    if (cube_out) *cube_out = std::move(cube);
    return report;
}

Heatmap reconflow_score(const VelocityField& field, const Target& y,
                        const ScoringConfig& config, double t_init, std::size_t euler_steps) {
    config.validate();
    y.validate();
    if (!(t_init > 0.0) || !(t_init < 1.0))
        throw std::invalid_argument("reconflow_score: t_init must lie in (0, 1)");
    const std::size_t n_elems = y.elements();
    Heatmap h;
    h.width = y.width;
    h.height = y.height;
    h.values.assign(n_elems, std::numeric_limits<double>::infinity());

    const RngState master = RngState::seeded(config.seed);
    for (std::size_t k = 0; k < config.paths; ++k) {
        RngState path_rng = master.split(k);
        const Vec x0 = sample_standard_normal(y.flat_size(), path_rng);
        const Vec start = affine_path_point(x0, y.values, t_init);
        const Vec yhat = integrate_euler(field, start, t_init, 1.0, euler_steps);
        for (std::size_t i = 0; i < n_elems; ++i) {
            double acc = 0.0;
            for (std::size_t c = 0; c < y.channels; ++c) {
                const std::size_t idx = i * y.channels + c;
                const double diff = y.values[idx] - yhat[idx];
                acc += diff * diff;
            }
            h.values[i] = std::min(h.values[i], std::sqrt(acc));
        }
    }
    return h;
}

void write_cube_csv(const std::filesystem::path& path, const MismatchCube& cube,
                    const std::string& meta) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cube.z.size());
    for (std::size_t k = 0; k < cube.paths; ++k)
        for (std::size_t j = 0; j < cube.steps; ++j)
            for (std::size_t i = 0; i < cube.elements; ++i)
                rows.push_back({std::to_string(k), std::to_string(j), std::to_string(i),
                                format_double(cube.at(k, j, i))});
    write_table_csv(path, "k,j,i,Z", rows, meta);
}

} // namespace vmad
