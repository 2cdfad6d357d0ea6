#pragma once

#include "vmad/csv.hpp"
#include "vmad/velocity_field.hpp"

#include <json.hpp>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vmad {

// Path aggregation across the K seeds: minimum, average, or the
// ceil(alpha*K)-th order statistic.
struct AggregatorSpec {
    enum class Kind { min, avg, percentile };
    Kind kind = Kind::min;
    double alpha = 0.1; // percentile level, (0, 1]

    // Accepts "min", "avg", and "pNN" percent forms ("p10", "p25").
    static AggregatorSpec parse(const std::string& text);
    std::string to_string() const;
};

struct ScoringConfig {
    std::size_t paths = 10;  // K
    std::size_t steps = 10;  // T interior times
    AggregatorSpec aggregator{};
    double weight_exponent = 2.0; // w(t) = t^exponent
    double top_fraction = 0.01;   // share of elements in the image-score tail
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static ScoringConfig from_json(const nlohmann::json& j);
};

// Scoring target: a grid of elements with c channels each. A bare d-dim
// point is one element with d channels (width = height = 1).
struct Target {
    std::size_t width = 1;
    std::size_t height = 1;
    std::size_t channels = 1;
    std::vector<double> values;     // (y*width + x)*channels + c
    std::vector<std::uint8_t> mask; // per element, empty when absent

    std::size_t elements() const { return width * height; }
    std::size_t flat_size() const { return width * height * channels; }
    void validate() const;

    static Target from_point(const Vec& p);
};

struct Heatmap {
    std::size_t width = 1;
    std::size_t height = 1;
    std::vector<double> values; // per element

    GridData to_grid() const { return GridData{width, height, 1, values}; }
};

// Per-(path, time, element) squared velocity residuals.
struct MismatchCube {
    std::size_t paths = 0;
    std::size_t steps = 0;
    std::size_t elements = 0;
    std::vector<double> z; // (k*steps + j)*elements + i

    double at(std::size_t k, std::size_t j, std::size_t i) const {
        return z[(k * steps + j) * elements + i];
    }
};

struct ScoreReport {
    Heatmap heatmap;
    double score = 0.0;
    ScoringConfig config;
    std::uint64_t field_evaluations = 0;

    nlohmann::json to_json() const;
};

// (1-t) x0 + t y componentwise.
Vec affine_path_point(const Vec& x0, const Vec& y, double t);

// T evenly spaced interior times {j/(T+1) : j = 1..T}; excludes 0 and 1.
std::vector<double> time_grid(std::size_t steps);

// Per element i: squared channel-norm of v(x_t, t)(i) - (y - x0)(i).
// Throws numeric_error naming (t, i) when the field output is non-finite.
std::vector<double> residual_map(const VelocityField& field, const Vec& x0, const Target& y,
                                 double t);

// Reduce K per-element maps to one map.
std::vector<double> aggregate_paths(std::span<const std::vector<double>> per_path,
                                    const AggregatorSpec& agg);

// H(i) = (1/|T|) sum_t t^exponent * delta_t(i).
std::vector<double> build_heatmap(std::span<const std::vector<double>> deltas,
                                  std::span<const double> times, double weight_exponent);

// S = max(H) + mean of the ceil(fraction*|H|) largest entries; the top set
// includes the maximum itself and ties break by element index.
double image_score(std::span<const double> heatmap, double top_fraction);

// Full pipeline: K seed streams split from config.seed, K*T field
// evaluations, path aggregation then weighted time aggregation. `cube_out`
// optionally receives the raw residuals; `workers` parallelizes across
// paths without changing any output.
ScoreReport score_target(const VelocityField& field, const Target& y,
                         const ScoringConfig& config, MismatchCube* cube_out = nullptr,
                         std::size_t workers = 1);

// Reconstruction baseline: partially noise the target to t_init, integrate
// the field forward to t = 1, and take the per-element minimum over K seeds
// of the plain (un-squared) channel norm ||y(i) - yhat_k(i)||.
Heatmap reconflow_score(const VelocityField& field, const Target& y,
                        const ScoringConfig& config, double t_init, std::size_t euler_steps);

void write_cube_csv(const std::filesystem::path& path, const MismatchCube& cube,
                    const std::string& meta);

} // namespace vmad
