#pragma once

#include "vmad/rng.hpp"
#include "vmad/velocity_field.hpp"

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace vmad {

// Fully connected velocity model v(x, t). The input is x concatenated with
// sinusoidal time features {sin(2^k pi t), cos(2^k pi t)}, k = 0..F-1; the
// output layer is affine (no activation) and zero-initialized so a fresh
// model predicts the zero field.
struct MLPParams {
    std::size_t data_dim = 0;
    std::size_t time_frequencies = 8;
    std::string activation = "tanh"; // "tanh" or "silu"
    std::vector<std::size_t> widths; // [input, hidden..., data_dim]
    std::vector<std::vector<double>> weights; // layer l: widths[l+1] x widths[l], row-major
    std::vector<std::vector<double>> biases;  // layer l: widths[l+1]

    std::size_t layer_count() const { return weights.size(); }
    void validate() const;

    nlohmann::json to_json() const;
    static MLPParams from_json(const nlohmann::json& j);
};

// Gradient container with the same layer shapes as MLPParams.
struct MLPGrads {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

struct CfmSample {
    Vec x0; // source seed
    Vec x1; // data point
    double t = 0.5;
};

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t epochs = 2000; // one gradient step per epoch at desk scale
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    std::string optimizer = "adam"; // "adam" or "sgd"
    double weight_decay = 0.0;

    void validate() const;
};

struct TrainResult {
    MLPParams params;
    std::vector<double> loss_curve; // one entry per epoch, loss before the update
};

MLPParams make_mlp(std::size_t data_dim, std::span<const std::size_t> hidden_widths,
                   std::size_t time_frequencies, RngState& rng,
                   const std::string& activation = "tanh");

Vec time_features(double t, std::size_t frequencies);

Vec mlp_forward(const MLPParams& params, const Vec& x, double t);

// Mean over the batch of ||v(x_t, t) - (x1 - x0)||^2 with
// x_t = (1-t) x0 + t x1, plus the exact reverse-mode gradient.
std::pair<double, MLPGrads> cfm_loss_and_grad(const MLPParams& params,
                                              std::span<const CfmSample> batch);

// Velocity regression on `data`: each epoch draws one batch (x0 ~ N(0,I),
// x1 from data with replacement, t ~ U(0,1)) and takes one optimizer step.
TrainResult train_cfm(const std::vector<Vec>& data, std::span<const std::size_t> hidden_widths,
                      const TrainConfig& config, RngState& rng);

inline VelocityField mlp_field(MLPParams params) {
    params.validate();
    return [params = std::move(params)](const Vec& x, double t) {
        return mlp_forward(params, x, t);
    };
}

} // namespace vmad
