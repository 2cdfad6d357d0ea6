#include "vmad/mlp.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmad {

namespace {

enum class Act { tanh_act, silu_act };

Act parse_activation(const std::string& name) {
    if (name == "tanh") return Act::tanh_act;
    if (name == "silu") return Act::silu_act;
    throw std::invalid_argument("mlp: unknown activation '" + name + "'");
}

inline double act_value(Act a, double z) {
    if (a == Act::tanh_act) return std::tanh(z);
    return z / (1.0 + std::exp(-z));
}

// Derivative expressed through (z, value) so tanh can reuse its output.
inline double act_deriv(Act a, double z, double value) {
    if (a == Act::tanh_act) return 1.0 - value * value;
    const double s = 1.0 / (1.0 + std::exp(-z));
    return s + z * s * (1.0 - s);
}

// Forward pass buffers reused across batch elements.
struct Workspace {
    std::vector<Vec> pre;  // z per layer
    std::vector<Vec> post; // activations per layer (post[0] = input)
    std::vector<Vec> delta;
};

void forward_into(const MLPParams& p, Act act, const Vec& x, double t, Workspace& ws) {
    const std::size_t L = p.layer_count();
    ws.pre.resize(L);
    ws.post.resize(L + 1);
    ws.post[0] = time_features(t, p.time_frequencies);
    ws.post[0].insert(ws.post[0].begin(), x.begin(), x.end());
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t in = p.widths[l];
        const std::size_t out = p.widths[l + 1];
        ws.pre[l].assign(out, 0.0);
        const auto& W = p.weights[l];
        const auto& a = ws.post[l];
        for (std::size_t j = 0; j < out; ++j) {
            double acc = p.biases[l][j];
            const double* row = W.data() + j * in;
            for (std::size_t i = 0; i < in; ++i) acc += row[i] * a[i];
            ws.pre[l][j] = acc;
        }
        if (l + 1 < L) {
            ws.post[l + 1].resize(out);
            for (std::size_t j = 0; j < out; ++j)
                ws.post[l + 1][j] = act_value(act, ws.pre[l][j]);
        } else {
            ws.post[l + 1] = ws.pre[l]; // affine output layer
        }
    }
}

MLPGrads zero_grads(const MLPParams& p) {
    MLPGrads g;
    g.weights.reserve(p.layer_count());
    g.biases.reserve(p.layer_count());
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        g.weights.emplace_back(p.weights[l].size(), 0.0);
        g.biases.emplace_back(p.biases[l].size(), 0.0);
    }
    return g;
}

} // namespace

void MLPParams::validate() const {
    if (data_dim == 0) throw std::invalid_argument("mlp: data_dim must be >= 1");
    if (widths.size() < 2) throw std::invalid_argument("mlp: need at least input and output widths");
    if (widths.front() != data_dim + 2 * time_frequencies)
        throw std::invalid_argument("mlp: input width must equal data_dim + 2*time_frequencies");
    if (widths.back() != data_dim)
        throw std::invalid_argument("mlp: output width must equal data_dim");
    if (weights.size() != widths.size() - 1 || biases.size() != widths.size() - 1)
        throw std::invalid_argument("mlp: layer count mismatch");
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (weights[l].size() != widths[l + 1] * widths[l])
            throw std::invalid_argument("mlp: weight shape mismatch");
        if (biases[l].size() != widths[l + 1])
            throw std::invalid_argument("mlp: bias shape mismatch");
        for (double w : weights[l])
            if (!std::isfinite(w)) throw std::invalid_argument("mlp: non-finite weight");
        for (double b : biases[l])
            if (!std::isfinite(b)) throw std::invalid_argument("mlp: non-finite bias");
    }
    parse_activation(activation);
}

nlohmann::json MLPParams::to_json() const {
    return nlohmann::json{{"data_dim", data_dim},
                          {"time_frequencies", time_frequencies},
                          {"activation", activation},
                          {"widths", widths},
                          {"weights", weights},
                          {"biases", biases}};
}

MLPParams MLPParams::from_json(const nlohmann::json& j) {
    MLPParams p;
    p.data_dim = j.at("data_dim").get<std::size_t>();
    p.time_frequencies = j.at("time_frequencies").get<std::size_t>();
    p.activation = j.at("activation").get<std::string>();
    p.widths = j.at("widths").get<std::vector<std::size_t>>();
    p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    p.validate();
    return p;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
    if (epochs == 0) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("train: batch_size must be >= 1");
    if (weight_decay < 0.0) throw std::invalid_argument("train: weight_decay must be >= 0");
    if (optimizer != "adam" && optimizer != "sgd")
        throw std::invalid_argument("train: optimizer must be 'adam' or 'sgd'");
}

MLPParams make_mlp(std::size_t data_dim, std::span<const std::size_t> hidden_widths,
                   std::size_t time_frequencies, RngState& rng, const std::string& activation) {
    if (data_dim == 0) throw std::invalid_argument("make_mlp: data_dim must be >= 1");
    MLPParams p;
    p.data_dim = data_dim;
    p.time_frequencies = time_frequencies;
    p.activation = activation;
    p.widths.push_back(data_dim + 2 * time_frequencies);
    for (std::size_t w : hidden_widths) p.widths.push_back(w);
    p.widths.push_back(data_dim);
    for (std::size_t l = 0; l + 1 < p.widths.size(); ++l) {
        const std::size_t in = p.widths[l];
        const std::size_t out = p.widths[l + 1];
        p.weights.emplace_back(in * out, 0.0);
        p.biases.emplace_back(out, 0.0);
        const bool last = (l + 2 == p.widths.size());
        if (!last) {
            const double scale = 1.0 / std::sqrt(static_cast<double>(in));
            for (auto& w : p.weights.back()) w = scale * rng.next_normal();
        }
        // Output layer stays zero: the untrained model is the zero field.
    }
    p.validate();
    return p;
}

Vec time_features(double t, std::size_t frequencies) {
    Vec feat(2 * frequencies);
    for (std::size_t k = 0; k < frequencies; ++k) {
        const double w = std::ldexp(std::numbers::pi, static_cast<int>(k)) * t; // 2^k * pi * t
        feat[2 * k] = std::sin(w);
        feat[2 * k + 1] = std::cos(w);
    }
    return feat;
}

Vec mlp_forward(const MLPParams& params, const Vec& x, double t) {
    if (x.size() != params.data_dim)
        throw std::invalid_argument("mlp_forward: point dimension mismatch");
    const Act act = parse_activation(params.activation);
    Workspace ws;
    forward_into(params, act, x, t, ws);
    return ws.post.back();
}

std::pair<double, MLPGrads> cfm_loss_and_grad(const MLPParams& params,
                                              std::span<const CfmSample> batch) {
    if (batch.empty()) throw std::invalid_argument("cfm_loss_and_grad: empty batch");
    const Act act = parse_activation(params.activation);
    const std::size_t L = params.layer_count();
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    MLPGrads grads = zero_grads(params);
    Workspace ws;
    ws.delta.resize(L);
    double loss = 0.0;
    Vec x_t(params.data_dim);

    for (const auto& sample : batch) {
        if (sample.x0.size() != params.data_dim || sample.x1.size() != params.data_dim)
            throw std::invalid_argument("cfm_loss_and_grad: sample dimension mismatch");
        for (std::size_t k = 0; k < params.data_dim; ++k)
            x_t[k] = (1.0 - sample.t) * sample.x0[k] + sample.t * sample.x1[k];
        forward_into(params, act, x_t, sample.t, ws);

        const Vec& out = ws.post.back();
        ws.delta[L - 1].resize(params.data_dim);
        for (std::size_t k = 0; k < params.data_dim; ++k) {
            const double r = out[k] - (sample.x1[k] - sample.x0[k]);
            loss += r * r * inv_b;
            ws.delta[L - 1][k] = 2.0 * r * inv_b;
        }

        for (std::size_t l = L; l-- > 0;) {
            const std::size_t in = params.widths[l];
            const std::size_t out_w = params.widths[l + 1];
            const Vec& a_prev = ws.post[l];
            const Vec& d = ws.delta[l];
            auto& gW = grads.weights[l];
            auto& gb = grads.biases[l];
            for (std::size_t j = 0; j < out_w; ++j) {
                const double dj = d[j];
                gb[j] += dj;
                double* grow = gW.data() + j * in;
                for (std::size_t i = 0; i < in; ++i) grow[i] += dj * a_prev[i];
            }
            if (l == 0) break;
            ws.delta[l - 1].assign(in, 0.0);
            const auto& W = params.weights[l];
            for (std::size_t j = 0; j < out_w; ++j) {
                const double dj = d[j];
                const double* row = W.data() + j * in;
                for (std::size_t i = 0; i < in; ++i) ws.delta[l - 1][i] += dj * row[i];
            }
            for (std::size_t i = 0; i < in; ++i)
                ws.delta[l - 1][i] *= act_deriv(act, ws.pre[l - 1][i], ws.post[l][i]);
        }
    }
    return {loss, std::move(grads)};
}

TrainResult train_cfm(const std::vector<Vec>& data, std::span<const std::size_t> hidden_widths,
                      const TrainConfig& config, RngState& rng) {
    config.validate();
    if (data.empty()) throw std::invalid_argument("train_cfm: empty dataset");
    const std::size_t d = data.front().size();
    for (const auto& x : data)
        if (x.size() != d) throw std::invalid_argument("train_cfm: inconsistent data dimension");

    RngState init_rng = rng.split(0);
    RngState batch_rng = rng.split(1);

    TrainResult result;
    result.params = make_mlp(d, hidden_widths, 8, init_rng);
    result.loss_curve.reserve(config.epochs);
    MLPParams& p = result.params;

    const bool adam = (config.optimizer == "adam");
    MLPGrads m = zero_grads(p);
    MLPGrads v = zero_grads(p);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    std::vector<CfmSample> batch(config.batch_size);
    for (std::size_t step = 1; step <= config.epochs; ++step) {
        for (auto& sample : batch) {
            const auto idx = static_cast<std::size_t>(batch_rng.next_unit() *
                                                      static_cast<double>(data.size()));
            sample.x1 = data[std::min(idx, data.size() - 1)];
            sample.x0 = sample_standard_normal(d, batch_rng);
            // t uniform on (0,1); nudge away from the exact endpoints.
            sample.t = std::min(std::max(batch_rng.next_unit(), 1e-12), 1.0 - 1e-12);
        }
        auto [loss, grads] = cfm_loss_and_grad(p, batch);
        result.loss_curve.push_back(loss);

        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t l = 0; l < p.layer_count(); ++l) {
            auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                              std::vector<double>& m1, std::vector<double>& m2) {
                for (std::size_t i = 0; i < theta.size(); ++i) {
                    double stepv;
                    if (adam) {
                        m1[i] = beta1 * m1[i] + (1.0 - beta1) * g[i];
                        m2[i] = beta2 * m2[i] + (1.0 - beta2) * g[i] * g[i];
                        stepv = (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + eps);
                    } else {
                        stepv = g[i];
                    }
                    theta[i] -= config.learning_rate * (stepv + config.weight_decay * theta[i]);
                }
            };
            update(p.weights[l], grads.weights[l], m.weights[l], v.weights[l]);
            update(p.biases[l], grads.biases[l], m.biases[l], v.biases[l]);
        }
    }
    return result;
}

} // namespace vmad
