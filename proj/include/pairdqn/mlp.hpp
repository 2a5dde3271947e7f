#pragma once

#include <cstdint>
#include <vector>

namespace pairdqn::nn {

// Dense layer, weights row-major out x in.
struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out * in
    std::vector<double> b;  // out
};

// MLP with ReLU between hidden layers, identity on the output layer.
// Parameters are plain values; updates produce new values.
struct MlpParams {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }

    // Throws std::invalid_argument if layer dims don't chain or params are
    // non-finite.
    void validate() const;
    bool same_shape(const MlpParams& other) const;
};

// Uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] weights, zero biases.
MlpParams make_mlp(const std::vector<int>& sizes, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpParams& p, const std::vector<double>& x);

// Gradient of (output . upstream) w.r.t. every parameter. ReLU'(0) = 0.
MlpParams mlp_backward(const MlpParams& p, const std::vector<double>& x,
                       const std::vector<double>& upstream);

// As mlp_backward but adds into `acc` (same shape as p, typically
// zero-initialized); avoids allocating per batch item.
void mlp_backward_acc(const MlpParams& p, const std::vector<double>& x,
                      const std::vector<double>& upstream, MlpParams& acc);

// Same-shape all-zero parameter set, for gradient accumulators.
MlpParams zeros_like(const MlpParams& p);

MlpParams sgd_step(const MlpParams& p, const MlpParams& grad, double lr);

// theta_minus' = c * theta_minus + (1 - c) * theta, elementwise.
MlpParams ema_update(const MlpParams& target, const MlpParams& online, double c);

}  // namespace pairdqn::nn
