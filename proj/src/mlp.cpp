#include "pairdqn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pairdqn::nn {

void MlpParams::validate() const {
    if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Layer& l = layers[k];
        if (l.in < 1 || l.out < 1)
            throw std::invalid_argument("MlpParams: nonpositive layer dim");
        if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
            l.b.size() != static_cast<std::size_t>(l.out))
            throw std::invalid_argument("MlpParams: parameter size mismatch");
        if (k > 0 && layers[k - 1].out != l.in)
            throw std::invalid_argument("MlpParams: layer dims do not chain");
        for (double v : l.w)
            if (!std::isfinite(v)) throw std::invalid_argument("MlpParams: non-finite weight");
        for (double v : l.b)
            if (!std::isfinite(v)) throw std::invalid_argument("MlpParams: non-finite bias");
    }
}

bool MlpParams::same_shape(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t k = 0; k < layers.size(); ++k)
        if (layers[k].in != other.layers[k].in || layers[k].out != other.layers[k].out)
            return false;
    return true;
}

MlpParams make_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("make_mlp: need at least two sizes");
    std::mt19937_64 rng(seed);
    MlpParams p;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
        Layer l;
        l.in = sizes[k];
        l.out = sizes[k + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        l.w.resize(static_cast<std::size_t>(l.in) * l.out);
        for (double& v : l.w) v = dist(rng);
        l.b.assign(static_cast<std::size_t>(l.out), 0.0);
        p.layers.push_back(std::move(l));
    }
    return p;
}

namespace {

void affine(const Layer& l, const std::vector<double>& in, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(l.out), 0.0);
    for (int r = 0; r < l.out; ++r) {
        double s = l.b[r];
        const double* wr = l.w.data() + static_cast<std::size_t>(r) * l.in;
        for (int c = 0; c < l.in; ++c) s += wr[c] * in[c];
        out[r] = s;
    }
}

}  // namespace

std::vector<double> mlp_forward(const MlpParams& p, const std::vector<double>& x) {
    if (p.layers.empty() || x.size() != static_cast<std::size_t>(p.input_dim()))
        throw std::invalid_argument("mlp_forward: input width mismatch");
    std::vector<double> cur = x, next;
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        affine(p.layers[k], cur, next);
        if (k + 1 < p.layers.size())
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        cur.swap(next);
    }
    return cur;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    for (const Layer& l : p.layers) {
        Layer zl;
        zl.in = l.in;
        zl.out = l.out;
        zl.w.assign(l.w.size(), 0.0);
        zl.b.assign(l.b.size(), 0.0);
        z.layers.push_back(std::move(zl));
    }
    return z;
}

void mlp_backward_acc(const MlpParams& p, const std::vector<double>& x,
                      const std::vector<double>& upstream, MlpParams& acc) {
    const std::size_t L = p.layers.size();
    if (L == 0 || x.size() != static_cast<std::size_t>(p.input_dim()))
        throw std::invalid_argument("mlp_backward: input width mismatch");
    if (upstream.size() != static_cast<std::size_t>(p.output_dim()))
        throw std::invalid_argument("mlp_backward: upstream width mismatch");
    if (!p.same_shape(acc))
        throw std::invalid_argument("mlp_backward: accumulator shape mismatch");

    // Forward, keeping post-activation inputs of every layer.
    std::vector<std::vector<double>> inputs(L);
    inputs[0] = x;
    std::vector<double> pre;
    for (std::size_t k = 0; k + 1 < L; ++k) {
        affine(p.layers[k], inputs[k], pre);
        for (double& v : pre) v = v > 0.0 ? v : 0.0;
        inputs[k + 1] = pre;
    }

    // Backward. delta starts as upstream (identity output activation).
    std::vector<double> delta = upstream, prev_delta;
    for (std::size_t k = L; k-- > 0;) {
        const Layer& l = p.layers[k];
        Layer& g = acc.layers[k];
        const std::vector<double>& in = inputs[k];
        for (int r = 0; r < l.out; ++r) {
            const double d = delta[r];
            if (d == 0.0) continue;
            g.b[r] += d;
            double* gw = g.w.data() + static_cast<std::size_t>(r) * l.in;
            for (int c = 0; c < l.in; ++c) gw[c] += d * in[c];
        }
        if (k == 0) break;
        prev_delta.assign(static_cast<std::size_t>(l.in), 0.0);
        for (int r = 0; r < l.out; ++r) {
            const double d = delta[r];
            if (d == 0.0) continue;
            const double* wr = l.w.data() + static_cast<std::size_t>(r) * l.in;
            for (int c = 0; c < l.in; ++c) prev_delta[c] += d * wr[c];
        }
        // ReLU mask of layer k's input; ReLU'(0) = 0.
        for (int c = 0; c < l.in; ++c)
            if (inputs[k][c] <= 0.0) prev_delta[c] = 0.0;
        delta.swap(prev_delta);
    }
}

MlpParams mlp_backward(const MlpParams& p, const std::vector<double>& x,
                       const std::vector<double>& upstream) {
    MlpParams g = zeros_like(p);
    mlp_backward_acc(p, x, upstream, g);
    return g;
}

MlpParams sgd_step(const MlpParams& p, const MlpParams& grad, double lr) {
    if (!p.same_shape(grad)) throw std::invalid_argument("sgd_step: shape mismatch");
    MlpParams out = p;
    for (std::size_t k = 0; k < out.layers.size(); ++k) {
        for (std::size_t i = 0; i < out.layers[k].w.size(); ++i)
            out.layers[k].w[i] -= lr * grad.layers[k].w[i];
        for (std::size_t i = 0; i < out.layers[k].b.size(); ++i)
            out.layers[k].b[i] -= lr * grad.layers[k].b[i];
    }
    return out;
}

MlpParams ema_update(const MlpParams& target, const MlpParams& online, double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("ema_update: c outside [0,1]");
    if (!target.same_shape(online)) throw std::invalid_argument("ema_update: shape mismatch");
    MlpParams out = target;
    for (std::size_t k = 0; k < out.layers.size(); ++k) {
        for (std::size_t i = 0; i < out.layers[k].w.size(); ++i)
            out.layers[k].w[i] = c * target.layers[k].w[i] + (1.0 - c) * online.layers[k].w[i];
        for (std::size_t i = 0; i < out.layers[k].b.size(); ++i)
            out.layers[k].b[i] = c * target.layers[k].b[i] + (1.0 - c) * online.layers[k].b[i];
    }
    return out;
}

}  // namespace pairdqn::nn
