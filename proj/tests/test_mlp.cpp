#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "pairdqn/checkpoint.hpp"
#include "pairdqn/mlp.hpp"
#include "pairdqn/verify.hpp"

using namespace pairdqn;

namespace {

std::vector<double> random_vec(int len, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(len));
    for (double& x : v) x = val(rng);
    return v;
}

bool params_equal(const nn::MlpParams& a, const nn::MlpParams& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t k = 0; k < a.layers.size(); ++k)
        if (a.layers[k].w != b.layers[k].w || a.layers[k].b != b.layers[k].b) return false;
    return true;
}

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("zeroed network maps everything to zero") {
    auto p = nn::zeros_like(nn::make_mlp({3, 4, 2}, 1));
    const auto y = nn::mlp_forward(p, {1.0, -2.0, 3.0});
    CHECK(y == std::vector<double>{0.0, 0.0});
}

TEST_CASE("single identity layer is the identity map") {
    nn::MlpParams p;
    p.layers.push_back({3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}});
    const std::vector<double> x = {0.5, -1.5, 2.0};
    CHECK(nn::mlp_forward(p, x) == x);
}

TEST_CASE("forward matches an independently written naive evaluator") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto p = nn::make_mlp({6, 8, 5, 3}, 100 + t);
        const auto x = random_vec(6, rng);
        const auto got = nn::mlp_forward(p, x);
        const auto want = verify::naive_forward(p, x);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("forward is deterministic bit for bit") {
    const auto p = nn::make_mlp({4, 7, 2}, 9);
    const std::vector<double> x = {0.1, -0.2, 0.3, 0.7};
    CHECK(nn::mlp_forward(p, x) == nn::mlp_forward(p, x));
}

TEST_CASE("forward rejects mismatched input width") {
    const auto p = nn::make_mlp({4, 2}, 1);
    CHECK_THROWS_AS(nn::mlp_forward(p, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("initialization stays inside the fan-in bound with zero biases") {
    const auto p = nn::make_mlp({10, 20, 3}, 17);
    for (const auto& layer : p.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (double w : layer.w) {
            CHECK(w >= -bound);
            CHECK(w <= bound);
        }
        for (double b : layer.b) CHECK(b == 0.0);
    }
    CHECK(params_equal(p, nn::make_mlp({10, 20, 3}, 17)));
    CHECK_FALSE(params_equal(p, nn::make_mlp({10, 20, 3}, 18)));
}

TEST_CASE("validate rejects broken chains and non-finite parameters") {
    auto p = nn::make_mlp({3, 4, 2}, 1);
    CHECK_NOTHROW(p.validate());
    auto broken = p;
    broken.layers[1].in = 5;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    auto poisoned = p;
    poisoned.layers[0].w[0] = std::nan("");
    CHECK_THROWS_AS(poisoned.validate(), std::invalid_argument);
}

TEST_CASE("backward with zero upstream is a zero gradient") {
    const auto p = nn::make_mlp({3, 5, 2}, 2);
    const auto g = nn::mlp_backward(p, {0.4, 0.5, -0.6}, {0.0, 0.0});
    CHECK(params_equal(g, nn::zeros_like(p)));
}

TEST_CASE("linear network gradient is the analytic outer product") {
    auto p = nn::make_mlp({3, 2}, 3);
    const std::vector<double> x = {0.5, -1.0, 2.0};
    const std::vector<double> u = {1.5, -0.5};
    const auto g = nn::mlp_backward(p, x, u);
    for (int o = 0; o < 2; ++o) {
        for (int i = 0; i < 3; ++i) CHECK(g.layers[0].w[o * 3 + i] == doctest::Approx(u[o] * x[i]));
        CHECK(g.layers[0].b[o] == doctest::Approx(u[o]));
    }
}

TEST_CASE("backward matches central finite differences away from ReLU kinks") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        const auto p = nn::make_mlp({5, 7, 6, 3}, 400 + t);
        std::vector<double> x;
        do {
            x = random_vec(5, rng);
        } while (verify::min_hidden_margin(p, x) < 1e-4);
        const auto u = random_vec(3, rng);
        CHECK(verify::grad_max_rel_err(p, x, u) < 1e-4);
    }
}

TEST_CASE("accumulating backward equals summing separate gradients") {
    std::mt19937_64 rng(23);
    const auto p = nn::make_mlp({4, 6, 2}, 7);
    auto acc = nn::zeros_like(p);
    auto expected = nn::zeros_like(p);
    for (int t = 0; t < 4; ++t) {
        const auto x = random_vec(4, rng);
        const auto u = random_vec(2, rng);
        nn::mlp_backward_acc(p, x, u, acc);
        const auto g = nn::mlp_backward(p, x, u);
        for (std::size_t k = 0; k < expected.layers.size(); ++k) {
            for (std::size_t i = 0; i < expected.layers[k].w.size(); ++i)
                expected.layers[k].w[i] += g.layers[k].w[i];
            for (std::size_t i = 0; i < expected.layers[k].b.size(); ++i)
                expected.layers[k].b[i] += g.layers[k].b[i];
        }
    }
    for (std::size_t k = 0; k < expected.layers.size(); ++k) {
        for (std::size_t i = 0; i < expected.layers[k].w.size(); ++i)
            CHECK(acc.layers[k].w[i] == doctest::Approx(expected.layers[k].w[i]).epsilon(1e-12));
        for (std::size_t i = 0; i < expected.layers[k].b.size(); ++i)
            CHECK(acc.layers[k].b[i] == doctest::Approx(expected.layers[k].b[i]).epsilon(1e-12));
    }
}

TEST_CASE("SGD endpoints: zero rate is identity, unit rate on grad=p zeroes") {
    const auto p = nn::make_mlp({3, 4, 2}, 5);
    CHECK(params_equal(nn::sgd_step(p, nn::mlp_backward(p, {1, 1, 1}, {1, 1}), 0.0), p));
    CHECK(params_equal(nn::sgd_step(p, p, 1.0), nn::zeros_like(p)));
}

TEST_CASE("EMA endpoints and closed form") {
    const auto online = nn::make_mlp({3, 4, 2}, 6);
    const auto target = nn::make_mlp({3, 4, 2}, 7);
    CHECK(params_equal(nn::ema_update(target, online, 1.0), target));
    CHECK(params_equal(nn::ema_update(target, online, 0.0), online));
    const auto mixed = nn::ema_update(target, online, 0.99);
    for (std::size_t k = 0; k < mixed.layers.size(); ++k)
        for (std::size_t i = 0; i < mixed.layers[k].w.size(); ++i)
            CHECK(mixed.layers[k].w[i] ==
                  doctest::Approx(0.99 * target.layers[k].w[i] + 0.01 * online.layers[k].w[i])
                      .epsilon(1e-15));
    // Fixed point: identical params are unchanged for any c.
    CHECK(params_equal(nn::ema_update(online, online, 0.37), online));
    CHECK_THROWS_AS(nn::ema_update(target, online, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(nn::ema_update(target, online, -0.1), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit for bit") {
    const auto dir = std::filesystem::temp_directory_path() / "pairdqn_ckpt_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "ck").string();
    nn::Checkpoint ck{nn::ModelKind::VDN, 6, 4, nn::make_mlp({10, 16, 4}, 99)};
    nn::save_checkpoint(path, ck);
    const auto back = nn::load_checkpoint(path);
    CHECK(back.kind == ck.kind);
    CHECK(back.n_agents == 6);
    CHECK(back.num_actions == 4);
    CHECK(params_equal(back.params, ck.params));
    CHECK_THROWS(static_cast<void>(nn::load_checkpoint((dir / "missing").string())));
}

TEST_CASE("model kind names round-trip") {
    using nn::ModelKind;
    CHECK(nn::kind_from_name(nn::kind_name(ModelKind::PAIR_VDN)) == ModelKind::PAIR_VDN);
    CHECK(nn::kind_from_name(nn::kind_name(ModelKind::VDN)) == ModelKind::VDN);
    CHECK(nn::kind_from_name(nn::kind_name(ModelKind::IQL)) == ModelKind::IQL);
    CHECK_THROWS(static_cast<void>(nn::kind_from_name("qmix")));
}

}  // TEST_SUITE
