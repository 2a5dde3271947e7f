#include <doctest.h>

#include <stdexcept>

#include <random>

#include "pairdqn/matrix_game.hpp"

using namespace pairdqn;
using matrixgame::MatrixGameSpec;
using matrixgame::PayoffKind;
using nn::ModelKind;

TEST_SUITE("matrix_game") {

TEST_CASE("unison payoff counts adjacent matches on the cycle") {
    const auto spec = MatrixGameSpec::unison(4, 2);
    CHECK(spec.payoff({1, 1, 1, 1}) == doctest::Approx(4.0));
    CHECK(spec.payoff({0, 0, 0, 0}) == doctest::Approx(4.0));
    CHECK(spec.payoff({0, 1, 0, 1}) == doctest::Approx(0.0));
    CHECK(spec.payoff({0, 0, 1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("the unison optimum is n, achieved only in unison") {
    const int n = 5, A = 3;
    const auto spec = MatrixGameSpec::unison(n, A);
    std::vector<int> acts(n);
    double best = -1.0;
    int best_count = 0;
    for (std::uint64_t flat = 0; flat < spec.joint_count(); ++flat) {
        std::uint64_t rest = flat;
        for (int i = n - 1; i >= 0; --i) {
            acts[i] = static_cast<int>(rest % A);
            rest /= A;
        }
        const double v = spec.payoff(acts);
        if (v > best + 1e-12) {
            best = v;
            best_count = 1;
        } else if (v > best - 1e-12) {
            ++best_count;
        }
    }
    CHECK(best == doctest::Approx(static_cast<double>(n)));
    CHECK(best_count == A);  // one unison profile per action label
}

TEST_CASE("full tables are straight lookups, agent 0 most significant") {
    std::vector<double> table(8);
    for (int i = 0; i < 8; ++i) table[i] = 10.0 * i;
    const auto spec = MatrixGameSpec::full_table(3, 2, table);
    CHECK(spec.payoff({0, 0, 0}) == 0.0);
    CHECK(spec.payoff({0, 0, 1}) == 10.0);
    CHECK(spec.payoff({1, 0, 1}) == 50.0);
    CHECK(spec.payoff({1, 1, 1}) == 70.0);
    const auto res = matrixgame::play(spec, {1, 0, 0});
    CHECK(res.reward == 40.0);
    CHECK(res.done);
}

TEST_CASE("random sparse tables are seeded and finite") {
    const auto a = MatrixGameSpec::random_sparse(4, 2, 0.5, 7);
    const auto b = MatrixGameSpec::random_sparse(4, 2, 0.5, 7);
    CHECK(a.table == b.table);
    const auto c = MatrixGameSpec::random_sparse(4, 2, 0.5, 8);
    CHECK(a.table != c.table);
    int nonzero = 0;
    for (double v : a.table) nonzero += v != 0.0;
    CHECK(nonzero > 0);
    CHECK(nonzero < static_cast<int>(a.table.size()));
}

TEST_CASE("pairwise fit represents the unison game exactly, additive cannot") {
    const auto spec = MatrixGameSpec::unison(4, 2);
    const double pair = matrixgame::fit_decomposition(ModelKind::PAIR_VDN, spec, 4000);
    const double vdn = matrixgame::fit_decomposition(ModelKind::VDN, spec, 4000);
    CHECK(pair < 1e-6);
    CHECK(vdn > 0.3);
}

TEST_CASE("every decomposition fits a constant payoff exactly") {
    const auto spec =
        MatrixGameSpec::full_table(3, 2, std::vector<double>(8, 1.75));
    for (ModelKind kind : {ModelKind::PAIR_VDN, ModelKind::VDN, ModelKind::IQL}) {
        CHECK(matrixgame::fit_decomposition(kind, spec, 3000) < 1e-6);
    }
}

TEST_CASE("pairwise residual never exceeds the additive residual") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto spec = MatrixGameSpec::random_sparse(4, 2, 0.4, seed);
        const double pair = matrixgame::fit_decomposition(ModelKind::PAIR_VDN, spec, 5000);
        const double vdn = matrixgame::fit_decomposition(ModelKind::VDN, spec, 5000);
        CHECK(pair <= vdn + 1e-6);
    }
}

TEST_CASE("the env adapter plays one-step episodes with constant observations") {
    matrixgame::MatrixGameEnv env(MatrixGameSpec::unison(3, 2));
    CHECK(env.n_agents() == 3);
    CHECK(env.num_actions() == 2);
    CHECK(env.obs_dim() == 1);
    const auto obs = env.reset(0);
    REQUIRE(obs.size() == 3);
    for (const auto& o : obs) CHECK(o == std::vector<double>{1.0});
    const auto res = env.step({1, 1, 1});
    CHECK(res.reward == doctest::Approx(3.0));
    CHECK(res.done);
    CHECK_THROWS_AS(env.step({0, 0, 0}), std::logic_error);
}

}  // TEST_SUITE
