#include <doctest.h>

#include "pairdqn/verify.hpp"

using namespace pairdqn;

TEST_SUITE("verify") {

TEST_CASE("reduced oracle suites pass end to end") {
    const auto dp = verify::run_dp_suite(25, 0xAA01);
    CHECK(dp.ok);
    CHECK(dp.checked == 25);
    CHECK(dp.detail.empty());

    const auto graph = verify::run_graph_suite(25, 0xAA02);
    CHECK(graph.ok);
    CHECK(graph.checked == 25);

    const auto grad = verify::run_grad_suite(4, 0xAA03);
    CHECK(grad.ok);

    const auto env = verify::run_env_suite(5, 0xAA04);
    CHECK(env.ok);
    CHECK(env.checked == 5);
}

TEST_CASE("random topologies are valid functional graphs of each flavour") {
    std::mt19937_64 rng(7);
    for (int f = 0; f < 4; ++f) {
        for (int t = 0; t < 20; ++t) {
            const auto topo =
                verify::random_topology(6, static_cast<verify::GraphFlavour>(f), rng);
            CHECK(topo.n == 6);
            CHECK_NOTHROW(topo.validate());
        }
        // The canonical-cycle flavour must actually be the canonical cycle.
        if (static_cast<verify::GraphFlavour>(f) == verify::GraphFlavour::CANONICAL_CYCLE) {
            const auto topo =
                verify::random_topology(5, verify::GraphFlavour::CANONICAL_CYCLE, rng);
            CHECK(topo.is_canonical_cycle());
        }
    }
}

}  // TEST_SUITE
