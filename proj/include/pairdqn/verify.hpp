#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pairdqn/factor_max.hpp"
#include "pairdqn/mlp.hpp"
#include "pairdqn/models.hpp"

namespace pairdqn::verify {

struct SuiteResult {
    bool ok = true;
    int checked = 0;
    std::string detail;  // counterexample description when !ok
};

// Random cycle instances: DP value vs brute force within 1e-9, and the DP
// action must reproduce the DP value through evaluate_joint.
SuiteResult run_dp_suite(int instances = 200, std::uint64_t seed = 0xDD01);

// Random functional graphs (pure cycles, trees on 2-cycles, mixed and
// multi-component) vs brute force.
SuiteResult run_graph_suite(int instances = 200, std::uint64_t seed = 0xDD02);

// MLP backward vs central finite differences (step 1e-5, rel err < 1e-4),
// plus the full TD loss gradient on a batch of 8.
SuiteResult run_grad_suite(int checks = 20, std::uint64_t seed = 0xDD03);

// Box Jump reward accounting over random-policy episodes:
// sum(r) + penalties == y_best_T - y_best_0 within 1e-6, y_best monotone,
// observations inside their documented ranges.
SuiteResult run_env_suite(int episodes = 100, std::uint64_t seed = 0xDD04);

// Helpers shared with the unit tests.

// Naive forward pass written independently of nn::mlp_forward.
std::vector<double> naive_forward(const nn::MlpParams& p, const std::vector<double>& x);

// Smallest |preactivation| across hidden units; FD checks resample inputs
// until this is comfortably away from the ReLU kink.
double min_hidden_margin(const nn::MlpParams& p, const std::vector<double>& x);

// Max relative error of mlp_backward vs central differences of
// (forward(x) . upstream), step 1e-5.
double grad_max_rel_err(const nn::MlpParams& p, const std::vector<double>& x,
                        const std::vector<double>& upstream);

// Max relative error of td_loss_and_grad's gradient vs central differences
// of its loss.
double td_grad_max_rel_err(models::ModelKind kind, const nn::MlpParams& p,
                           const nn::MlpParams& target,
                           const std::vector<models::Transition>& batch, double gamma,
                           int num_actions);

// Random functional graph of a given flavour, used by the graph suite.
enum class GraphFlavour { CANONICAL_CYCLE, TREES_ON_2CYCLE, RANDOM, MULTI_COMPONENT };
factor::FactorTopology random_topology(int n, GraphFlavour flavour, std::mt19937_64& rng);

}  // namespace pairdqn::verify
