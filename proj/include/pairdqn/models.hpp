#pragma once

#include <vector>

#include "pairdqn/checkpoint.hpp"
#include "pairdqn/factor_max.hpp"
#include "pairdqn/mlp.hpp"

namespace pairdqn::models {

using nn::ModelKind;

// One observation vector per agent. Width is uniform across agents and
// already includes the one-hot agent identifier block at the tail.
using JointObservation = std::vector<std::vector<double>>;

// Appends an n-wide one-hot identifier to each agent's raw observation.
JointObservation append_agent_ids(const std::vector<std::vector<double>>& raw);

// Replay element: shared reward, one action per agent.
struct Transition {
    JointObservation obs;
    std::vector<int> actions;
    double reward = 0.0;
    JointObservation next_obs;
    bool done = false;
};

// PAIR_VDN fills `tables` (one A x A grid per agent pair on the cycle);
// VDN and IQL fill `per_agent` (one length-A vector per agent).
struct QOutput {
    ModelKind kind = ModelKind::PAIR_VDN;
    factor::PairwiseTableSet tables;
    std::vector<std::vector<double>> per_agent;
};

// Input width the shared network must have for a given kind.
int expected_input_dim(ModelKind kind, int obs_width);

// Evaluates the shared network once per agent (VDN/IQL) or once per cycle
// pair (PAIR_VDN, on concat(o_i, o_{(i+1) mod n}), output reshaped row-major
// with a_i as the row).
QOutput compute_q(ModelKind kind, const nn::MlpParams& params, const JointObservation& jo,
                  int num_actions);

// PAIR_VDN: cycle sum; VDN: sum of selected per-agent entries. Throws
// std::logic_error for IQL, which has no scalar joint value.
double joint_value(const QOutput& q, const std::vector<int>& actions);

// IQL's per-agent values at the given actions.
std::vector<double> per_agent_values(const QOutput& q, const std::vector<int>& actions);

// VDN/IQL: independent per-agent argmax (ties to the smallest index);
// PAIR_VDN: exact cycle DP.
std::vector<int> greedy_actions(const QOutput& q);

// One row per transition: a single target for PAIR_VDN/VDN, n per-agent
// targets for IQL. Terminal transitions bootstrap nothing.
std::vector<std::vector<double>> td_targets(ModelKind kind, const nn::MlpParams& target_params,
                                            const std::vector<Transition>& batch, double gamma,
                                            int num_actions);

struct LossGrad {
    double loss = 0.0;
    nn::MlpParams grad;
};

// Mean squared TD error over the batch (over batch x agents for IQL) and
// its exact gradient w.r.t. the online params. The target network is
// detached: no gradient flows through the targets.
LossGrad td_loss_and_grad(ModelKind kind, const nn::MlpParams& params,
                          const nn::MlpParams& target_params,
                          const std::vector<Transition>& batch, double gamma, int num_actions);

}  // namespace pairdqn::models
