#pragma once

#include <cstdint>
#include <vector>

#include "pairdqn/checkpoint.hpp"
#include "pairdqn/env.hpp"

namespace pairdqn::matrixgame {

enum class PayoffKind { UNISON, FULL_TABLE, RANDOM_SPARSE };

// Stateless one-step coordination game. UNISON pays 1 per cycle-adjacent
// pair of agents choosing the same action.
struct MatrixGameSpec {
    PayoffKind kind = PayoffKind::UNISON;
    int n = 2;
    int num_actions = 2;
    std::vector<double> table;  // FULL_TABLE / RANDOM_SPARSE: |A|^n entries, agent 0 most significant

    static MatrixGameSpec unison(int n, int num_actions);
    static MatrixGameSpec full_table(int n, int num_actions, std::vector<double> table);
    static MatrixGameSpec random_sparse(int n, int num_actions, double density,
                                        std::uint64_t seed);

    std::uint64_t joint_count() const;
    double payoff(const std::vector<int>& actions) const;
};

struct PlayResult {
    double reward = 0.0;
    bool done = true;
};

PlayResult play(const MatrixGameSpec& spec, const std::vector<int>& actions);

// Least-squares fit of a decomposition's joint value to the payoff over all
// joint actions, by gradient descent directly on the table entries (no
// networks). Returns the final RMS residual. IQL is fitted with the same
// additive form as VDN (it has no other joint value to fit).
double fit_decomposition(nn::ModelKind kind, const MatrixGameSpec& spec, int iterations,
                         double lr = 0.25);

// Env adapter: single dummy state, one-step episodes. Raw observation per
// agent is the single constant 1.0 (agent identity comes from the one-hot
// block the model layer appends).
class MatrixGameEnv final : public Env {
public:
    explicit MatrixGameEnv(MatrixGameSpec spec) : spec_(std::move(spec)) {}

    int n_agents() const override { return spec_.n; }
    int num_actions() const override { return spec_.num_actions; }
    int obs_dim() const override { return 1; }

    std::vector<std::vector<double>> reset(std::uint64_t seed) override;
    StepResult step(const std::vector<int>& actions) override;

    const MatrixGameSpec& spec() const { return spec_; }

private:
    MatrixGameSpec spec_;
    bool done_ = true;
};

}  // namespace pairdqn::matrixgame
