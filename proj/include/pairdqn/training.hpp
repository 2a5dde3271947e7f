#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pairdqn/env.hpp"
#include "pairdqn/models.hpp"

namespace pairdqn::train {

// Ring buffer of transitions, uniform sampling with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20'000);

    void push(models::Transition tr);
    std::vector<models::Transition> sample(std::size_t batch, std::mt19937_64& rng) const;

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const models::Transition& at(std::size_t logical) const;  // 0 = oldest

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next write slot once full
    std::vector<models::Transition> data_;
};

// Linear interpolation from eps_start to eps_end over total_steps.
struct EpsilonSchedule {
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::int64_t total_steps = 1;

    double at(std::int64_t step) const;
};

struct TrainConfig {
    int epochs = 100;
    double lr = 1e-4;
    int batch = 32;
    double gamma = 0.99;
    double ema_c = 0.99;
    double eps_start = 1.0;
    double eps_end = 0.05;
    int explore_per_epoch = 400;
    std::vector<int> hidden = {128, 128};
    std::size_t buffer = 20'000;
    int eval_episodes = 5;  // greedy episodes per epoch for the curve
    std::uint64_t seed = 0;

    void validate() const;
};

struct CollectStats {
    std::int64_t env_steps = 0;
    std::int64_t episodes_finished = 0;
};

// Epsilon-greedy collection: with probability eps each agent acts uniformly
// at random, otherwise the joint greedy action is used. Episodes reset
// automatically; `episode_seed` supplies reset seeds.
CollectStats collect(Env& env, models::ModelKind kind, const nn::MlpParams& params, double eps,
                     int steps, ReplayBuffer& buffer, std::mt19937_64& rng,
                     std::function<std::uint64_t()> episode_seed,
                     std::vector<std::vector<double>>& current_obs, bool& episode_live);

struct EvalResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> episode_rewards;
};

// Greedy rollouts with fresh per-episode seeds (base_seed + episode index).
EvalResult evaluate(Env& env, models::ModelKind kind, const nn::MlpParams& params, int episodes,
                    std::uint64_t base_seed);

// Random-policy baseline under the same protocol.
EvalResult evaluate_random(Env& env, int episodes, std::uint64_t base_seed);

struct CurvePoint {
    int epoch = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0;
};

struct TrainResult {
    nn::MlpParams params;
    nn::MlpParams target_params;
    std::vector<CurvePoint> curve;
    std::int64_t env_steps = 0;
    std::int64_t sgd_steps = 0;
};

// Full run: per epoch, collect explore_per_epoch steps with one SGD step
// (and one EMA update) per collected step, then evaluate greedily.
// `on_epoch`, when set, is called after each epoch (checkpointing hook).
// Throws std::runtime_error if the loss turns non-finite.
TrainResult train(const TrainConfig& config, Env& env, models::ModelKind kind,
                  const std::function<void(int, const TrainResult&)>& on_epoch = nullptr);

// curve.csv writer: header then `epoch,mean_reward,std_reward` rows.
void write_curve(const std::string& path, const std::vector<CurvePoint>& curve);

}  // namespace pairdqn::train
