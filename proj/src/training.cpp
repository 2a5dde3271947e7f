#include "pairdqn/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pairdqn::train {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
    data_.reserve(capacity);
}

void ReplayBuffer::push(models::Transition tr) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(tr));
    } else {
        data_[head_] = std::move(tr);
        head_ = (head_ + 1) % capacity_;
    }
}

const models::Transition& ReplayBuffer::at(std::size_t logical) const {
    if (logical >= data_.size()) throw std::out_of_range("ReplayBuffer: index out of range");
    if (data_.size() < capacity_) return data_[logical];
    return data_[(head_ + logical) % capacity_];
}

std::vector<models::Transition> ReplayBuffer::sample(std::size_t batch,
                                                     std::mt19937_64& rng) const {
    if (data_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<models::Transition> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(data_[pick(rng)]);
    return out;
}

double EpsilonSchedule::at(std::int64_t step) const {
    if (total_steps <= 1) return step <= 0 ? eps_start : eps_end;
    if (step <= 0) return eps_start;
    if (step >= total_steps - 1) return eps_end;  // endpoint exact, no rounding
    const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
    return eps_start + (eps_end - eps_start) * t;
}

void TrainConfig::validate() const {
    if (epochs < 0 || batch < 1 || explore_per_epoch < 1 || buffer == 0 || eval_episodes < 1)
        throw std::invalid_argument("TrainConfig: nonpositive field");
    if (lr <= 0.0 || gamma < 0.0 || gamma > 1.0 || ema_c < 0.0 || ema_c > 1.0)
        throw std::invalid_argument("TrainConfig: rate out of range");
    if (eps_start < eps_end || eps_end < 0.0 || eps_start > 1.0)
        throw std::invalid_argument("TrainConfig: need 1 >= eps_start >= eps_end >= 0");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("TrainConfig: bad hidden size");
}

CollectStats collect(Env& env, models::ModelKind kind, const nn::MlpParams& params, double eps,
                     int steps, ReplayBuffer& buffer, std::mt19937_64& rng,
                     std::function<std::uint64_t()> episode_seed,
                     std::vector<std::vector<double>>& current_obs, bool& episode_live) {
    const int n = env.n_agents();
    const int A = env.num_actions();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> random_action(0, A - 1);

    CollectStats stats;
    for (int s = 0; s < steps; ++s) {
        if (!episode_live) {
            current_obs = env.reset(episode_seed());
            episode_live = true;
        }
        // Fixed draw order for reproducibility: n coins, then one action
        // per exploring agent.
        std::vector<char> explore(static_cast<std::size_t>(n), 0);
        bool all_explore = true;
        for (int i = 0; i < n; ++i) {
            explore[i] = coin(rng) < eps;
            all_explore = all_explore && explore[i];
        }
        std::vector<int> actions(static_cast<std::size_t>(n), 0);
        if (!all_explore) {
            const auto q = models::compute_q(kind, params,
                                             models::append_agent_ids(current_obs), A);
            actions = models::greedy_actions(q);
        }
        for (int i = 0; i < n; ++i)
            if (explore[i]) actions[i] = random_action(rng);

        const Env::StepResult res = env.step(actions);
        models::Transition tr;
        tr.obs = models::append_agent_ids(current_obs);
        tr.actions = actions;
        tr.reward = res.reward;
        tr.next_obs = models::append_agent_ids(res.obs);
        tr.done = res.done;
        buffer.push(std::move(tr));
        current_obs = res.obs;
        ++stats.env_steps;
        if (res.done) {
            episode_live = false;
            ++stats.episodes_finished;
        }
    }
    return stats;
}

namespace {

EvalResult summarize(std::vector<double> rewards) {
    EvalResult r;
    double sum = 0.0;
    for (double v : rewards) sum += v;
    r.mean = sum / static_cast<double>(rewards.size());
    double ss = 0.0;
    for (double v : rewards) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(rewards.size()));
    r.episode_rewards = std::move(rewards);
    return r;
}

}  // namespace

EvalResult evaluate(Env& env, models::ModelKind kind, const nn::MlpParams& params, int episodes,
                    std::uint64_t base_seed) {
    if (episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
    const int A = env.num_actions();
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        auto obs = env.reset(base_seed + static_cast<std::uint64_t>(e));
        double total = 0.0;
        bool done = false;
        while (!done) {
            const auto q = models::compute_q(kind, params, models::append_agent_ids(obs), A);
            const Env::StepResult res = env.step(models::greedy_actions(q));
            total += res.reward;
            obs = res.obs;
            done = res.done;
        }
        rewards.push_back(total);
    }
    return summarize(std::move(rewards));
}

EvalResult evaluate_random(Env& env, int episodes, std::uint64_t base_seed) {
    if (episodes < 1) throw std::invalid_argument("evaluate_random: need at least one episode");
    const int n = env.n_agents();
    std::uniform_int_distribution<int> random_action(0, env.num_actions() - 1);
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        env.reset(base_seed + static_cast<std::uint64_t>(e));
        std::mt19937_64 rng(base_seed * 0x9e3779b97f4a7c15ULL +
                            static_cast<std::uint64_t>(e));
        double total = 0.0;
        bool done = false;
        while (!done) {
            std::vector<int> actions(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) actions[i] = random_action(rng);
            const Env::StepResult res = env.step(actions);
            total += res.reward;
            done = res.done;
        }
        rewards.push_back(total);
    }
    return summarize(std::move(rewards));
}

TrainResult train(const TrainConfig& config, Env& env, models::ModelKind kind,
                  const std::function<void(int, const TrainResult&)>& on_epoch) {
    config.validate();
    const int n = env.n_agents();
    const int A = env.num_actions();
    const int obs_width = env.obs_dim() + n;  // one-hot IDs appended

    std::vector<int> sizes;
    sizes.push_back(models::expected_input_dim(kind, obs_width));
    for (int h : config.hidden) sizes.push_back(h);
    sizes.push_back(kind == models::ModelKind::PAIR_VDN ? A * A : A);

    // Independent derived streams so collection noise can't shift
    // initialization or sampling.
    const std::uint64_t init_seed = config.seed * 0x9e3779b97f4a7c15ULL + 1;
    std::mt19937_64 collect_rng(config.seed * 0x9e3779b97f4a7c15ULL + 2);
    std::mt19937_64 sample_rng(config.seed * 0x9e3779b97f4a7c15ULL + 3);
    const std::uint64_t eval_base = config.seed * 0x9e3779b97f4a7c15ULL + 4;
    std::uint64_t episode_counter = 0;

    TrainResult result;
    result.params = nn::make_mlp(sizes, init_seed);
    result.target_params = result.params;

    ReplayBuffer buffer(config.buffer);
    EpsilonSchedule schedule{config.eps_start, config.eps_end,
                             static_cast<std::int64_t>(config.epochs) *
                                 config.explore_per_epoch};

    std::vector<std::vector<double>> obs;
    bool live = false;
    auto next_episode_seed = [&]() { return eval_base + (1ULL << 32) + episode_counter++; };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (int s = 0; s < config.explore_per_epoch; ++s) {
            const double eps = schedule.at(result.env_steps);
            collect(env, kind, result.params, eps, 1, buffer, collect_rng, next_episode_seed,
                    obs, live);
            ++result.env_steps;
            if (buffer.size() >= static_cast<std::size_t>(config.batch)) {
                const auto batch = buffer.sample(static_cast<std::size_t>(config.batch),
                                                 sample_rng);
                const models::LossGrad lg = models::td_loss_and_grad(
                    kind, result.params, result.target_params, batch, config.gamma, A);
                if (!std::isfinite(lg.loss))
                    throw std::runtime_error("train: loss diverged (non-finite) at env step " +
                                             std::to_string(result.env_steps));
                result.params = nn::sgd_step(result.params, lg.grad, config.lr);
                result.target_params =
                    nn::ema_update(result.target_params, result.params, config.ema_c);
                ++result.sgd_steps;
            }
        }

        const EvalResult ev =
            evaluate(env, kind, result.params, config.eval_episodes,
                     eval_base + static_cast<std::uint64_t>(epoch) * config.eval_episodes);
        result.curve.push_back({epoch, ev.mean, ev.stddev});
        // Evaluation reset the env, so the collection episode restarts.
        live = false;
        if (on_epoch) on_epoch(epoch, result);
    }
    return result;
}

void write_curve(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open curve file for writing: " + path);
    os << "epoch,mean_reward,std_reward\n";
    char buf[128];
    for (const CurvePoint& p : curve) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", p.epoch, p.mean_reward,
                      p.std_reward);
        os << buf;
    }
}

}  // namespace pairdqn::train
