#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "pairdqn/boxjump.hpp"
#include "pairdqn/checkpoint.hpp"
#include "pairdqn/factor_max.hpp"
#include "pairdqn/matrix_game.hpp"
#include "pairdqn/models.hpp"
#include "pairdqn/run_config.hpp"
#include "pairdqn/training.hpp"
#include "pairdqn/verify.hpp"

namespace fs = std::filesystem;
using namespace pairdqn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // verification / evaluation failure
constexpr int kExitUsage = 2;    // usage or config error

std::unique_ptr<Env> env_from_flags(const std::string& env_name, int agents, int actions,
                                    int tmax) {
    config::RunConfig rc;
    rc.env = env_name;
    rc.n_agents = agents;
    rc.num_actions = actions;
    rc.t_max = tmax;
    return config::make_env(rc);
}

int cmd_train(const std::string& config_path) {
    config::RunConfig cfg;
    std::string raw;
    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "config not found: " << config_path << "\n";
            return kExitUsage;
        }
        std::ostringstream ss;
        ss << is.rdbuf();
        raw = ss.str();
        cfg = config::parse_run_config_text(raw, config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        fs::create_directories(cfg.out_dir);
        config::write_manifest(cfg.out_dir + "/manifest", config::fnv1a64(raw),
                               cfg.train.seed, config::describe_source_version());
        auto env = config::make_env(cfg);
        const auto result = train::train(
            cfg.train, *env, cfg.kind, [&](int epoch, const train::TrainResult& r) {
                char name[32];
                std::snprintf(name, sizeof(name), "ckpt_%03d", epoch);
                nn::save_checkpoint(cfg.out_dir + "/" + name,
                                    {cfg.kind, cfg.n_agents, env->num_actions(), r.params});
            });
        nn::save_checkpoint(cfg.out_dir + "/ckpt_final",
                            {cfg.kind, cfg.n_agents, env->num_actions(), result.params});
        train::write_curve(cfg.out_dir + "/curve.csv", result.curve);
        if (!result.curve.empty())
            std::cout << "final eval reward " << result.curve.back().mean_reward << " +- "
                      << result.curve.back().std_reward << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "train failed: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_eval(const std::string& ckpt, bool random_policy, const std::string& env_name,
             int agents, int actions, int tmax, int episodes, std::uint64_t seed) {
    try {
        auto env = env_from_flags(env_name, agents, actions, tmax);
        train::EvalResult ev;
        if (random_policy) {
            ev = train::evaluate_random(*env, episodes, seed);
        } else {
            const nn::Checkpoint ck = nn::load_checkpoint(ckpt);
            if (ck.n_agents != env->n_agents() || ck.num_actions != env->num_actions()) {
                std::cerr << "checkpoint was trained for n=" << ck.n_agents
                          << ", |A|=" << ck.num_actions << " but env has n=" << env->n_agents()
                          << ", |A|=" << env->num_actions() << "\n";
                return kExitFailure;
            }
            ev = train::evaluate(*env, ck.kind, ck.params, episodes, seed);
        }
        std::printf("%s episodes=%d tmax=%d mean=%.6f +- %.6f\n",
                    random_policy ? "random" : ckpt.c_str(), episodes, tmax, ev.mean,
                    ev.stddev);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "eval failed: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_bench(const std::vector<int>& n_list, int actions, int trials, std::uint64_t seed) {
    const auto rows = factor::bench_scaling(n_list, actions, trials, seed);
    for (const auto& row : rows) std::printf("%d,%.9f\n", row.n, row.mean_seconds);
    return kExitOk;
}

int cmd_verify(const std::string& suite) {
    verify::SuiteResult res;
    if (suite == "dp")
        res = verify::run_dp_suite();
    else if (suite == "graph")
        res = verify::run_graph_suite();
    else if (suite == "grad")
        res = verify::run_grad_suite();
    else if (suite == "env")
        res = verify::run_env_suite();
    else {
        std::cerr << "unknown suite: " << suite << " (expected dp, graph, grad, or env)\n";
        return kExitUsage;
    }
    if (!res.ok) {
        std::cout << "FAIL " << suite << ": " << res.detail << "\n";
        return kExitFailure;
    }
    std::cout << "PASS " << suite << " (" << res.checked << " checks)\n";
    return kExitOk;
}

int cmd_render(const std::string& ckpt, bool random_policy, std::uint64_t seed, int agents,
               int tmax, int every, const std::string& out_dir) {
    try {
        boxjump::BoxJumpConfig bc;
        bc.t_max = tmax;
        boxjump::BoxJumpEnv env(agents, bc);
        nn::Checkpoint ck;
        if (!random_policy) {
            ck = nn::load_checkpoint(ckpt);
            if (ck.n_agents != agents || ck.num_actions != env.num_actions()) {
                std::cerr << "checkpoint does not match env dimensions\n";
                return kExitFailure;
            }
        }
        fs::create_directories(out_dir + "/frames");
        std::ofstream log(out_dir + "/episode.jsonl", std::ios::trunc);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> act(0, env.num_actions() - 1);

        auto obs = env.reset(seed);
        auto frame = [&](int step) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s/frames/frame_%05d.ppm", out_dir.c_str(),
                          step);
            boxjump::render_ppm(env, name);
        };
        frame(0);
        bool done = false;
        int step = 0;
        while (!done) {
            std::vector<int> actions(static_cast<std::size_t>(agents));
            if (random_policy) {
                for (int i = 0; i < agents; ++i) actions[i] = act(rng);
            } else {
                const auto q = models::compute_q(ck.kind, ck.params,
                                                 models::append_agent_ids(obs),
                                                 env.num_actions());
                actions = models::greedy_actions(q);
            }
            const auto r = env.step(actions);
            ++step;
            log << boxjump::episode_log_line(step, actions, r.reward, env.state().y_best)
                << "\n";
            if (step % every == 0 || r.done) frame(step);
            obs = r.obs;
            done = r.done;
        }
        std::cout << "wrote " << out_dir << "/frames (" << step << " steps)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "render failed: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PairVDN toolkit: cooperative multi-agent DQN with pairwise value "
                 "decomposition"};
    app.require_subcommand(1);

    std::string config_path;
    auto* trainc = app.add_subcommand("train", "train a model from a JSON run config");
    trainc->add_option("config", config_path, "run config file")->required();

    std::string ckpt, env_name = "boxjump", out_dir = "render_out", suite;
    bool random_policy = false;
    int agents = 16, actions = 2, tmax = 400, episodes = 20, every = 50;
    std::uint64_t seed = 0;
    int trials = 5;
    std::vector<int> n_list = {250, 500, 1000, 2000};

    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint (or a random policy)");
    evalc->add_option("--ckpt", ckpt, "checkpoint path");
    evalc->add_flag("--random", random_policy, "evaluate the random-policy baseline");
    evalc->add_option("--env", env_name, "boxjump, unison, or table:<path>");
    evalc->add_option("--agents", agents, "agent count");
    evalc->add_option("--actions", actions, "action count (matrix games)");
    evalc->add_option("--tmax", tmax, "episode length cap (400/1000 presets)");
    evalc->add_option("--episodes", episodes, "evaluation episodes");
    evalc->add_option("--seed", seed, "base seed (episode e uses seed+e)");

    auto* benchc = app.add_subcommand("bench", "time the cycle maximizer; prints n,mean_seconds");
    benchc->add_option("--n", n_list, "agent counts to time");
    benchc->add_option("--actions", actions, "action count")->default_val(4);
    benchc->add_option("--trials", trials, "trials per row");
    benchc->add_option("--seed", seed, "instance seed");

    auto* verifyc = app.add_subcommand("verify", "run an oracle property suite");
    verifyc->add_option("--suite", suite, "dp, graph, grad, or env")->required();

    auto* renderc = app.add_subcommand("render", "roll out a Box Jump episode to PPM frames");
    renderc->add_option("--ckpt", ckpt, "checkpoint path");
    renderc->add_flag("--random", random_policy, "random policy instead of a checkpoint");
    renderc->add_option("--seed", seed, "episode seed");
    renderc->add_option("--agents", agents, "agent count");
    renderc->add_option("--tmax", tmax, "episode length");
    renderc->add_option("--every", every, "frame cadence in steps");
    renderc->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (trainc->parsed()) return cmd_train(config_path);
    if (evalc->parsed()) {
        if (!random_policy && ckpt.empty()) {
            std::cerr << "eval: need --ckpt or --random\n";
            return kExitUsage;
        }
        return cmd_eval(ckpt, random_policy, env_name, agents, actions, tmax, episodes, seed);
    }
    if (benchc->parsed()) return cmd_bench(n_list, actions, trials, seed);
    if (verifyc->parsed()) return cmd_verify(suite);
    if (renderc->parsed()) {
        if (!random_policy && ckpt.empty()) {
            std::cerr << "render: need --ckpt or --random\n";
            return kExitUsage;
        }
        return cmd_render(ckpt, random_policy, seed, agents, tmax, every, out_dir);
    }
    return kExitUsage;
}
