#include "pairdqn/run_config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pairdqn/boxjump.hpp"
#include "pairdqn/matrix_game.hpp"

namespace pairdqn::config {

namespace {

using nlohmann::json;

matrixgame::MatrixGameSpec load_table_game(const std::string& path, int expected_n,
                                           int expected_actions) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open payoff table: " + path);
    int n = 0, actions = 0;
    if (!(is >> n >> actions))
        throw std::runtime_error("payoff table " + path + ": expected header 'n num_actions'");
    if (expected_n != 0 && n != expected_n)
        throw std::runtime_error("payoff table " + path + ": n_agents mismatch with config");
    if (expected_actions != 0 && actions != expected_actions)
        throw std::runtime_error("payoff table " + path + ": num_actions mismatch with config");
    std::uint64_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::uint64_t>(actions);
    std::vector<double> table(count);
    for (std::uint64_t i = 0; i < count; ++i)
        if (!(is >> table[i]))
            throw std::runtime_error("payoff table " + path + ": truncated at entry " +
                                     std::to_string(i));
    return matrixgame::MatrixGameSpec::full_table(n, actions, std::move(table));
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(origin + ": config must be a JSON object");

    static const std::set<std::string> known = {
        "epochs",     "lr",        "batch",      "gamma",     "ema_c",
        "eps_start",  "eps_end",   "explore_per_epoch",       "hidden",
        "buffer",     "eval_episodes",           "seed",      "env",
        "model",      "n_agents",  "num_actions",             "t_max",
        "out_dir"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::runtime_error(origin + ": unknown config key '" + it.key() + "'");

    RunConfig cfg;
    try {
        if (j.contains("epochs")) cfg.train.epochs = j["epochs"].get<int>();
        if (j.contains("lr")) cfg.train.lr = j["lr"].get<double>();
        if (j.contains("batch")) cfg.train.batch = j["batch"].get<int>();
        if (j.contains("gamma")) cfg.train.gamma = j["gamma"].get<double>();
        if (j.contains("ema_c")) cfg.train.ema_c = j["ema_c"].get<double>();
        if (j.contains("eps_start")) cfg.train.eps_start = j["eps_start"].get<double>();
        if (j.contains("eps_end")) cfg.train.eps_end = j["eps_end"].get<double>();
        if (j.contains("explore_per_epoch"))
            cfg.train.explore_per_epoch = j["explore_per_epoch"].get<int>();
        if (j.contains("hidden")) cfg.train.hidden = j["hidden"].get<std::vector<int>>();
        if (j.contains("buffer")) cfg.train.buffer = j["buffer"].get<std::size_t>();
        if (j.contains("eval_episodes"))
            cfg.train.eval_episodes = j["eval_episodes"].get<int>();
        if (j.contains("seed")) cfg.train.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("env")) cfg.env = j["env"].get<std::string>();
        if (j.contains("model")) cfg.kind = nn::kind_from_name(j["model"].get<std::string>());
        if (j.contains("n_agents")) cfg.n_agents = j["n_agents"].get<int>();
        if (j.contains("num_actions")) cfg.num_actions = j["num_actions"].get<int>();
        if (j.contains("t_max")) cfg.t_max = j["t_max"].get<int>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(origin + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    try {
        cfg.train.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (cfg.env != "boxjump" && cfg.env != "unison" && cfg.env.rfind("table:", 0) != 0)
        throw std::runtime_error(origin + ": env must be boxjump, unison, or table:<path>");
    if (cfg.n_agents < 2) throw std::runtime_error(origin + ": n_agents must be >= 2");
    if (cfg.num_actions < 1) throw std::runtime_error(origin + ": num_actions must be >= 1");
    if (cfg.t_max < 1) throw std::runtime_error(origin + ": t_max must be >= 1");
    return cfg;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config not found: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_run_config_text(ss.str(), path);
}

std::unique_ptr<Env> make_env(const RunConfig& cfg) {
    if (cfg.env == "boxjump") {
        boxjump::BoxJumpConfig bc;
        bc.t_max = cfg.t_max;
        return std::make_unique<boxjump::BoxJumpEnv>(cfg.n_agents, bc);
    }
    if (cfg.env == "unison")
        return std::make_unique<matrixgame::MatrixGameEnv>(
            matrixgame::MatrixGameSpec::unison(cfg.n_agents, cfg.num_actions));
    if (cfg.env.rfind("table:", 0) == 0)
        return std::make_unique<matrixgame::MatrixGameEnv>(
            load_table_game(cfg.env.substr(6), cfg.n_agents, cfg.num_actions));
    throw std::runtime_error("unknown env: " + cfg.env);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_manifest(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
                    const std::string& version) {
    nlohmann::json m;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
    m["config_hash"] = hex;
    m["seed"] = seed;
    m["version"] = version;
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write manifest: " + path);
    os << m.dump(2) << "\n";
}

std::string describe_source_version() {
    std::array<char, 128> buf{};
    FILE* p = popen("git describe --always --dirty 2>/dev/null", "r");
    if (!p) return "unknown";
    std::string out;
    while (fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    pclose(p);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

}  // namespace pairdqn::config
