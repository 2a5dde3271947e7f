#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "pairdqn/boxjump.hpp"
#include "pairdqn/matrix_game.hpp"
#include "pairdqn/run_config.hpp"

using namespace pairdqn;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
    const auto dir = fs::temp_directory_path() / "pairdqn_config_test";
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream os(path, std::ios::trunc);
    os << body;
    return path;
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("an empty object yields the stock hyperparameters") {
    const auto cfg = config::parse_run_config_text("{}", "test");
    CHECK(cfg.train.epochs == 100);
    CHECK(cfg.train.lr == 1e-4);
    CHECK(cfg.train.batch == 32);
    CHECK(cfg.train.gamma == 0.99);
    CHECK(cfg.train.ema_c == 0.99);
    CHECK(cfg.train.eps_start == 1.0);
    CHECK(cfg.train.eps_end == 0.05);
    CHECK(cfg.train.explore_per_epoch == 400);
    CHECK(cfg.train.hidden == std::vector<int>{128, 128});
    CHECK(cfg.train.buffer == 20000);
    CHECK(cfg.kind == nn::ModelKind::PAIR_VDN);
}

TEST_CASE("every documented key is representable") {
    const auto cfg = config::parse_run_config_text(
        R"({"epochs": 7, "lr": 0.001, "batch": 16, "gamma": 0.9, "ema_c": 0.95,
            "eps_start": 0.8, "eps_end": 0.1, "explore_per_epoch": 50,
            "hidden": [32, 16], "buffer": 500, "eval_episodes": 3, "seed": 42,
            "env": "boxjump", "model": "vdn", "n_agents": 6, "num_actions": 4,
            "t_max": 100, "out_dir": "runs/x"})",
        "test");
    CHECK(cfg.train.epochs == 7);
    CHECK(cfg.train.hidden == std::vector<int>{32, 16});
    CHECK(cfg.train.seed == 42);
    CHECK(cfg.env == "boxjump");
    CHECK(cfg.kind == nn::ModelKind::VDN);
    CHECK(cfg.n_agents == 6);
    CHECK(cfg.t_max == 100);
    CHECK(cfg.out_dir == "runs/x");
}

TEST_CASE("unknown keys and malformed text are rejected with the origin") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(config::parse_run_config_text("{\"leraning_rate\": 1}", "cfg.json")),
        "cfg.json: unknown config key 'leraning_rate'", std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(config::parse_run_config_text("epochs: 3", "cfg.json")),
                    std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(config::parse_run_config_text("[1,2]", "cfg.json")),
                    std::runtime_error);
}

TEST_CASE("out-of-range values are rejected at parse time") {
    CHECK_THROWS_AS(
        static_cast<void>(config::parse_run_config_text("{\"lr\": 0}", "t")),
        std::runtime_error);
    CHECK_THROWS_AS(
        static_cast<void>(config::parse_run_config_text("{\"eps_end\": 1.5}", "t")),
        std::runtime_error);
    CHECK_THROWS_AS(
        static_cast<void>(config::parse_run_config_text("{\"env\": \"cartpole\"}", "t")),
        std::runtime_error);
    CHECK_THROWS_AS(
        static_cast<void>(config::parse_run_config_text("{\"model\": \"qmix\"}", "t")),
        std::runtime_error);
    CHECK_THROWS_AS(
        static_cast<void>(config::parse_run_config_text("{\"n_agents\": 1}", "t")),
        std::runtime_error);
}

TEST_CASE("missing config files fail with a clear message") {
    CHECK_THROWS_AS(static_cast<void>(config::parse_run_config("/nonexistent/nowhere.json")),
                    std::runtime_error);
}

TEST_CASE("the env factory builds each environment family") {
    config::RunConfig cfg;
    cfg.env = "boxjump";
    cfg.n_agents = 5;
    cfg.t_max = 123;
    auto bj = config::make_env(cfg);
    CHECK(dynamic_cast<boxjump::BoxJumpEnv*>(bj.get()) != nullptr);
    CHECK(bj->n_agents() == 5);
    CHECK(bj->num_actions() == 4);

    cfg.env = "unison";
    cfg.num_actions = 3;
    auto un = config::make_env(cfg);
    CHECK(dynamic_cast<matrixgame::MatrixGameEnv*>(un.get()) != nullptr);
    CHECK(un->num_actions() == 3);

    const auto table = temp_file("game.txt", "2 2\n0 1\n1 0\n");
    cfg.env = "table:" + table.string();
    cfg.n_agents = 2;
    cfg.num_actions = 2;
    auto tg = config::make_env(cfg);
    auto* game = dynamic_cast<matrixgame::MatrixGameEnv*>(tg.get());
    REQUIRE(game != nullptr);
    CHECK(game->spec().payoff({0, 1}) == 1.0);
    CHECK(game->spec().payoff({1, 1}) == 0.0);

    cfg.env = "table:/nonexistent/game.txt";
    CHECK_THROWS_AS(static_cast<void>(config::make_env(cfg)), std::runtime_error);

    const auto truncated = temp_file("short.txt", "2 2\n0 1\n");
    cfg.env = "table:" + truncated.string();
    CHECK_THROWS_AS(static_cast<void>(config::make_env(cfg)), std::runtime_error);
}

TEST_CASE("the config hash matches the FNV-1a reference vectors") {
    CHECK(config::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(config::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(config::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("manifests record hash, seed and version") {
    const auto path = temp_file("manifest", "");
    config::write_manifest(path.string(), 0xdeadbeefULL, 7, "v1-test");
    std::ifstream is(path);
    std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(body.find("\"config_hash\": \"00000000deadbeef\"") != std::string::npos);
    CHECK(body.find("\"seed\": 7") != std::string::npos);
    CHECK(body.find("\"version\": \"v1-test\"") != std::string::npos);
}

}  // TEST_SUITE
