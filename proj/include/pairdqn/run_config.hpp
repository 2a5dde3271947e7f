#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "pairdqn/checkpoint.hpp"
#include "pairdqn/env.hpp"
#include "pairdqn/training.hpp"

namespace pairdqn::config {

// Run description read from a JSON config file. Defaults match the stock
// hyperparameters; unknown keys are rejected.
struct RunConfig {
    train::TrainConfig train;
    std::string env = "unison";  // "boxjump", "unison", or "table:<path>"
    nn::ModelKind kind = nn::ModelKind::PAIR_VDN;
    int n_agents = 4;
    int num_actions = 2;  // matrix games; boxjump fixes |A| = 4
    int t_max = 400;
    std::string out_dir = "out";
};

// Throws std::runtime_error with a position-qualified message on parse
// errors, unknown keys, or out-of-range values.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin);

std::unique_ptr<Env> make_env(const RunConfig& cfg);

// FNV-1a over the raw config bytes, for the run manifest.
std::uint64_t fnv1a64(const std::string& bytes);

// Manifest JSON: config hash, seed, source description string.
void write_manifest(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
                    const std::string& version);

// `git describe --always --dirty` when available, else "unknown".
std::string describe_source_version();

}  // namespace pairdqn::config
