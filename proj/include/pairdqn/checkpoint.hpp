#pragma once

#include <string>

#include "pairdqn/mlp.hpp"

namespace pairdqn::nn {

// Model kind stored in checkpoint headers and run configs.
enum class ModelKind : unsigned char { PAIR_VDN = 0, VDN = 1, IQL = 2 };

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

struct Checkpoint {
    ModelKind kind = ModelKind::PAIR_VDN;
    int n_agents = 0;
    int num_actions = 0;
    MlpParams params;
};

// Binary container: magic, format-version byte, kind, n_agents, num_actions,
// layer-size list, then per layer row-major little-endian f64 weights and
// biases.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pairdqn::nn
