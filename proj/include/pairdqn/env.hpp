#pragma once

#include <cstdint>
#include <vector>

namespace pairdqn {

// Minimal environment surface the training harness needs. Observations are
// raw per-agent vectors; one-hot agent IDs are appended by the model layer.
class Env {
public:
    virtual ~Env() = default;

    virtual int n_agents() const = 0;
    virtual int num_actions() const = 0;
    virtual int obs_dim() const = 0;

    struct StepResult {
        std::vector<std::vector<double>> obs;
        double reward = 0.0;
        bool done = false;
    };

    virtual std::vector<std::vector<double>> reset(std::uint64_t seed) = 0;
    virtual StepResult step(const std::vector<int>& actions) = 0;
};

}  // namespace pairdqn
