#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pairdqn/env.hpp"

namespace pairdqn::boxjump {

// All physics constants in one place. World units: the map spans [0,1]
// horizontally and y is normalized so 1.0 is one map-width of height.
struct BoxJumpConfig {
    double box_side = 0.05;
    double gravity = -1.2;          // units/s^2
    double jump_speed = 0.42;       // vy set on jump, units/s
    double move_accel = 0.2;        // horizontal accel from actions 1/2
    double ground_friction = 0.7;   // vx decay per step while supported
    double dt = 1.0 / 30.0;
    // Speed clamp keeps per-step displacement below half a box side, so
    // boxes cannot tunnel through each other or the floor.
    double max_speed = 0.7;
    double jump_vy_threshold = 1e-3;  // |vy| <= this counts as "still"
    int jump_history = 15;            // frames of stillness required to jump
    double fall_penalty = 1.0;
    double contact_tol = 1e-9;
    int solver_passes = 4;
    int t_max = 400;
    double jitter_frac = 0.05;  // of initial spacing
    // Spawn line: boxes sit evenly spaced on a centered line. Spacing is
    // min_gap_frac extra box widths apart when the map allows, which keeps
    // the line short and leaves room at the edges; with many agents the
    // line stretches toward the full map width.
    double min_gap_frac = 1.0;
};

// Actions: 0 no-op, 1 force left, 2 force right, 3 jump (if able).
inline constexpr int kNumActions = 4;
inline constexpr int kObsDim = 12;

struct AgentBox {
    double x = 0.0;  // center
    double y = 0.0;  // center
    double vx = 0.0;
    double vy = 0.0;
    bool grounded = false;  // resting on floor or on another box
    bool fallen = false;
    std::vector<double> vy_history;  // |vy| of the most recent frames
};

struct RayDistances {
    double left = 1.0, right = 1.0, up = 1.0, down = 1.0;
};

struct BoxWorldState {
    std::vector<AgentBox> agents;
    double y_best = 0.0;  // highest box-top seen this episode, nondecreasing
    int t_remaining = 0;
    bool done = false;
    std::mt19937_64 rng;
};

class BoxJumpEnv final : public Env {
public:
    explicit BoxJumpEnv(int n_agents, const BoxJumpConfig& cfg = {});

    int n_agents() const override { return n_; }
    int num_actions() const override { return kNumActions; }
    int obs_dim() const override { return kObsDim; }

    std::vector<std::vector<double>> reset(std::uint64_t seed) override;
    StepResult step(const std::vector<int>& actions) override;

    bool can_jump(int agent) const;
    RayDistances ray_distances(int agent) const;

    const BoxWorldState& state() const { return state_; }
    // Direct state access so tests and tools can pose boxes exactly.
    BoxWorldState& mutable_state() { return state_; }
    const BoxJumpConfig& config() const { return cfg_; }

private:
    std::vector<double> observe(int agent) const;
    std::vector<std::vector<double>> observe_all() const;

    int n_;
    BoxJumpConfig cfg_;
    BoxWorldState state_;
    bool started_ = false;
};

// One line per step: step index, actions, reward, y_best as a JSON object.
std::string episode_log_line(int step_index, const std::vector<int>& actions, double reward,
                             double y_best);

// Binary PPM (P6) snapshot of box positions.
void render_ppm(const BoxJumpEnv& env, const std::string& path, int width = 256,
                int height = 256);

}  // namespace pairdqn::boxjump
