#include "pairdqn/boxjump.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pairdqn::boxjump {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

namespace {

double spawn_spacing(int n_agents, const BoxJumpConfig& cfg) {
    const double preferred = cfg.box_side * (1.0 + cfg.min_gap_frac);
    const double widest = 1.0 / (n_agents + 1);
    return std::min(preferred, widest);
}

}  // namespace

BoxJumpEnv::BoxJumpEnv(int n_agents, const BoxJumpConfig& cfg) : n_(n_agents), cfg_(cfg) {
    if (n_agents < 1) throw std::invalid_argument("BoxJumpEnv: need at least one agent");
    // Even with maximal jitter, neighbouring boxes must not start overlapped.
    if (spawn_spacing(n_agents, cfg) * (1.0 - 2.0 * cfg.jitter_frac) <= cfg.box_side)
        throw std::invalid_argument("BoxJumpEnv: too many agents for the map width");
}

std::vector<std::vector<double>> BoxJumpEnv::reset(std::uint64_t seed) {
    state_ = BoxWorldState{};
    state_.rng.seed(seed);
    state_.agents.assign(static_cast<std::size_t>(n_), AgentBox{});
    const double spacing = spawn_spacing(n_, cfg_);
    const double left = (1.0 - spacing * (n_ + 1)) / 2.0;  // center the spawn line
    const double half = cfg_.box_side / 2.0;
    std::uniform_real_distribution<double> jitter(-cfg_.jitter_frac * spacing,
                                                  cfg_.jitter_frac * spacing);
    for (int i = 0; i < n_; ++i) {
        AgentBox& a = state_.agents[i];
        a.x = left + (i + 1) * spacing + jitter(state_.rng);
        a.y = half;  // resting on the floor
        a.grounded = true;
        a.vy_history.assign(static_cast<std::size_t>(cfg_.jump_history), 0.0);
    }
    state_.y_best = cfg_.box_side;  // box top at rest
    state_.t_remaining = cfg_.t_max;
    state_.done = false;
    started_ = true;
    return observe_all();
}

bool BoxJumpEnv::can_jump(int agent) const {
    const AgentBox& a = state_.agents.at(agent);
    if (a.fallen) return false;
    if (static_cast<int>(a.vy_history.size()) < cfg_.jump_history) return false;
    for (double v : a.vy_history)
        if (v > cfg_.jump_vy_threshold) return false;
    return true;
}

Env::StepResult BoxJumpEnv::step(const std::vector<int>& actions) {
    if (!started_) throw std::logic_error("BoxJumpEnv: step before reset");
    if (state_.done) throw std::logic_error("BoxJumpEnv: episode already finished");
    if (actions.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("BoxJumpEnv: wrong action count");
    for (int a : actions)
        if (a < 0 || a >= kNumActions)
            throw std::invalid_argument("BoxJumpEnv: action out of range");

    const double half = cfg_.box_side / 2.0;
    const double y_best_before = state_.y_best;
    int newly_fallen = 0;

    // Forces and impulses.
    for (int i = 0; i < n_; ++i) {
        AgentBox& a = state_.agents[i];
        if (a.fallen) continue;
        switch (actions[i]) {
            case 1: a.vx -= cfg_.move_accel * cfg_.dt; break;
            case 2: a.vx += cfg_.move_accel * cfg_.dt; break;
            case 3:
                if (can_jump(i)) a.vy = cfg_.jump_speed;
                break;
            default: break;
        }
    }

    // Gravity, clamps, integration.
    for (AgentBox& a : state_.agents) {
        if (a.fallen) continue;
        a.vy += cfg_.gravity * cfg_.dt;
        a.vx = std::clamp(a.vx, -cfg_.max_speed, cfg_.max_speed);
        a.vy = std::clamp(a.vy, -cfg_.max_speed, cfg_.max_speed);
        a.x += a.vx * cfg_.dt;
        a.y += a.vy * cfg_.dt;
        a.grounded = false;
    }

    // Floor contact; the floor only spans the map.
    for (AgentBox& a : state_.agents) {
        if (a.fallen) continue;
        const bool over_map = a.x + half > 0.0 && a.x - half < 1.0;
        if (over_map && a.y - half < 0.0) {
            a.y = half;
            if (a.vy < 0.0) a.vy = 0.0;
            a.grounded = true;
        }
    }

    // Pairwise AABB resolution, several passes bottom-up.
    std::vector<int> order;
    for (int i = 0; i < n_; ++i)
        if (!state_.agents[i].fallen) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int l, int r) {
        return state_.agents[l].y < state_.agents[r].y;
    });
    for (int pass = 0; pass < cfg_.solver_passes; ++pass) {
        for (std::size_t ii = 0; ii < order.size(); ++ii) {
            for (std::size_t jj = ii + 1; jj < order.size(); ++jj) {
                AgentBox& p = state_.agents[order[ii]];
                AgentBox& q = state_.agents[order[jj]];
                const double ox = cfg_.box_side - std::abs(p.x - q.x);
                const double oy = cfg_.box_side - std::abs(p.y - q.y);
                if (ox <= cfg_.contact_tol || oy <= cfg_.contact_tol) continue;
                if (oy <= ox) {
                    // Vertical: settle the upper box onto the lower one.
                    AgentBox& lower = p.y <= q.y ? p : q;
                    AgentBox& upper = p.y <= q.y ? q : p;
                    upper.y = lower.y + cfg_.box_side;
                    if (upper.vy < lower.vy) upper.vy = lower.vy;
                    upper.grounded = true;
                } else {
                    // Horizontal: push apart symmetrically, kill approach speed.
                    const double push = ox / 2.0;
                    if (p.x <= q.x) {
                        p.x -= push;
                        q.x += push;
                    } else {
                        p.x += push;
                        q.x -= push;
                    }
                    const double approach = (p.x < q.x) ? (p.vx - q.vx) : (q.vx - p.vx);
                    if (approach > 0.0) {
                        const double mean = (p.vx + q.vx) / 2.0;
                        p.vx = mean;
                        q.vx = mean;
                    }
                }
            }
        }
    }

    // Friction while supported, fall-off detection, jump history.
    for (AgentBox& a : state_.agents) {
        if (a.fallen) continue;
        if (a.grounded) a.vx *= cfg_.ground_friction;
        if (a.x + half <= 0.0 || a.x - half >= 1.0) {
            a.fallen = true;
            ++newly_fallen;
            continue;
        }
        a.vy_history.erase(a.vy_history.begin());
        a.vy_history.push_back(std::abs(a.vy));
    }

    // Height bookkeeping over surviving boxes.
    for (const AgentBox& a : state_.agents)
        if (!a.fallen) state_.y_best = std::max(state_.y_best, a.y + half);

    StepResult res;
    res.reward = (state_.y_best - y_best_before) - cfg_.fall_penalty * newly_fallen;
    --state_.t_remaining;
    state_.done = state_.t_remaining <= 0;
    res.done = state_.done;
    res.obs = observe_all();
    return res;
}

RayDistances BoxJumpEnv::ray_distances(int agent) const {
    const AgentBox& a = state_.agents.at(agent);
    RayDistances d;
    if (a.fallen) return d;
    const double half = cfg_.box_side / 2.0;
    for (int j = 0; j < n_; ++j) {
        if (j == agent) continue;
        const AgentBox& b = state_.agents[j];
        if (b.fallen) continue;
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        if (std::abs(dy) < cfg_.box_side) {  // vertical overlap: left/right rays hit
            if (dx < 0.0) d.left = std::min(d.left, -dx - cfg_.box_side);
            if (dx > 0.0) d.right = std::min(d.right, dx - cfg_.box_side);
        }
        if (std::abs(dx) < cfg_.box_side) {  // horizontal overlap: up/down rays hit
            if (dy > 0.0) d.up = std::min(d.up, dy - cfg_.box_side);
            if (dy < 0.0) d.down = std::min(d.down, -dy - cfg_.box_side);
        }
    }
    // The floor counts for the down ray while the box is over the map.
    if (a.x + half > 0.0 && a.x - half < 1.0) d.down = std::min(d.down, a.y - half);
    d.left = clamp01(d.left);
    d.right = clamp01(d.right);
    d.up = clamp01(d.up);
    d.down = clamp01(d.down);
    return d;
}

std::vector<double> BoxJumpEnv::observe(int agent) const {
    const AgentBox& a = state_.agents[agent];
    const double half = cfg_.box_side / 2.0;
    const double t_norm = static_cast<double>(state_.t_remaining) / cfg_.t_max;
    if (a.fallen) {
        // Frozen sentinel: everything clamped, height pinned at 0.
        return {clamp01(a.x), 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0,
                0.0, clamp01(state_.y_best), t_norm};
    }
    const RayDistances d = ray_distances(agent);
    return {clamp01(a.x),
            clamp01(a.y + half),  // box top
            a.vx,
            a.vy,
            0.0,  // angle, constant in the no-rotation variant
            d.left,
            d.right,
            d.up,
            d.down,
            can_jump(agent) ? 1.0 : 0.0,
            clamp01(state_.y_best),
            t_norm};
}

std::vector<std::vector<double>> BoxJumpEnv::observe_all() const {
    std::vector<std::vector<double>> obs;
    obs.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) obs.push_back(observe(i));
    return obs;
}

std::string episode_log_line(int step_index, const std::vector<int>& actions, double reward,
                             double y_best) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"step\":" << step_index << ",\"actions\":[";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) os << ',';
        os << actions[i];
    }
    os << "],\"reward\":" << reward << ",\"y_best\":" << y_best << "}";
    return os.str();
}

void render_ppm(const BoxJumpEnv& env, const std::string& path, int width, int height) {
    std::vector<unsigned char> pix(static_cast<std::size_t>(width) * height * 3, 255);
    auto put = [&](int px, int py, unsigned char r, unsigned char g, unsigned char b) {
        if (px < 0 || px >= width || py < 0 || py >= height) return;
        const std::size_t k = (static_cast<std::size_t>(py) * width + px) * 3;
        pix[k] = r;
        pix[k + 1] = g;
        pix[k + 2] = b;
    };
    // Floor line at y = 0.
    for (int px = 0; px < width; ++px) put(px, height - 1, 40, 40, 40);

    const double side = env.config().box_side;
    const auto& agents = env.state().agents;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].fallen) continue;
        const double l = agents[i].x - side / 2.0, b = agents[i].y - side / 2.0;
        const int x0 = static_cast<int>(l * width);
        const int x1 = static_cast<int>((l + side) * width);
        const int y1 = height - 1 - static_cast<int>(b * height);
        const int y0 = height - 1 - static_cast<int>((b + side) * height);
        const unsigned char r = static_cast<unsigned char>(60 + (i * 53) % 180);
        const unsigned char g = static_cast<unsigned char>(60 + (i * 101) % 180);
        const unsigned char bl = static_cast<unsigned char>(60 + (i * 197) % 180);
        for (int py = y0; py <= y1; ++py)
            for (int px = x0; px <= x1; ++px) put(px, py, r, g, bl);
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open frame for writing: " + path);
    os << "P6\n" << width << " " << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(pix.data()),
             static_cast<std::streamsize>(pix.size()));
}

}  // namespace pairdqn::boxjump
