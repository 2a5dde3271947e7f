#include "pairdqn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pairdqn/boxjump.hpp"

namespace pairdqn::verify {

namespace {

factor::PairwiseTableSet random_tables(int n, int A, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    factor::PairwiseTableSet q(n, A);
    for (auto& t : q.tables)
        for (double& v : t) v = dist(rng);
    return q;
}

std::string describe_instance(const factor::PairwiseTableSet& q,
                              const factor::FactorTopology& topo, double got, double want) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << q.n << " |A|=" << q.num_actions << " got=" << got << " want=" << want
       << " edges=[";
    for (int i = 0; i < topo.n; ++i) os << (i ? "," : "") << topo.edge[i];
    os << "] tables=[";
    for (int i = 0; i < q.n; ++i) {
        os << (i ? ";" : "");
        for (std::size_t k = 0; k < q.tables[i].size(); ++k)
            os << (k ? "," : "") << q.tables[i][k];
    }
    os << "]";
    return os.str();
}

}  // namespace

factor::FactorTopology random_topology(int n, GraphFlavour flavour, std::mt19937_64& rng) {
    factor::FactorTopology topo;
    topo.n = n;
    topo.edge.assign(static_cast<std::size_t>(n), 0);
    auto random_edge = [&](int i, int lo, int hi) {
        std::uniform_int_distribution<int> pick(lo, hi - 1);
        int j = pick(rng);
        if (j == i) j = (j + 1 - lo) % (hi - lo) + lo;
        return j;
    };
    switch (flavour) {
        case GraphFlavour::CANONICAL_CYCLE:
            return factor::FactorTopology::cycle(n);
        case GraphFlavour::TREES_ON_2CYCLE: {
            // Nodes 0 and 1 form the only cycle; every other node points at
            // a strictly smaller node, forming pendant trees.
            topo.edge[0] = 1;
            topo.edge[1] = 0;
            for (int i = 2; i < n; ++i) topo.edge[i] = random_edge(i, 0, i);
            return topo;
        }
        case GraphFlavour::RANDOM: {
            for (int i = 0; i < n; ++i) topo.edge[i] = random_edge(i, 0, n);
            return topo;
        }
        case GraphFlavour::MULTI_COMPONENT: {
            // Two halves with no cross edges; each half is its own
            // functional graph (n >= 4 required for two 2-cycles).
            const int m = std::max(2, n / 2);
            for (int i = 0; i < m; ++i) topo.edge[i] = random_edge(i, 0, m);
            // A second half needs at least two nodes to close a cycle of its
            // own; below that, hang the leftover node off the first half.
            for (int i = m; i < n; ++i)
                topo.edge[i] = (n - m >= 2) ? random_edge(i, m, n) : random_edge(i, 0, m);
            return topo;
        }
    }
    return topo;
}

SuiteResult run_dp_suite(int instances, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(2, 8), pick_a(2, 5);
    SuiteResult res;
    for (int it = 0; it < instances; ++it) {
        const int n = pick_n(rng), A = pick_a(rng);
        const auto q = random_tables(n, A, rng);
        const auto topo = factor::FactorTopology::cycle(n);
        const auto dp = factor::argmax_cycle(q);
        const auto bf = factor::argmax_bruteforce(q, topo);
        const double self = factor::evaluate_joint(q, topo, dp.actions);
        if (std::abs(dp.value - bf.value) > 1e-9 || self != dp.value) {
            res.ok = false;
            res.detail = "cycle DP mismatch: " + describe_instance(q, topo, dp.value, bf.value);
            return res;
        }
        ++res.checked;
    }
    return res;
}

SuiteResult run_graph_suite(int instances, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(3, 8), pick_a(2, 4);
    constexpr GraphFlavour flavours[] = {GraphFlavour::CANONICAL_CYCLE,
                                         GraphFlavour::TREES_ON_2CYCLE, GraphFlavour::RANDOM,
                                         GraphFlavour::MULTI_COMPONENT};
    SuiteResult res;
    for (int it = 0; it < instances; ++it) {
        const GraphFlavour flavour = flavours[it % 4];
        int n = pick_n(rng);
        if (flavour == GraphFlavour::MULTI_COMPONENT) n = std::max(n, 4);
        const int A = pick_a(rng);
        const auto q = random_tables(n, A, rng);
        const auto topo = random_topology(n, flavour, rng);
        const auto dp = factor::argmax_graph(q, topo);
        const auto bf = factor::argmax_bruteforce(q, topo);
        const double self = factor::evaluate_joint(q, topo, dp.actions);
        if (std::abs(dp.value - bf.value) > 1e-9 || self != dp.value) {
            res.ok = false;
            res.detail = "graph DP mismatch: " + describe_instance(q, topo, dp.value, bf.value);
            return res;
        }
        ++res.checked;
    }
    return res;
}

std::vector<double> naive_forward(const nn::MlpParams& p, const std::vector<double>& x) {
    std::vector<double> cur = x;
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        const nn::Layer& l = p.layers[k];
        std::vector<double> next(static_cast<std::size_t>(l.out));
        for (int r = 0; r < l.out; ++r) {
            double s = l.b[r];
            for (int c = 0; c < l.in; ++c)
                s += l.w[static_cast<std::size_t>(r) * l.in + c] * cur[c];
            next[r] = s;
        }
        if (k + 1 < p.layers.size())
            for (double& v : next) v = std::max(0.0, v);
        cur = next;
    }
    return cur;
}

double min_hidden_margin(const nn::MlpParams& p, const std::vector<double>& x) {
    double margin = std::numeric_limits<double>::infinity();
    std::vector<double> cur = x;
    for (std::size_t k = 0; k + 1 < p.layers.size(); ++k) {
        const nn::Layer& l = p.layers[k];
        std::vector<double> next(static_cast<std::size_t>(l.out));
        for (int r = 0; r < l.out; ++r) {
            double s = l.b[r];
            for (int c = 0; c < l.in; ++c)
                s += l.w[static_cast<std::size_t>(r) * l.in + c] * cur[c];
            margin = std::min(margin, std::abs(s));
            next[r] = std::max(0.0, s);
        }
        cur = next;
    }
    return margin;
}

namespace {

constexpr double kFdStep = 1e-5;

double rel_err(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1e-2});
    return std::abs(got - want) / scale;
}

template <class Fn>
double fd_max_rel_err(nn::MlpParams p, const nn::MlpParams& analytic, Fn&& value) {
    double worst = 0.0;
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        auto probe = [&](std::vector<double>& params, const std::vector<double>& grads) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double keep = params[i];
                params[i] = keep + kFdStep;
                const double hi = value(p);
                params[i] = keep - kFdStep;
                const double lo = value(p);
                params[i] = keep;
                worst = std::max(worst, rel_err(grads[i], (hi - lo) / (2.0 * kFdStep)));
            }
        };
        probe(p.layers[k].w, analytic.layers[k].w);
        probe(p.layers[k].b, analytic.layers[k].b);
    }
    return worst;
}

}  // namespace

double grad_max_rel_err(const nn::MlpParams& p, const std::vector<double>& x,
                        const std::vector<double>& upstream) {
    const nn::MlpParams g = nn::mlp_backward(p, x, upstream);
    return fd_max_rel_err(p, g, [&](const nn::MlpParams& q) {
        const std::vector<double> y = naive_forward(q, x);
        return std::inner_product(y.begin(), y.end(), upstream.begin(), 0.0);
    });
}

double td_grad_max_rel_err(models::ModelKind kind, const nn::MlpParams& p,
                           const nn::MlpParams& target,
                           const std::vector<models::Transition>& batch, double gamma,
                           int num_actions) {
    const models::LossGrad lg = models::td_loss_and_grad(kind, p, target, batch, gamma,
                                                         num_actions);
    return fd_max_rel_err(p, lg.grad, [&](const nn::MlpParams& q) {
        return models::td_loss_and_grad(kind, q, target, batch, gamma, num_actions).loss;
    });
}

SuiteResult run_grad_suite(int checks, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SuiteResult res;

    for (int it = 0; it < checks; ++it) {
        const std::vector<int> sizes = {5, 7, 6, 3};
        nn::MlpParams p = nn::make_mlp(sizes, rng());
        std::vector<double> x(5), upstream(3);
        // Keep preactivations away from the ReLU kink so central
        // differences see a smooth function.
        do {
            for (double& v : x) v = unit(rng);
        } while (min_hidden_margin(p, x) < 10.0 * kFdStep);
        for (double& v : upstream) v = unit(rng);
        const double err = grad_max_rel_err(p, x, upstream);
        if (err >= 1e-4) {
            res.ok = false;
            std::ostringstream os;
            os << "mlp gradient check " << it << " failed: max rel err " << err;
            res.detail = os.str();
            return res;
        }
        ++res.checked;
    }

    // Full TD loss gradient on a random batch of 8 (pairvdn path; the
    // unit tests cover vdn/iql).
    const int n = 3, A = 2;
    const int obs_width = 1 + n;
    nn::MlpParams p = nn::make_mlp({2 * obs_width, 6, A * A}, rng());
    nn::MlpParams target = nn::make_mlp({2 * obs_width, 6, A * A}, rng());
    std::uniform_int_distribution<int> act(0, A - 1);
    std::vector<models::Transition> batch;
    for (int t = 0; t < 8; ++t) {
        models::Transition tr;
        std::vector<std::vector<double>> raw(n), raw_next(n);
        for (int i = 0; i < n; ++i) {
            raw[i] = {unit(rng)};
            raw_next[i] = {unit(rng)};
        }
        tr.obs = models::append_agent_ids(raw);
        tr.next_obs = models::append_agent_ids(raw_next);
        tr.actions.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) tr.actions[i] = act(rng);
        tr.reward = unit(rng);
        tr.done = t % 4 == 0;
        batch.push_back(std::move(tr));
    }
    const double err = td_grad_max_rel_err(models::ModelKind::PAIR_VDN, p, target, batch, 0.99,
                                           A);
    if (err >= 1e-4) {
        res.ok = false;
        std::ostringstream os;
        os << "td loss gradient check failed: max rel err " << err;
        res.detail = os.str();
        return res;
    }
    ++res.checked;
    return res;
}

SuiteResult run_env_suite(int episodes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SuiteResult res;
    boxjump::BoxJumpConfig cfg;
    cfg.t_max = 200;
    boxjump::BoxJumpEnv env(8, cfg);
    std::uniform_int_distribution<int> act(0, boxjump::kNumActions - 1);
    for (int e = 0; e < episodes; ++e) {
        env.reset(seed + static_cast<std::uint64_t>(e));
        const double y0 = env.state().y_best;
        double total = 0.0;
        double prev_best = y0;
        bool done = false;
        int step = 0;
        while (!done) {
            std::vector<int> actions(8);
            for (int i = 0; i < 8; ++i) actions[i] = act(rng);
            const auto r = env.step(actions);
            total += r.reward;
            done = r.done;
            ++step;
            if (env.state().y_best < prev_best - 1e-12) {
                res.ok = false;
                res.detail = "y_best decreased in episode " + std::to_string(e) + " at step " +
                             std::to_string(step);
                return res;
            }
            prev_best = env.state().y_best;
            for (const auto& o : r.obs) {
                const bool bounds_ok =
                    o.size() == boxjump::kObsDim && o[0] >= 0.0 && o[0] <= 1.0 &&
                    o[1] >= 0.0 && o[1] <= 1.0 && std::abs(o[2]) <= env.config().max_speed &&
                    std::abs(o[3]) <= env.config().max_speed && o[4] == 0.0 &&
                    o[5] >= 0.0 && o[5] <= 1.0 && o[6] >= 0.0 && o[6] <= 1.0 &&
                    o[7] >= 0.0 && o[7] <= 1.0 && o[8] >= 0.0 && o[8] <= 1.0 &&
                    (o[9] == 0.0 || o[9] == 1.0) && o[10] >= 0.0 && o[10] <= 1.0 &&
                    o[11] >= 0.0 && o[11] <= 1.0;
                if (!bounds_ok) {
                    res.ok = false;
                    res.detail = "observation out of documented range, episode " +
                                 std::to_string(e) + " step " + std::to_string(step);
                    return res;
                }
            }
        }
        int fallen = 0;
        for (const auto& a : env.state().agents) fallen += a.fallen ? 1 : 0;
        const double expected = (env.state().y_best - y0) - env.config().fall_penalty * fallen;
        if (std::abs(total - expected) > 1e-6) {
            res.ok = false;
            std::ostringstream os;
            os.precision(17);
            os << "reward accounting broken in episode " << e << ": sum(r)=" << total
               << " expected=" << expected << " (fallen=" << fallen << ")";
            res.detail = os.str();
            return res;
        }
        ++res.checked;
    }
    return res;
}

}  // namespace pairdqn::verify
