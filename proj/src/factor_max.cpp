#include "pairdqn/factor_max.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace pairdqn::factor {

PairwiseTableSet::PairwiseTableSet(int n_agents, int actions)
    : n(n_agents),
      num_actions(actions),
      tables(static_cast<std::size_t>(n_agents),
             std::vector<double>(static_cast<std::size_t>(actions) * actions, 0.0)),
      weights(static_cast<std::size_t>(n_agents), 1.0) {}

void PairwiseTableSet::validate() const {
    if (n < 2 || num_actions < 1)
        throw std::invalid_argument("PairwiseTableSet: need n >= 2 and num_actions >= 1");
    if (tables.size() != static_cast<std::size_t>(n) ||
        weights.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("PairwiseTableSet: table/weight count != n");
    const std::size_t expect = static_cast<std::size_t>(num_actions) * num_actions;
    for (int i = 0; i < n; ++i) {
        if (tables[i].size() != expect)
            throw std::invalid_argument("PairwiseTableSet: table " + std::to_string(i) +
                                        " is not num_actions x num_actions");
        for (double v : tables[i])
            if (!std::isfinite(v))
                throw std::invalid_argument("PairwiseTableSet: non-finite value in table " +
                                            std::to_string(i));
        if (!std::isfinite(weights[i]))
            throw std::invalid_argument("PairwiseTableSet: non-finite weight");
    }
}

FactorTopology FactorTopology::cycle(int n_agents) {
    FactorTopology t;
    t.n = n_agents;
    t.edge.resize(static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) t.edge[i] = (i + 1) % n_agents;
    return t;
}

bool FactorTopology::is_canonical_cycle() const {
    for (int i = 0; i < n; ++i)
        if (edge[i] != (i + 1) % n) return false;
    return true;
}

void FactorTopology::validate() const {
    if (n < 2) throw std::invalid_argument("FactorTopology: need n >= 2");
    if (edge.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("FactorTopology: edge map must cover every node");
    for (int i = 0; i < n; ++i) {
        if (edge[i] < 0 || edge[i] >= n)
            throw std::invalid_argument("FactorTopology: edge target out of range");
        if (edge[i] == i) throw std::invalid_argument("FactorTopology: self-loop at node " +
                                                      std::to_string(i));
    }
}

double evaluate_joint(const PairwiseTableSet& q, const FactorTopology& topo,
                      const std::vector<int>& actions) {
    q.validate();
    topo.validate();
    if (topo.n != q.n)
        throw std::invalid_argument("evaluate_joint: topology/table agent count mismatch");
    if (actions.size() != static_cast<std::size_t>(q.n))
        throw std::invalid_argument("evaluate_joint: wrong action count");
    for (int a : actions)
        if (a < 0 || a >= q.num_actions)
            throw std::invalid_argument("evaluate_joint: action out of range");
    double sum = 0.0;
    for (int i = 0; i < q.n; ++i)
        sum += q.weights[i] * q.entry(i, actions[i], actions[topo.edge[i]]);
    return sum;
}

ArgmaxResult argmax_bruteforce(const PairwiseTableSet& q, const FactorTopology& topo,
                               std::uint64_t cap) {
    q.validate();
    topo.validate();
    if (topo.n != q.n)
        throw std::invalid_argument("argmax_bruteforce: topology/table agent count mismatch");

    std::uint64_t total = 1;
    for (int i = 0; i < q.n; ++i) {
        if (total > cap / static_cast<std::uint64_t>(q.num_actions))
            throw std::invalid_argument("instance too large for oracle: |A|^n exceeds cap");
        total *= static_cast<std::uint64_t>(q.num_actions);
    }

    ArgmaxResult best;
    best.value = -std::numeric_limits<double>::infinity();
    // Odometer with agent 0 most significant: lexicographic order, so the
    // first maximum seen is the lexicographically smallest one.
    std::vector<int> actions(static_cast<std::size_t>(q.n), 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        double v = 0.0;
        for (int i = 0; i < q.n; ++i)
            v += q.weights[i] * q.entry(i, actions[i], actions[topo.edge[i]]);
        if (v > best.value) {
            best.value = v;
            best.actions = actions;
        }
        for (int i = q.n - 1; i >= 0; --i) {
            if (++actions[i] < q.num_actions) break;
            actions[i] = 0;
        }
    }
    // Fixed summation order for the reported value.
    best.value = evaluate_joint(q, topo, best.actions);
    return best;
}

namespace {

// Cycle DP over nodes[0..m), where nodes[k]'s table couples its own action
// with nodes[(k+1) % m]'s. table(k) must already include weights and any
// folded-in node potentials. Returns actions indexed by position in `nodes`.
ArgmaxResult solve_cycle(int num_actions,
                         const std::vector<const std::vector<double>*>& node_tables) {
    const int m = static_cast<int>(node_tables.size());
    const int A = num_actions;
    auto tab = [&](int k, int a, int b) {
        return (*node_tables[k])[static_cast<std::size_t>(a) * A + b];
    };

    // G[a1*A + ak]: best partial sum of the first k-1 terms given the
    // actions at positions 0 and k-1. Base: G_2(a1, a2) = table(0)[a1][a2].
    std::vector<double> g(static_cast<std::size_t>(A) * A);
    for (int a1 = 0; a1 < A; ++a1)
        for (int a2 = 0; a2 < A; ++a2) g[a1 * A + a2] = tab(0, a1, a2);

    // back[(k-2)*A*A + a1*A + a_{k+1}] = argmax over a_k in the step from
    // G_k to G_{k+1}. One flat allocation: per-step vectors would cost a
    // heap round-trip per node and scatter the backtrack data.
    const std::size_t slab = static_cast<std::size_t>(A) * A;
    std::vector<int> back(m >= 2 ? (static_cast<std::size_t>(m) - 2) * slab : 0, 0);
    std::vector<double> next(slab);
    for (int k = 2; k < m; ++k) {
        int* bp = back.data() + (static_cast<std::size_t>(k) - 2) * slab;
        for (int a1 = 0; a1 < A; ++a1) {
            for (int an = 0; an < A; ++an) {
                double best = -std::numeric_limits<double>::infinity();
                int best_prev = 0;
                for (int ak = 0; ak < A; ++ak) {
                    const double cand = g[a1 * A + ak] + tab(k - 1, ak, an);
                    if (cand > best) {
                        best = cand;
                        best_prev = ak;
                    }
                }
                next[a1 * A + an] = best;
                bp[a1 * A + an] = best_prev;
            }
        }
        g.swap(next);
    }

    // Close the loop with the term coupling the last node back to the first.
    double best = -std::numeric_limits<double>::infinity();
    int best_a1 = 0, best_am = 0;
    for (int a1 = 0; a1 < A; ++a1) {
        for (int am = 0; am < A; ++am) {
            const double cand = g[a1 * A + am] + tab(m - 1, am, a1);
            if (cand > best) {
                best = cand;
                best_a1 = a1;
                best_am = am;
            }
        }
    }

    ArgmaxResult res;
    res.value = best;
    res.actions.assign(static_cast<std::size_t>(m), 0);
    res.actions[0] = best_a1;
    res.actions[m - 1] = best_am;
    int cur = best_am;
    for (int k = m - 1; k >= 2; --k) {
        cur = back[(static_cast<std::size_t>(k) - 2) * slab + best_a1 * A + cur];
        res.actions[k - 1] = cur;
    }
    return res;
}

}  // namespace

ArgmaxResult argmax_cycle(const PairwiseTableSet& q) {
    q.validate();

    const int A = q.num_actions;
    // Pre-scale each table by its weight; keeps one DP code path.
    std::vector<std::vector<double>> scaled(static_cast<std::size_t>(q.n));
    std::vector<const std::vector<double>*> ptrs(static_cast<std::size_t>(q.n));
    for (int i = 0; i < q.n; ++i) {
        if (q.weights[i] == 1.0) {
            ptrs[i] = &q.tables[i];
        } else {
            scaled[i] = q.tables[i];
            for (double& v : scaled[i]) v *= q.weights[i];
            ptrs[i] = &scaled[i];
        }
    }
    ArgmaxResult res = solve_cycle(A, ptrs);
    res.value = evaluate_joint(q, FactorTopology::cycle(q.n), res.actions);
    return res;
}

ArgmaxResult argmax_graph(const PairwiseTableSet& q, const FactorTopology& topo) {
    q.validate();
    topo.validate();
    if (topo.n != q.n)
        throw std::invalid_argument("argmax_graph: topology/table agent count mismatch");

    const int n = q.n;
    const int A = q.num_actions;

    // Mark cycle nodes: walk i -> edge[i] with path coloring.
    std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0 new, 1 on path, 2 done
    std::vector<char> on_cycle(static_cast<std::size_t>(n), 0);
    for (int start = 0; start < n; ++start) {
        if (color[start] != 0) continue;
        std::vector<int> path;
        int v = start;
        while (color[v] == 0) {
            color[v] = 1;
            path.push_back(v);
            v = topo.edge[v];
        }
        if (color[v] == 1) {
            // Found a new cycle: the path tail from v onward.
            bool in = false;
            for (int u : path) {
                if (u == v) in = true;
                if (in) on_cycle[u] = 1;
            }
        }
        for (int u : path) color[u] = 2;
    }

    // Leaf-to-root tree pass. For each non-cycle node i,
    // M[i][b] = max_a (w_i*T_i[a][b] + sum of children contributions at a),
    // where b is the action taken by edge[i].
    std::vector<int> pending(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        if (!on_cycle[i]) ++pending[topo.edge[i]];

    std::vector<std::vector<double>> m_table(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> m_pick(static_cast<std::size_t>(n));
    // contrib[v][a]: summed M of v's already-processed tree children.
    std::vector<std::vector<double>> contrib(static_cast<std::size_t>(n));
    auto child_sum = [&](int v, int a) {
        return contrib[v].empty() ? 0.0 : contrib[v][a];
    };

    std::queue<int> ready;
    for (int i = 0; i < n; ++i)
        if (!on_cycle[i] && pending[i] == 0) ready.push(i);

    std::vector<int> tree_order;
    while (!ready.empty()) {
        const int i = ready.front();
        ready.pop();
        tree_order.push_back(i);
        m_table[i].assign(static_cast<std::size_t>(A), 0.0);
        m_pick[i].assign(static_cast<std::size_t>(A), 0);
        for (int b = 0; b < A; ++b) {
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const double cand = q.weights[i] * q.entry(i, a, b) + child_sum(i, a);
                if (cand > best) {
                    best = cand;
                    best_a = a;
                }
            }
            m_table[i][b] = best;
            m_pick[i][b] = best_a;
        }
        const int parent = topo.edge[i];
        if (contrib[parent].empty()) contrib[parent].assign(static_cast<std::size_t>(A), 0.0);
        for (int a = 0; a < A; ++a) contrib[parent][a] += m_table[i][a];
        if (!on_cycle[parent] && --pending[parent] == 0) ready.push(parent);
    }

    // Solve each cycle with tree contributions folded into node potentials.
    std::vector<int> actions(static_cast<std::size_t>(n), -1);
    std::vector<char> cycle_done(static_cast<std::size_t>(n), 0);
    for (int start = 0; start < n; ++start) {
        if (!on_cycle[start] || cycle_done[start]) continue;
        std::vector<int> nodes;
        int v = start;
        do {
            nodes.push_back(v);
            cycle_done[v] = 1;
            v = topo.edge[v];
        } while (v != start);

        const int m = static_cast<int>(nodes.size());
        std::vector<std::vector<double>> folded(static_cast<std::size_t>(m));
        std::vector<const std::vector<double>*> ptrs(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const int u = nodes[k];
            folded[k].assign(static_cast<std::size_t>(A) * A, 0.0);
            // Node potential (the folded tree contribution) rides on row a.
            for (int a = 0; a < A; ++a) {
                const double pot = child_sum(u, a);
                for (int b = 0; b < A; ++b)
                    folded[k][static_cast<std::size_t>(a) * A + b] =
                        q.weights[u] * q.entry(u, a, b) + pot;
            }
            ptrs[k] = &folded[k];
        }
        ArgmaxResult cyc = solve_cycle(A, ptrs);
        for (int k = 0; k < m; ++k) actions[nodes[k]] = cyc.actions[k];
    }

    // Root-to-leaf backtrack through the trees.
    for (auto it = tree_order.rbegin(); it != tree_order.rend(); ++it) {
        const int i = *it;
        actions[i] = m_pick[i][actions[topo.edge[i]]];
    }

    ArgmaxResult res;
    res.actions = std::move(actions);
    res.value = evaluate_joint(q, topo, res.actions);
    return res;
}

std::vector<BenchRow> bench_scaling(const std::vector<int>& n_list, int num_actions,
                                    int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<BenchRow> rows;
    // Single solves at moderate n run in well under a millisecond, where
    // cold caches and scheduler noise dominate the clock. Each trial warms
    // up once, then times a block of repeated solves and reports seconds
    // per solve.
    constexpr int kRepeats = 10;
    for (int n : n_list) {
        double total = 0.0;
        for (int t = 0; t < trials; ++t) {
            PairwiseTableSet q(n, num_actions);
            for (auto& tab : q.tables)
                for (double& v : tab) v = dist(rng);
            volatile double sink = argmax_cycle(q).value;
            const auto t0 = std::chrono::steady_clock::now();
            for (int r = 0; r < kRepeats; ++r) sink = argmax_cycle(q).value;
            (void)sink;
            const auto t1 = std::chrono::steady_clock::now();
            total += std::chrono::duration<double>(t1 - t0).count() / kRepeats;
        }
        rows.push_back({n, total / trials});
    }
    return rows;
}

}  // namespace pairdqn::factor
