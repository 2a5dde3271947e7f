#pragma once

#include <cstdint>
#include <vector>

namespace pairdqn::factor {

// One pairwise Q-table per agent. tables[i] is a num_actions x num_actions
// grid stored row-major: entry(i, a, b) is the value of agent i taking
// action a while its partner j(i) takes action b. weights[i] scales table i.
struct PairwiseTableSet {
    int n = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> tables;  // n tables, each A*A row-major
    std::vector<double> weights;              // n scalars, default 1.0

    PairwiseTableSet() = default;
    PairwiseTableSet(int n_agents, int actions);

    double entry(int i, int a, int b) const {
        return tables[i][static_cast<std::size_t>(a) * num_actions + b];
    }
    double& entry(int i, int a, int b) {
        return tables[i][static_cast<std::size_t>(a) * num_actions + b];
    }

    // Throws std::invalid_argument on shape mismatch or non-finite values.
    void validate() const;
};

// Directed graph with exactly one outgoing edge per node. edge[i] = j(i).
struct FactorTopology {
    int n = 0;
    std::vector<int> edge;

    static FactorTopology cycle(int n_agents);

    bool is_canonical_cycle() const;
    // Throws std::invalid_argument on self-loops or out-of-range edges.
    void validate() const;
};

struct ArgmaxResult {
    std::vector<int> actions;
    double value = 0.0;
};

// F(a) = sum_i w_i * tables[i][a_i][a_edge(i)].
double evaluate_joint(const PairwiseTableSet& q, const FactorTopology& topo,
                      const std::vector<int>& actions);

// Exhaustive search, lexicographically-smallest tie break. Test oracle;
// refuses instances with more than `cap` joint actions.
ArgmaxResult argmax_bruteforce(const PairwiseTableSet& q, const FactorTopology& topo,
                               std::uint64_t cap = 10'000'000);

// Exact maximization over the canonical cycle i -> (i+1) mod n in
// O(n*A^3) time and O(n*A^2) space.
ArgmaxResult argmax_cycle(const PairwiseTableSet& q);

// Exact maximization over an arbitrary functional graph: pendant trees are
// folded into their cycle roots by a leaf-to-root pass, then each cycle is
// solved with the cycle recurrence.
ArgmaxResult argmax_graph(const PairwiseTableSet& q, const FactorTopology& topo);

struct BenchRow {
    int n = 0;
    double mean_seconds = 0.0;
};

// Times argmax_cycle on random instances, `trials` per row.
std::vector<BenchRow> bench_scaling(const std::vector<int>& n_list, int num_actions,
                                    int trials, std::uint64_t seed = 0);

}  // namespace pairdqn::factor
