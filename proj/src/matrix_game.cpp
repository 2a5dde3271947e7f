#include "pairdqn/matrix_game.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pairdqn::matrixgame {

MatrixGameSpec MatrixGameSpec::unison(int n, int num_actions) {
    if (n < 2 || num_actions < 1) throw std::invalid_argument("unison: bad dimensions");
    MatrixGameSpec s;
    s.kind = PayoffKind::UNISON;
    s.n = n;
    s.num_actions = num_actions;
    return s;
}

MatrixGameSpec MatrixGameSpec::full_table(int n, int num_actions, std::vector<double> table) {
    if (n < 2 || n > 8) throw std::invalid_argument("full_table: n must be in [2,8]");
    MatrixGameSpec s;
    s.kind = PayoffKind::FULL_TABLE;
    s.n = n;
    s.num_actions = num_actions;
    s.table = std::move(table);
    if (s.table.size() != s.joint_count())
        throw std::invalid_argument("full_table: table size must be |A|^n");
    for (double v : s.table)
        if (!std::isfinite(v)) throw std::invalid_argument("full_table: non-finite payoff");
    return s;
}

MatrixGameSpec MatrixGameSpec::random_sparse(int n, int num_actions, double density,
                                             std::uint64_t seed) {
    if (n < 2 || n > 8) throw std::invalid_argument("random_sparse: n must be in [2,8]");
    MatrixGameSpec s;
    s.kind = PayoffKind::RANDOM_SPARSE;
    s.n = n;
    s.num_actions = num_actions;
    s.table.assign(s.joint_count(), 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (double& v : s.table)
        if (value(rng) < density) v = value(rng);
    return s;
}

std::uint64_t MatrixGameSpec::joint_count() const {
    std::uint64_t k = 1;
    for (int i = 0; i < n; ++i) k *= static_cast<std::uint64_t>(num_actions);
    return k;
}

double MatrixGameSpec::payoff(const std::vector<int>& actions) const {
    if (actions.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("payoff: wrong action count");
    for (int a : actions)
        if (a < 0 || a >= num_actions) throw std::invalid_argument("payoff: action out of range");
    if (kind == PayoffKind::UNISON) {
        int matches = 0;
        for (int i = 0; i < n; ++i)
            if (actions[i] == actions[(i + 1) % n]) ++matches;
        return static_cast<double>(matches);
    }
    std::uint64_t idx = 0;
    for (int i = 0; i < n; ++i)
        idx = idx * static_cast<std::uint64_t>(num_actions) + actions[i];
    return table[idx];
}

PlayResult play(const MatrixGameSpec& spec, const std::vector<int>& actions) {
    return PlayResult{spec.payoff(actions), true};
}

double fit_decomposition(nn::ModelKind kind, const MatrixGameSpec& spec, int iterations,
                         double lr) {
    const int n = spec.n;
    const int A = spec.num_actions;
    const std::uint64_t K = spec.joint_count();
    if (K > 100'000'000ULL)
        throw std::invalid_argument("fit_decomposition: joint action space too large");

    const bool pairwise = kind == nn::ModelKind::PAIR_VDN;
    // Flat parameter vector: pairwise -> n tables of A*A, additive -> n
    // vectors of A (VDN and IQL share the additive joint form).
    const std::size_t per = pairwise ? static_cast<std::size_t>(A) * A
                                     : static_cast<std::size_t>(A);
    std::vector<double> theta(per * n, 0.0);
    std::vector<double> grad(theta.size());
    std::vector<double> payoffs(K);
    {
        std::vector<int> a(static_cast<std::size_t>(n), 0);
        for (std::uint64_t s = 0; s < K; ++s) {
            payoffs[s] = spec.payoff(a);
            for (int i = n - 1; i >= 0; --i) {
                if (++a[i] < A) break;
                a[i] = 0;
            }
        }
    }

    auto residual = [&]() {
        double sse = 0.0;
        std::vector<int> a(static_cast<std::size_t>(n), 0);
        for (std::uint64_t s = 0; s < K; ++s) {
            double f = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::size_t idx =
                    pairwise ? per * i + static_cast<std::size_t>(a[i]) * A + a[(i + 1) % n]
                             : per * i + static_cast<std::size_t>(a[i]);
                f += theta[idx];
            }
            const double e = f - payoffs[s];
            sse += e * e;
            for (int i = n - 1; i >= 0; --i) {
                if (++a[i] < A) break;
                a[i] = 0;
            }
        }
        return std::sqrt(sse / static_cast<double>(K));
    };

    for (int it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double sse = 0.0;
        std::vector<int> a(static_cast<std::size_t>(n), 0);
        for (std::uint64_t s = 0; s < K; ++s) {
            double f = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::size_t idx =
                    pairwise ? per * i + static_cast<std::size_t>(a[i]) * A + a[(i + 1) % n]
                             : per * i + static_cast<std::size_t>(a[i]);
                f += theta[idx];
            }
            const double e = f - payoffs[s];
            sse += e * e;
            const double d = 2.0 * e / static_cast<double>(K);
            for (int i = 0; i < n; ++i) {
                const std::size_t idx =
                    pairwise ? per * i + static_cast<std::size_t>(a[i]) * A + a[(i + 1) % n]
                             : per * i + static_cast<std::size_t>(a[i]);
                grad[idx] += d;
            }
            for (int i = n - 1; i >= 0; --i) {
                if (++a[i] < A) break;
                a[i] = 0;
            }
        }
        (void)sse;
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
    }
    return residual();
}

std::vector<std::vector<double>> MatrixGameEnv::reset(std::uint64_t) {
    done_ = false;
    // Single dummy state: a constant scalar per agent.
    return std::vector<std::vector<double>>(static_cast<std::size_t>(spec_.n),
                                            std::vector<double>{1.0});
}

Env::StepResult MatrixGameEnv::step(const std::vector<int>& actions) {
    if (done_) throw std::logic_error("MatrixGameEnv: episode already finished");
    done_ = true;
    StepResult res;
    res.reward = spec_.payoff(actions);
    res.done = true;
    res.obs = std::vector<std::vector<double>>(static_cast<std::size_t>(spec_.n),
                                               std::vector<double>{1.0});
    return res;
}

}  // namespace pairdqn::matrixgame
