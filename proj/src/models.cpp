#include "pairdqn/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace pairdqn::models {

JointObservation append_agent_ids(const std::vector<std::vector<double>>& raw) {
    const std::size_t n = raw.size();
    JointObservation out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i].size() != raw[0].size())
            throw std::invalid_argument("append_agent_ids: uneven observation widths");
        out[i] = raw[i];
        out[i].resize(raw[i].size() + n, 0.0);
        out[i][raw[i].size() + i] = 1.0;
    }
    return out;
}

int expected_input_dim(ModelKind kind, int obs_width) {
    return kind == ModelKind::PAIR_VDN ? 2 * obs_width : obs_width;
}

namespace {

void check_widths(ModelKind kind, const nn::MlpParams& params, const JointObservation& jo) {
    if (jo.size() < 2) throw std::invalid_argument("compute_q: need at least 2 agents");
    const int w = static_cast<int>(jo[0].size());
    for (const auto& o : jo)
        if (static_cast<int>(o.size()) != w)
            throw std::invalid_argument("compute_q: uneven observation widths");
    if (params.input_dim() != expected_input_dim(kind, w))
        throw std::invalid_argument("compute_q: network input width mismatch");
}

std::vector<double> pair_input(const JointObservation& jo, int i, int j) {
    std::vector<double> x = jo[i];
    x.insert(x.end(), jo[j].begin(), jo[j].end());
    return x;
}

int argmax_smallest(const std::vector<double>& v) {
    int best = 0;
    for (int a = 1; a < static_cast<int>(v.size()); ++a)
        if (v[a] > v[best]) best = a;
    return best;
}

}  // namespace

QOutput compute_q(ModelKind kind, const nn::MlpParams& params, const JointObservation& jo,
                  int num_actions) {
    check_widths(kind, params, jo);
    const int n = static_cast<int>(jo.size());
    QOutput q;
    q.kind = kind;
    if (kind == ModelKind::PAIR_VDN) {
        if (params.output_dim() != num_actions * num_actions)
            throw std::invalid_argument("compute_q: output dim must be |A|^2 for pairvdn");
        q.tables = factor::PairwiseTableSet(n, num_actions);
        for (int i = 0; i < n; ++i)
            q.tables.tables[i] = nn::mlp_forward(params, pair_input(jo, i, (i + 1) % n));
    } else {
        if (params.output_dim() != num_actions)
            throw std::invalid_argument("compute_q: output dim must be |A|");
        q.per_agent.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) q.per_agent[i] = nn::mlp_forward(params, jo[i]);
    }
    return q;
}

double joint_value(const QOutput& q, const std::vector<int>& actions) {
    switch (q.kind) {
        case ModelKind::PAIR_VDN:
            return factor::evaluate_joint(q.tables, factor::FactorTopology::cycle(q.tables.n),
                                          actions);
        case ModelKind::VDN: {
            if (actions.size() != q.per_agent.size())
                throw std::invalid_argument("joint_value: wrong action count");
            double s = 0.0;
            for (std::size_t i = 0; i < actions.size(); ++i) s += q.per_agent[i].at(actions[i]);
            return s;
        }
        case ModelKind::IQL:
            throw std::logic_error("joint_value: IQL has per-agent values only");
    }
    throw std::invalid_argument("joint_value: bad kind");
}

std::vector<double> per_agent_values(const QOutput& q, const std::vector<int>& actions) {
    if (q.kind == ModelKind::PAIR_VDN)
        throw std::logic_error("per_agent_values: not defined for pairvdn");
    if (actions.size() != q.per_agent.size())
        throw std::invalid_argument("per_agent_values: wrong action count");
    std::vector<double> out(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) out[i] = q.per_agent[i].at(actions[i]);
    return out;
}

std::vector<int> greedy_actions(const QOutput& q) {
    if (q.kind == ModelKind::PAIR_VDN) return factor::argmax_cycle(q.tables).actions;
    std::vector<int> a(q.per_agent.size());
    for (std::size_t i = 0; i < q.per_agent.size(); ++i) a[i] = argmax_smallest(q.per_agent[i]);
    return a;
}

namespace {

// Bootstrap value(s) of the greedy next action under the target network.
std::vector<double> next_max(ModelKind kind, const nn::MlpParams& target_params,
                             const JointObservation& next_obs, int num_actions) {
    const QOutput qn = compute_q(kind, target_params, next_obs, num_actions);
    switch (kind) {
        case ModelKind::PAIR_VDN:
            return {factor::argmax_cycle(qn.tables).value};
        case ModelKind::VDN: {
            double s = 0.0;
            for (const auto& v : qn.per_agent) s += *std::max_element(v.begin(), v.end());
            return {s};
        }
        case ModelKind::IQL: {
            std::vector<double> out;
            out.reserve(qn.per_agent.size());
            for (const auto& v : qn.per_agent)
                out.push_back(*std::max_element(v.begin(), v.end()));
            return out;
        }
    }
    throw std::invalid_argument("next_max: bad kind");
}

}  // namespace

std::vector<std::vector<double>> td_targets(ModelKind kind, const nn::MlpParams& target_params,
                                            const std::vector<Transition>& batch, double gamma,
                                            int num_actions) {
    if (batch.empty()) throw std::invalid_argument("td_targets: empty batch");
    std::vector<std::vector<double>> ys;
    ys.reserve(batch.size());
    for (const Transition& tr : batch) {
        if (tr.done) {
            const std::size_t width = kind == ModelKind::IQL ? tr.obs.size() : 1;
            ys.emplace_back(width, tr.reward);
            continue;
        }
        std::vector<double> y = next_max(kind, target_params, tr.next_obs, num_actions);
        for (double& v : y) v = tr.reward + gamma * v;
        ys.push_back(std::move(y));
    }
    return ys;
}

LossGrad td_loss_and_grad(ModelKind kind, const nn::MlpParams& params,
                          const nn::MlpParams& target_params,
                          const std::vector<Transition>& batch, double gamma, int num_actions) {
    const auto ys = td_targets(kind, target_params, batch, gamma, num_actions);
    const int A = num_actions;
    LossGrad out;
    out.grad = nn::zeros_like(params);
    double loss = 0.0;
    std::size_t terms = 0;

    // First pass to size the normalization (IQL averages over agents too).
    for (const Transition& tr : batch)
        terms += kind == ModelKind::IQL ? tr.obs.size() : 1;
    const double inv = 1.0 / static_cast<double>(terms);

    for (std::size_t t = 0; t < batch.size(); ++t) {
        const Transition& tr = batch[t];
        const int n = static_cast<int>(tr.obs.size());
        if (kind == ModelKind::PAIR_VDN) {
            // Keep the pair inputs so the backward pass can reuse them.
            std::vector<std::vector<double>> inputs(static_cast<std::size_t>(n));
            double qsa = 0.0;
            std::vector<std::vector<double>> tables(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                inputs[i] = pair_input(tr.obs, i, (i + 1) % n);
                tables[i] = nn::mlp_forward(params, inputs[i]);
                qsa += tables[i][static_cast<std::size_t>(tr.actions[i]) * A +
                                 tr.actions[(i + 1) % n]];
            }
            const double e = qsa - ys[t][0];
            loss += e * e * inv;
            const double d = 2.0 * e * inv;
            std::vector<double> upstream(static_cast<std::size_t>(A) * A, 0.0);
            for (int i = 0; i < n; ++i) {
                std::fill(upstream.begin(), upstream.end(), 0.0);
                upstream[static_cast<std::size_t>(tr.actions[i]) * A +
                         tr.actions[(i + 1) % n]] = d;
                nn::mlp_backward_acc(params, inputs[i], upstream, out.grad);
            }
        } else if (kind == ModelKind::VDN) {
            std::vector<std::vector<double>> qs(static_cast<std::size_t>(n));
            double qsa = 0.0;
            for (int i = 0; i < n; ++i) {
                qs[i] = nn::mlp_forward(params, tr.obs[i]);
                qsa += qs[i][tr.actions[i]];
            }
            const double e = qsa - ys[t][0];
            loss += e * e * inv;
            const double d = 2.0 * e * inv;
            std::vector<double> upstream(static_cast<std::size_t>(A), 0.0);
            for (int i = 0; i < n; ++i) {
                std::fill(upstream.begin(), upstream.end(), 0.0);
                upstream[tr.actions[i]] = d;
                nn::mlp_backward_acc(params, tr.obs[i], upstream, out.grad);
            }
        } else {  // IQL: one independent TD term per agent
            std::vector<double> upstream(static_cast<std::size_t>(A), 0.0);
            for (int i = 0; i < n; ++i) {
                const std::vector<double> qi = nn::mlp_forward(params, tr.obs[i]);
                const double e = qi[tr.actions[i]] - ys[t][i];
                loss += e * e * inv;
                std::fill(upstream.begin(), upstream.end(), 0.0);
                upstream[tr.actions[i]] = 2.0 * e * inv;
                nn::mlp_backward_acc(params, tr.obs[i], upstream, out.grad);
            }
        }
    }
    out.loss = loss;
    return out;
}

}  // namespace pairdqn::models
