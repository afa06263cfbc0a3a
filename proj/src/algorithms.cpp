#include "fedsim/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fedsim/errors.hpp"

namespace fedsim {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::FedAvg: return "fedavg";
        case Variant::ScaffoldI: return "scaffold_i";
        case Variant::ScaffoldII: return "scaffold_ii";
        case Variant::ScaffoldTheory: return "scaffold_theory";
        case Variant::FedProx: return "fedprox";
        case Variant::LargeBatchSgd: return "sgd";
    }
    throw ParameterError("variant_name: unknown variant");
}

Variant parse_variant(const std::string& name) {
    if (name == "fedavg") return Variant::FedAvg;
    if (name == "scaffold_i") return Variant::ScaffoldI;
    if (name == "scaffold_ii") return Variant::ScaffoldII;
    if (name == "scaffold_theory") return Variant::ScaffoldTheory;
    if (name == "fedprox") return Variant::FedProx;
    if (name == "sgd") return Variant::LargeBatchSgd;
    throw ParameterError("parse_variant: unknown variant '" + name + "'");
}

std::string control_init_name(ControlInit c) {
    return c == ControlInit::Zeros ? "zeros" : "warm_start";
}

ControlInit parse_control_init(const std::string& name) {
    if (name == "zeros") return ControlInit::Zeros;
    if (name == "warm_start") return ControlInit::WarmStart;
    throw ParameterError("parse_control_init: unknown init '" + name + "'");
}

bool uses_control_state(Variant v) {
    return v == Variant::ScaffoldI || v == Variant::ScaffoldII;
}

AlgorithmConfig scaffold_rate_config(double beta, double mu, int local_steps, int num_clients,
                                     int sample_size) {
    if (beta <= 0.0 || mu <= 0.0)
        throw ParameterError("scaffold_rate_config: beta and mu must be positive");
    if (local_steps < 1 || num_clients < 1 || sample_size < 1 || sample_size > num_clients)
        throw ParameterError("scaffold_rate_config: bad K/N/S");
    AlgorithmConfig cfg;
    cfg.variant = Variant::ScaffoldII;
    cfg.global_lr = std::sqrt(static_cast<double>(sample_size));
    const double k = static_cast<double>(local_steps);
    const double smooth_cap = 1.0 / (81.0 * beta * k * cfg.global_lr);
    const double sampling_cap = static_cast<double>(sample_size) /
                                (15.0 * mu * static_cast<double>(num_clients) * k * cfg.global_lr);
    cfg.local_lr = std::min(smooth_cap, sampling_cap);
    cfg.local_steps = local_steps;
    return cfg;
}

void AlgorithmConfig::validate() const {
    if (local_lr <= 0.0) throw ParameterError("AlgorithmConfig: local_lr must be positive");
    if (global_lr <= 0.0) throw ParameterError("AlgorithmConfig: global_lr must be positive");
    if (local_steps < 1) throw ParameterError("AlgorithmConfig: local_steps must be >= 1");
    if (prox_mu < 0.0) throw ParameterError("AlgorithmConfig: prox_mu must be >= 0");
    const double eff = effective_step();
    if (!(std::isfinite(eff) && eff > 0.0))
        throw ParameterError("AlgorithmConfig: effective step K*eta_g*eta_l must be finite and positive");
}

namespace {

// Shared local loop. `correction` (may be null) is added to every sampled
// gradient; `prox_mu` adds the proximal pull toward x.
LocalRunResult run_local_steps(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                               const StreamKey& key, const Vec* correction, double prox_mu) {
    LocalRunResult out;
    out.client_id = key.client;
    Vec y = x;
    double drift_sum = 0.0;
    for (int k = 0; k < cfg.local_steps; ++k) {
        CounterRng stream = make_stream(key.seed, static_cast<std::uint64_t>(key.round),
                                        static_cast<std::uint64_t>(key.client),
                                        static_cast<std::uint64_t>(k), RngLane::LocalStep);
        Vec g = obj.sample_gradient(y, stream);
        out.grad_evals++;
        if (correction != nullptr) axpy_inplace(1.0, *correction, g);
        if (prox_mu != 0.0) {
            for (std::size_t j = 0; j < y.size(); ++j) g[j] += prox_mu * (y[j] - x[j]);
        }
        axpy_inplace(-cfg.local_lr, g, y);
        if (!all_finite(y)) {
            throw DivergenceError("local update diverged", key.round, key.client, k);
        }
        drift_sum += squared_norm(sub(y, x));
    }
    out.drift_contrib = drift_sum / static_cast<double>(cfg.local_steps);
    out.delta_y = sub(y, x);
    out.delta_c = zeros(x.size());
    return out;
}

}  // namespace

LocalRunResult fedavg_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                            const StreamKey& key) {
    return run_local_steps(x, obj, cfg, key, nullptr, 0.0);
}

LocalRunResult fedprox_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                             const StreamKey& key) {
    return run_local_steps(x, obj, cfg, key, nullptr, cfg.prox_mu);
}

LocalRunResult scaffold_local(const Vec& x, const Vec& server_control, const ClientState& state,
                              const Objective& obj, const AlgorithmConfig& cfg,
                              const StreamKey& key) {
    ensure_same_dim(server_control, state.control, "scaffold_local controls");
    ensure_same_dim(x, state.control, "scaffold_local model/control");
    const Vec correction = sub(server_control, state.control);  // c - c_i
    LocalRunResult out = run_local_steps(x, obj, cfg, key, &correction, 0.0);

    Vec c_plus;
    if (cfg.variant == Variant::ScaffoldI) {
        // One extra pass over the local data: K sampler draws at x, averaged.
        c_plus = zeros(x.size());
        for (int k = 0; k < cfg.local_steps; ++k) {
            CounterRng stream = make_stream(key.seed, static_cast<std::uint64_t>(key.round),
                                            static_cast<std::uint64_t>(key.client),
                                            static_cast<std::uint64_t>(k), RngLane::ControlPass);
            axpy_inplace(1.0, obj.sample_gradient(x, stream), c_plus);
            out.grad_evals++;
        }
        c_plus = scaled(1.0 / static_cast<double>(cfg.local_steps), c_plus);
    } else if (cfg.variant == Variant::ScaffoldII) {
        const double scale = static_cast<double>(cfg.local_steps) * cfg.local_lr;
        if (scale == 0.0) throw ParameterError("scaffold_local: K*eta_l must be nonzero");
        // c_i^+ = c_i - c + (x - y_K)/(K eta_l); x - y_K is -delta_y.
        c_plus = sub(state.control, server_control);
        axpy_inplace(-1.0 / scale, out.delta_y, c_plus);
    } else {
        throw ParameterError("scaffold_local: variant must be scaffold_i or scaffold_ii");
    }
    ensure_finite(c_plus, "scaffold_local control update");
    out.delta_c = sub(c_plus, state.control);
    return out;
}

LocalRunResult sgd_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                         const StreamKey& key) {
    LocalRunResult out;
    out.client_id = key.client;
    Vec g;
    if (obj.noise_bound() > 0.0) {
        // Large batch: average K draws at x so the variance matches K-fold
        // batching of the stochastic oracle.
        g = zeros(x.size());
        for (int k = 0; k < cfg.local_steps; ++k) {
            CounterRng stream = make_stream(key.seed, static_cast<std::uint64_t>(key.round),
                                            static_cast<std::uint64_t>(key.client),
                                            static_cast<std::uint64_t>(k), RngLane::LocalStep);
            axpy_inplace(1.0, obj.sample_gradient(x, stream), g);
            out.grad_evals++;
        }
        g = scaled(1.0 / static_cast<double>(cfg.local_steps), g);
    } else {
        g = obj.exact_gradient(x);
        out.grad_evals = 1;
    }
    out.delta_y = scaled(-cfg.local_lr, g);
    if (!all_finite(out.delta_y)) {
        throw DivergenceError("sgd update diverged", key.round, key.client, 0);
    }
    out.drift_contrib = squared_norm(out.delta_y);
    out.delta_c = zeros(x.size());
    return out;
}

LocalRunResult scaffold_theory_local(const Vec& x, const Objective& obj,
                                     const Vec& global_grad_at_x, const AlgorithmConfig& cfg,
                                     const StreamKey& key) {
    ensure_same_dim(x, global_grad_at_x, "scaffold_theory_local");
    // Correction grad f(x) - grad f_i(x) is frozen for the whole round.
    Vec correction = sub(global_grad_at_x, obj.exact_gradient(x));
    LocalRunResult out = run_local_steps(x, obj, cfg, key, &correction, 0.0);
    out.grad_evals++;  // the full-batch gradient behind the correction
    return out;
}

ServerState server_aggregate(const ServerState& server, std::vector<LocalRunResult> results,
                             const std::vector<int>& sampled, int num_clients,
                             const AlgorithmConfig& cfg) {
    if (results.empty()) throw ProtocolError("server_aggregate: no client results");
    if (results.size() != sampled.size())
        throw ProtocolError("server_aggregate: results do not match the sampled set");
    std::set<int> ids(sampled.begin(), sampled.end());
    if (ids.size() != sampled.size())
        throw ProtocolError("server_aggregate: duplicate client ids");
    for (const auto& r : results) {
        if (ids.count(r.client_id) == 0)
            throw ProtocolError("server_aggregate: result from unsampled client");
        ensure_same_dim(r.delta_y, server.model, "server_aggregate delta_y");
        ensure_same_dim(r.delta_c, server.control, "server_aggregate delta_c");
    }
    std::sort(results.begin(), results.end(),
              [](const LocalRunResult& a, const LocalRunResult& b) {
                  return a.client_id < b.client_id;
              });

    ServerState next = server;
    Vec sum_dy = zeros(server.model.size());
    Vec sum_dc = zeros(server.control.size());
    for (const auto& r : results) {
        axpy_inplace(1.0, r.delta_y, sum_dy);
        axpy_inplace(1.0, r.delta_c, sum_dc);
    }
    axpy_inplace(cfg.global_lr / static_cast<double>(results.size()), sum_dy, next.model);
    if (!cfg.freeze_controls) {
        axpy_inplace(1.0 / static_cast<double>(num_clients), sum_dc, next.control);
    }
    next.round = server.round + 1;
    if (!all_finite(next.model) || !all_finite(next.control)) {
        throw DivergenceError("server aggregation diverged", server.round, -1, -1);
    }
    return next;
}

}  // namespace fedsim
