#include "fedsim/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedsim/errors.hpp"
#include "fedsim/parallel.hpp"

namespace fedsim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr long kBytesPerScalar = 8;
}  // namespace

void SamplingPlan::validate() const {
    if (num_clients < 1) throw ParameterError("SamplingPlan: need N >= 1");
    if (sample_size < 1 || sample_size > num_clients)
        throw ParameterError("SamplingPlan: need 1 <= S <= N");
}

std::vector<int> sample_round(const SamplingPlan& plan, int round) {
    plan.validate();
    CounterRng rng = make_stream(plan.seed, static_cast<std::uint64_t>(round), 0, 0,
                                 RngLane::Sampling);
    return sample_without_replacement(plan.num_clients, plan.sample_size, rng);
}

double compute_drift(const std::vector<LocalRunResult>& results) {
    if (results.empty()) throw UndefinedMetricError("compute_drift: no client results");
    double total = 0.0;
    for (const auto& r : results) total += r.drift_contrib;
    return total / static_cast<double>(results.size());
}

double compute_control_lag(const std::vector<ClientState>& states, const ObjectiveFamily& family,
                           const Vec& x_star) {
    if (states.size() != family.num_clients())
        throw ParameterError("compute_control_lag: states do not match the family");
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec g_star = family.clients[i]->exact_gradient(x_star);
        total += squared_norm(sub(states[i].control, g_star));
    }
    return total / static_cast<double>(states.size());
}

std::vector<double> output_weights(double mu, double eta_tilde, int rounds) {
    if (rounds < 0) throw ParameterError("output_weights: rounds must be >= 0");
    if (mu < 0.0 || eta_tilde < 0.0)
        throw ParameterError("output_weights: mu and eta_tilde must be >= 0");
    const double rho = 1.0 - 0.5 * mu * eta_tilde;
    if (rho <= 0.0) throw ParameterError("output_weights: need mu*eta_tilde/2 < 1");
    // w_r = rho^(1-r) for r = 1..R+1; normalize in log space since the
    // weights grow geometrically.
    const double log_growth = -std::log(rho);
    std::vector<double> w(static_cast<std::size_t>(rounds) + 1);
    const double log_max = log_growth * static_cast<double>(rounds);
    double total = 0.0;
    for (int r = 0; r <= rounds; ++r) {
        w[static_cast<std::size_t>(r)] = std::exp(log_growth * static_cast<double>(r) - log_max);
        total += w[static_cast<std::size_t>(r)];
    }
    for (double& v : w) v /= total;
    return w;
}

bool TargetSpec::reached(const RoundMetrics& m) const {
    switch (metric) {
        case Metric::Suboptimality: return m.suboptimality <= threshold;
        case Metric::GradNormSq: return m.grad_norm_sq <= threshold;
        case Metric::Accuracy: return m.accuracy >= threshold;
    }
    return false;
}

namespace {

void fill_model_metrics(RoundMetrics& m, const ObjectiveFamily& family, const Vec& x) {
    m.suboptimality = family.suboptimality(x);
    m.grad_norm_sq = squared_norm(family.gradient(x));
    m.accuracy = family.accuracy ? family.accuracy(x) : kNaN;
}

long vectors_per_client(Variant v) {
    // Scaffold-family rounds ship (x, c) down and (dy, dc) up; the plain
    // methods ship one model vector each way.
    switch (v) {
        case Variant::ScaffoldI:
        case Variant::ScaffoldII:
        case Variant::ScaffoldTheory: return 4;
        default: return 2;
    }
}

}  // namespace

RoundMetrics run_round(ServerState& server, std::vector<ClientState>& clients,
                       const ObjectiveFamily& family, const AlgorithmConfig& cfg,
                       const SamplingPlan& plan, int workers) {
    cfg.validate();
    plan.validate();
    if (clients.size() != family.num_clients() ||
        static_cast<int>(clients.size()) != plan.num_clients)
        throw ParameterError("run_round: client states do not match the family");
    if (server.model.size() != family.dim())
        throw DimensionError("run_round: server model dimension");

    const int round = server.round + 1;
    const std::vector<int> sampled = sample_round(plan, round);

    // The theory variant freezes full-batch control variates at x^{r-1}.
    Vec global_grad;
    long extra_evals = 0;
    if (cfg.variant == Variant::ScaffoldTheory) {
        global_grad = family.gradient(server.model);
        extra_evals = static_cast<long>(family.num_clients());
    }

    std::vector<LocalRunResult> results(sampled.size());
    parallel_for(static_cast<int>(sampled.size()), workers, [&](int slot) {
        const int id = sampled[static_cast<std::size_t>(slot)];
        const Objective& obj = *family.clients[static_cast<std::size_t>(id)];
        const StreamKey key{plan.seed, round, id};
        switch (cfg.variant) {
            case Variant::FedAvg:
                results[static_cast<std::size_t>(slot)] = fedavg_local(server.model, obj, cfg, key);
                break;
            case Variant::FedProx:
                results[static_cast<std::size_t>(slot)] = fedprox_local(server.model, obj, cfg, key);
                break;
            case Variant::LargeBatchSgd:
                results[static_cast<std::size_t>(slot)] = sgd_local(server.model, obj, cfg, key);
                break;
            case Variant::ScaffoldI:
            case Variant::ScaffoldII:
                results[static_cast<std::size_t>(slot)] = scaffold_local(
                    server.model, server.control, clients[static_cast<std::size_t>(id)], obj, cfg,
                    key);
                break;
            case Variant::ScaffoldTheory:
                results[static_cast<std::size_t>(slot)] =
                    scaffold_theory_local(server.model, obj, global_grad, cfg, key);
                break;
        }
    });

    server = server_aggregate(server, results, sampled, plan.num_clients, cfg);
    if (!cfg.freeze_controls) {
        for (const auto& r : results) {
            auto& state = clients[static_cast<std::size_t>(r.client_id)];
            axpy_inplace(1.0, r.delta_c, state.control);
        }
    }

    RoundMetrics metrics;
    metrics.round = server.round;
    fill_model_metrics(metrics, family, server.model);
    metrics.drift = compute_drift(results);
    metrics.drift_clients = static_cast<int>(results.size());
    metrics.control_lag =
        family.x_star ? compute_control_lag(clients, family, *family.x_star) : kNaN;
    metrics.comm_bytes = static_cast<long>(sampled.size()) * vectors_per_client(cfg.variant) *
                         static_cast<long>(family.dim()) * kBytesPerScalar;
    metrics.grad_evals = extra_evals;
    for (const auto& r : results) metrics.grad_evals += r.grad_evals;
    return metrics;
}

std::vector<ClientState> init_client_states(const ObjectiveFamily& family,
                                            const AlgorithmConfig& cfg, const Vec& x0,
                                            std::uint64_t seed) {
    std::vector<ClientState> states;
    states.reserve(family.num_clients());
    for (std::size_t i = 0; i < family.num_clients(); ++i) {
        ClientState s;
        s.id = static_cast<int>(i);
        s.control = zeros(family.dim());
        if (cfg.control_init == ControlInit::WarmStart) {
            // c_i^0 = g_i(x^0): one pass of the sampler, K draws averaged.
            for (int k = 0; k < cfg.local_steps; ++k) {
                CounterRng stream = make_stream(seed, 0, static_cast<std::uint64_t>(i),
                                                static_cast<std::uint64_t>(k),
                                                RngLane::ControlPass);
                axpy_inplace(1.0, family.clients[i]->sample_gradient(x0, stream), s.control);
            }
            s.control = scaled(1.0 / static_cast<double>(cfg.local_steps), s.control);
        }
        states.push_back(std::move(s));
    }
    return states;
}

ExperimentTrace run_experiment(const ObjectiveFamily& family, const AlgorithmConfig& cfg,
                               int rounds, const SamplingPlan& plan,
                               const OutputSelector& selector,
                               const std::optional<TargetSpec>& target, const Vec& x0,
                               int workers) {
    cfg.validate();
    plan.validate();
    if (rounds < 1) throw ParameterError("run_experiment: need R >= 1");
    if (x0.size() != family.dim()) throw DimensionError("run_experiment: x0 dimension");

    ServerState server{x0, zeros(family.dim()), 0};
    std::vector<ClientState> clients = init_client_states(family, cfg, x0, plan.seed);
    if (cfg.control_init == ControlInit::WarmStart) {
        Vec mean_c = zeros(family.dim());
        for (const auto& s : clients) axpy_inplace(1.0, s.control, mean_c);
        server.control = scaled(1.0 / static_cast<double>(clients.size()), mean_c);
    }

    ExperimentTrace trace;
    const bool keep_iterates = selector.mode == OutputSelector::Mode::Weighted;
    std::vector<Vec> iterates;
    if (keep_iterates) iterates.push_back(server.model);

    RoundMetrics initial;
    initial.round = 0;
    fill_model_metrics(initial, family, server.model);
    initial.drift = 0.0;
    initial.control_lag =
        family.x_star ? compute_control_lag(clients, family, *family.x_star) : kNaN;
    trace.rounds.push_back(initial);
    if (target && target->reached(initial)) trace.rounds_to_target = 0;

    for (int r = 1; r <= rounds; ++r) {
        if (trace.rounds_to_target && target && target->stop_early) break;
        try {
            RoundMetrics m = run_round(server, clients, family, cfg, plan, workers);
            trace.rounds.push_back(m);
            if (keep_iterates) iterates.push_back(server.model);
            if (!trace.rounds_to_target && target && target->reached(m)) {
                trace.rounds_to_target = m.round;
            }
        } catch (const DivergenceError&) {
            trace.diverged = true;
            break;
        }
    }

    if (keep_iterates && !trace.diverged) {
        const int executed = static_cast<int>(iterates.size()) - 1;
        const std::vector<double> probs =
            output_weights(selector.mu, cfg.effective_step(), executed);
        CounterRng rng = make_stream(plan.seed, 0, 0, 0, RngLane::Output);
        const double u = rng.next_double();
        double acc = 0.0;
        std::size_t pick = probs.size() - 1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        trace.output = iterates[pick];
    } else {
        trace.output = server.model;
    }
    trace.final_server = std::move(server);
    trace.final_clients = std::move(clients);
    return trace;
}

}  // namespace fedsim
