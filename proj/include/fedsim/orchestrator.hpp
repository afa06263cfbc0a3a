#pragma once

// The round loop: sample clients, run local updates, aggregate, collect
// per-round metrics. All randomness flows through counter-based streams
// keyed by (seed, round, client, step), so a trace is a pure function of
// (config, seed) regardless of how many worker threads evaluate clients.

#include <cstdint>
#include <optional>
#include <vector>

#include "fedsim/algorithms.hpp"
#include "fedsim/objective.hpp"

namespace fedsim {

struct SamplingPlan {
    int num_clients = 1;   // N
    int sample_size = 1;   // S
    std::uint64_t seed = 0;
    void validate() const;
};

/// S distinct ids in ascending order, uniform without replacement,
/// deterministic given (seed, round).
std::vector<int> sample_round(const SamplingPlan& plan, int round);

struct RoundMetrics {
    int round = 0;
    double suboptimality = 0.0;  // f(x^r) - f*, NaN when f* unknown
    double grad_norm_sq = 0.0;   // ||grad f(x^r)||^2
    double drift = 0.0;          // client-drift estimate over the evaluated clients
    double control_lag = 0.0;    // NaN unless x* is known
    double accuracy = 0.0;       // NaN unless the family defines accuracy
    long comm_bytes = 0;
    long grad_evals = 0;
    int drift_clients = 0;  // how many sampled clients the drift estimate used
};

/// Client drift: mean drift contribution over the evaluated clients.
double compute_drift(const std::vector<LocalRunResult>& results);

/// (1/N) sum_i ||c_i - grad f_i(x*)||^2.
double compute_control_lag(const std::vector<ClientState>& states, const ObjectiveFamily& family,
                           const Vec& x_star);

struct OutputSelector {
    enum class Mode { LastIterate, Weighted };
    Mode mode = Mode::LastIterate;
    double mu = 0.0;  // weighted mode: w_r = (1 - mu*eta_tilde/2)^(1-r)
};

/// Normalized probabilities over iterates x^0..x^R (index r-1 drawn with
/// weight w_r, r = 1..R+1). mu = 0 degenerates to uniform.
std::vector<double> output_weights(double mu, double eta_tilde, int rounds);

struct TargetSpec {
    enum class Metric { Suboptimality, GradNormSq, Accuracy };
    Metric metric = Metric::Suboptimality;
    double threshold = 0.0;
    bool stop_early = true;

    /// Crossing direction: accuracy targets are reached from below.
    bool reached(const RoundMetrics& m) const;
};

struct ExperimentTrace {
    std::vector<RoundMetrics> rounds;  // index 0 is the initial state
    Vec output;
    std::optional<int> rounds_to_target;
    bool diverged = false;
    ServerState final_server;
    std::vector<ClientState> final_clients;
};

/// Runs one round in place: samples S clients, executes the configured local
/// update (optionally spread over `workers` threads), aggregates, and
/// refreshes the sampled clients' control state.
RoundMetrics run_round(ServerState& server, std::vector<ClientState>& clients,
                       const ObjectiveFamily& family, const AlgorithmConfig& cfg,
                       const SamplingPlan& plan, int workers = 1);

/// Initial client states per cfg.control_init; the server control is the
/// client mean, preserving c = (1/N) sum c_i from round zero.
std::vector<ClientState> init_client_states(const ObjectiveFamily& family,
                                            const AlgorithmConfig& cfg, const Vec& x0,
                                            std::uint64_t seed);

/// Full experiment: R rounds or until the target metric first crosses its
/// threshold. Divergence is recorded on the trace, not rethrown.
ExperimentTrace run_experiment(const ObjectiveFamily& family, const AlgorithmConfig& cfg,
                               int rounds, const SamplingPlan& plan,
                               const OutputSelector& selector,
                               const std::optional<TargetSpec>& target, const Vec& x0,
                               int workers = 1);

}  // namespace fedsim
