#pragma once

// Federated optimizer building blocks: one local-update procedure per
// algorithm variant plus the shared server aggregation rule. Local updates
// are pure functions of (inputs, stream coordinates), so clients can be
// evaluated in any order or in parallel without changing results.

#include <cstdint>
#include <string>
#include <vector>

#include "fedsim/objective.hpp"
#include "fedsim/vec.hpp"

namespace fedsim {

enum class Variant {
    FedAvg,
    ScaffoldI,        // control update: gradient at the server model
    ScaffoldII,       // control update: running mean of the K local gradients
    ScaffoldTheory,   // full-batch control variates frozen at x^{r-1}
    FedProx,
    LargeBatchSgd,
};

enum class ControlInit { Zeros, WarmStart };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);
std::string control_init_name(ControlInit c);
ControlInit parse_control_init(const std::string& name);

/// True for the stateful variants that carry client control variates.
bool uses_control_state(Variant v);

struct AlgorithmConfig {
    Variant variant = Variant::FedAvg;
    double local_lr = 0.1;   // eta_l
    double global_lr = 1.0;  // eta_g
    int local_steps = 1;     // K
    double prox_mu = 0.0;    // FedProx regularization
    ControlInit control_init = ControlInit::Zeros;
    // Diagnostic switch: keep all control variates pinned at their initial
    // value. With zero init this reduces SCAFFOLD to FedAvg exactly.
    bool freeze_controls = false;

    double effective_step() const { return local_steps * global_lr * local_lr; }
    void validate() const;
};

/// Rate-check SCAFFOLD step sizes: eta_g = sqrt(S) with the strongly convex
/// local constraint eta_l = min(1/(81 beta K eta_g), S/(15 mu N K eta_g)).
/// Experiment presets keep eta_g = 1 instead; this exists for runs that
/// validate the convergence-rate regime.
AlgorithmConfig scaffold_rate_config(double beta, double mu, int local_steps, int num_clients,
                                     int sample_size);

struct ClientState {
    int id = 0;
    Vec control;  // c_i, persistent across rounds
};

struct ServerState {
    Vec model;    // x
    Vec control;  // c
    int round = 0;
};

struct LocalRunResult {
    int client_id = 0;
    Vec delta_y;               // y_K - x
    Vec delta_c;               // c_i^+ - c_i (zero vector for stateless variants)
    double drift_contrib = 0.0;  // (1/K) sum_{k=1..K} ||y_k - x||^2
    long grad_evals = 0;
};

/// Stream coordinates shared by one client's local run within one round.
struct StreamKey {
    std::uint64_t seed = 0;
    int round = 0;
    int client = 0;
};

/// K plain steps y <- y - eta_l g_i(y).
LocalRunResult fedavg_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                            const StreamKey& key);

/// K corrected steps y <- y - eta_l (g_i(y) + c - c_i), then the option I or
/// option II control update.
LocalRunResult scaffold_local(const Vec& x, const Vec& server_control, const ClientState& state,
                              const Objective& obj, const AlgorithmConfig& cfg,
                              const StreamKey& key);

/// K steps with the proximal pull y <- y - eta_l (g_i(y) + prox_mu (y - x)).
LocalRunResult fedprox_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                             const StreamKey& key);

/// One large-batch step at x: the K-sample average for additive-noise
/// oracles, the exact full-batch gradient otherwise.
LocalRunResult sgd_local(const Vec& x, const Objective& obj, const AlgorithmConfig& cfg,
                         const StreamKey& key);

/// K steps y <- y - eta_l (g_i(y) + grad f(x) - grad f_i(x)) with exact
/// full-batch control variates evaluated at the round's starting model.
LocalRunResult scaffold_theory_local(const Vec& x, const Objective& obj,
                                     const Vec& global_grad_at_x, const AlgorithmConfig& cfg,
                                     const StreamKey& key);

/// x <- x + (eta_g/S) sum delta_y; c <- c + (1/N) sum delta_c. Results are
/// reduced in ascending client id regardless of input order.
ServerState server_aggregate(const ServerState& server, std::vector<LocalRunResult> results,
                             const std::vector<int>& sampled, int num_clients,
                             const AlgorithmConfig& cfg);

}  // namespace fedsim
