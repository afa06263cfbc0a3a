// Acceptance suite for the federated optimization simulator. Each criterion
// runs end-to-end through the library and prints exactly one pass/fail line;
// the exit code is the number of failed criteria.

#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "fedsim/experiment.hpp"
#include "fedsim/logistic.hpp"
#include "fedsim/metrics.hpp"
#include "fedsim/orchestrator.hpp"
#include "fedsim/quadratic.hpp"
#include "fedsim/report.hpp"
#include "oracles.hpp"

using namespace fedsim;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %d. %s  (%s; %.1fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str(), seconds);
    if (!pass) g_failures++;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

AlgorithmConfig cfg_of(Variant v, double eta_l, int K, double eta_g = 1.0,
                       ControlInit init = ControlInit::Zeros) {
    AlgorithmConfig cfg;
    cfg.variant = v;
    cfg.local_lr = eta_l;
    cfg.global_lr = eta_g;
    cfg.local_steps = K;
    cfg.control_init = init;
    return cfg;
}

bool bytes_equal(const Vec& a, const Vec& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// ---------------------------------------------------------------------------
// 1. Zero-variate equivalence: frozen-at-zero SCAFFOLD equals FedAvg
//    byte-for-byte across 20 random configs.
// ---------------------------------------------------------------------------
void criterion_1() {
    Timer timer;
    CounterRng rng(20240901);
    bool pass = true;
    std::string detail = "20/20 configs byte-identical";
    for (int trial = 0; trial < 20 && pass; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(5));
        const int K = 1 + static_cast<int>(rng.next_below(10));
        const int N = 2 + static_cast<int>(rng.next_below(7));
        const int S = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
        const double eta_l = 0.001 + 0.05 * rng.next_double();
        const double eta_g = 0.5 + rng.next_double();
        const double sigma_sq = (trial % 2 == 0) ? 0.0 : rng.next_double();
        const Variant variant = (trial % 2 == 0) ? Variant::ScaffoldI : Variant::ScaffoldII;
        const std::uint64_t seed = rng.next_below(1u << 30);

        const auto clients = make_quadratic_ensemble(N, d, rng.next_double(),
                                                     5.0 * rng.next_double(), seed,
                                                     {0.2, sigma_sq});
        const ObjectiveFamily family = quadratic_family(clients);

        AlgorithmConfig scaffold = cfg_of(variant, eta_l, K, eta_g);
        scaffold.freeze_controls = true;
        const AlgorithmConfig fedavg = cfg_of(Variant::FedAvg, eta_l, K, eta_g);
        const SamplingPlan plan{N, S, seed ^ 0xABCDEF};

        ServerState sa{constant(static_cast<std::size_t>(d), 1.0),
                       zeros(static_cast<std::size_t>(d)), 0};
        ServerState sb = sa;
        std::vector<ClientState> ca = init_client_states(family, scaffold, sa.model, plan.seed);
        std::vector<ClientState> cb = init_client_states(family, fedavg, sb.model, plan.seed);
        for (int r = 0; r < 5; ++r) {
            run_round(sa, ca, family, scaffold, plan);
            run_round(sb, cb, family, fedavg, plan);
            if (!bytes_equal(sa.model, sb.model)) {
                pass = false;
                detail = "config " + std::to_string(trial) + " diverged from FedAvg at round " +
                         std::to_string(r + 1);
                break;
            }
        }
    }
    report(1, "zero-variate equivalence (SCAFFOLD == FedAvg)", pass, detail, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 2. SAGA reduction: option I with K=1, S=1, sigma=0, eta_g=1 tracks a
//    reference SAGA to 1e-12 per round over 500 rounds.
// ---------------------------------------------------------------------------
void criterion_2() {
    Timer timer;
    const int N = 10, d = 3, rounds = 500;
    const double eta = 0.25;

    // Random convex quadratics: eigenvalues in [0.5, 1.5], random centers.
    CounterRng rng(4242);
    std::vector<std::shared_ptr<const Objective>> clients;
    for (int i = 0; i < N; ++i) {
        Eigen::MatrixXd M(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) M(a, b) = rng.next_gaussian();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::VectorXd lambda(d);
        for (int a = 0; a < d; ++a) lambda(a) = 0.5 + rng.next_double();
        const Eigen::MatrixXd A =
            ((Q * lambda.asDiagonal() * Q.transpose() +
              (Q * lambda.asDiagonal() * Q.transpose()).transpose()) /
             2.0)
                .eval();
        Vec center(static_cast<std::size_t>(d));
        for (double& v : center) v = rng.next_gaussian();
        clients.push_back(
            std::make_shared<QuadraticObjective>(QuadraticObjective::from_center(A, center, 0.0)));
    }
    const ObjectiveFamily family = quadratic_family(clients);

    const AlgorithmConfig cfg = cfg_of(Variant::ScaffoldI, eta, 1, 1.0);
    const SamplingPlan plan{N, 1, 777};
    ServerState server{constant(static_cast<std::size_t>(d), 1.0),
                       zeros(static_cast<std::size_t>(d)), 0};
    std::vector<ClientState> states = init_client_states(family, cfg, server.model, plan.seed);

    oracles::Saga saga(constant(static_cast<std::size_t>(d), 1.0), static_cast<std::size_t>(N),
                       eta);
    double max_dist = 0.0;
    for (int r = 1; r <= rounds; ++r) {
        run_round(server, states, family, cfg, plan);
        const int j = sample_round(plan, r)[0];
        saga.step(j, [&](const Vec& x) {
            return family.clients[static_cast<std::size_t>(j)]->exact_gradient(x);
        });
        max_dist = std::max(max_dist, norm(sub(server.model, saga.x)));
    }
    const bool pass = max_dist <= 1e-12;
    report(2, "SAGA reduction (option I, K=1, S=1)", pass,
           "max per-round model distance " + format_double(max_dist), timer.elapsed());
}

// ---------------------------------------------------------------------------
// 3. Lower-bound recursion: full-participation FedAvg matches the
//    closed-form round map to 1e-12 for 100 rounds across a config grid.
// ---------------------------------------------------------------------------
void criterion_3() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    std::string detail;
    const double mu = 1.0;
    for (const double G : {1.0, 10.0}) {
        for (const int K : {2, 5}) {
            for (const double eta : {0.01, 0.1}) {
                const ObjectiveFamily family = quadratic_family(make_lower_bound_clients(mu, G));
                ServerState server{Vec{1.0}, Vec{0.0}, 0};
                std::vector<ClientState> states{{0, Vec{0.0}}, {1, Vec{0.0}}};
                const AlgorithmConfig cfg = cfg_of(Variant::FedAvg, eta, K);
                double x_ref = 1.0;
                for (int r = 1; r <= 100; ++r) {
                    run_round(server, states, family, cfg, SamplingPlan{2, 2, 1});
                    x_ref = oracles::lower_bound_round(x_ref, mu, G, eta, K);
                    worst = std::max(worst, std::abs(server.model[0] - x_ref));
                }
                if (worst > 1e-12) {
                    pass = false;
                    detail = "G=" + format_double(G) + " K=" + std::to_string(K) +
                             " eta=" + format_double(eta);
                }
            }
        }
    }
    report(3, "lower-bound closed-form recursion (FedAvg)", pass,
           "max |x_sim - x_ref| = " + format_double(worst) +
               (detail.empty() ? "" : " at " + detail),
           timer.elapsed());
}

// ---------------------------------------------------------------------------
// 4. Heterogeneity sensitivity on the 2-client ensemble.
// ---------------------------------------------------------------------------
struct TunedQuad {
    double final_subopt = 1e300;
    int rounds_to_target = -1;
};

// Runs one algorithm over the default eta grid and 5 seeds; returns the
// tuned (by median final suboptimality) outcome and the tuned-by-rounds
// outcome for the given target.
TunedQuad tune_on_ensemble(Variant v, int K, double G, double target, ControlInit init,
                           const std::string& tune_metric) {
    const int R = 200;
    TunedQuad best;
    double best_rank = 1e300;
    // One fixed problem instance: with sigma = 0 and full participation the
    // run seeds only matter through the tuning selection.
    const auto clients = make_quadratic_ensemble(2, 5, 1.0, G, 1, {0.1, 0.0});
    const ObjectiveFamily family = quadratic_family(clients);
    for (const double eta : default_eta_grid()) {
        std::vector<double> finals, rtts;
        bool diverged = false;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            TargetSpec t;
            t.metric = TargetSpec::Metric::Suboptimality;
            t.threshold = target;
            t.stop_early = false;
            const AlgorithmConfig cfg = cfg_of(v, eta, K, 1.0, init);
            const auto trace = run_experiment(family, cfg, R, SamplingPlan{2, 2, seed}, {}, t,
                                              constant(5, 1.0));
            if (trace.diverged) {
                diverged = true;
                break;
            }
            finals.push_back(trace.rounds.back().suboptimality);
            rtts.push_back(trace.rounds_to_target ? *trace.rounds_to_target
                                                  : static_cast<double>(R + 1));
        }
        if (diverged) continue;
        const double rank =
            tune_metric == "rounds" ? median(rtts) : median(finals);
        if (rank < best_rank) {
            best_rank = rank;
            best.final_subopt = median(finals);
            best.rounds_to_target = static_cast<int>(median(rtts));
        }
    }
    return best;
}

void criterion_4() {
    Timer timer;
    const std::vector<double> gs{1.0, 10.0, 100.0};
    std::vector<double> fedavg_final, scaffold_final;
    for (const double G : gs) {
        fedavg_final.push_back(
            tune_on_ensemble(Variant::FedAvg, 10, G, 1e-6, ControlInit::Zeros, "final")
                .final_subopt);
        scaffold_final.push_back(tune_on_ensemble(Variant::ScaffoldII, 10, G, 1e-6,
                                                  ControlInit::WarmStart, "final")
                                     .final_subopt);
    }
    const bool increasing =
        fedavg_final[0] < fedavg_final[1] && fedavg_final[1] < fedavg_final[2];

    const double eps = 1e-12;  // absolute floor: converged runs sit at ~0
    const double scaffold_ratio =
        (*std::max_element(scaffold_final.begin(), scaffold_final.end()) + eps) /
        (*std::min_element(scaffold_final.begin(), scaffold_final.end()) + eps);
    const double fedavg_ratio =
        (*std::max_element(fedavg_final.begin(), fedavg_final.end()) + eps) /
        (*std::min_element(fedavg_final.begin(), fedavg_final.end()) + eps);

    const int scaffold_rounds = tune_on_ensemble(Variant::ScaffoldII, 10, 10.0, 1e-6,
                                                 ControlInit::WarmStart, "rounds")
                                    .rounds_to_target;
    const int sgd_rounds =
        tune_on_ensemble(Variant::LargeBatchSgd, 1, 10.0, 1e-6, ControlInit::Zeros, "rounds")
            .rounds_to_target;

    const bool pass = increasing && scaffold_ratio < 10.0 && fedavg_ratio > 10.0 &&
                      scaffold_rounds >= 0 && sgd_rounds >= 0 && scaffold_rounds < sgd_rounds;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "fedavg finals %.2e/%.2e/%.2e (ratio %.1f), scaffold ratio %.2f, "
                  "rounds-to-1e-6 scaffold %d vs sgd %d",
                  fedavg_final[0], fedavg_final[1], fedavg_final[2], fedavg_ratio,
                  scaffold_ratio, scaffold_rounds, sgd_rounds);
    report(4, "heterogeneity sensitivity (2-client ensemble)", pass, detail, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 5. Linear convergence of SCAFFOLD on a strongly convex ensemble.
// ---------------------------------------------------------------------------
void criterion_5() {
    Timer timer;
    const auto clients = make_quadratic_ensemble(10, 5, 1.0, 10.0, 3, {0.1, 0.0});
    const ObjectiveFamily family = quadratic_family(clients);
    const AlgorithmConfig cfg = cfg_of(Variant::ScaffoldII, 0.2, 5);
    const auto trace =
        run_experiment(family, cfg, 100, SamplingPlan{10, 10, 3}, {}, {}, constant(5, 1.0));
    bool pass = !trace.diverged;
    double r2 = 0.0, slope = 0.0;
    if (pass) {
        std::vector<double> xs, ys;
        for (int r = 10; r <= 100; ++r) {
            xs.push_back(static_cast<double>(r));
            ys.push_back(std::log(trace.rounds[static_cast<std::size_t>(r)].suboptimality));
        }
        const auto fit = oracles::fit_line(xs, ys);
        r2 = fit.r_squared;
        slope = fit.slope;
        pass = r2 >= 0.99 && slope < 0.0;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "log-suboptimality fit R^2=%.4f slope=%.3f", r2, slope);
    report(5, "linear convergence (SCAFFOLD, sigma=0, S=N)", pass, detail, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 6. Local-step benefit at delta=0 for the theory variant.
// ---------------------------------------------------------------------------
int theory_rounds_to(double target, int K) {
    const auto clients = make_quadratic_ensemble(4, 5, 0.0, 10.0, 5, {0.1, 0.0});
    const ObjectiveFamily family = quadratic_family(clients);
    int best = -1;
    for (const double eta : default_eta_grid()) {
        TargetSpec t;
        t.metric = TargetSpec::Metric::Suboptimality;
        t.threshold = target;
        const auto trace =
            run_experiment(family, cfg_of(Variant::ScaffoldTheory, eta, K), 2000,
                           SamplingPlan{4, 4, 1}, {}, t, constant(5, 1.0));
        if (trace.diverged || !trace.rounds_to_target) continue;
        if (best < 0 || *trace.rounds_to_target < best) best = *trace.rounds_to_target;
    }
    return best;
}

void criterion_6() {
    Timer timer;
    const int r1 = theory_rounds_to(1e-8, 1);
    const int r10 = theory_rounds_to(1e-8, 10);
    const bool pass = r1 > 0 && r10 > 0 && 4 * r10 <= r1;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "rounds to 1e-8: K=1 -> %d, K=10 -> %d", r1, r10);
    report(6, "local-step benefit at delta=0 (theory variant)", pass, detail, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 7./8. Synthetic-classification orderings and sampling resilience.
// ---------------------------------------------------------------------------
ExperimentSpec classification_spec(const std::string& variant, double similarity, int S) {
    ExperimentSpec spec;
    spec.name = "acceptance_cls";
    spec.objective.kind = "synthetic-classification";
    spec.objective.n = 2000;
    spec.objective.dim = 20;
    spec.objective.classes = 10;
    spec.objective.similarity = similarity;
    spec.objective.batch_fraction = 0.2;
    spec.objective.l2 = 0.0;
    spec.objective.seed = 0;
    spec.algorithm.variant = variant;
    spec.algorithm.local_steps = variant == "sgd" ? 1 : 25;  // 5 epochs x 5 steps
    spec.num_clients = 20;
    spec.sample_size = S;
    spec.rounds = 600;
    spec.seeds = {1, 2, 3, 4, 5};
    spec.init_value = 0.0;
    spec.target = TargetConfig{"accuracy", 0.5, true};
    return spec;
}

// Tuned median rounds-to-target over the default eta grid; -1 if nothing
// reaches the target.
double tuned_median_rounds(const std::string& variant, double similarity, int S) {
    std::vector<ResultRow> rows;
    RunOptions opts;
    opts.write_files = false;
    for (const double eta : default_eta_grid()) {
        ExperimentSpec spec = classification_spec(variant, similarity, S);
        spec.algorithm.eta_l = eta;
        const auto cell = run_single(spec, opts);
        rows.insert(rows.end(), cell.begin(), cell.end());
    }
    const auto best = best_eta_l(rows, "rounds_to_target");
    if (!best) return -1.0;
    std::vector<double> rtts;
    for (const auto& r : rows) {
        if (r.diverged || r.spec.algorithm.eta_l != *best) continue;
        rtts.push_back(r.rounds_to_target >= 0 ? r.rounds_to_target : r.spec.rounds + 1);
    }
    return median(rtts);
}

void criteria_7_and_8() {
    Timer timer;
    const double scaffold_s0 = tuned_median_rounds("scaffold_ii", 0.0, 4);
    const double fedavg_s0 = tuned_median_rounds("fedavg", 0.0, 4);
    const double sgd_s0 = tuned_median_rounds("sgd", 0.0, 4);
    const double scaffold_s10 = tuned_median_rounds("scaffold_ii", 10.0, 4);
    const double fedavg_s10 = tuned_median_rounds("fedavg", 10.0, 4);
    const double sgd_s10 = tuned_median_rounds("sgd", 10.0, 4);

    const bool pass7 = scaffold_s0 > 0 && fedavg_s0 > 0 && sgd_s0 > 0 &&
                       scaffold_s0 < fedavg_s0 && scaffold_s0 <= sgd_s0 &&
                       scaffold_s10 < sgd_s10 && fedavg_s10 < sgd_s10;
    char detail7[256];
    std::snprintf(detail7, sizeof(detail7),
                  "s=0%%: scaffold %.0f, fedavg %.0f, sgd %.0f; s=10%%: scaffold %.0f, "
                  "fedavg %.0f, sgd %.0f",
                  scaffold_s0, fedavg_s0, sgd_s0, scaffold_s10, fedavg_s10, sgd_s10);
    report(7, "method ordering on non-iid similarity splits", pass7, detail7,
           timer.elapsed());

    Timer timer8;
    const double scaffold_s10_small = tuned_median_rounds("scaffold_ii", 10.0, 1);
    const bool pass8 = scaffold_s10 > 0 && scaffold_s10_small > 0 &&
                       scaffold_s10_small < 4.0 * scaffold_s10;
    char detail8[128];
    std::snprintf(detail8, sizeof(detail8),
                  "rounds at 20%% sampling %.0f vs 5%% sampling %.0f (growth %.2fx < 4x)",
                  scaffold_s10, scaffold_s10_small,
                  scaffold_s10 > 0 ? scaffold_s10_small / scaffold_s10 : -1.0);
    report(8, "sampling resilience (sub-linear slow-down)", pass8, detail8, timer8.elapsed());
}

// ---------------------------------------------------------------------------
// 9. Metric correctness suite.
// ---------------------------------------------------------------------------
void criterion_9() {
    Timer timer;
    bool pass = true;
    std::string detail = "gradient checks, bhd targets, lag zero, drift bound all hold";

    // Finite-difference gradient checks on quadratic and logistic clients.
    {
        const auto clients = make_quadratic_ensemble(4, 3, 1.0, 5.0, 12, {0.1, 0.0});
        CounterRng rng(88);
        for (const auto& c : clients) {
            for (int t = 0; t < 10 && pass; ++t) {
                Vec x(3);
                for (double& v : x) v = 2.0 * rng.next_gaussian();
                const Vec g = c->exact_gradient(x);
                const Vec fd = oracles::finite_difference_gradient(
                    [&](const Vec& p) { return c->value(p); }, x);
                if (norm(sub(g, fd)) / std::max(1.0, norm(g)) > 1e-5) {
                    pass = false;
                    detail = "quadratic finite-difference check failed";
                }
            }
        }
        auto data = std::make_shared<Dataset>(make_synthetic_classification(60, 3, 3, 5));
        std::vector<int> shard;
        for (int i = 0; i < 30; ++i) shard.push_back(i);
        const LogisticObjective loss(data, shard, LogisticConfig{0.05, 1.0});
        for (int t = 0; t < 10 && pass; ++t) {
            Vec x(loss.dim());
            for (double& v : x) v = 0.3 * rng.next_gaussian();
            const Vec g = loss.exact_gradient(x);
            const Vec fd = oracles::finite_difference_gradient(
                [&](const Vec& p) { return loss.value(p); }, x, 1e-6);
            if (norm(sub(g, fd)) / std::max(1.0, norm(g)) > 1e-5) {
                pass = false;
                detail = "logistic finite-difference check failed";
            }
        }
    }

    // Hessian-dissimilarity targets within 5%.
    for (const double delta : {0.25, 1.0, 1.8}) {
        const auto clients = make_quadratic_ensemble(6, 4, delta, 3.0, 99, {0.1, 0.0});
        const double measured = measure_bhd(clients);
        if (std::abs(measured - delta) > 0.05 * delta) {
            pass = false;
            detail = "measure_bhd missed delta=" + format_double(delta);
        }
    }

    // Control lag vanishes at the fixed point of the variates.
    {
        const auto clients = make_quadratic_ensemble(5, 3, 0.5, 4.0, 10, {0.1, 0.0});
        const ObjectiveFamily family = quadratic_family(clients);
        std::vector<ClientState> states;
        for (int i = 0; i < 5; ++i)
            states.push_back(
                {i, family.clients[static_cast<std::size_t>(i)]->exact_gradient(*family.x_star)});
        if (compute_control_lag(states, family, *family.x_star) > 1e-24) {
            pass = false;
            detail = "control lag not zero at the fixed point";
        }
    }

    // Drift obeys the (K eta_l)^2 max-gradient bound for small steps.
    {
        const auto clients = make_quadratic_ensemble(4, 3, 1.0, 5.0, 31, {0.1, 0.0});
        const ObjectiveFamily family = quadratic_family(clients);
        const Vec x0 = constant(3, 1.0);
        double max_grad_sq = 0.0;
        for (const auto& c : family.clients)
            max_grad_sq = std::max(max_grad_sq, squared_norm(c->exact_gradient(x0)));
        for (const double eta : {1e-3, 1e-4, 1e-5}) {
            const int K = 5;
            ServerState server{x0, zeros(3), 0};
            std::vector<ClientState> states =
                init_client_states(family, cfg_of(Variant::FedAvg, eta, K), x0, 2);
            const RoundMetrics m = run_round(server, states, family,
                                             cfg_of(Variant::FedAvg, eta, K),
                                             SamplingPlan{4, 4, 2});
            const double bound = (K * eta) * (K * eta) * max_grad_sq;
            if (m.drift > bound * (1.0 + 1e-9)) {
                pass = false;
                detail = "drift exceeded its small-step bound at eta=" + format_double(eta);
            }
        }
    }

    report(9, "metric correctness suite", pass, detail, timer.elapsed());
}

}  // namespace

int main() {
    std::printf("fedsim acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criteria_7_and_8();
    criterion_9();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures;
}
