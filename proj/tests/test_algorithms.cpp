#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fedsim/algorithms.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/quadratic.hpp"

using namespace fedsim;

namespace {

// f(x) = 1/2 ||x||^2 so grad f(x) = x; optionally noisy.
std::shared_ptr<QuadraticObjective> identity_quadratic(int d, double sigma_sq = 0.0) {
    return std::make_shared<QuadraticObjective>(Eigen::MatrixXd::Identity(d, d),
                                                zeros(static_cast<std::size_t>(d)), 0.0,
                                                sigma_sq);
}

AlgorithmConfig make_cfg(Variant v, double eta_l, int K, double eta_g = 1.0) {
    AlgorithmConfig cfg;
    cfg.variant = v;
    cfg.local_lr = eta_l;
    cfg.global_lr = eta_g;
    cfg.local_steps = K;
    return cfg;
}

}  // namespace

TEST_CASE("fedavg hand iterations") {
    const auto obj = identity_quadratic(1);
    const StreamKey key{1, 1, 0};

    auto r1 = fedavg_local(Vec{1.0}, *obj, make_cfg(Variant::FedAvg, 0.1, 1), key);
    CHECK(r1.delta_y[0] == doctest::Approx(-0.1));
    CHECK(r1.grad_evals == 1);
    CHECK(r1.delta_c == zeros(1));

    auto r2 = fedavg_local(Vec{1.0}, *obj, make_cfg(Variant::FedAvg, 0.1, 2), key);
    CHECK(r2.delta_y[0] == doctest::Approx(-0.19));  // y: 0.9 then 0.81

    // Linear client f2 = -G x drifts at constant rate K*eta*G.
    const auto pair = make_lower_bound_clients(1.0, 3.0);
    for (const int K : {1, 4, 9}) {
        auto r = fedavg_local(Vec{0.5}, *pair[1], make_cfg(Variant::FedAvg, 0.01, K), key);
        CHECK(r.delta_y[0] == doctest::Approx(K * 0.01 * 3.0));
    }
}

TEST_CASE("scaffold hand arithmetic of the corrected step") {
    // y1 = 1 - 0.1*(1 + 0.2 - 0.5) = 0.93
    const auto obj = identity_quadratic(1);
    ClientState state{0, Vec{0.5}};
    const StreamKey key{1, 1, 0};
    auto r = scaffold_local(Vec{1.0}, Vec{0.2}, state, *obj,
                            make_cfg(Variant::ScaffoldII, 0.1, 1), key);
    CHECK(r.delta_y[0] == doctest::Approx(0.93 - 1.0));
}

TEST_CASE("scaffold with zero controls matches fedavg bit for bit") {
    const auto obj = identity_quadratic(3, 0.5);  // stochastic path too
    const StreamKey key{77, 4, 2};
    const Vec x{0.3, -1.2, 2.0};
    for (const Variant v : {Variant::ScaffoldI, Variant::ScaffoldII}) {
        for (const int K : {1, 5}) {
            auto cfg_s = make_cfg(v, 0.05, K);
            auto cfg_f = make_cfg(Variant::FedAvg, 0.05, K);
            ClientState state{2, zeros(3)};
            auto rs = scaffold_local(x, zeros(3), state, *obj, cfg_s, key);
            auto rf = fedavg_local(x, *obj, cfg_f, key);
            CHECK(rs.delta_y == rf.delta_y);
            CHECK(rs.drift_contrib == rf.drift_contrib);
        }
    }
}

TEST_CASE("scaffold option II control equals the running gradient mean") {
    // sigma = 0 quadratic: replay the trajectory by hand and average the
    // analytic gradients at y_0..y_{K-1}.
    Eigen::MatrixXd A(2, 2);
    A << 1.5, 0.2, 0.2, 0.7;
    const QuadraticObjective obj(A, Vec{0.3, -0.4}, 0.0);
    const Vec x{1.0, -1.0};
    const Vec c{0.1, 0.0};
    ClientState state{0, Vec{-0.2, 0.3}};
    const int K = 6;
    const double eta = 0.05;
    auto r = scaffold_local(x, c, state, obj, make_cfg(Variant::ScaffoldII, eta, K),
                            StreamKey{3, 2, 0});

    Vec y = x;
    Vec grad_mean = zeros(2);
    const Vec correction = sub(c, state.control);
    for (int k = 0; k < K; ++k) {
        const Vec g = obj.exact_gradient(y);
        axpy_inplace(1.0, g, grad_mean);
        axpy_inplace(-eta, add(g, correction), y);
    }
    grad_mean = scaled(1.0 / K, grad_mean);

    const Vec c_plus = add(state.control, r.delta_c);
    CHECK(norm(sub(c_plus, grad_mean)) < 1e-12);
}

TEST_CASE("scaffold option II gradient-mean identity holds on the noisy path") {
    const auto obj = identity_quadratic(2, 1.0);
    const Vec x{0.5, 0.5};
    const Vec c{0.0, 0.1};
    ClientState state{4, Vec{0.2, -0.1}};
    const int K = 4;
    const double eta = 0.1;
    const StreamKey key{11, 7, 4};
    auto r = scaffold_local(x, c, state, *obj, make_cfg(Variant::ScaffoldII, eta, K), key);

    // Replay the identical noise draws through the stream coordinates.
    Vec y = x;
    Vec grad_mean = zeros(2);
    const Vec correction = sub(c, state.control);
    for (int k = 0; k < K; ++k) {
        CounterRng stream = make_stream(key.seed, static_cast<std::uint64_t>(key.round),
                                        static_cast<std::uint64_t>(key.client),
                                        static_cast<std::uint64_t>(k));
        const Vec g = obj->sample_gradient(y, stream);
        axpy_inplace(1.0, g, grad_mean);
        axpy_inplace(-eta, add(g, correction), y);
    }
    grad_mean = scaled(1.0 / K, grad_mean);
    const Vec c_plus = add(state.control, r.delta_c);
    CHECK(norm(sub(c_plus, grad_mean)) < 1e-12);
}

TEST_CASE("scaffold option I control is the gradient at the server model") {
    Eigen::MatrixXd A(2, 2);
    A << 2.0, 0.0, 0.0, 1.0;
    const QuadraticObjective obj(A, Vec{-1.0, 0.5}, 0.0);  // sigma = 0
    const Vec x{0.7, -0.3};
    ClientState state{1, Vec{5.0, 5.0}};
    auto r = scaffold_local(x, zeros(2), state, obj, make_cfg(Variant::ScaffoldI, 0.1, 3),
                            StreamKey{2, 1, 1});
    const Vec c_plus = add(state.control, r.delta_c);
    CHECK(norm(sub(c_plus, obj.exact_gradient(x))) < 1e-14);
    CHECK(r.grad_evals == 6);  // K local steps + K control-pass draws
}

TEST_CASE("fedprox reductions and hand iteration") {
    const auto obj = identity_quadratic(2, 0.8);
    const Vec x{1.0, -2.0};
    const StreamKey key{5, 3, 1};

    // prox_mu = 0 is fedavg on the shared stream.
    auto cfg0 = make_cfg(Variant::FedProx, 0.1, 4);
    cfg0.prox_mu = 0.0;
    CHECK(fedprox_local(x, *obj, cfg0, key).delta_y ==
          fedavg_local(x, *obj, make_cfg(Variant::FedAvg, 0.1, 4), key).delta_y);

    // K = 1: the proximal term vanishes because y starts at x.
    auto cfg1 = make_cfg(Variant::FedProx, 0.1, 1);
    cfg1.prox_mu = 7.0;
    CHECK(fedprox_local(x, *obj, cfg1, key).delta_y ==
          fedavg_local(x, *obj, make_cfg(Variant::FedAvg, 0.1, 1), key).delta_y);

    // Hand iteration: grad f = y, x = 1, eta = 0.1, prox_mu = 1, K = 2:
    // y1 = 0.9, y2 = 0.9 - 0.1*(0.9 + (0.9-1)) = 0.82.
    const auto det = identity_quadratic(1);
    auto cfg2 = make_cfg(Variant::FedProx, 0.1, 2);
    cfg2.prox_mu = 1.0;
    auto r = fedprox_local(Vec{1.0}, *det, cfg2, key);
    CHECK(r.delta_y[0] == doctest::Approx(0.82 - 1.0));
}

TEST_CASE("large-batch sgd") {
    const auto obj = identity_quadratic(1);
    auto r = sgd_local(Vec{2.0}, *obj, make_cfg(Variant::LargeBatchSgd, 0.25, 1),
                       StreamKey{1, 1, 0});
    CHECK(r.delta_y[0] == doctest::Approx(-0.5));
    CHECK(r.grad_evals == 1);

    // On full-batch objectives sgd equals a K=1 fedavg step.
    const auto pair = make_lower_bound_clients(1.0, 2.0);
    const StreamKey key{9, 2, 0};
    CHECK(sgd_local(Vec{1.5}, *pair[0], make_cfg(Variant::LargeBatchSgd, 0.1, 5), key).delta_y ==
          fedavg_local(Vec{1.5}, *pair[0], make_cfg(Variant::FedAvg, 0.1, 1), key).delta_y);

    // With an additive-noise oracle the K draws are averaged.
    const auto noisy = identity_quadratic(1, 4.0);
    auto rn = sgd_local(Vec{0.0}, *noisy, make_cfg(Variant::LargeBatchSgd, 1.0, 8), key);
    CHECK(rn.grad_evals == 8);
}

TEST_CASE("scaffold-theory: identical clients reduce to fedavg") {
    const auto obj = identity_quadratic(2, 0.3);
    // N = 2 identical clients: the family mean gradient equals each client's.
    ObjectiveFamily family;
    family.clients = {obj, obj};
    const Vec x{0.4, -0.9};
    const Vec global_grad = family.gradient(x);
    const StreamKey key{13, 6, 1};
    auto rt = scaffold_theory_local(x, *obj, global_grad, make_cfg(Variant::ScaffoldTheory, 0.1, 5),
                                    key);
    auto rf = fedavg_local(x, *obj, make_cfg(Variant::FedAvg, 0.1, 5), key);
    CHECK(rt.delta_y == rf.delta_y);
}

TEST_CASE("scaffold-theory one-step expansion on d=1 quadratics") {
    // y1 = y0 - eta*A(y0 - x_star) - eta*(A_i - A)(y0 - x) with y0 = x.
    const auto clients = make_quadratic_ensemble(2, 1, 1.0, 10.0, 0);
    const ObjectiveFamily family = quadratic_family(clients);
    const double x_star = (*family.x_star)[0];
    const double mean_A = 1.0;
    const Vec x{2.0};
    const Vec global_grad = family.gradient(x);
    for (int i = 0; i < 2; ++i) {
        const double Ai = clients[static_cast<std::size_t>(i)]->hessian()(0, 0);
        const double eta = 0.05;
        auto r = scaffold_theory_local(x, *clients[static_cast<std::size_t>(i)], global_grad,
                                       make_cfg(Variant::ScaffoldTheory, eta, 1),
                                       StreamKey{1, 1, i});
        const double expected =
            x[0] - eta * mean_A * (x[0] - x_star) - eta * (Ai - mean_A) * (x[0] - x[0]);
        CHECK(x[0] + r.delta_y[0] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("scaffold-theory: delta=0 ensemble moves every client identically") {
    const auto clients = make_quadratic_ensemble(4, 3, 0.0, 5.0, 21);
    const ObjectiveFamily family = quadratic_family(clients);
    const Vec x = constant(3, 1.0);
    const Vec global_grad = family.gradient(x);
    auto cfg = make_cfg(Variant::ScaffoldTheory, 0.1, 4);
    Vec first;
    for (int i = 0; i < 4; ++i) {
        auto r = scaffold_theory_local(x, *clients[static_cast<std::size_t>(i)], global_grad, cfg,
                                       StreamKey{1, 1, i});
        if (i == 0) first = r.delta_y;
        else CHECK(norm(sub(r.delta_y, first)) < 1e-12);
    }
}

TEST_CASE("server aggregation") {
    AlgorithmConfig cfg = make_cfg(Variant::ScaffoldII, 0.1, 1, 0.5);
    ServerState server{Vec{1.0}, Vec{0.0}, 3};

    // S = N = 1: x' = x + eta_g * dy.
    LocalRunResult r0;
    r0.client_id = 0;
    r0.delta_y = Vec{-0.4};
    r0.delta_c = Vec{0.0};
    auto next = server_aggregate(server, {r0}, {0}, 1, cfg);
    CHECK(next.model[0] == doctest::Approx(1.0 - 0.5 * 0.4));
    CHECK(next.control[0] == doctest::Approx(0.0));
    CHECK(next.round == 4);

    // N=2, S=1, delta_c = 2 with c = 0: c' = (1/N)*2 = 1.
    LocalRunResult r1;
    r1.client_id = 0;
    r1.delta_y = Vec{0.0};
    r1.delta_c = Vec{2.0};
    CHECK(server_aggregate(server, {r1}, {0}, 2, cfg).control[0] == doctest::Approx(1.0));

    // Result order does not matter: reduction is ascending-id.
    LocalRunResult a, b;
    a.client_id = 2;
    a.delta_y = Vec{0.25};
    a.delta_c = Vec{0.125};
    b.client_id = 5;
    b.delta_y = Vec{-1.0};
    b.delta_c = Vec{0.5};
    auto ab = server_aggregate(server, {a, b}, {2, 5}, 8, cfg);
    auto ba = server_aggregate(server, {b, a}, {5, 2}, 8, cfg);
    CHECK(ab.model == ba.model);
    CHECK(ab.control == ba.control);

    CHECK_THROWS_AS(server_aggregate(server, {a, a}, {2, 2}, 8, cfg), ProtocolError);
    CHECK_THROWS_AS(server_aggregate(server, {}, {}, 8, cfg), ProtocolError);
    LocalRunResult stranger = a;
    stranger.client_id = 7;
    CHECK_THROWS_AS(server_aggregate(server, {a, stranger}, {2, 5}, 8, cfg), ProtocolError);
}

TEST_CASE("divergence raises a located error") {
    const auto obj = identity_quadratic(1);
    // eta = 3 on grad f(y) = y: |y| grows by 2x per step and overflows.
    auto cfg = make_cfg(Variant::FedAvg, 3.0, 4000);
    try {
        fedavg_local(Vec{1.0}, *obj, cfg, StreamKey{1, 12, 3});
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.round == 12);
        CHECK(e.client == 3);
        CHECK(e.step > 0);
    }
}

TEST_CASE("config validation") {
    AlgorithmConfig cfg;
    cfg.local_lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.local_lr = 0.1;
    cfg.local_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.local_steps = 1;
    cfg.global_lr = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.global_lr = 1.0;
    CHECK_NOTHROW(cfg.validate());

    CHECK(parse_variant(variant_name(Variant::ScaffoldTheory)) == Variant::ScaffoldTheory);
    CHECK_THROWS_AS(parse_variant("nope"), ParameterError);
    CHECK(parse_control_init("warm_start") == ControlInit::WarmStart);
}
