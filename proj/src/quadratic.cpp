#include "fedsim/quadratic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "fedsim/errors.hpp"

namespace fedsim {

Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) {
    return Vec(v.data(), v.data() + v.size());
}

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd A, Vec b, double c, double sigma_sq)
    : A_(std::move(A)), b_(to_eigen(b)), c_(c), sigma_sq_(sigma_sq) {
    if (A_.rows() != A_.cols()) throw ParameterError("QuadraticObjective: A must be square");
    if (A_.rows() != b_.size()) throw DimensionError("QuadraticObjective: A and b disagree");
    if (sigma_sq < 0.0) throw ParameterError("QuadraticObjective: sigma_sq must be >= 0");
    const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw ParameterError("QuadraticObjective: A must be symmetric");
    }
    A_ = ((A_ + A_.transpose()) / 2.0).eval();
}

QuadraticObjective QuadraticObjective::from_center(const Eigen::MatrixXd& A, const Vec& center,
                                                   double offset, double sigma_sq) {
    const Eigen::VectorXd mu = to_eigen(center);
    // 1/2 (x-m)'A(x-m) + off = 1/2 x'Ax - (Am)'x + 1/2 m'Am + off
    Vec b = from_eigen((-A * mu).eval());
    const double c = 0.5 * mu.dot(A * mu) + offset;
    return QuadraticObjective(A, b, c, sigma_sq);
}

double QuadraticObjective::value(const Vec& x) const {
    const Eigen::VectorXd xv = to_eigen(x);
    if (xv.size() != b_.size()) throw DimensionError("QuadraticObjective::value");
    return 0.5 * xv.dot(A_ * xv) + b_.dot(xv) + c_;
}

Vec QuadraticObjective::exact_gradient(const Vec& x) const {
    const Eigen::VectorXd xv = to_eigen(x);
    if (xv.size() != b_.size()) throw DimensionError("QuadraticObjective::exact_gradient");
    return from_eigen((A_ * xv + b_).eval());
}

std::vector<std::shared_ptr<const Objective>> make_lower_bound_clients(double mu, double G,
                                                                       double sigma_sq) {
    if (mu <= 0.0) throw ParameterError("make_lower_bound_clients: mu must be positive");
    if (G <= 0.0) throw ParameterError("make_lower_bound_clients: G must be positive");
    Eigen::MatrixXd A1(1, 1), A2(1, 1);
    A1 << 2.0 * mu;  // f1 = mu x^2 + G x
    A2 << 0.0;       // f2 = -G x
    std::vector<std::shared_ptr<const Objective>> clients;
    clients.push_back(std::make_shared<QuadraticObjective>(A1, Vec{G}, 0.0, sigma_sq));
    clients.push_back(std::make_shared<QuadraticObjective>(A2, Vec{-G}, 0.0, sigma_sq));
    return clients;
}

namespace {

// Random orthogonal matrix from the QR factorization of a Gaussian matrix,
// with the sign convention fixed so the result is deterministic.
Eigen::MatrixXd random_orthogonal(int dim, CounterRng& rng) {
    Eigen::MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) M(i, j) = rng.next_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    }
    return Q;
}

Eigen::VectorXd random_unit(int dim, CounterRng& rng) {
    Eigen::VectorXd v(dim);
    double n = 0.0;
    while (n < 1e-12) {
        for (int i = 0; i < dim; ++i) v(i) = rng.next_gaussian();
        n = v.norm();
    }
    return v / n;
}

}  // namespace

std::vector<std::shared_ptr<const Objective>> make_quadratic_ensemble(
    int num_clients, int dim, double delta_target, double G_target, std::uint64_t seed,
    const EnsembleOptions& opts) {
    if (num_clients < 2) throw ParameterError("make_quadratic_ensemble: need N >= 2");
    if (dim < 1) throw ParameterError("make_quadratic_ensemble: need d >= 1");
    if (delta_target < 0.0 || G_target < 0.0)
        throw ParameterError("make_quadratic_ensemble: delta and G must be >= 0");
    if (delta_target > 2.0)
        throw ParameterError("make_quadratic_ensemble: delta_target > 2*beta is infeasible");
    if (opts.mu_min <= 0.0 || opts.mu_min > 1.0)
        throw ParameterError("make_quadratic_ensemble: mu_min must lie in (0, 1]");

    CounterRng rng = make_stream(seed, 0, 0, 0, RngLane::DataGen);

    // Mean Hessian: spectrum log-spaced in [mu_min, 1], random eigenbasis.
    Eigen::VectorXd lambda(dim);
    if (dim == 1) {
        lambda(0) = 1.0;
    } else {
        for (int j = 0; j < dim; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(dim - 1);
            lambda(j) = std::exp((1.0 - t) * std::log(1.0) + t * std::log(opts.mu_min));
        }
    }
    const Eigen::MatrixXd Q =
        dim == 1 ? Eigen::MatrixXd::Identity(1, 1) : random_orthogonal(dim, rng);
    Eigen::MatrixXd A = Q * lambda.asDiagonal() * Q.transpose();
    A = ((A + A.transpose()) / 2.0).eval();

    // Rank-one Hessian perturbations along the top eigendirection (where the
    // mean eigenvalue is 1, so A_i stays PSD for delta <= 1). Paired signs
    // keep the mean Hessian exactly A.
    const Eigen::VectorXd u = Q.col(0);
    const Eigen::MatrixXd bump = delta_target * (u * u.transpose());

    // Paired linear terms hit the gradient-dissimilarity target exactly at
    // the optimum x* = 0. An odd client count leaves one client unperturbed
    // and rescales the rest to preserve the mean square.
    const int pairs = num_clients / 2;
    const double g_mag =
        (num_clients % 2 == 0 || G_target == 0.0)
            ? G_target
            : G_target * std::sqrt(static_cast<double>(num_clients) /
                                   static_cast<double>(num_clients - 1));

    std::vector<std::shared_ptr<const Objective>> clients;
    clients.reserve(static_cast<std::size_t>(num_clients));
    for (int p = 0; p < pairs; ++p) {
        const Eigen::VectorXd w = dim == 1 ? Eigen::VectorXd::Ones(1) : random_unit(dim, rng);
        const Vec b_plus = from_eigen((g_mag * w).eval());
        const Vec b_minus = from_eigen((-g_mag * w).eval());
        clients.push_back(std::make_shared<QuadraticObjective>((A + bump).eval(), b_plus, 0.0,
                                                               opts.sigma_sq));
        clients.push_back(std::make_shared<QuadraticObjective>((A - bump).eval(), b_minus, 0.0,
                                                               opts.sigma_sq));
    }
    if (num_clients % 2 == 1) {
        clients.push_back(
            std::make_shared<QuadraticObjective>(A, zeros(static_cast<std::size_t>(dim)), 0.0,
                                                 opts.sigma_sq));
    }
    return clients;
}

ObjectiveFamily quadratic_family(std::vector<std::shared_ptr<const Objective>> clients) {
    if (clients.empty()) throw ParameterError("quadratic_family: no clients");
    const auto d = static_cast<Eigen::Index>(clients.front()->dim());
    Eigen::MatrixXd mean_A = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd mean_b = Eigen::VectorXd::Zero(d);
    const Vec origin = zeros(static_cast<std::size_t>(d));
    for (const auto& c : clients) {
        if (!c->has_hessian()) throw UnsupportedError("quadratic_family: client has no Hessian");
        mean_A += c->hessian();
        mean_b += to_eigen(c->exact_gradient(origin));
    }
    const double n = static_cast<double>(clients.size());
    mean_A /= n;
    mean_b /= n;

    Eigen::LDLT<Eigen::MatrixXd> solver(mean_A);
    if (solver.info() != Eigen::Success || !solver.isPositive()) {
        throw ParameterError("quadratic_family: mean Hessian is not positive definite");
    }
    ObjectiveFamily family;
    family.clients = std::move(clients);
    family.x_star = from_eigen((solver.solve(-mean_b)).eval());
    family.f_star = family.value(*family.x_star);
    return family;
}

}  // namespace fedsim
