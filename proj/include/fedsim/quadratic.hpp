#pragma once

// Quadratic client families: the general form f(x) = 1/2 x'Ax + b'x + c
// covers both strongly convex clients and the degenerate linear client of
// the lower-bound pair (A = 0).

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "fedsim/objective.hpp"

namespace fedsim {

Eigen::VectorXd to_eigen(const Vec& v);
Vec from_eigen(const Eigen::VectorXd& v);

class QuadraticObjective : public Objective {
public:
    /// f(x) = 1/2 x'Ax + b'x + c. A must be symmetric (enforced exactly by
    /// symmetrizing after a tolerance check).
    QuadraticObjective(Eigen::MatrixXd A, Vec b, double c, double sigma_sq = 0.0);

    /// f(x) = 1/2 (x-center)'A(x-center) + offset.
    static QuadraticObjective from_center(const Eigen::MatrixXd& A, const Vec& center,
                                          double offset, double sigma_sq = 0.0);

    std::size_t dim() const override { return static_cast<std::size_t>(b_.size()); }
    double value(const Vec& x) const override;
    Vec exact_gradient(const Vec& x) const override;
    double noise_bound() const override { return sigma_sq_; }
    bool has_hessian() const override { return true; }
    Eigen::MatrixXd hessian() const override { return A_; }

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    double c_ = 0.0;
    double sigma_sq_ = 0.0;
};

/// The one-dimensional pair f1(x) = mu x^2 + G x and f2(x) = -G x whose
/// average is (mu/2) x^2 with optimum at 0.
std::vector<std::shared_ptr<const Objective>> make_lower_bound_clients(double mu, double G,
                                                                       double sigma_sq = 0.0);

struct EnsembleOptions {
    double mu_min = 0.1;    // smallest eigenvalue of the mean Hessian
    double sigma_sq = 0.0;  // additive gradient-noise bound per client
};

/// N quadratic clients whose mean Hessian A has spectral norm 1, with
/// max_i ||A_i - A|| = delta_target (rank-one pair perturbations along the
/// top eigendirection) and (1/N) sum ||grad f_i(x*)||^2 = G_target^2 at the
/// global optimum x* = 0 (paired center offsets).
std::vector<std::shared_ptr<const Objective>> make_quadratic_ensemble(
    int num_clients, int dim, double delta_target, double G_target, std::uint64_t seed,
    const EnsembleOptions& opts = {});

/// Family wrapper that solves for the analytic optimum of the average
/// objective. Requires a positive-definite mean Hessian.
ObjectiveFamily quadratic_family(std::vector<std::shared_ptr<const Objective>> clients);

}  // namespace fedsim
