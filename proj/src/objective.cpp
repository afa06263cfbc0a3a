#include "fedsim/objective.hpp"

#include <cmath>
#include <limits>

#include "fedsim/errors.hpp"

namespace fedsim {

Vec Objective::sample_gradient(const Vec& x, CounterRng& rng) const {
    Vec g = exact_gradient(x);
    const double sigma_sq = noise_bound();
    if (sigma_sq == 0.0) return g;
    // Per-coordinate variance sigma^2/d gives E||noise||^2 = sigma^2.
    const double per_coord_sd = std::sqrt(sigma_sq / static_cast<double>(g.size()));
    for (double& gi : g) gi += per_coord_sd * rng.next_gaussian();
    return g;
}

Eigen::MatrixXd Objective::hessian() const {
    throw UnsupportedError("objective does not expose a Hessian");
}

GradientSample noisy_gradient(const Objective& obj, const Vec& x, CounterRng& stream) {
    if (x.size() != obj.dim()) throw DimensionError("noisy_gradient: point has wrong dimension");
    GradientSample sample{obj.sample_gradient(x, stream), obj.noise_bound()};
    ensure_finite(sample.gradient, "noisy_gradient");
    return sample;
}

std::size_t ObjectiveFamily::dim() const {
    if (clients.empty()) throw ParameterError("ObjectiveFamily: no clients");
    return clients.front()->dim();
}

double ObjectiveFamily::value(const Vec& x) const {
    if (clients.empty()) throw ParameterError("ObjectiveFamily: no clients");
    double total = 0.0;
    for (const auto& c : clients) total += c->value(x);
    return total / static_cast<double>(clients.size());
}

Vec ObjectiveFamily::gradient(const Vec& x) const {
    if (clients.empty()) throw ParameterError("ObjectiveFamily: no clients");
    Vec g = zeros(x.size());
    for (const auto& c : clients) axpy_inplace(1.0, c->exact_gradient(x), g);
    return scaled(1.0 / static_cast<double>(clients.size()), g);
}

double ObjectiveFamily::suboptimality(const Vec& x) const {
    if (!f_star) return std::numeric_limits<double>::quiet_NaN();
    return value(x) - *f_star;
}

}  // namespace fedsim
